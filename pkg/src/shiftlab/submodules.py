"""Submodules of a weighted module from monomial or polynomial generators.

For homogeneous generators the submodule splits degree by degree; each slice
carries an orthonormal basis of the intersection with the homogeneous
polynomials of that degree, plus the complementary orthonormal set.  All
vectors are stored in the orthonormal monomial coordinates (z^alpha scaled by
1/lambda_alpha), so projections and restrictions are plain matrix algebra.
"""

from dataclasses import dataclass
import enum

import numpy as np

from .polynomials import PolynomialGenerator, monomial_generator
from .shift_operators import SubspaceFrame
from .weight_models import WeightSet

DEFAULT_RANK_TOL = 1e-10


class Side(enum.Enum):
    SUBMODULE = "submodule"
    COMPLEMENT = "complement"


class RankCollapseError(ValueError):
    """Spanning vectors are numerically dependent beyond the rank tolerance."""

    def __init__(self, message, condition_number):
        self.condition_number = condition_number
        super().__init__(f"{message} (condition number {condition_number:.3e})")


@dataclass(frozen=True)
class SubmoduleBasis:
    """Orthonormal bases of a submodule S and its orthocomplement.

    graded: True when the construction is degreewise (monomial/homogeneous
    generators), in which case col_degrees label each column with its degree.
    """

    weights: WeightSet
    sub: SubspaceFrame
    comp: SubspaceFrame
    graded: bool
    rank_tolerance: float = DEFAULT_RANK_TOL

    @property
    def basis(self):
        return self.weights.basis

    def frame(self, side: Side) -> SubspaceFrame:
        return self.sub if side is Side.SUBMODULE else self.comp

    def dim_in_degree(self, n: int, side: Side = Side.SUBMODULE) -> int:
        if not self.graded:
            raise ValueError("submodule is not graded; per-degree dimensions undefined")
        f = self.frame(side)
        return int(np.count_nonzero(np.asarray(f.col_degrees) == n))


def projection_matrix(S: SubmoduleBasis, side: Side) -> np.ndarray:
    """Orthogonal projection onto the requested side, on the full basis."""
    F = S.frame(side).columns
    return F @ F.conj().T


def _normalize_monomial_generators(generators, num_vars):
    out = []
    for g in generators:
        if isinstance(g, PolynomialGenerator):
            if len(g.terms) != 1:
                raise ValueError("monomial_submodule requires single-term generators")
            alpha, c, _ = g.terms[0]
            out.append((tuple(alpha), c))
        elif isinstance(g, tuple) and len(g) == 2 and isinstance(g[1], int) \
                and not isinstance(g[0], int):
            out.append((tuple(int(a) for a in g[0]), g[1]))
        else:
            out.append((tuple(int(a) for a in g), 0))
    for alpha, _ in out:
        if len(alpha) != num_vars:
            raise ValueError(f"generator {alpha} has wrong number of exponents")
    return out


def monomial_submodule(w: WeightSet, generators) -> SubmoduleBasis:
    """Submodule generated by monomials: spanned by all componentwise multiples."""
    b = w.basis
    gens = _normalize_monomial_generators(generators, b.num_vars)
    if not gens:
        raise ValueError("empty generator list")
    member = np.zeros(b.dimension, dtype=bool)
    for j in range(b.dimension):
        beta = b.exponents[j]
        c = int(b.components[j])
        for alpha, gc in gens:
            if gc == c and all(int(beta[t]) >= alpha[t] for t in range(b.num_vars)):
                member[j] = True
                break
    sub_idx = np.nonzero(member)[0]
    comp_idx = np.nonzero(~member)[0]
    eye = np.eye(b.dimension)
    degs = np.asarray(b.degrees)
    sub = SubspaceFrame(eye[:, sub_idx], degs[sub_idx], graded=True)
    comp = SubspaceFrame(eye[:, comp_idx], degs[comp_idx], graded=True)
    return SubmoduleBasis(w, sub, comp, graded=True)


def _orthonormalize(columns: np.ndarray, rank_tol: float):
    """SVD orthonormalization with a relative rank decision.

    Returns (orthonormal basis of the column span, orthonormal basis of the
    complement within the ambient coordinate space).
    """
    dim = columns.shape[0]
    if columns.shape[1] == 0:
        return np.zeros((dim, 0)), np.eye(dim)
    U, s, _ = np.linalg.svd(columns, full_matrices=True)
    rank = int(np.count_nonzero(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    return U[:, :rank], U[:, rank:]


def homogeneous_submodule(w: WeightSet, generators,
                          rank_tol: float = DEFAULT_RANK_TOL) -> SubmoduleBasis:
    """Submodule generated by homogeneous polynomials, built degree by degree.

    Degree-n slice: orthonormalize { z^q * g : deg g + |q| = n } in the
    lambda-weighted inner product and complete to the full slice.
    """
    b = w.basis
    generators = list(generators)
    if not generators:
        raise ValueError("empty generator list")
    for t, g in enumerate(generators):
        if not g.is_homogeneous:
            raise ValueError(f"generator #{t} is not homogeneous")
        if g.num_vars != b.num_vars:
            raise ValueError(f"generator #{t} has {g.num_vars} variables, basis has {b.num_vars}")
    lam = w.lam

    from .graded_basis import _compositions
    sub_cols, sub_degs, comp_cols, comp_degs = [], [], [], []
    for n in range(b.max_degree + 1):
        sl = b.degree_slice(n)
        span = []
        for g in generators:
            d = g.homogeneous_degree
            if d > n:
                continue
            for q in _compositions(n - d, b.num_vars):
                v = np.zeros(b.dimension)
                for alpha, c, coef in g.terms:
                    beta = tuple(alpha[t] + q[t] for t in range(b.num_vars))
                    jj = b.index_of(beta, c)
                    # coefficient coordinates scaled by lambda = orthonormal coords
                    v[jj] += np.real(coef) * lam[jj]
                span.append(v[sl.start:sl.stop])
        block = np.column_stack(span) if span else np.zeros((len(sl), 0))
        on, on_comp = _orthonormalize(block, rank_tol)
        for src, cols, degs in ((on, sub_cols, sub_degs), (on_comp, comp_cols, comp_degs)):
            for t in range(src.shape[1]):
                full = np.zeros(b.dimension)
                full[sl.start:sl.stop] = src[:, t]
                cols.append(full)
                degs.append(n)

    def pack(cols, degs):
        M = np.column_stack(cols) if cols else np.zeros((b.dimension, 0))
        return SubspaceFrame(M, np.asarray(degs, dtype=np.int64), graded=True)

    return SubmoduleBasis(w, pack(sub_cols, sub_degs), pack(comp_cols, comp_degs),
                          graded=True, rank_tolerance=rank_tol)


def _kernel_columns(w: WeightSet, points, components):
    """Truncated evaluation vectors in orthonormal coordinates: conj(z)^beta / lambda_beta."""
    b = w.basis
    lam = w.lam
    cols = []
    for z in points:
        z = tuple(complex(c) for c in z)
        if len(z) != b.num_vars:
            raise ValueError(f"point {z} has wrong dimension, expected {b.num_vars}")
        if sum(abs(c) ** 2 for c in z) >= 1.0:
            raise ValueError(f"point {z} is not inside the open unit ball")
        for comp in components:
            v = np.zeros(b.dimension, dtype=complex)
            for j in range(b.dimension):
                if int(b.components[j]) != comp:
                    continue
                mono = 1.0 + 0.0j
                for t in range(b.num_vars):
                    mono *= np.conj(z[t]) ** int(b.exponents[j][t])
                v[j] = mono / lam[j]
            cols.append(v / np.linalg.norm(v))
    return np.column_stack(cols)


def span_of_point_evaluations(w: WeightSet, points,
                              rank_tol: float = DEFAULT_RANK_TOL) -> SubmoduleBasis:
    """Complement-first construction: S-perp = span of kernel vectors at the points.

    The result is generally not graded: both frames are single ungraded blocks
    and invariance checks fall back to full-window residuals.
    """
    b = w.basis
    if b.num_vars not in (1, 2):
        raise ValueError("span_of_point_evaluations supports m in {1, 2}")
    points = list(points)
    if not points:
        raise ValueError("empty point list")
    if len(points) * b.multiplicity > b.dimension:
        raise ValueError("more evaluation vectors than basis dimension")
    K = _kernel_columns(w, points, range(b.multiplicity))

    U, s, _ = np.linalg.svd(K, full_matrices=True)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else np.inf
    if s[-1] <= rank_tol * s[0]:
        raise RankCollapseError("nearly coincident evaluation points", cond)
    r = K.shape[1]
    zeros = lambda t: np.zeros(t, dtype=np.int64)
    comp = SubspaceFrame(U[:, :r], zeros(r), graded=False)
    sub = SubspaceFrame(U[:, r:], zeros(b.dimension - r), graded=False)
    return SubmoduleBasis(w, sub, comp, graded=False, rank_tolerance=rank_tol)


def ungraded_submodule(w: WeightSet, generators,
                       rank_tol: float = DEFAULT_RANK_TOL) -> SubmoduleBasis:
    """Degreewise closure of { z^q * g : |q| + deg g <= N } for arbitrary generators.

    Used for non-homogeneous ideals; no graded decomposition is claimed.
    """
    b = w.basis
    generators = list(generators)
    if not generators:
        raise ValueError("empty generator list")
    lam = w.lam
    from .graded_basis import _compositions
    span = []
    for g in generators:
        d = g.max_degree
        for budget in range(b.max_degree - d + 1):
            for q in _compositions(budget, b.num_vars):
                v = np.zeros(b.dimension, dtype=complex)
                for alpha, c, coef in g.terms:
                    beta = tuple(alpha[t] + q[t] for t in range(b.num_vars))
                    jj = b.index_of(beta, c)
                    v[jj] += coef * lam[jj]
                span.append(v)
    M = np.column_stack(span)
    on, on_comp = _orthonormalize(M, rank_tol)
    zeros = lambda t: np.zeros(t, dtype=np.int64)
    sub = SubspaceFrame(on, zeros(on.shape[1]), graded=False)
    comp = SubspaceFrame(on_comp, zeros(on_comp.shape[1]), graded=False)
    return SubmoduleBasis(w, sub, comp, graded=False, rank_tolerance=rank_tol)
