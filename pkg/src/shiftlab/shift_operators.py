"""Finite truncations of module operators and their algebra.

Every operator carries an interior degree W: matrix entries whose row and
column degrees are both <= W agree exactly with the corresponding entries of
the untruncated operator.  Coordinate shifts raise degree by exactly 1, so
each multiplication eats a bounded strip at the truncation boundary; the
bookkeeping here tracks that strip so norms and traces can be computed on
uncontaminated sub-blocks only.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graded_basis import GradedBasis
from .weight_models import WeightSet

SELF_ADJOINT_TOL = 1e-12
PROJECTION_TOL = 1e-12
INVARIANCE_TOL = 1e-10
PSD_TOL = 1e-10


class InvarianceError(ValueError):
    """A subspace claimed invariant fails the invariance residual check."""

    def __init__(self, residual, tol):
        self.residual = residual
        self.tol = tol
        super().__init__(f"invariance residual {residual:.3e} exceeds tolerance {tol:.1e}")


@dataclass(frozen=True)
class RestrictedSpace:
    """Coordinate space obtained by restriction or direct sum.

    degrees labels each coordinate with the ambient degree it came from;
    for ungraded subspaces (e.g. spans of kernel vectors) the labels are
    meaningless and graded is False, making the interior window the full space.
    """

    dimension: int
    degrees: np.ndarray = field(compare=False)
    max_degree: int
    graded: bool = True


def space_dims(space):
    return space.dimension


def is_graded(space) -> bool:
    return getattr(space, "graded", True)


@dataclass(frozen=True)
class SubspaceFrame:
    """Orthonormal columns spanning a subspace, with per-column degree labels."""

    columns: np.ndarray           # (ambient_dim, r), orthonormal
    col_degrees: np.ndarray       # (r,) int labels
    graded: bool = True

    @property
    def rank(self) -> int:
        return self.columns.shape[1]

    def to_space(self, ambient_max_degree: int) -> RestrictedSpace:
        return RestrictedSpace(dimension=self.rank,
                               degrees=np.asarray(self.col_degrees),
                               max_degree=ambient_max_degree,
                               graded=self.graded)


@dataclass(frozen=True)
class TruncatedOperator:
    """Sparse finite section of a module operator.

    interior_degree W: entries with row and column degree <= W are exact.
    degree_raise r: in the infinite picture the operator maps degree d into
    degrees <= d + r (shift: +1, shift adjoint: -1).
    """

    space: object                 # GradedBasis or RestrictedSpace
    mat: sp.spmatrix = field(compare=False)
    interior_degree: int
    degree_raise: int = 0

    def __post_init__(self):
        n = self.space.dimension
        if self.mat.shape != (n, n):
            raise ValueError(f"matrix shape {self.mat.shape} does not match space dimension {n}")

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def window_indices(self, max_window_degree=None) -> np.ndarray:
        """Ordinals inside the interior window (degree <= W, optionally tighter)."""
        if not is_graded(self.space):
            return np.arange(self.dimension)
        w = self.interior_degree
        if max_window_degree is not None:
            w = min(w, max_window_degree)
        return np.nonzero(np.asarray(self.space.degrees) <= w)[0]

    def dense(self) -> np.ndarray:
        return self.mat.toarray()

    def windowed_dense(self, max_window_degree=None) -> np.ndarray:
        idx = self.window_indices(max_window_degree)
        return self.mat.tocsr()[np.ix_(idx, idx)].toarray()

    def to_coo_text(self) -> str:
        """Coordinate-list text export: `row col value` per line."""
        coo = self.mat.tocoo()
        order = np.lexsort((coo.col, coo.row))
        lines = [f"# {self.mat.shape[0]} x {self.mat.shape[1]}, "
                 f"interior_degree={self.interior_degree}"]
        for t in order:
            lines.append(f"{coo.row[t]} {coo.col[t]} {coo.data[t]!r}")
        return "\n".join(lines) + "\n"


def _same_space(a: TruncatedOperator, b: TruncatedOperator):
    sa, sb = a.space, b.space
    ok = sa is sb or sa == sb
    if not ok:
        raise ValueError("operators live on different spaces")


def _norm_scale(T: TruncatedOperator) -> float:
    """Cheap upper bound on the operator norm: sqrt(||.||_1 * ||.||_inf)."""
    A = abs(T.mat)
    col = A.sum(axis=0).max()
    row = A.sum(axis=1).max()
    return float(np.sqrt(float(col) * float(row))) or 1.0


def coordinate_shift(w: WeightSet, i: int) -> TruncatedOperator:
    """Truncated multiplication by z_i on the weight set's basis.

    Columns at the top degree are zero: z_i maps them out of the truncation.
    """
    b = w.basis
    m = b.num_vars
    if not 1 <= i <= m:
        raise ValueError(f"coordinate index {i} out of range [1, {m}]")
    rows, cols, vals = [], [], []
    logl = w.log_lambda
    for j in range(b.dimension):
        if b.degrees[j] >= b.max_degree:
            continue
        alpha = tuple(int(a) for a in b.exponents[j])
        c = int(b.components[j])
        target = alpha[:i - 1] + (alpha[i - 1] + 1,) + alpha[i:]
        t = b.index_of(target, c)
        rows.append(t)
        cols.append(j)
        vals.append(np.exp(logl[t] - logl[j]))
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(b.dimension, b.dimension))
    return TruncatedOperator(b, mat, interior_degree=b.max_degree - 1, degree_raise=1)


def adjoint(T: TruncatedOperator) -> TruncatedOperator:
    return TruncatedOperator(T.space, T.mat.conj().T.tocsr(),
                             interior_degree=T.interior_degree,
                             degree_raise=-T.degree_raise)


def multiply(A: TruncatedOperator, B: TruncatedOperator) -> TruncatedOperator:
    _same_space(A, B)
    interior = min(A.interior_degree, B.interior_degree) \
        - max(A.degree_raise, B.degree_raise, 0)
    return TruncatedOperator(A.space, (A.mat @ B.mat).tocsr(),
                             interior_degree=interior,
                             degree_raise=A.degree_raise + B.degree_raise)


def add(A: TruncatedOperator, B: TruncatedOperator) -> TruncatedOperator:
    _same_space(A, B)
    return TruncatedOperator(A.space, (A.mat + B.mat).tocsr(),
                             interior_degree=min(A.interior_degree, B.interior_degree),
                             degree_raise=max(A.degree_raise, B.degree_raise))


def subtract(A: TruncatedOperator, B: TruncatedOperator) -> TruncatedOperator:
    return add(A, scale(B, -1.0))


def scale(T: TruncatedOperator, c) -> TruncatedOperator:
    return TruncatedOperator(T.space, (T.mat * c).tocsr(),
                             interior_degree=T.interior_degree,
                             degree_raise=T.degree_raise)


def self_commutator(T: TruncatedOperator) -> TruncatedOperator:
    """[T*, T] = T*T - TT*."""
    Ts = adjoint(T)
    return subtract(multiply(Ts, T), multiply(T, Ts))


def cross_commutator(w: WeightSet, i: int, j: int) -> TruncatedOperator:
    """[Z_i*, Z_j] on the weight set's basis."""
    Zi = coordinate_shift(w, i)
    Zj = coordinate_shift(w, j)
    Zis = adjoint(Zi)
    return subtract(multiply(Zis, Zj), multiply(Zj, Zis))


def _check_projection(P: np.ndarray, tol: float = PROJECTION_TOL):
    P = np.asarray(P)
    scale_ = max(1.0, float(np.abs(P).max(initial=0.0)))
    if np.abs(P - P.conj().T).max(initial=0.0) > tol * scale_:
        raise ValueError("projection matrix is not self-adjoint to tolerance")
    if np.abs(P @ P - P).max(initial=0.0) > tol * max(1.0, scale_ ** 2):
        raise ValueError("projection matrix is not idempotent to tolerance")
    return P


def compress(T: TruncatedOperator, P: np.ndarray) -> TruncatedOperator:
    """P T P on the full space; P must be an orthogonal projection."""
    P = _check_projection(P)
    mat = sp.csr_matrix(P @ T.mat.toarray() @ P)
    return TruncatedOperator(T.space, mat,
                             interior_degree=T.interior_degree,
                             degree_raise=T.degree_raise)


def invariance_residual(T: TruncatedOperator, columns: np.ndarray) -> float:
    """Relative norm of (I - QQ*) T Q on the interior rows, Q = given frame."""
    Y = T.mat @ columns
    resid = Y - columns @ (columns.conj().T @ Y)
    if is_graded(T.space):
        keep = np.asarray(T.space.degrees) <= T.interior_degree
        resid = resid[keep]
    if resid.size == 0:
        return 0.0
    return float(np.linalg.norm(resid, 2)) / _norm_scale(T)


def restrict_to_invariant(T: TruncatedOperator, frame: SubspaceFrame,
                          tol: float = INVARIANCE_TOL) -> TruncatedOperator:
    """Express T on an invariant subspace in the frame's orthonormal basis."""
    resid = invariance_residual(T, frame.columns)
    if resid > tol:
        raise InvarianceError(resid, tol)
    R = frame.columns.conj().T @ (T.mat @ frame.columns)
    space = frame.to_space(T.space.max_degree)
    return TruncatedOperator(space, sp.csr_matrix(R),
                             interior_degree=T.interior_degree,
                             degree_raise=T.degree_raise)


def compress_to_frame(T: TruncatedOperator, frame: SubspaceFrame) -> TruncatedOperator:
    """Q* T Q in the frame's basis, with no invariance requirement.

    This is the semi-invariant (quotient-module) action; use
    restrict_to_invariant when invariance is part of the contract.
    """
    R = frame.columns.conj().T @ (T.mat @ frame.columns)
    space = frame.to_space(T.space.max_degree)
    return TruncatedOperator(space, sp.csr_matrix(R),
                             interior_degree=T.interior_degree,
                             degree_raise=T.degree_raise)


@dataclass(frozen=True)
class BlockDecomposition:
    """The two summands of the restricted self-commutator identity.

    diagonal_part = Q [T*,T] Q, corner_part = Q T Qperp T* Q; both live on the
    ambient space and are supported on range(Q).
    """

    diagonal_part: TruncatedOperator
    corner_part: TruncatedOperator
    projection: np.ndarray


def restricted_commutator_decomposition(T: TruncatedOperator, Q: np.ndarray,
                         tol: float = INVARIANCE_TOL) -> BlockDecomposition:
    """Split the restricted self-commutator into diagonal and corner summands."""
    Q = _check_projection(Q)
    Tm = T.mat.toarray()
    resid = np.linalg.norm((np.eye(T.dimension) - Q) @ Tm @ Q, 2) / _norm_scale(T)
    if resid > tol:
        raise InvarianceError(resid, tol)
    comm = self_commutator(T)
    diag = Q @ comm.mat.toarray() @ Q
    Qp = np.eye(T.dimension) - Q
    corner = Q @ Tm @ Qp @ Tm.conj().T @ Q

    if np.abs(diag - diag.conj().T).max(initial=0.0) > SELF_ADJOINT_TOL * max(1.0, _norm_scale(T) ** 2):
        raise AssertionError("diagonal part failed self-adjointness check")
    if np.abs(corner - corner.conj().T).max(initial=0.0) > SELF_ADJOINT_TOL * max(1.0, _norm_scale(T) ** 2):
        raise AssertionError("corner part failed self-adjointness check")
    eig_min = float(np.linalg.eigvalsh((corner + corner.conj().T) / 2).min(initial=0.0))
    if eig_min < -PSD_TOL * max(1.0, _norm_scale(T) ** 2):
        raise AssertionError(f"corner part not positive semidefinite: min eig {eig_min:.3e}")

    mk = lambda M: TruncatedOperator(T.space, sp.csr_matrix(M),
                                     interior_degree=comm.interior_degree,
                                     degree_raise=0)
    return BlockDecomposition(mk(diag), mk(corner), Q)


def direct_sum(operators) -> TruncatedOperator:
    """Block-diagonal operator on the concatenated coordinate space."""
    operators = list(operators)
    if not operators:
        raise ValueError("direct_sum requires at least one operator")
    if len(operators) == 1:
        return operators[0]
    mats = [T.mat for T in operators]
    degrees = np.concatenate([np.asarray(T.space.degrees) for T in operators])
    graded = all(is_graded(T.space) for T in operators)
    space = RestrictedSpace(dimension=int(degrees.size), degrees=degrees,
                            max_degree=max(T.space.max_degree for T in operators),
                            graded=graded)
    return TruncatedOperator(space, sp.block_diag(mats, format="csr"),
                             interior_degree=min(T.interior_degree for T in operators),
                             degree_raise=max(T.degree_raise for T in operators))
