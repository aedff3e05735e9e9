"""Weight sets defining the Hilbert-module norm of each monomial.

A weight set assigns a positive number lambda_alpha to every multi-index of
the basis; the monomial z^alpha has norm lambda_alpha.  The coordinate shift
Z_i then carries the single matrix entry lambda_{alpha+e_i} / lambda_alpha
from alpha to alpha + e_i.  All built-in families are computed through
log-gamma to avoid factorial overflow.
"""

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .graded_basis import GradedBasis, enumerate_basis


class Condition(enum.Enum):
    BOUNDED = "bounded"
    CONTRACTIVE = "contractive"
    CROSS_COMMUTATOR_SP = "cross_commutator_sp"


@dataclass
class ConditionReport:
    condition: Condition
    p: float | None
    satisfied_at_truncation: bool
    witness_value: float
    trend: list | None = None  # list of (degree, value)
    thresholds: dict = field(default_factory=dict)


@dataclass(frozen=True)
class WeightSet:
    """Positive monomial norms lambda_alpha on a graded basis.

    log_lambda is indexed by basis ordinal; it depends only on the
    multi-index, so components of the same alpha share a value.
    """

    basis: GradedBasis
    log_lambda: np.ndarray  # (dimension,)
    label: str

    def __post_init__(self):
        if self.log_lambda.shape != (self.basis.dimension,):
            raise ValueError("log_lambda length does not match basis dimension")
        if not np.all(np.isfinite(self.log_lambda)):
            raise ValueError("non-finite log weight")

    @property
    def lam(self) -> np.ndarray:
        """lambda values per basis ordinal."""
        return np.exp(self.log_lambda)

    def lambda_of(self, alpha, component: int = 0) -> float:
        return float(np.exp(self.log_lambda[self.basis.index_of(alpha, component)]))

    def shift_weight(self, alpha, i: int) -> float:
        """Matrix entry of Z_i from alpha to alpha + e_i."""
        alpha = tuple(alpha)
        target = alpha[:i - 1] + (alpha[i - 1] + 1,) + alpha[i:]
        j0 = self.basis.index_of(alpha)
        j1 = self.basis.index_of(target)
        return float(np.exp(self.log_lambda[j1] - self.log_lambda[j0]))

    def all_shift_weights(self, i: int) -> np.ndarray:
        """Shift weights of Z_i for every alpha with degree < N (component 0)."""
        b = self.basis
        out = []
        for j in range(b.dimension):
            if b.components[j] != 0 or b.degrees[j] >= b.max_degree:
                continue
            alpha = tuple(int(a) for a in b.exponents[j])
            target = alpha[:i - 1] + (alpha[i - 1] + 1,) + alpha[i:]
            j1 = b.index_of(target)
            out.append(np.exp(self.log_lambda[j1] - self.log_lambda[j]))
        return np.asarray(out)

    def to_table_text(self) -> str:
        """Serialize as a text table: one line per multi-index, exponents then lambda."""
        b = self.basis
        lines = [f"# weight set: {self.label}",
                 f"# m={b.num_vars} N={b.max_degree}"]
        lam = self.lam
        for j in range(b.dimension):
            if b.components[j] != 0:
                continue
            exps = " ".join(str(int(a)) for a in b.exponents[j])
            lines.append(f"{exps} {float(lam[j])!r}")
        return "\n".join(lines) + "\n"


def _per_alpha(basis: GradedBasis, fn) -> np.ndarray:
    """Evaluate fn(exponent row, degree) for every basis ordinal."""
    vals = np.empty(basis.dimension)
    for j in range(basis.dimension):
        vals[j] = fn(basis.exponents[j], int(basis.degrees[j]))
    return vals


def drury_arveson_weights(basis: GradedBasis) -> WeightSet:
    """Symmetric-Fock normalization: lambda_alpha = sqrt(alpha! / |alpha|!)."""
    def logw(alpha, n):
        return 0.5 * (float(np.sum(gammaln(alpha + 1))) - float(gammaln(n + 1)))
    return WeightSet(basis, _per_alpha(basis, logw), "drury-arveson")


def bergman_ball_weights(basis: GradedBasis) -> WeightSet:
    """Bergman space of the unit ball, normalized volume measure.

    lambda_alpha^2 = alpha! m! / (|alpha| + m)!.
    """
    m = basis.num_vars
    def logw(alpha, n):
        return 0.5 * (float(np.sum(gammaln(alpha + 1))) + float(gammaln(m + 1))
                      - float(gammaln(n + m + 1)))
    return WeightSet(basis, _per_alpha(basis, logw), "bergman-ball")


def hardy_ball_weights(basis: GradedBasis) -> WeightSet:
    """Hardy space of the sphere, normalized surface measure.

    lambda_alpha^2 = alpha! (m-1)! / (|alpha| + m - 1)!.
    """
    m = basis.num_vars
    def logw(alpha, n):
        return 0.5 * (float(np.sum(gammaln(alpha + 1))) + float(gammaln(m))
                      - float(gammaln(n + m)))
    return WeightSet(basis, _per_alpha(basis, logw), "hardy-ball")


def factorial_delta_weights(basis: GradedBasis, delta: float) -> WeightSet:
    """lambda_alpha = ((1 + |alpha|)!)^(-delta).

    The shift weight at alpha is then (2 + |alpha|)^(-delta), a function of
    the degree alone.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    logw = -delta * gammaln(np.asarray(basis.degrees, dtype=float) + 2.0)
    return WeightSet(basis, logw, f"factorial-delta({delta})")


def ramp_weights(n: int, basis: GradedBasis) -> WeightSet:
    """One-variable shift with weight sqrt(k/n) on e_k for k <= n, then weight 1.

    e_k is identified with the monomial z^(k-1); lambda_0 = 1 and lambda is
    the running product of the shift weights.
    """
    if basis.num_vars != 1:
        raise ValueError("ramp weights require a single-variable basis")
    if n < 1:
        raise ValueError(f"block parameter n must be >= 1, got {n}")
    N = basis.max_degree
    logw = np.zeros(N + 1)
    for j in range(1, N + 1):
        # weight on e_j (the step z^(j-1) -> z^j)
        w = np.sqrt(j / n) if j <= n else 1.0
        logw[j] = logw[j - 1] + np.log(w)
    vals = logw[np.asarray(basis.degrees)]
    return WeightSet(basis, vals, f"ramp(n={n})")


FAMILIES = {
    "drury-arveson": drury_arveson_weights,
    "bergman-ball": bergman_ball_weights,
    "hardy-ball": hardy_ball_weights,
}


def family_weights(family: str, basis: GradedBasis, delta: float | None = None) -> WeightSet:
    """Look up a built-in family by id; factorial-delta requires delta."""
    if family == "factorial-delta":
        if delta is None:
            raise ValueError("family factorial-delta requires a delta value")
        return factorial_delta_weights(basis, delta)
    try:
        return FAMILIES[family](basis)
    except KeyError:
        raise ValueError(f"unknown weight family {family!r}; "
                         f"known: {sorted(FAMILIES) + ['factorial-delta']}") from None


def check_condition(w: WeightSet, condition: Condition, p: float | None = None,
                    degrees: list | None = None,
                    diagnostic_thresholds=None) -> ConditionReport:
    """Test boundedness / contractivity / S_p cross-commutator trends at truncation."""
    from . import schatten, shift_operators  # local import: avoids a cycle

    if condition in (Condition.BOUNDED, Condition.CONTRACTIVE):
        sup = 0.0
        for i in range(1, w.basis.num_vars + 1):
            ws = w.all_shift_weights(i)
            if ws.size:
                sup = max(sup, float(ws.max()))
        if condition is Condition.BOUNDED:
            return ConditionReport(condition, None, bool(np.isfinite(sup)), sup)
        return ConditionReport(condition, None, sup <= 1.0 + 1e-12, sup,
                               thresholds={"contractive_slack": 1e-12})

    if condition is Condition.CROSS_COMMUTATOR_SP:
        if p is None or p < 1:
            raise ValueError("CROSS_COMMUTATOR_SP requires p >= 1")
        if not degrees:
            raise ValueError("CROSS_COMMUTATOR_SP requires a list of truncation degrees")
        m = w.basis.num_vars
        interior = w.basis.max_degree - 2
        bad = [d for d in degrees if d > interior]
        if bad:
            raise ValueError(f"requested degrees {bad} exceed the interior window {interior}")
        comms = [shift_operators.cross_commutator(w, i, j)
                 for i in range(1, m + 1) for j in range(i, m + 1)]
        trend = []
        for d in sorted(degrees):
            val = max(schatten.schatten_norm(C, p, window=schatten.Window.INTERIOR,
                                             max_window_degree=d) for C in comms)
            trend.append((d, val))
        verdict, details = schatten.convergence_diagnostic(
            trend, thresholds=diagnostic_thresholds)
        witness = trend[-1][1]
        return ConditionReport(condition, p, verdict is schatten.Verdict.CONVERGING,
                               witness, trend=trend, thresholds=details)

    raise ValueError(f"unknown condition {condition!r}")
