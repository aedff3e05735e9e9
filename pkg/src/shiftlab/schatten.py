"""Singular values, Schatten norms, spectral splits and convergence verdicts.

Densification happens here and nowhere else.  Dense SVD is used up to a
configurable dimension; above it the leading singular values are computed by
sparse iteration.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .shift_operators import TruncatedOperator

DENSE_SVD_LIMIT = 5_000


class Window(enum.Enum):
    FULL = "full"
    INTERIOR = "interior"


class Verdict(enum.Enum):
    CONVERGING = "converging"
    DIVERGING = "diverging"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DiagnosticThresholds:
    """Knobs of the trend verdict; every report prints them.

    stall_rel: tail relative increments below this count as converged.
    summable_exponent: fitted power-law decay of the increments above this
    counts as a summable tail.
    doubling_factor: overall growth at or above this, with a non-summable
    tail, counts as divergence.
    """

    stall_rel: float = 1e-3
    summable_exponent: float = 1.3
    doubling_factor: float = 2.0

    def as_dict(self):
        return {"stall_rel": self.stall_rel,
                "summable_exponent": self.summable_exponent,
                "doubling_factor": self.doubling_factor}


@dataclass
class DecayFit:
    """Least-squares power-law fit sigma_k ~ k^(-beta) over a tail window."""

    beta: float
    residual: float
    critical_exponent: float
    window: tuple  # (first k, last k), 1-based


@dataclass
class SchattenEstimate:
    p: float
    values_by_degree: list              # of (degree, value)
    fitted_decay: DecayFit | None = None
    verdict: Verdict = Verdict.INCONCLUSIVE
    thresholds: dict = field(default_factory=dict)


def _windowed(T: TruncatedOperator, window: Window, max_window_degree=None) -> np.ndarray:
    if window is Window.FULL and max_window_degree is None:
        M = T.dense()
    else:
        M = T.windowed_dense(max_window_degree)
    if not np.all(np.isfinite(M)):
        raise ValueError("operator has non-finite entries")
    return M


def singular_values(T: TruncatedOperator, window: Window = Window.FULL,
                    max_window_degree=None,
                    dense_limit: int = DENSE_SVD_LIMIT) -> np.ndarray:
    """Descending singular values of the (windowed) finite section."""
    M = _windowed(T, window, max_window_degree)
    if min(M.shape) == 0:
        return np.zeros(0)
    if M.shape[0] <= dense_limit:
        return np.linalg.svd(M, compute_uv=False)
    return _iterative_singular_values(M)


def _iterative_singular_values(M: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Leading singular values by sparse iteration, for very large sections."""
    import scipy.sparse.linalg as spla
    import scipy.sparse as sp
    k = min(M.shape[0] - 1, 2000)
    s = spla.svds(sp.csr_matrix(M), k=k, tol=tol, return_singular_vectors=False)
    return np.sort(s)[::-1]


def schatten_norm(T: TruncatedOperator, p: float, window: Window = Window.FULL,
                  max_window_degree=None) -> float:
    """(sum sigma_k^p)^(1/p); p = inf gives the operator norm."""
    if p != np.inf and p < 1:
        raise ValueError(f"Schatten p-norm requires p >= 1, got {p}")
    s = singular_values(T, window, max_window_degree)
    if s.size == 0:
        return 0.0
    if p == np.inf:
        return float(s[0])
    return float(np.sum(s ** p) ** (1.0 / p))


def trace(T: TruncatedOperator, window: Window = Window.FULL,
          max_window_degree=None):
    """Sum of the diagonal of the (windowed) section."""
    M = _windowed(T, window, max_window_degree)
    t = complex(np.trace(M))
    return t.real if abs(t.imag) < 1e-14 * max(1.0, abs(t.real)) else t


@dataclass(frozen=True)
class ApWitness:
    """Spectral split [T*,T] = P + C with P >= 0 and C <= 0.

    This is one canonical witness; minimality of ||C||_p over all admissible
    splits is not claimed.
    """

    positive_part: np.ndarray
    compact_part: np.ndarray
    p: float
    p_norm_of_c: float


def ap_witness(self_commutator: TruncatedOperator, p: float,
               window: Window = Window.FULL,
               self_adjoint_tol: float = 1e-10) -> ApWitness:
    """Split a self-adjoint commutator into positive and negative spectral parts."""
    M = _windowed(self_commutator, window)
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    if np.abs(M - M.conj().T).max(initial=0.0) > self_adjoint_tol * scale:
        raise ValueError("ap_witness requires a self-adjoint input")
    M = (M + M.conj().T) / 2
    vals, vecs = np.linalg.eigh(M)
    pos = vecs @ np.diag(np.maximum(vals, 0.0)) @ vecs.conj().T
    neg = vecs @ np.diag(np.minimum(vals, 0.0)) @ vecs.conj().T
    pnorm = float(np.sum(np.abs(np.minimum(vals, 0.0)) ** p) ** (1.0 / p)) \
        if p != np.inf else float(np.abs(np.minimum(vals, 0.0)).max(initial=0.0))
    return ApWitness(pos, neg, p, pnorm)


def decay_exponent_fit(sigma, fit_start: float = 0.05, fit_stop: float = 0.4,
                       min_tail: int = 20) -> DecayFit | None:
    """Fit log sigma_k vs log k over a central rank window; None when too short.

    The window [fit_start*n, fit_stop*n] skips the non-asymptotic head and,
    crucially, the deep tail: in a finite section the smallest singular
    values are truncation artifacts that decay far faster than the operator's
    true spectrum (calibrated on the m-shift cross-commutator, where the
    deep-tail slope is ~-3.5 against a true -0.5).
    """
    s = np.asarray(sigma, dtype=float)
    s = s[s > 0]
    n = s.size
    k0 = max(0, int(np.floor(n * fit_start)))
    k1 = max(k0, int(np.ceil(n * fit_stop)))
    tail = s[k0:k1]
    if tail.size < min_tail:
        return None
    ks = np.arange(k0 + 1, k1 + 1, dtype=float)
    slope, intercept = np.polyfit(np.log(ks), np.log(tail), 1)
    fit = slope * np.log(ks) + intercept
    residual = float(np.sqrt(np.mean((np.log(tail) - fit) ** 2)))
    beta = -float(slope)
    critical = 1.0 / beta if beta > 0 else np.inf
    return DecayFit(beta=beta, residual=residual, critical_exponent=critical,
                    window=(k0 + 1, k1))


def convergence_diagnostic(values_by_degree,
                           thresholds: DiagnosticThresholds | None = None):
    """Heuristic trend verdict over truncation degrees.

    Returns (verdict, details); details records the thresholds used and the
    fitted increment decay, so reports can cite them.
    """
    th = thresholds or DiagnosticThresholds()
    pts = sorted((float(d), float(v)) for d, v in values_by_degree)
    details = {"thresholds": th.as_dict(), "points": len(pts)}
    if len(pts) < 4:
        details["reason"] = "fewer than 4 degrees"
        return Verdict.INCONCLUSIVE, details

    degs = np.array([d for d, _ in pts])
    vals = np.array([v for _, v in pts])
    incs = np.diff(vals)
    scale = np.maximum(np.abs(vals[1:]), 1e-300)
    rel = np.abs(incs) / scale

    q = max(1, len(rel) // 4)
    if np.all(rel[-q:] < th.stall_rel):
        details["reason"] = "tail relative increments stalled"
        return Verdict.CONVERGING, details

    # power-law fit of the per-degree increment rate over the tail half;
    # dividing by the gap makes non-uniform sweeps comparable
    half = max(3, len(incs) // 2)
    gaps = np.diff(degs)
    tail_inc = (incs / gaps)[-half:]
    tail_mid = (degs[1:] * 0.5 + degs[:-1] * 0.5)[-half:]
    if np.all(tail_inc <= 0):
        details["reason"] = "tail non-increasing"
        return Verdict.CONVERGING, details
    pos = tail_inc > 0
    if np.count_nonzero(pos) >= 3:
        slope, _ = np.polyfit(np.log(tail_mid[pos]), np.log(tail_inc[pos]), 1)
        s_fit = -float(slope)
        details["increment_decay_exponent"] = s_fit
        if s_fit >= th.summable_exponent:
            details["reason"] = "increments decay at a summable rate"
            return Verdict.CONVERGING, details

    if vals[0] > 0 and vals[-1] / vals[0] >= th.doubling_factor:
        details["reason"] = "non-summable increments and overall growth"
        return Verdict.DIVERGING, details
    details["reason"] = "no clear trend"
    return Verdict.INCONCLUSIVE, details


def estimate(T_by_degree, p: float, thresholds: DiagnosticThresholds | None = None,
             window: Window = Window.INTERIOR) -> SchattenEstimate:
    """Schatten p-norm trend across truncation degrees with verdict and decay fit."""
    values = []
    last = None
    for d, T in T_by_degree:
        values.append((d, schatten_norm(T, p, window=window, max_window_degree=d)))
        last = (d, T)
    fit = None
    if last is not None:
        fit = decay_exponent_fit(singular_values(last[1], window=window,
                                                 max_window_degree=last[0]))
    verdict, details = convergence_diagnostic(values, thresholds)
    return SchattenEstimate(p=p, values_by_degree=values, fitted_decay=fit,
                            verdict=verdict, thresholds=details)
