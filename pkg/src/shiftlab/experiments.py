"""Canned experiments reproducing the operator-theoretic examples and probes.

Each experiment returns an ExperimentReport: flat parameters, named CSV
tables, and verdicts that carry the diagnostic thresholds they were decided
with.  Reports are byte-stable for a fixed (parameters, seed): wall-clock
runtime is kept on the in-memory report only and never written to disk.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import schatten, shift_operators as ops, submodules, weight_models as wm
from .graded_basis import enumerate_basis
from .schatten import DiagnosticThresholds, Verdict, Window
from .shift_operators import SubspaceFrame

DEFAULT_SWEEP_M2 = (8, 12, 16, 20, 28, 40)
DEFAULT_SWEEP_M3 = (6, 9, 12, 16, 20)


class TheoremViolationError(AssertionError):
    """A theorem-backed finite-matrix identity failed; indicates a bug."""


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def add(self, *row):
        assert len(row) == len(self.columns)
        self.rows.append(tuple(row))


@dataclass
class ExperimentReport:
    name: str
    parameters: dict
    tables: dict = field(default_factory=dict)     # name -> Table
    verdicts: dict = field(default_factory=dict)   # name -> dict
    seed: int = 0
    runtime_seconds: float = 0.0                   # not serialized

    def table(self, name, columns) -> Table:
        t = Table(list(columns))
        self.tables[name] = t
        return t

    def set_verdict(self, name, verdict: Verdict, details: dict):
        self.verdicts[name] = {"verdict": verdict.value, **details}


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_report(report: ExperimentReport, outdir) -> Path:
    """Write report.json plus one CSV per table into outdir."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, tab in sorted(report.tables.items()):
        lines = [",".join(tab.columns)]
        lines += [",".join(_fmt(x) for x in row) for row in tab.rows]
        (outdir / f"{name}.csv").write_text("\n".join(lines) + "\n")
    meta = {
        "name": report.name,
        "parameters": {k: _fmt(v) if not isinstance(v, (list, tuple))
                       else [_fmt(x) for x in v]
                       for k, v in report.parameters.items()},
        "verdicts": report.verdicts,
        "seed": report.seed,
        "tables": sorted(report.tables),
    }
    (outdir / "report.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2, default=_fmt) + "\n")
    return outdir


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.runtime_seconds = time.perf_counter() - t0
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _pmap(fn, items, threads: int = 1):
    """Order-preserving map, optionally over a thread pool (SVD releases the GIL)."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _tail_frame(basis, start_ordinal) -> SubspaceFrame:
    """Coordinate frame for span{ basis elements with ordinal >= start }."""
    idx = np.arange(start_ordinal, basis.dimension)
    cols = np.zeros((basis.dimension, idx.size))
    cols[idx, np.arange(idx.size)] = 1.0
    return SubspaceFrame(cols, np.asarray(basis.degrees)[idx], graded=True)


def _ramp_block(n: int, N: int):
    basis = enumerate_basis(1, N)
    w = wm.ramp_weights(n, basis)
    S = ops.coordinate_shift(w, 1)
    comm = ops.self_commutator(S)
    restricted = ops.restrict_to_invariant(S, _tail_frame(basis, n - 1))
    comm_restr = ops.self_commutator(restricted)
    return comm, comm_restr


@_timed
def run_ramp_block_norms(n_values, p_values, N: int,
                 thresholds: DiagnosticThresholds | None = None) -> ExperimentReport:
    """Single-block weighted shift: computed vs stated commutator p-norms."""
    n_values = sorted(int(n) for n in n_values)
    if N <= max(n_values) + 5:
        raise ValueError(f"truncation N={N} too small; need N > max(n) + 5 = {max(n_values) + 5}")
    rep = ExperimentReport("ramp_block_norms", {
        "n_values": n_values, "p_values": list(p_values), "N": N})
    tab = rep.table("norms", ["n", "p", "computed", "closed_form",
                              "stated_value", "stated_matches", "restricted_norm"])
    for n in n_values:
        comm, comm_restr = _ramp_block(n, N)
        for p in p_values:
            computed = schatten.schatten_norm(comm, p, window=Window.INTERIOR)
            closed = float(n) ** ((1.0 - p) / p) if p != np.inf else 1.0 / n
            stated = float(n) ** (1.0 - p) if p != np.inf else None
            restr = schatten.schatten_norm(comm_restr, p, window=Window.INTERIOR)
            matches = stated is not None and abs(computed - stated) <= 1e-10
            tab.add(n, p, computed, closed,
                    stated if stated is not None else "n/a", matches, restr)
    return rep


@_timed
def run_direct_sum_trends(max_blocks: int, p_values,
                                  thresholds: DiagnosticThresholds | None = None
                                  ) -> ExperimentReport:
    """Partial direct sums of the weighted-shift blocks vs their restrictions."""
    if max_blocks < 8:
        raise ValueError(f"max_blocks must be >= 8, got {max_blocks}")
    rep = ExperimentReport("direct_sum_trends", {
        "max_blocks": max_blocks, "p_values": list(p_values)})

    sigmas_full, sigmas_restr = [], []
    for n in range(1, max_blocks + 1):
        comm, comm_restr = _ramp_block(n, n + 8)
        sigmas_full.append(schatten.singular_values(comm, window=Window.INTERIOR))
        sigmas_restr.append(schatten.singular_values(comm_restr, window=Window.INTERIOR))

    tab_f = rep.table("full_norms", ["B", "p", "value"])
    tab_r = rep.table("restricted_norms", ["B", "p", "value"])
    for p in p_values:
        seq_f, seq_r = [], []
        for B in range(1, max_blocks + 1):
            if p == np.inf:
                vf = max(float(s[0]) if s.size else 0.0 for s in sigmas_full[:B])
                vr = max(float(s[0]) if s.size else 0.0 for s in sigmas_restr[:B])
            else:
                vf = float(sum(np.sum(s ** p) for s in sigmas_full[:B]) ** (1.0 / p))
                vr = float(sum(np.sum(s ** p) for s in sigmas_restr[:B]) ** (1.0 / p))
            tab_f.add(B, p, vf)
            tab_r.add(B, p, vr)
            seq_f.append((B, vf))
            seq_r.append((B, vr))
        for label, seq in (("full", seq_f), ("restricted", seq_r)):
            verdict, details = schatten.convergence_diagnostic(seq, thresholds)
            rep.set_verdict(f"{label}_p={_fmt(p)}", verdict, details)
    return rep


@_timed
def run_factorial_thresholds(m: int, delta_values, degree_sweep=None,
                 thresholds: DiagnosticThresholds | None = None,
                 threads: int = 1) -> ExperimentReport:
    """Factorial weight family: trace-norm and Hilbert-Schmidt trends per delta."""
    if m < 2:
        raise ValueError(f"factorial thresholds require m >= 2, got {m}")
    sweep = sorted(degree_sweep or (DEFAULT_SWEEP_M2 if m == 2 else DEFAULT_SWEEP_M3))
    N = max(sweep) + 2
    basis = enumerate_basis(m, N)
    rep = ExperimentReport("factorial_thresholds", {
        "m": m, "delta_values": list(delta_values), "degree_sweep": sweep,
        "threshold_1_reductive": (m - 1) / 2, "threshold_s2": m / 2})
    tab = rep.table("cross_commutator_trace_norms", ["delta", "i", "j", "degree", "value"])
    tab_hs = rep.table("shift_hs_norms", ["delta", "i", "degree", "value"])
    summary = rep.table("summary", ["delta", "trace_norm_verdict", "hs_norm_verdict",
                                    "above_1_reductive_threshold", "above_s2_threshold"])
    for delta in delta_values:
        w = wm.factorial_delta_weights(basis, delta)
        comms = {(i, j): ops.cross_commutator(w, i, j)
                 for i in range(1, m + 1) for j in range(i, m + 1)}
        shifts = {i: ops.coordinate_shift(w, i) for i in range(1, m + 1)}
        def values_at(d):
            tr = {key: schatten.schatten_norm(C, 1, window=Window.INTERIOR,
                                              max_window_degree=d)
                  for key, C in comms.items()}
            hs = {i: schatten.schatten_norm(Z, 2, window=Window.INTERIOR,
                                            max_window_degree=d)
                  for i, Z in shifts.items()}
            return tr, hs

        trend_tr, trend_hs = [], []
        for d, (tr, hs) in zip(sweep, _pmap(values_at, sweep, threads)):
            for (i, j), v in sorted(tr.items()):
                tab.add(delta, i, j, d, v)
            trend_tr.append((d, max(tr.values())))
            for i, v in sorted(hs.items()):
                tab_hs.add(delta, i, d, v)
            trend_hs.append((d, max(hs.values())))
        v_tr, det_tr = schatten.convergence_diagnostic(trend_tr, thresholds)
        v_hs, det_hs = schatten.convergence_diagnostic(trend_hs, thresholds)
        rep.set_verdict(f"trace_norm_delta={_fmt(delta)}", v_tr, det_tr)
        rep.set_verdict(f"hs_norm_delta={_fmt(delta)}", v_hs, det_hs)
        summary.add(delta, v_tr.value, v_hs.value,
                    delta > (m - 1) / 2, delta > m / 2)
    return rep


def _build_submodule(w, generators):
    if all(len(g.terms) == 1 for g in generators):
        return submodules.monomial_submodule(w, generators)
    return submodules.homogeneous_submodule(w, generators)


def _pair_commutator(A, B):
    """[A*, B] for two operators on the same space."""
    As = ops.adjoint(A)
    return ops.subtract(ops.multiply(As, B), ops.multiply(B, As))


@_timed
def run_submodule_probe(family: str, m: int, k: int, generators, p_values,
                      degree_sweep=None, delta: float | None = None,
                      thresholds: DiagnosticThresholds | None = None,
                      threads: int = 1) -> ExperimentReport:
    """Cross-commutator trends for restrictions to a graded submodule."""
    sweep = sorted(degree_sweep or (DEFAULT_SWEEP_M2 if m == 2 else DEFAULT_SWEEP_M3))
    N = max(sweep) + 2
    basis = enumerate_basis(m, N, k)
    w = wm.family_weights(family, basis, delta)
    generators = list(generators)
    for g in generators:
        if not g.is_homogeneous:
            raise ValueError("submodule probe requires homogeneous or monomial generators")
    S = _build_submodule(w, generators)

    rep = ExperimentReport("submodule_probe", {
        "family": family, "m": m, "k": k, "delta": delta,
        "generators": [str(sorted(g.terms)) for g in generators],
        "p_values": list(p_values), "degree_sweep": sweep})

    shifts = [ops.coordinate_shift(w, i) for i in range(1, m + 1)]
    sides = {
        "restriction": [ops.restrict_to_invariant(Z, S.sub) for Z in shifts],
        "complement": [ops.restrict_to_invariant(ops.adjoint(Z), S.comp) for Z in shifts],
    }
    tab = rep.table("cross_commutator_norms", ["side", "i", "j", "p", "degree", "value"])
    fits = rep.table("decay_fits", ["side", "i", "j", "beta", "critical_exponent",
                                    "fit_residual"])
    for side, Ys in sides.items():
        comms = {(i, j): _pair_commutator(Ys[i - 1], Ys[j - 1])
                 for i in range(1, m + 1) for j in range(i, m + 1)}
        for p in p_values:
            def values_at(d):
                return {key: schatten.schatten_norm(C, p, window=Window.INTERIOR,
                                                    max_window_degree=d)
                        for key, C in comms.items()}
            trend = []
            for d, vals in zip(sweep, _pmap(values_at, sweep, threads)):
                for (i, j), v in sorted(vals.items()):
                    tab.add(side, i, j, p, d, v)
                trend.append((d, max(vals.values())))
            verdict, details = schatten.convergence_diagnostic(trend, thresholds)
            rep.set_verdict(f"{side}_p={_fmt(p)}", verdict, details)
        for (i, j), C in comms.items():
            fit = schatten.decay_exponent_fit(
                schatten.singular_values(C, window=Window.INTERIOR))
            if fit is not None:
                fits.add(side, i, j, fit.beta, fit.critical_exponent, fit.residual)
    return rep


def _adjoint_closure(Tmat, vectors, rank_tol=1e-10, max_rounds=200):
    """Close a span under a degree-lowering operator; terminates since degree drops."""
    cols = [v / np.linalg.norm(v) for v in vectors]
    M = np.column_stack(cols)
    for _ in range(max_rounds):
        cand = np.column_stack([M, Tmat @ M])
        U, s, _ = np.linalg.svd(cand, full_matrices=False)
        rank = int(np.count_nonzero(s > rank_tol * s[0]))
        Q = U[:, :rank]
        if rank == M.shape[1]:
            return Q
        M = Q
    raise RuntimeError("adjoint closure did not stabilize")


@_timed
def run_trace_inequality_check(family: str, m: int, points=None, generators=None,
                          degree_sweep=None, delta: float | None = None,
                          inequality_slack: float = 1e-8,
                          invariance_tol: float = 1e-8) -> ExperimentReport:
    """Trace inequality 0 <= Tr P_n <= ||C_n||_1 along nested invariant subspaces."""
    if (points is None) == (generators is None):
        raise ValueError("provide exactly one of points / generators")
    sweep = sorted(degree_sweep or ((24, 32, 40) if m == 1 else (12, 16, 20)))
    rep = ExperimentReport("trace_inequality_check", {
        "family": family, "m": m, "delta": delta,
        "points": [str(p) for p in points] if points else [],
        "generators": [str(sorted(g.terms)) for g in generators] if generators else [],
        "degree_sweep": sweep, "inequality_slack": inequality_slack})
    tab = rep.table("trace_inequality", ["degree", "n", "trace_P", "trace_norm_C",
                                         "holds"])
    trend = rep.table("c_norm_trend", ["degree", "value"])

    count = len(points) if points else len(generators)
    for N in sweep:
        basis = enumerate_basis(m, N)
        w = wm.family_weights(family, basis, delta)
        T = ops.adjoint(ops.coordinate_shift(w, 1))
        if points:
            K = submodules._kernel_columns(w, points, range(basis.multiplicity))
        else:
            lam = w.lam
            cols = []
            for g in generators:
                v = np.zeros(basis.dimension, dtype=complex)
                for alpha, c, coef in g.terms:
                    jj = basis.index_of(alpha, c)
                    v[jj] += coef * lam[jj]
                cols.append(v)
            K = np.column_stack(cols)
        last = None
        for n in range(1, count + 1):
            if points:
                # kernel vectors are joint eigenvectors of the adjoint shifts:
                # their span is already invariant, no closure needed
                cols = np.linalg.svd(K[:, :n], full_matrices=False)[0]
            else:
                cols = _adjoint_closure(T.mat.toarray(), list(K[:, :n].T))
            frame = SubspaceFrame(cols, np.zeros(cols.shape[1], dtype=np.int64),
                                  graded=False)
            Tn = ops.restrict_to_invariant(T, frame, tol=invariance_tol)
            comm = ops.self_commutator(Tn)
            wit = schatten.ap_witness(comm, p=1, window=Window.FULL)
            tr_p = float(np.real(np.trace(wit.positive_part)))
            c1 = wit.p_norm_of_c
            holds = -inequality_slack <= tr_p <= c1 + inequality_slack
            tab.add(N, n, tr_p, c1, holds)
            if not holds:
                raise TheoremViolationError(
                    f"trace inequality violated at N={N}, n={n}: "
                    f"Tr P = {tr_p!r}, ||C||_1 = {c1!r}")
            last = c1
        trend.add(N, last)
    rep.verdicts["trace_inequality"] = {
        "holds": True, "instances": len(sweep) * count,
        "slack": inequality_slack}
    return rep


@_timed
def run_quotient_smoothness_probe(generators, m: int, p_values, degree_sweep=None,
                                  variety_dimension=None, family: str = "bergman-ball",
                                  delta: float | None = None,
                                  thresholds: DiagnosticThresholds | None = None
                                  ) -> ExperimentReport:
    """Quotient-module cross-commutator decay for an ideal's submodule.

    The zero-variety dimension is user-supplied and only echoed in the report.
    """
    if m not in (2, 3):
        raise ValueError(f"quotient probe supports m in {{2, 3}}, got {m}")
    sweep = sorted(degree_sweep or (DEFAULT_SWEEP_M2[:4] if m == 2 else DEFAULT_SWEEP_M3[:4]))
    generators = list(generators)
    homogeneous = all(g.is_homogeneous for g in generators)
    rep = ExperimentReport("quotient_smoothness_probe", {
        "family": family, "m": m, "delta": delta,
        "generators": [str(sorted(g.terms)) for g in generators],
        "p_values": list(p_values), "degree_sweep": sweep,
        "homogeneous": homogeneous,
        "variety_dimension_as_supplied":
            variety_dimension if variety_dimension is not None else "not supplied"})
    tab = rep.table("quotient_commutator_norms", ["i", "j", "p", "degree", "value"])
    fits = rep.table("decay_fits", ["i", "j", "beta", "critical_exponent", "fit_residual"])

    trends = {p: [] for p in p_values}
    last_comms = None
    for N in sweep:
        basis = enumerate_basis(m, N + 2)
        w = wm.family_weights(family, basis, delta)
        if homogeneous:
            S = _build_submodule(w, generators)
        else:
            S = submodules.ungraded_submodule(w, generators)
        # quotient-module action = compression of the shifts to the complement
        Rs = [ops.compress_to_frame(ops.coordinate_shift(w, i), S.comp)
              for i in range(1, m + 1)]
        comms = {(i, j): _pair_commutator(Rs[i - 1], Rs[j - 1])
                 for i in range(1, m + 1) for j in range(i, m + 1)}
        for p in p_values:
            vmax = 0.0
            for (i, j), C in comms.items():
                v = schatten.schatten_norm(C, p, window=Window.INTERIOR,
                                           max_window_degree=N)
                tab.add(i, j, p, N, v)
                vmax = max(vmax, v)
            trends[p].append((N, vmax))
        last_comms = (N, comms)
    for p, trend in trends.items():
        verdict, details = schatten.convergence_diagnostic(trend, thresholds)
        rep.set_verdict(f"quotient_p={_fmt(p)}", verdict, details)
    N, comms = last_comms
    for (i, j), C in comms.items():
        fit = schatten.decay_exponent_fit(
            schatten.singular_values(C, window=Window.INTERIOR, max_window_degree=N))
        if fit is not None:
            fits.add(i, j, fit.beta, fit.critical_exponent, fit.residual)
    return rep


@_timed
def run_restriction_identity_check(trials: int = 200, seed: int = 0,
                     residual_tol: float = 1e-10) -> ExperimentReport:
    """Random check of the restricted self-commutator block identity."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    rep = ExperimentReport("restriction_identity_check", {
        "trials": trials, "residual_tol": residual_tol}, seed=seed)
    tab = rep.table("residuals", ["trial", "m", "N", "residual"])
    worst = 0.0
    for t in range(trials):
        m = int(rng.integers(1, 4))
        N = int(rng.integers(3, 9 if m == 3 else 13))
        basis = enumerate_basis(m, N)
        w = wm.WeightSet(basis, rng.uniform(-0.7, 0.7, basis.dimension), "random")
        coeffs = rng.normal(size=m) + 1j * rng.normal(size=m)
        T = ops.coordinate_shift(w, 1)
        T = ops.scale(T, complex(coeffs[0]))
        for i in range(2, m + 1):
            T = ops.add(T, ops.scale(ops.coordinate_shift(w, i), complex(coeffs[i - 1])))
        n_gens = int(rng.integers(1, 3))
        gens = []
        for _ in range(n_gens):
            d = int(rng.integers(0, max(1, N // 2) + 1))
            alpha = tuple(int(x) for x in rng.multinomial(d, np.ones(m) / m))
            gens.append(alpha)
        S = submodules.monomial_submodule(w, gens)
        Q = submodules.projection_matrix(S, submodules.Side.SUBMODULE)
        decomp = ops.restricted_commutator_decomposition(T, Q)
        lhs = ops.self_commutator(ops.compress(T, Q)).mat.toarray()
        rhs = decomp.diagonal_part.mat.toarray() + decomp.corner_part.mat.toarray()
        residual = float(np.abs(lhs - rhs).max(initial=0.0))
        tab.add(t, m, N, residual)
        worst = max(worst, residual)
    passed = worst < residual_tol
    rep.set_verdict("identity", Verdict.CONVERGING if passed else Verdict.INCONCLUSIVE,
                    {"max_residual": worst, "tol": residual_tol, "passed": passed})
    if not passed:
        raise TheoremViolationError(f"lemma 1 identity residual {worst!r} "
                                    f"exceeds {residual_tol!r}")
    return rep
