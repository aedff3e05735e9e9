import filecmp
import json
from pathlib import Path

import numpy as np
import pytest

from shiftlab import monomial_generator, parse_polynomial
from shiftlab.experiments import (TheoremViolationError, run_submodule_probe,
                                  run_trace_inequality_check,
                                  run_direct_sum_trends, run_ramp_block_norms,
                                  run_factorial_thresholds, run_restriction_identity_check,
                                  run_quotient_smoothness_probe, write_report)


def _rows(rep, table):
    return rep.tables[table].rows


def test_ramp_block_table_shape_and_flag():
    rep = run_ramp_block_norms([2, 4], [1.0, 2.0], N=30)
    rows = _rows(rep, "norms")
    assert len(rows) == 4
    cols = rep.tables["norms"].columns
    by = {tuple(r[:2]): dict(zip(cols, r)) for r in rows}
    # p = 1: the stated value and the computed closed form coincide (n^0 = 1)
    assert by[(2, 1.0)]["stated_matches"]
    # p = 2: computed 2^(-1/2) differs from the stated 2^(-1)
    assert not by[(2, 2.0)]["stated_matches"]
    assert by[(2, 2.0)]["computed"] == pytest.approx(2 ** -0.5, abs=1e-12)
    assert by[(2, 2.0)]["restricted_norm"] == pytest.approx(1.0, abs=1e-12)


def test_ramp_block_rejects_small_truncation():
    with pytest.raises(ValueError):
        run_ramp_block_norms([10], [1.0], N=12)


def test_direct_sum_requires_enough_blocks():
    with pytest.raises(ValueError):
        run_direct_sum_trends(4, [3.0])


def test_factorial_thresholds_reject_one_variable():
    with pytest.raises(ValueError):
        run_factorial_thresholds(1, [1.0])


def test_identity_check_verdict_fields():
    rep = run_restriction_identity_check(25, seed=3)
    v = rep.verdicts["identity"]
    assert v["passed"] and v["max_residual"] < 1e-10


def test_trace_inequality_records_rows():
    rep = run_trace_inequality_check("bergman-ball", m=1,
                                points=[(0.4,), (-0.2 + 0.1j,)],
                                degree_sweep=[20, 26])
    rows = _rows(rep, "trace_inequality")
    assert len(rows) == 4  # 2 degrees x 2 nested spans
    for (_, _, tr_p, c1, holds) in rows:
        assert holds and -1e-8 <= tr_p <= c1 + 1e-8


def test_trace_inequality_input_validation():
    with pytest.raises(ValueError):
        run_trace_inequality_check("bergman-ball", m=1)
    with pytest.raises(ValueError):
        run_trace_inequality_check("bergman-ball", m=1, points=[(0.1,)],
                              generators=[monomial_generator((1,), num_vars=1)])


def test_quotient_probe_rejects_large_m():
    with pytest.raises(ValueError):
        run_quotient_smoothness_probe([monomial_generator((1, 0, 0, 0), num_vars=4)],
                                      m=4, p_values=[2.0])


def test_submodule_probe_rejects_nonhomogeneous_generator():
    g = parse_polynomial("z1 - 1", num_vars=2)
    with pytest.raises(ValueError):
        run_submodule_probe("bergman-ball", m=2, k=1, generators=[g],
                          p_values=[2.0], degree_sweep=[6, 8, 10, 12])


def test_submodule_probe_homogeneous_generator_runs():
    g = parse_polynomial("z1^2 - z2^2", num_vars=2)
    rep = run_submodule_probe("bergman-ball", m=2, k=1, generators=[g],
                            p_values=[2.0], degree_sweep=[6, 8, 10, 12])
    assert "restriction_p=2.0" in rep.verdicts
    assert "complement_p=2.0" in rep.verdicts


def test_write_report_is_byte_stable(tmp_path):
    a = write_report(run_ramp_block_norms([3], [1.0, 3.0], N=25), tmp_path / "a")
    b = write_report(run_ramp_block_norms([3], [1.0, 3.0], N=25), tmp_path / "b")
    files_a = sorted(p.name for p in a.iterdir())
    files_b = sorted(p.name for p in b.iterdir())
    assert files_a == files_b
    for name in files_a:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_report_json_has_no_runtime(tmp_path):
    rep = run_ramp_block_norms([2], [1.0], N=20)
    assert rep.runtime_seconds > 0.0
    out = write_report(rep, tmp_path / "r")
    meta = json.loads((out / "report.json").read_text())
    assert "runtime" not in json.dumps(meta)
    assert set(meta) == {"name", "parameters", "verdicts", "seed", "tables"}


def test_csv_floats_roundtrip(tmp_path):
    rep = run_ramp_block_norms([5], [2.0], N=25)
    out = write_report(rep, tmp_path / "r")
    lines = (out / "norms.csv").read_text().splitlines()
    header = lines[0].split(",")
    row = dict(zip(header, lines[1].split(",")))
    assert float(row["computed"]) == rep.tables["norms"].rows[0][2]
