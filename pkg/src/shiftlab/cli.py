"""Command-line front end for the experiments.

Every subcommand accepts ``--config FILE`` (flat ``key = value`` text,
``#`` comments, comma-separated lists); explicit flags override config
values.  Reports are written as a directory ``<out>/<experiment>-<tag>``
containing ``report.json`` plus one CSV per table.

Exit codes: 0 success, 1 theorem-backed assertion failure,
2 usage/configuration error.

Polynomial grammar (``--gens``, ';'-separated):
    polynomial := [sign] term (sign term)*
    term       := factor ('*' factor)* ['(' 'c' index ')']
    factor     := number | 'z' index ['^' exponent]
e.g. ``z1^2+z2^2`` or ``2.5*z1^2*z2 (c0); z1-z2``.
"""

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import experiments as xp
from .experiments import TheoremViolationError, write_report
from .polynomials import PolynomialSyntaxError, parse_generators
from .schatten import DiagnosticThresholds
from .weight_models import FAMILIES


class ConfigError(ValueError):
    pass


def _parse_scalar(kind, text):
    text = text.strip()
    if kind == "int":
        return int(text)
    if kind == "float":
        return np.inf if text in ("inf", "Inf") else float(text)
    if kind == "str":
        return text
    if kind in ("int_list", "float_list"):
        item = "int" if kind == "int_list" else "float"
        return [_parse_scalar(item, t) for t in text.split(",") if t.strip()]
    if kind == "points":
        pts = []
        for part in text.split(";"):
            if not part.strip():
                continue
            pts.append(tuple(complex(c.strip()) for c in part.split(",")))
        return pts
    raise AssertionError(kind)


# per-experiment config schema: key -> (kind, default); None default = required
SCHEMAS = {
    "ramp-block": {"n": ("int_list", [1, 5, 25, 100]),
                 "p": ("float_list", [1.0, 2.0, 3.0]),
                 "N": ("int", 110)},
    "direct-sum": {"blocks": ("int", 64),
                       "p": ("float_list", [3.0])},
    "factorial-family": {"m": ("int", None),
                 "delta": ("float_list", None),
                 "degrees": ("int_list", [])},
    "submodule-probe": {"family": ("str", "drury-arveson"),
                      "m": ("int", None),
                      "k": ("int", 1),
                      "gens": ("str", None),
                      "p": ("float_list", [3.0]),
                      "degrees": ("int_list", []),
                      "delta": ("float", np.nan)},
    "trace-inequality": {"family": ("str", "bergman-ball"),
                    "m": ("int", None),
                    "points": ("points", []),
                    "gens": ("str", ""),
                    "degrees": ("int_list", []),
                    "delta": ("float", np.nan)},
    "quotient-probe": {"family": ("str", "bergman-ball"),
                       "m": ("int", None),
                       "gens": ("str", None),
                       "p": ("float_list", [3.0]),
                       "degrees": ("int_list", []),
                       "variety-dim": ("float", np.nan),
                       "delta": ("float", np.nan)},
    "identity-check": {"trials": ("int", 200)},
    "list-families": {},
}

GLOBAL_KEYS = {"seed": ("int", 0), "threads": ("int", 0),
               "tag": ("str", ""), "out": ("str", "")}


@dataclass
class RunConfig:
    experiment: str
    params: dict
    seed: int = 0
    threads: int = 0
    tag: str = ""
    out: str = ""
    thresholds: DiagnosticThresholds = field(default_factory=DiagnosticThresholds)

    def to_text(self) -> str:
        """Serialize back to the flat config format (lossless round trip)."""
        lines = [f"experiment = {self.experiment}"]
        schema = SCHEMAS[self.experiment]
        for key, value in self.params.items():
            kind = schema[key][0]
            if kind in ("int_list", "float_list"):
                text = ",".join(str(v) for v in value)
            elif kind == "points":
                text = ";".join(",".join(str(c) for c in pt) for pt in value)
            else:
                text = str(value)
            lines.append(f"{key} = {text}")
        for gk in ("seed", "threads", "tag", "out"):
            lines.append(f"{gk} = {getattr(self, gk)}")
        return "\n".join(lines) + "\n"


def load_config_file(path: str) -> dict:
    raw = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        raw[key.strip()] = value.strip()
    return raw


def build_config(experiment: str, file_values: dict, flag_values: dict) -> RunConfig:
    """Merge config-file values and flags (flags win) against the schema."""
    schema = SCHEMAS[experiment]
    file_values = dict(file_values)
    file_values.pop("experiment", None)
    unknown = set(file_values) - set(schema) - set(GLOBAL_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys for {experiment}: {sorted(unknown)}")

    params, globals_ = {}, {}
    for key, (kind, default) in schema.items():
        if key in flag_values and flag_values[key] is not None:
            params[key] = flag_values[key]
        elif key in file_values:
            params[key] = _parse_scalar(kind, file_values[key])
        elif default is not None:
            params[key] = default
        else:
            raise ConfigError(f"missing required option --{key} for {experiment}")
    for key, (kind, default) in GLOBAL_KEYS.items():
        if key in flag_values and flag_values[key] is not None:
            globals_[key] = flag_values[key]
        elif key in file_values:
            globals_[key] = _parse_scalar(kind, file_values[key])
        else:
            globals_[key] = default
    return RunConfig(experiment=experiment, params=params, **globals_)


def _add_common(sp):
    sp.add_argument("--config", help="flat key = value config file")
    sp.add_argument("--seed", type=int, help="seed for all randomness")
    sp.add_argument("--threads", type=int,
                    help="worker threads for sweeps (default: machine parallelism)")
    sp.add_argument("--tag", help="report directory suffix (default: timestamp)")
    sp.add_argument("--out", help="output root (or env SHIFTLAB_OUT; default ./out)")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shiftlab",
        description="Finite-truncation experiments on commuting weighted shifts.",
        epilog=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="experiment", required=True)

    s = sub.add_parser("ramp-block", help="single-block weighted shift norms")
    s.add_argument("--n", type=lambda t: _parse_scalar("int_list", t))
    s.add_argument("--p", type=lambda t: _parse_scalar("float_list", t))
    s.add_argument("--N", type=int, help="truncation degree (must exceed max n + 5)")
    _add_common(s)

    s = sub.add_parser("direct-sum", help="direct-sum vs restriction norm trends")
    s.add_argument("--blocks", type=int)
    s.add_argument("--p", type=lambda t: _parse_scalar("float_list", t))
    _add_common(s)

    s = sub.add_parser("factorial-family", help="factorial weight family thresholds")
    s.add_argument("--m", type=int)
    s.add_argument("--delta", type=lambda t: _parse_scalar("float_list", t))
    s.add_argument("--degrees", type=lambda t: _parse_scalar("int_list", t))
    _add_common(s)

    s = sub.add_parser("submodule-probe", help="submodule cross-commutator trends")
    s.add_argument("--family", choices=sorted(FAMILIES) + ["factorial-delta"])
    s.add_argument("--m", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--gens", help="';'-separated polynomial generators (see epilog)")
    s.add_argument("--p", type=lambda t: _parse_scalar("float_list", t))
    s.add_argument("--degrees", type=lambda t: _parse_scalar("int_list", t))
    s.add_argument("--delta", type=float)
    _add_common(s)

    s = sub.add_parser("trace-inequality", help="trace inequality along nested subspaces")
    s.add_argument("--family", choices=sorted(FAMILIES) + ["factorial-delta"])
    s.add_argument("--m", type=int)
    s.add_argument("--points", type=lambda t: _parse_scalar("points", t),
                   help="';'-separated points, coordinates comma-separated")
    s.add_argument("--gens")
    s.add_argument("--degrees", type=lambda t: _parse_scalar("int_list", t))
    s.add_argument("--delta", type=float)
    _add_common(s)

    s = sub.add_parser("quotient-probe", help="quotient-module smoothness probe")
    s.add_argument("--family", choices=sorted(FAMILIES) + ["factorial-delta"])
    s.add_argument("--m", type=int)
    s.add_argument("--gens")
    s.add_argument("--p", type=lambda t: _parse_scalar("float_list", t))
    s.add_argument("--degrees", type=lambda t: _parse_scalar("int_list", t))
    s.add_argument("--variety-dim", dest="variety_dim", type=float,
                   help="dimension of the zero variety (echoed, never computed)")
    s.add_argument("--delta", type=float)
    _add_common(s)

    s = sub.add_parser("identity-check", help="restricted self-commutator identity")
    s.add_argument("--trials", type=int)
    _add_common(s)

    s = sub.add_parser("list-families", help="list built-in weight families")
    _add_common(s)
    return ap


def parse_args(argv) -> RunConfig:
    ap = make_parser()
    ns = ap.parse_args(argv)
    flag_values = {k.replace("_", "-") if k == "variety_dim" else k: v
                   for k, v in vars(ns).items()
                   if k not in ("experiment", "config")}
    file_values = load_config_file(ns.config) if ns.config else {}
    return build_config(ns.experiment, file_values, flag_values)


def _nan_to_none(x):
    return None if x is None or (isinstance(x, float) and np.isnan(x)) else x


def execute(config: RunConfig) -> int:
    """Run one experiment, write its report directory, print a summary."""
    if config.experiment == "list-families":
        for name in sorted(FAMILIES) + ["factorial-delta"]:
            print(name)
        return 0

    p = config.params
    threads = config.threads or (os.cpu_count() or 1)
    delta = _nan_to_none(p.get("delta"))
    if p.get("gens"):
        gens = parse_generators(p["gens"], p.get("m", 1), p.get("k", 1))
    else:
        gens = []

    if config.experiment == "ramp-block":
        rep = xp.run_ramp_block_norms(p["n"], p["p"], p["N"])
    elif config.experiment == "direct-sum":
        rep = xp.run_direct_sum_trends(p["blocks"], p["p"])
    elif config.experiment == "factorial-family":
        rep = xp.run_factorial_thresholds(p["m"], p["delta"], p["degrees"] or None,
                              threads=threads)
    elif config.experiment == "submodule-probe":
        rep = xp.run_submodule_probe(p["family"], p["m"], p["k"], gens, p["p"],
                                   p["degrees"] or None, delta=delta,
                                   threads=threads)
    elif config.experiment == "trace-inequality":
        rep = xp.run_trace_inequality_check(
            p["family"], p["m"],
            points=p["points"] or None, generators=gens or None,
            degree_sweep=p["degrees"] or None, delta=delta)
    elif config.experiment == "quotient-probe":
        rep = xp.run_quotient_smoothness_probe(
            gens, p["m"], p["p"], p["degrees"] or None,
            variety_dimension=_nan_to_none(p.get("variety-dim")),
            family=p["family"], delta=delta)
    elif config.experiment == "identity-check":
        rep = xp.run_restriction_identity_check(p["trials"], seed=config.seed)
    else:
        raise ConfigError(f"unknown experiment {config.experiment}")

    rep.seed = config.seed
    out_root = Path(config.out or os.environ.get("SHIFTLAB_OUT", "out"))
    tag = config.tag or time.strftime("%Y%m%dT%H%M%S")
    outdir = write_report(rep, out_root / f"{rep.name}-{tag}")
    _print_summary(rep, outdir)
    return 0


def _print_summary(rep, outdir):
    print(f"{rep.name}: report written to {outdir} "
          f"({rep.runtime_seconds:.2f}s)")
    for key, value in rep.parameters.items():
        print(f"  {key} = {value}")
    for name, v in sorted(rep.verdicts.items()):
        extras = {k: val for k, val in v.items() if k != "verdict"}
        label = str(v.get("verdict", "recorded")).upper()
        print(f"  verdict {name}: {label}  {extras}")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_args(argv)
    except (ConfigError, PolynomialSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return execute(config)
    except TheoremViolationError as exc:
        print(f"THEOREM CHECK FAILED: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, PolynomialSyntaxError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
