"""Command-line front end.

Subcommands:

* ``analyze <file>``: full analytic report for one state (JSON).
* ``scan --family <name> --range k=lo:hi:step ... --out <csv>``:
  parameter-region scan producing one CSV row per grid point.
* ``simulate <file> --rounds N --seed S [--test-fraction F]
  [--filter e1,e2]``: protocol simulation report (JSON).
* ``table1 --eps1 X --eps2 Y --alphas a,b,c [--qstep S]``: for each alpha,
  the infimum q above which the filtered state stays useful (CSV).

States are described by JSON files containing either an explicit matrix
(nested rows of [re, im] pairs) or a family name with parameters, e.g.::

    {"family": "werner", "params": {"omega": 0.8}}
    {"matrix": [[[1,0],[0,0],...], ...]}

Exit codes: 0 success, 2 parse/validation error, 3 numerical failure.
All numeric output is formatted to at most 10 significant digits and rows
use plain "\\n" endings, so identical invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import steering
from .errors import BadRange, NumericalError, ParseError, ValidationError
from .families import (
    BellDiagonalParams,
    GammaParams,
    WernerParams,
    gamma_predicates,
    make_bell_diagonal,
    make_gamma,
    make_werner,
)
from .filtering import FilterAnnihilates, FilterPair, modified_protocol_useful
from .protocol import ProtocolConfig, run_protocol
from .qber import (
    classify_usefulness,
    min_secure_key_rate,
    optimal_triads,
    qber_min,
    qber_min_two_settings,
)
from .qstate import DensityMatrix, bloch_decompose, tensor_spectrum

_FAMILY_MAKERS = {
    "werner": (WernerParams, make_werner, ("omega",)),
    "gamma": (GammaParams, make_gamma, ("q", "alpha")),
    "bell_diagonal": (BellDiagonalParams, make_bell_diagonal, ("w1", "w2", "w3", "w4")),
}

# Parameter domains used to validate scan ranges up front.
_FAMILY_DOMAINS = {
    "werner": {"omega": (0.0, 1.0)},
    "gamma": {"q": (0.0, 1.0), "alpha": (0.0, math.pi / 4.0)},
    "bell_diagonal": {"w1": (0.0, 1.0), "w2": (0.0, 1.0), "w3": (0.0, 1.0)},
}


def _fmt(x: float) -> str:
    """Fixed 10-significant-digit decimal form used in all numeric output."""
    return format(float(x), ".10g")


def _jsonable(x):
    """Round floats through the output format so JSON output is stable."""
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(_fmt(x))
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


@dataclass(frozen=True)
class ScanResult:
    """Rectangular numeric scan output: column names plus one row per point."""

    header: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def to_csv(self) -> str:
        lines = [",".join(self.header)]
        lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"


def load_state_file(path: str) -> tuple[DensityMatrix, dict]:
    """Parse a state file; returns the state and an echo of its description."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read state file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    has_matrix = "matrix" in data
    has_family = "family" in data
    if has_matrix == has_family:
        raise ParseError(f"{path}: exactly one of 'matrix' or 'family' is required")
    if has_matrix:
        return _parse_matrix(path, data["matrix"]), {"matrix": data["matrix"]}
    return _parse_family(path, data), {
        "family": data["family"], "params": data.get("params")}


def _parse_matrix(path: str, rows) -> DensityMatrix:
    if not isinstance(rows, list) or len(rows) != 4:
        raise ParseError(f"{path}: 'matrix' must contain 4 rows")
    mat = np.empty((4, 4), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 4:
            raise ParseError(f"{path}: matrix row {i} must contain 4 entries")
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(v, (int, float)) for v in entry)):
                raise ParseError(
                    f"{path}: matrix[{i}][{j}] must be a [re, im] number pair")
            mat[i, j] = complex(entry[0], entry[1])
    return DensityMatrix(mat)


def _parse_family(path: str, data: dict) -> DensityMatrix:
    name = data["family"]
    if name not in _FAMILY_MAKERS:
        raise ParseError(
            f"{path}: unknown family {name!r}; expected one of "
            f"{sorted(_FAMILY_MAKERS)}")
    params_cls, maker, fields = _FAMILY_MAKERS[name]
    params = data.get("params")
    if not isinstance(params, dict):
        raise ParseError(f"{path}: family state needs a 'params' object")
    if set(params) != set(fields):
        raise ParseError(
            f"{path}: family {name!r} needs exactly the parameters "
            f"{list(fields)}, got {sorted(params)}")
    values = {}
    for key in fields:
        if not isinstance(params[key], (int, float)):
            raise ParseError(f"{path}: params.{key} must be a number")
        values[key] = float(params[key])
    return maker(params_cls(**values))


def analyze_report(rho: DensityMatrix, echo: dict) -> dict:
    bf = bloch_decompose(rho)
    spec = tensor_spectrum(bf)
    sv = steering.verdict(spec)
    uv = classify_usefulness(spec)
    return {
        "input": echo,
        "bloch": {"a_vec": bf.a_vec, "b_vec": bf.b_vec, "w": bf.w},
        "spectrum": {"sigma": list(spec.sigma), "signed": list(spec.signed)},
        "steering": {
            "f3_bound": sv.f3_bound,
            "steerable": sv.steerable,
            "chsh_bound": sv.chsh_bound,
            "chsh_violating": sv.chsh_violating,
        },
        "qber": {
            "q_min": uv.q_min,
            "q_min_two_settings": qber_min_two_settings(spec),
            "critical_rate": uv.critical_rate,
            "margin": uv.margin,
            "useful": uv.useful,
            "key_rate_at_q_min": min_secure_key_rate(uv.q_min),
        },
    }


def cmd_analyze(args: argparse.Namespace) -> int:
    rho, echo = load_state_file(args.state_file)
    report = analyze_report(rho, echo)
    _emit(json.dumps(_jsonable(report), indent=2) + "\n", args.out)
    return 0


def _parse_range(text: str) -> tuple[str, float, float, float]:
    try:
        key, _, rest = text.partition("=")
        lo_s, hi_s, step_s = rest.split(":")
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
    except ValueError as exc:
        raise BadRange(f"range {text!r} is not of the form k=lo:hi:step") from exc
    if not key:
        raise BadRange(f"range {text!r} is missing a parameter name")
    if not (math.isfinite(lo) and math.isfinite(hi) and math.isfinite(step)):
        raise BadRange(f"range {text!r} has non-finite bounds")
    if step <= 0.0:
        raise BadRange(f"range {text!r} must have a positive step")
    if hi < lo:
        raise BadRange(f"range {text!r} is reversed (hi < lo)")
    return key, lo, hi, step


def _grid(lo: float, hi: float, step: float) -> list[float]:
    # Inclusive of hi within a small tolerance so lo:hi:step hits hi exactly.
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [min(lo + i * step, hi) for i in range(count + 1)]


def scan_result(family: str, range_args: list[str]) -> ScanResult:
    """Evaluate the generic pipeline on a declared parameter grid.

    Rows follow nested-loop order, outermost range first as declared on
    the command line.  For bell_diagonal scans the fourth weight is
    derived (w4 = 1 - w1 - w2 - w3) and grid points leaving the simplex
    are skipped.
    """
    if family not in _FAMILY_MAKERS:
        raise BadRange(
            f"unknown family {family!r}; expected one of {sorted(_FAMILY_MAKERS)}")
    domains = _FAMILY_DOMAINS[family]
    parsed = [_parse_range(r) for r in range_args]
    seen = [k for k, *_ in parsed]
    if sorted(seen) != sorted(domains):
        raise BadRange(
            f"family {family!r} needs exactly one range per parameter "
            f"{sorted(domains)}, got {seen}")
    for key, lo, hi, _ in parsed:
        dom_lo, dom_hi = domains[key]
        if lo < dom_lo - 1e-12 or hi > dom_hi + 1e-12:
            raise BadRange(
                f"range for {key!r} must stay within [{dom_lo:g}, {dom_hi:g}]")

    param_names = [k for k, *_ in parsed]
    grids = [_grid(lo, hi, step) for _, lo, hi, step in parsed]
    if family == "bell_diagonal":
        header = (*param_names, "w4", "f3_bound", "chsh_bound", "q_min",
                  "steerable", "useful", "chsh_violating", "absolutely_local")
    else:
        header = (*param_names, "f3_bound", "chsh_bound", "q_min",
                  "steerable", "useful", "chsh_violating")

    rows = []
    stack = [()]
    for grid in grids:
        stack = [prefix + (v,) for prefix in stack for v in grid]
    for point in stack:
        kwargs = dict(zip(param_names, point))
        extra_cols: tuple[float, ...] = ()
        if family == "bell_diagonal":
            w4 = 1.0 - sum(kwargs.values())
            if w4 < -1e-9:
                continue
            w4 = max(w4, 0.0)
            params = BellDiagonalParams(kwargs["w1"], kwargs["w2"], kwargs["w3"], w4)
            state = make_bell_diagonal(params)
            extra_cols = (w4,)
        elif family == "werner":
            state = make_werner(WernerParams(**kwargs))
        else:
            state = make_gamma(GammaParams(**kwargs))
        spec = tensor_spectrum(bloch_decompose(state))
        sv = steering.verdict(spec)
        uv = classify_usefulness(spec)
        row = (*point, *extra_cols, sv.f3_bound, sv.chsh_bound, uv.q_min,
               float(sv.steerable), float(uv.useful), float(sv.chsh_violating))
        if family == "bell_diagonal":
            row = row + (float(steering.belldiag_absolutely_chsh_local(params.weights)),)
        rows.append(row)
    return ScanResult(header=header, rows=tuple(rows))


def cmd_scan(args: argparse.Namespace) -> int:
    result = scan_result(args.family, args.range)
    _emit(result.to_csv(), args.out)
    return 0


def _parse_filter(text: str) -> FilterPair:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(f"--filter expects 'e1,e2', got {text!r}")
    try:
        e1, e2 = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ParseError(f"--filter expects numbers, got {text!r}") from exc
    return FilterPair(e1, e2)


def cmd_simulate(args: argparse.Namespace) -> int:
    rho, echo = load_state_file(args.state_file)
    filter_pair = _parse_filter(args.filter) if args.filter else None
    alice, bob = optimal_triads(bloch_decompose(rho))
    cfg = ProtocolConfig(
        rounds=args.rounds,
        seed=args.seed,
        alice_triad=alice,
        bob_triad=bob,
        test_fraction=args.test_fraction,
        filter=filter_pair,
    )
    report = run_protocol(rho, cfg)
    payload = {
        "input": echo,
        "config": {
            "rounds": cfg.rounds,
            "seed": cfg.seed,
            "test_fraction": cfg.test_fraction,
            "filter": None if filter_pair is None else [filter_pair.eps1,
                                                        filter_pair.eps2],
            "alice_triad": cfg.alice_triad.dirs,
            "bob_triad": cfg.bob_triad.dirs,
        },
        "report": {
            "sifted_count": report.sifted_count,
            "disclosed_count": report.disclosed_count,
            "empirical_qber": report.empirical_qber,
            "empirical_cjwr": report.empirical_cjwr,
            "correlators": list(report.correlators),
            "key_count_by_basis": list(report.key_count_by_basis),
            "key_mismatch_by_basis": list(report.key_mismatch_by_basis),
            "p_succ_empirical": report.p_succ_empirical,
            "raw_key_alice": "".join(map(str, report.raw_key_alice.tolist())),
            "raw_key_bob": "".join(map(str, report.raw_key_bob.tolist())),
        },
    }
    _emit(json.dumps(_jsonable(payload), indent=2) + "\n", args.out)
    return 0


def useful_q_start(alpha: float, filter_pair: FilterPair, q_step: float,
                   tol: float = 1e-3) -> float | None:
    """Infimum q above which the filtered gamma state stays useful.

    Scans the q grid (q_step, 2 q_step, ..., 1) from the top down to find
    the contiguous useful tail, then bisects the boundary to ``tol``.
    Returns None when even q = 1 is not useful.  Annihilating filters
    count as not useful.
    """
    def useful(q: float) -> bool:
        try:
            return modified_protocol_useful(
                make_gamma(GammaParams(q=q, alpha=alpha)), filter_pair)
        except FilterAnnihilates:
            return False

    count = int(math.floor(1.0 / q_step + 1e-9))
    grid = [min((i + 1) * q_step, 1.0) for i in range(count)]
    if grid[-1] < 1.0 - 1e-12:
        grid.append(1.0)
    if not useful(grid[-1]):
        return None
    start_idx = len(grid) - 1
    while start_idx > 0 and useful(grid[start_idx - 1]):
        start_idx -= 1
    q_true = grid[start_idx]
    if start_idx > 0:
        q_false = grid[start_idx - 1]
    else:
        if useful(0.0):
            return 0.0
        q_false = 0.0
    while q_true - q_false > tol:
        mid = 0.5 * (q_true + q_false)
        if useful(mid):
            q_true = mid
        else:
            q_false = mid
    return q_true


def table1_result(eps1: float, eps2: float, alphas: list[float],
                  q_step: float) -> ScanResult:
    if not 0.0 < q_step <= 0.5:
        raise BadRange(f"qstep must lie in (0, 0.5], got {q_step!r}")
    filter_pair = FilterPair(eps1, eps2)
    rows = []
    for alpha in alphas:
        alpha = GammaParams(q=1.0, alpha=alpha).alpha  # validates the range
        q_start = useful_q_start(alpha, filter_pair, q_step)
        if q_start is None:
            rows.append((alpha, math.nan, math.nan, math.nan))
            continue
        steer = gamma_predicates(GammaParams(q=q_start, alpha=alpha)).steerable
        rows.append((alpha, q_start, 1.0, float(steer)))
    return ScanResult(
        header=("alpha", "q_start", "q_end", "steerable_at_start"),
        rows=tuple(rows),
    )


def cmd_table1(args: argparse.Namespace) -> int:
    try:
        alphas = [float(a) for a in args.alphas.split(",") if a.strip() != ""]
    except ValueError as exc:
        raise ParseError("--alphas expects comma-separated numbers") from exc
    if not alphas:
        raise ParseError("--alphas needs at least one value")
    result = table1_result(args.eps1, args.eps2, alphas, args.qstep)
    _emit(result.to_csv(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steerqkd",
        description="Two-qubit steering analysis and QKD protocol simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="analytic report for one state")
    p_analyze.add_argument("state_file")
    p_analyze.add_argument("--out", default=None, help="write JSON here instead of stdout")
    p_analyze.set_defaults(func=cmd_analyze)

    p_scan = sub.add_parser("scan", help="parameter-region scan to CSV")
    p_scan.add_argument("--family", required=True,
                        choices=sorted(_FAMILY_MAKERS))
    p_scan.add_argument("--range", action="append", required=True,
                        metavar="k=lo:hi:step",
                        help="one per family parameter; outermost first")
    p_scan.add_argument("--out", required=True, help="output CSV path")
    p_scan.set_defaults(func=cmd_scan)

    p_sim = sub.add_parser("simulate", help="run the protocol simulation")
    p_sim.add_argument("state_file")
    p_sim.add_argument("--rounds", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--test-fraction", type=float, default=0.1,
                       dest="test_fraction")
    p_sim.add_argument("--filter", default=None, metavar="e1,e2",
                       help="apply local filters with these strengths")
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_t1 = sub.add_parser("table1", help="useful filtered-q ranges per alpha")
    p_t1.add_argument("--eps1", type=float, required=True)
    p_t1.add_argument("--eps2", type=float, required=True)
    p_t1.add_argument("--alphas", required=True, metavar="a,b,c")
    p_t1.add_argument("--qstep", type=float, default=0.01)
    p_t1.add_argument("--out", default=None)
    p_t1.set_defaults(func=cmd_table1)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except np.linalg.LinAlgError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
