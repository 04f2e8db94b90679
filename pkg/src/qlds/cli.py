"""Command-line front end.

Exit codes: 0 success, 1 bad input or failed precondition, 2 a residual
check failed. A CHSH violation is a result, not a failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import chsh as chsh_mod
from . import ds
from .additivity import DensityMatrix, additivity_operator, classify_pair, verify_proposition1
from .finite import (
    CoherentFamily,
    FiniteSystem,
    coherent_overlap,
    coherent_pair_D,
    direct_overlap,
    random_fiducial,
    resolution_of_identity,
)
from .lattice import Subspace, join, meet
from .linalg import Tolerance, commutator, get_tolerance, matrix_from_json, matrix_to_json, set_tolerance

EXIT_OK, EXIT_INPUT, EXIT_RESIDUAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return matrix_to_json(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _emit(args, payload, csv_rows=None):
    fmt = args.format or ("csv" if csv_rows is not None and getattr(args, "sweep", None) else "json")
    if fmt == "csv":
        if csv_rows is None:
            raise UsageError("this command has no CSV output")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = list(csv_rows[0].keys())
        writer.writerow(header)
        for row in csv_rows:
            writer.writerow([_fmt(row[h]) for h in header])
        text = buf.getvalue()
    else:
        if isinstance(payload, dict) and not args.no_timestamp:
            payload = {**payload, "timestamp": datetime.now(timezone.utc).isoformat()}
        text = json.dumps(_jsonable(payload), indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _setting(args) -> chsh_mod.Su2Setting:
    raw = [args.a_re, args.a_im, args.b_re, args.b_im]
    if any(v is not None for v in raw):
        if args.theta is not None:
            raise UsageError("give either --theta or --a-re/--a-im/--b-re/--b-im, not both")
        a_re, a_im, b_re, b_im = (0.0 if v is None else v for v in raw)
        return chsh_mod.Su2Setting(complex(a_re, a_im), complex(b_re, b_im))
    return chsh_mod.Su2Setting.from_theta(args.theta if args.theta is not None else np.pi / 8)


def chsh_report(setting: chsh_mod.Su2Setting, theta: float | None = None) -> dict:
    table = chsh_mod.probability_table(setting)
    lhs = chsh_mod.chsh_lhs(setting)
    boole = chsh_mod.boole_violation(setting)
    tol = get_tolerance().zero_tol
    report = {}
    if theta is not None:
        report["theta"] = float(theta)
    report.update(
        {
            "setting": setting.to_json(),
            "kappa": table.kappa,
            "lambda": table.lambda_val,
            "table": table.to_json(),
            "chsh_lhs": lhs,
            "chsh_lhs_closed_form": chsh_mod.chsh_lhs_closed_form(setting),
            "bound": 3,
            "violated": lhs > 3 + tol,
            "boole_sum": boole.lhs_sum,
            "boole_joint": boole.joint,
            "boole_violated": boole.violated,
        }
    )
    return report


def _csv_row(report: dict) -> dict:
    row = {
        "theta": report.get("theta", float("nan")),
        "kappa": report["kappa"],
        "lambda": report["lambda"],
    }
    for entry in report["table"]:
        for key in ("p11", "p01", "p10", "p00"):
            row[f"{entry['measurement']}_{key}"] = entry[key]
    row.update(
        chsh_lhs=report["chsh_lhs"],
        bound=3,
        violated=report["violated"],
        boole_sum=report["boole_sum"],
        boole_violated=report["boole_violated"],
    )
    return row


def parse_sweep(spec: str) -> np.ndarray:
    try:
        lo, hi, steps = spec.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError as exc:
        raise UsageError(f"--sweep expects lo:hi:steps, got {spec!r}") from exc
    if steps < 1:
        raise UsageError("--sweep needs at least one step")
    return np.linspace(lo, hi, steps + 1)


def cmd_chsh(args) -> int:
    if args.sweep:
        if any(v is not None for v in (args.theta, args.a_re, args.a_im, args.b_re, args.b_im)):
            raise UsageError("--sweep cannot be combined with a fixed setting")
        reports = [chsh_report(chsh_mod.Su2Setting.from_theta(t), t) for t in parse_sweep(args.sweep)]
        _emit(args, {"sweep": args.sweep, "rows": reports}, [_csv_row(r) for r in reports])
        return EXIT_OK
    setting = _setting(args)
    theta = args.theta if args.theta is not None else (np.pi / 8 if args.a_re is None else None)
    report = chsh_report(setting, theta)
    _emit(args, report, [_csv_row(report)])
    return EXIT_OK


def h3_example() -> tuple[Subspace, Subspace]:
    return Subspace.span([1, 0, 0]), Subspace.span([1, 1, 0])


def cmd_lattice_demo(args) -> int:
    h1, h2 = h3_example()
    op = additivity_operator(h1, h2)
    report = verify_proposition1(h1, h2)
    payload = {
        "P_H1": h1.projector,
        "P_H2": h2.projector,
        "P_join": join(h1, h2).projector,
        "P_meet": meet(h1, h2).projector,
        "D": op.matrix,
        "commutator": commutator(h1.projector, h2.projector),
        "eigenvalues": [float(v) for v in op.eigenvalues],
        "proposition1": report.to_json(),
    }
    _emit(args, payload)
    return EXIT_OK if report.passed else EXIT_RESIDUAL


def _parse_fiducial(text: str, d: int) -> np.ndarray:
    path = Path(text)
    if path.exists():
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        try:
            data = [complex(tok.replace(" ", "")) for tok in text.split(",")]
        except ValueError as exc:
            raise UsageError(f"cannot parse fiducial {text!r}") from exc
    if isinstance(data, dict):
        data = data["fiducial"]
    vec = np.array([complex(*z) if isinstance(z, list) else complex(z) for z in data], dtype=np.complex128)
    if vec.size != d:
        raise UsageError(f"fiducial has {vec.size} components, expected {d}")
    return vec


def coherent_report(fam: CoherentFamily) -> dict:
    pairs = fam.index_pairs()
    overlap_res = 0.0
    for p in pairs:
        for q in pairs:
            overlap_res = max(overlap_res, abs(coherent_overlap(fam, p, q) - direct_overlap(fam, p, q)))
    d_res, skipped = 0.0, 0
    tol = get_tolerance()
    for i, p in enumerate(pairs):
        for q in pairs[i + 1 :]:
            if 1 - abs(coherent_overlap(fam, p, q)) ** 2 <= tol.zero_tol:
                skipped += 1
                continue
            closed = coherent_pair_D(fam, p, q).matrix
            lattice = additivity_operator(fam.subspace(*p), fam.subspace(*q)).matrix
            d_res = max(d_res, float(np.linalg.norm(closed - lattice)))
    return {
        "d": fam.d,
        "seed": fam.seed,
        "fiducial": [[float(z.real), float(z.imag)] for z in fam.fiducial],
        "resolution_of_identity_residual": resolution_of_identity(fam),
        "overlap_residual": float(overlap_res),
        "pair_D_residual": d_res,
        "parallel_pairs_skipped": skipped,
    }


def cmd_coherent(args) -> int:
    d = args.d
    try:
        system = FiniteSystem(d)
    except ValueError as exc:
        raise UsageError("dimension must be odd (and at least 3)") from exc
    if args.fiducial is not None:
        fam = CoherentFamily(system, _parse_fiducial(args.fiducial, d))
    else:
        seed = 0 if args.seed is None else args.seed
        fam = CoherentFamily(system, random_fiducial(d, seed), seed=seed)
    report = coherent_report(fam)
    tol = get_tolerance().zero_tol
    ok = all(
        report[k] <= tol for k in ("resolution_of_identity_residual", "overlap_residual", "pair_D_residual")
    )
    report["passed"] = ok
    _emit(args, report)
    return EXIT_OK if ok else EXIT_RESIDUAL


def _load_json(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return json.loads(text)


def _classify_inputs(args):
    if args.input:
        data = _load_json(args.input)
        h1 = Subspace.from_json(data["h1"])
        h2 = Subspace.from_json(data["h2"])
        rho = DensityMatrix(matrix_from_json(data["rho"]))
        eps = data.get("epsilon", args.epsilon)
        return h1, h2, rho, eps
    h1, h2 = h3_example()
    op = additivity_operator(h1, h2)
    rho = {
        "max": op.eigenstate(-1),
        "min": op.eigenstate(0),
        "mixed": DensityMatrix.maximally_mixed(3),
    }[args.state]
    return h1, h2, rho, args.epsilon


def cmd_classify(args) -> int:
    h1, h2, rho, eps = _classify_inputs(args)
    result = classify_pair(h1, h2, rho, eps)
    prop1 = verify_proposition1(h1, h2)
    payload = {**result.to_json(), "residuals": prop1.residuals}
    _emit(args, payload)
    return EXIT_OK if prop1.passed else EXIT_RESIDUAL


def _parse_employees(text: str) -> tuple[int, int, int]:
    try:
        n1, n2, n3 = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--employees expects n1,n2,n3, got {text!r}") from exc
    return n1, n2, n3


def cmd_ds_table1(args) -> int:
    extra = {}
    if args.employees:
        m, under_35 = ds.employee_example(*_parse_employees(args.employees))
        over_35 = m.frame.complement(under_35)
        extra = {
            "event": "under 35",
            "lower": ds.belief(m, under_35),
            "upper": ds.plausibility(m, under_35),
            "lower_complement": ds.belief(m, over_35),
            "lower_sum_with_complement": ds.belief(m, under_35) + ds.belief(m, over_35),
        }
    elif args.mass:
        m = ds.MassFunction.from_json(_load_json(args.mass))
    else:
        seed = 0 if args.seed is None else args.seed
        m = ds.random_mass_function(args.frame_size, seed)
        extra = {"seed": seed}
    trials = args.trials
    if trials is None and m.frame.size > 10:
        trials = 10000
    report = ds.check_table1(m, trials, args.seed)
    payload = {"mass_function": m.to_json(), **extra, **report.to_json()}
    _emit(args, payload)
    return EXIT_OK if report.passed else EXIT_RESIDUAL


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV output")
    common.add_argument("--tol", type=float, help="absolute zero tolerance (default 1e-9 or $QLDS_TOL)")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field from JSON")
    common.add_argument("-o", "--output", help="write to this file instead of standard output")
    common.add_argument("--seed", type=int)

    parser = _Parser(prog="qlds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("chsh", parents=[common], help="Bell-state table and CHSH/Boole checks")
    p.add_argument("--theta", type=float, help="a = exp(i theta), b = 0 (radians; pi/8 = 0.39269908169872414)")
    for name in ("a-re", "a-im", "b-re", "b-im"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--sweep", help="theta sweep lo:hi:steps (steps+1 rows)")
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("lattice-demo", parents=[common], help="the H(3) worked example")
    p.set_defaults(func=cmd_lattice_demo)

    p = sub.add_parser("coherent", parents=[common], help="coherent-state checks in odd dimension")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--fiducial", help="JSON [[re,im],...], comma-separated complex numbers, or a file")
    p.set_defaults(func=cmd_coherent)

    p = sub.add_parser("classify", parents=[common], help="lower/upper/Kolmogorov verdict for a pair")
    p.add_argument("--input", help='JSON file ("-" for stdin) with "h1", "h2", "rho" and optional "epsilon"')
    p.add_argument("--state", choices=("max", "min", "mixed"), default="max",
                   help="state for the built-in H(3) pair: top or bottom eigenvector of D, or 1/3")
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("ds-table1", parents=[common], help="lower/upper probability property table")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--employees", help="n1,n2,n3 for the employee-age example")
    src.add_argument("--mass", help="mass function JSON file")
    p.add_argument("--frame-size", type=int, default=5, help="frame size for a random mass function")
    p.add_argument("--trials", type=int, help="random subset pairs (default: all pairs)")
    p.set_defaults(func=cmd_ds_table1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    previous = None
    try:
        if args.tol is not None:
            previous = set_tolerance(Tolerance(rank_tol=get_tolerance().rank_tol, zero_tol=args.tol))
        return args.func(args)
    except (UsageError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"qlds {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if previous is not None:
            set_tolerance(previous)


if __name__ == "__main__":
    sys.exit(main())
