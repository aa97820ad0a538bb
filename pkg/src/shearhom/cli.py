"""Command-line front end: ``shearhom estimate|sweep|converge|validate``."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Sequence

from .errors import ConfigError, ShearHomError
from .lattice import lattice_from_json
from .pwe import Direction, SeriesConfig
from .report import CSV_COLUMNS, SweepSpec, converge, estimate_all, run_sweep
from .templates import template_from_json
from .validation import run_suite

UNITS_LINE = "# units: speeds in m/s; last_term in Pa; f dimensionless"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.12g}"


def _load_doc(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


def config_hash(doc: dict) -> str:
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _mu0(text):
    if text is None or text in ("mid", "mean"):
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("mu0 must be 'mid', 'mean' or a modulus in Pa") from None


def _series(doc: dict, args) -> SeriesConfig:
    base = dict(doc.get("series", {}))
    for key in ("j", "m", "mu0", "path"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    try:
        return SeriesConfig(**base)
    except TypeError as exc:
        raise ConfigError(f"bad series settings: {exc}") from None


def _kappa_deg(doc: dict, args) -> float:
    if args.kappa is not None:
        return float(args.kappa)
    return float(doc.get("kappa_deg", doc.get("sweep", {}).get("kappa_deg", 0.0)))


def _header(kind: str, doc: dict, series: SeriesConfig, kappa_deg: float) -> list[str]:
    return [
        f"# shearhom {kind}",
        UNITS_LINE,
        f"# config_hash: {config_hash(doc)}",
        f"# j={series.j} N={2 * series.j + 1} m={series.m} mu0={series.mu0} "
        f"path={series.path} kappa_deg={_fmt(kappa_deg)}",
    ]


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _rows_to_csv(reports) -> list[str]:
    lines = [",".join(CSV_COLUMNS)]
    for r in reports:
        lines.append(",".join(_fmt(v) for v in r.row()))
    return lines


def _plot_script(csv_path: str) -> str:
    return f'''"""Plot the sweep stored in {Path(csv_path).name}."""

import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {str(csv_path)!r}
with open(path) as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
f = [float(r["f"]) for r in rows]
for col in ("c_numeric", "c_pwe", "c_mm", "c_mmtilde", "c_mst_a", "c_mst_b"):
    pts = [(x, float(r[col])) for x, r in zip(f, rows) if r[col]]
    if pts:
        xs, ys = zip(*pts)
        plt.plot(xs, ys, "o-" if col == "c_numeric" else "--", label=col)
plt.xlabel("f")
plt.ylabel("c (m/s)")
plt.legend()
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_estimate(args) -> int:
    doc = _load_doc(args.config)
    lattice = lattice_from_json(doc)
    series = _series(doc, args)
    kdeg = _kappa_deg(doc, args)
    f = float(1.0 - lattice.filling_fractions[0])
    rep = estimate_all(lattice, Direction.from_angle(kdeg), series, f=f)
    if args.format == "json":
        _emit([json.dumps(rep.as_dict(), indent=2, sort_keys=True)], args.out)
    else:
        _emit(_header("estimate", doc, series, kdeg) + _rows_to_csv([rep]), args.out)
    if "numeric" in rep.errors:
        print(f"error: {rep.errors['numeric']}", file=sys.stderr)
        return 3
    return 0


def sweep_spec_from_doc(doc: dict, args) -> SweepSpec:
    if "sweep" not in doc:
        raise ConfigError("sweep config needs a 'sweep' section")
    sw = doc["sweep"]
    template = template_from_json(sw)
    grid = sw.get("f", {})
    stop = float(grid.get("stop", template.f_max()))
    return SweepSpec(template, float(grid.get("start", 0.0)), stop, int(grid.get("count", 21)),
                     _kappa_deg(doc, args), _series(doc, args),
                     numeric=not getattr(args, "no_numeric", False))


def cmd_sweep(args) -> int:
    doc = _load_doc(args.config)
    spec = sweep_spec_from_doc(doc, args)
    reports = run_sweep(spec, workers=args.workers)
    for r in reports:
        for name, msg in sorted(r.errors.items()):
            print(f"warning: f={_fmt(r.f)} {name}: {msg}", file=sys.stderr)
    t = spec.template
    names = [m.name or "?" for m in (t.matrix, t.inclusion, t.core) if m is not None]
    head = _header("sweep", doc, spec.series, spec.kappa_deg)
    head.append(f"# template={t.kind} materials={'/'.join(names)} "
                f"mst_a=host {names[0]} mst_b=host {names[1] if not t.coated else '-'}")
    _emit(head + _rows_to_csv(reports), args.out)
    if args.out and args.plot:
        Path(args.out).with_suffix(".plot.py").write_text(_plot_script(args.out), encoding="utf-8")
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of integers") from None


def cmd_converge(args) -> int:
    doc = _load_doc(args.config)
    lattice = lattice_from_json(doc)
    conv = doc.get("converge", {})
    j_list = args.j_list or conv.get("j", [3, 5, 7, 9, 12])
    m_list = args.m_list or conv.get("m", [5, 10, 50, 150])
    series = _series(doc, args)
    kdeg = _kappa_deg(doc, args)
    study = converge(lattice, j_list, m_list, Direction.from_angle(kdeg), series.mu0, series.path)
    best = study.smallest_within(args.tol)
    err = study.relative_error()
    lines = _header("converge", doc, series, kdeg)
    lines.append(f"# reference: j={study.j_list[-1]} m={study.m_list[-1]}; "
                 f"smallest within {args.tol:g}: "
                 + (f"j={best[0]} m={best[1]}" if best else "none"))
    lines.append("j,N,m,c_numeric,rel_error,within_tol")
    for a, j in enumerate(study.j_list):
        for b, m in enumerate(study.m_list):
            v = study.values[a, b]
            ok = bool(err[a, b] <= args.tol) if v == v else False
            lines.append(",".join([str(j), str(2 * j + 1), str(m),
                                   _fmt(v if v == v else None),
                                   _fmt(err[a, b] if v == v else None), str(int(ok))]))
    _emit(lines, args.out)
    if args.out:
        decay = ["# term magnitudes |((-C)^n f, f)| / mu0 in Pa", "j,n,term"]
        for j, terms in study.term_decay.items():
            decay.extend(f"{j},{n},{_fmt(t)}" for n, t in enumerate(terms))
        Path(args.out).with_suffix(".terms.csv").write_text("\n".join(decay) + "\n",
                                                            encoding="utf-8")
    return 0


def cmd_validate(args) -> int:
    checks = run_suite(args.suite)
    lines = [c.line() for c in checks]
    _emit(lines, args.out)
    return 0 if all(c.passed for c in checks) else 1


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def _series_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--j", type=int, help="modes per half-axis (grid N = 2j+1)")
    p.add_argument("--m", type=int, help="highest series power kept (m + 1 terms)")
    p.add_argument("--mu0", type=_mu0, help="reference modulus: mid, mean or a value in Pa")
    p.add_argument("--kappa", type=float, help="propagation angle in degrees from x1")
    p.add_argument("--path", choices=("direct", "conv"), help="operator application path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shearhom",
                                     description="Effective antiplane shear speed of 2D "
                                                 "periodic composites.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="all estimators for one lattice config")
    p.add_argument("--config", required=True)
    _series_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="concentration sweep over a template")
    p.add_argument("--config", required=True)
    _series_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot", action="store_true", help="write a companion plot script")
    p.add_argument("--no-numeric", action="store_true", help="closed-form estimates only")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("converge", help="numeric speed over a (j, m) grid")
    p.add_argument("--config", required=True)
    _series_flags(p)
    p.add_argument("--j-list", type=_int_list)
    p.add_argument("--m-list", type=_int_list)
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("validate", help="run property suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--config", help="unused; accepted for interface symmetry")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ShearHomError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
