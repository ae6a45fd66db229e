"""Command-line entry point: ``diaghyp run|verify|converge|plot|dislocation``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .config import ConfigError, ConfigFile, load
from .dislocation import run_periodic, rescale_experiment
from .estimates import MonotonicityViolation
from .solver import SolverError, run
from .study import converge
from .verify import run_checks, verify

log = logging.getLogger("diaghyp")


def _outputs(cfg: ConfigFile, config_path: Path, out_dir: Path):
    stem = config_path.stem
    outs = cfg.outputs
    fields = out_dir / outs.get("fields_csv", f"{stem}_fields.csv")
    monitors = out_dir / outs.get("monitors_csv", f"{stem}_monitors.csv")
    return fields, monitors, int(outs.get("snapshots", 1))


def _print_checks(checks) -> bool:
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print("verify:", "all checks passed" if ok else "FAILED")
    return ok


def cmd_run(args) -> int:
    cfg = load(args.config)
    config = cfg.build(keep_snapshots=args.strict)
    result = run(config)
    fields, monitors, snaps = _outputs(cfg, Path(args.config), Path(args.out_dir))
    io.write_fields(fields, result, snaps)
    io.write_monitors(monitors, result)
    print(f"wrote {fields} and {monitors} ({result.steps} steps to t={result.times[-1]:g})")
    if args.strict:
        failed = [c for c in run_checks(result) if not c.passed]
        for c in failed:
            print(c.line(), file=sys.stderr)
        return 1 if failed else 0
    return 0


def cmd_verify(args) -> int:
    cfg = load(args.config)
    config = cfg.build(keep_snapshots=True)
    _, checks = verify(config)
    return 0 if _print_checks(checks) else 1


def cmd_converge(args) -> int:
    cfg = load(args.config)
    config = cfg.build()
    oracle = cfg.oracle or "self"
    rows = converge(config, args.refine, oracle)
    header = ["n", "eps", "l1_error", "observed_order"]
    table = [[r.n, r.eps, r.error, r.order] for r in rows]
    out = Path(args.out_dir) / f"{Path(args.config).stem}_converge.csv"
    io.write_table(out, header, table)
    print(f"{'n':>8} {'eps':>12} {'l1_error':>14} order  (reference: {oracle})")
    for r in rows:
        print(f"{r.n:>8} {r.eps:>12.4e} {r.error:>14.6e} {r.order}")
    print(f"wrote {out}")
    return 0


def cmd_plot(args) -> int:
    script = io.write_plot_script(args.csv)
    print(f"wrote {script}")
    return 0


def cmd_dislocation_run(args) -> int:
    cfg = load(args.config)
    spec = cfg.dislocation_spec()
    if cfg.grid.get("topology", "line") != "periodic":
        raise ConfigError("grid: dislocation run needs a periodic grid")
    run_cfg = cfg.build(keep_snapshots=True)
    out = run_periodic(spec, run_cfg.profiles, run_cfg.grid.n, eps=run_cfg.eps,
                       t_end=run_cfg.t_end, cfl=run_cfg.cfl,
                       monitor_every=run_cfg.monitor_every)
    fields, monitors, snaps = _outputs(cfg, Path(args.config), Path(args.out_dir))
    io.write_fields(fields, out.result, snaps)
    io.write_monitors(monitors, out.result)
    print(f"wrote {fields} and {monitors}; gradient-mean drift {out.mean_drift:.3e}")
    if args.strict:
        failed = [c for c in run_checks(out.result) if not c.passed]
        for c in failed:
            print(c.line(), file=sys.stderr)
        return 1 if failed else 0
    return 0


def cmd_dislocation_rescale(args) -> int:
    cfg = load(args.config)
    spec = cfg.dislocation_spec()
    if cfg.rescale is None:
        raise ConfigError("rescale: missing section with the list of deltas")
    run_cfg = cfg.build()
    deltas = sorted(cfg.rescale["deltas"], reverse=True)
    rows = rescale_experiment(spec, run_cfg.profiles, deltas, dx=run_cfg.grid.dx,
                              t_end=run_cfg.t_end, eps=run_cfg.eps, cfl=run_cfg.cfl)
    out = Path(args.out_dir) / f"{Path(args.config).stem}_rescale.csv"
    io.write_table(out, ["delta", "n", "nonlocal_sup", "distance_to_local"],
                   [[r.delta, r.n, r.nonlocal_sup, r.distance] for r in rows])
    print(f"{'delta':>10} {'n':>6} {'nonlocal_sup':>14} {'distance':>14}")
    for r in rows:
        print(f"{r.delta:>10.4g} {r.n:>6} {r.nonlocal_sup:>14.6e} {r.distance:>14.6e}")
    print(f"wrote {out}")
    if args.strict:
        sup = [r.nonlocal_sup for r in rows]
        dist = [r.distance for r in rows]
        decreasing = all(a > b for a, b in zip(sup, sup[1:])) and all(
            a > b for a, b in zip(dist, dist[1:]))
        return 0 if decreasing else 1
    return 0


def _refine_list(text: str):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty refinement list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diaghyp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, strict=True):
        p.add_argument("config", help="JSON run configuration")
        p.add_argument("--out-dir", default=".", help="directory for CSV outputs")
        if strict:
            p.add_argument("--strict", action="store_true",
                           help="exit nonzero when an invariant check fails")

    p = sub.add_parser("run", help="run a configuration and write field and monitor CSVs")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run a configuration and report every invariant check")
    common(p, strict=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("converge", help="grid-refinement study")
    common(p, strict=False)
    p.add_argument("--refine", type=_refine_list, default=[1, 2, 4, 8],
                   help="refinement factors, e.g. 1,2,4,8")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("plot", help="write a matplotlib script next to a CSV")
    p.add_argument("csv")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("dislocation", help="periodic dislocation model")
    dsub = p.add_subparsers(dest="dcommand", required=True)
    q = dsub.add_parser("run", help="periodic run with gradient-mean tracking")
    common(q)
    q.set_defaults(func=cmd_dislocation_run)
    q = dsub.add_parser("rescale", help="shrinking-period experiment")
    common(q)
    q.set_defaults(func=cmd_dislocation_rescale)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, MonotonicityViolation) as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
