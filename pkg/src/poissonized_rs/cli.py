"""Command line entry point.  Exit codes: 0 pass, 1 verification failure, 2 usage error."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .correspondences import PointConfiguration, drs
from .exactlaw import FddQuery, fdd_continuous, fdd_discrete
from .harness import lln_topline, render_ensemble
from .sampling import RngSpec, sample_geometric_lattice, sample_poisson_square
from .suite import CRITERIA_NAMES, ConfigError, run_suite
from .trajectories import DiagramTrajectory, full_trajectory

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(source: str):
    """A path, ``-`` for stdin, or an inline JSON document."""
    try:
        if source == "-":
            return json.loads(sys.stdin.read())
        path = Path(source)
        if path.exists():
            text = path.read_text()
            try:
                return json.loads(text)
            except json.JSONDecodeError:
                # JSON-lines: take the first record
                return json.loads(text.splitlines()[0])
        return json.loads(source)
    except (json.JSONDecodeError, IndexError, OSError) as exc:
        raise UsageError(f"cannot read JSON from {source!r}: {exc}") from exc


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--out", help="output file (default stdout)")


def cmd_sample(args) -> int:
    rng = RngSpec(args.seed, args.stream)
    lines = []
    for i in range(args.samples):
        if args.k is None:
            cfg = sample_poisson_square(args.theta, rng.substream(i))
        else:
            cfg = sample_geometric_lattice(args.theta, args.k, rng.substream(i))
        lines.append(json.dumps(cfg.to_json()))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _trajectory_from(args) -> DiagramTrajectory:
    if args.input:
        obj = _read_json(args.input)
        if "events" in obj:
            return DiagramTrajectory.from_json(obj)
        config = PointConfiguration.from_json(obj)
    else:
        config = sample_poisson_square(args.theta, RngSpec(args.seed, args.stream))
    return full_trajectory(drs(config))


def cmd_trajectory(args) -> int:
    traj = _trajectory_from(args)
    text = traj.to_csv() if args.format == "csv" else json.dumps(traj.to_json()) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_prob(args) -> int:
    obj = _read_json(args.query)
    if args.k is not None:
        obj = {**obj, "k": args.k}
    query = FddQuery.from_json(obj)
    result = fdd_continuous(query) if query.discrete_k is None else fdd_discrete(query)
    _emit(json.dumps({"query": query.to_json(), **result.to_json()}) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _read_json(args.config) if args.config else {}
    overrides = {
        "seed": args.seed,
        "stream": args.stream,
        "streams": args.streams,
        "workers": args.workers,
        "samples": args.samples,
        "output": args.out,
    }
    config.update({k: v for k, v in overrides.items() if v is not None})
    if args.criteria:
        config["criteria"] = args.criteria
    code, _ = run_suite(config, echo=lambda line: print(line, flush=True))
    return code


def cmd_lln(args) -> int:
    rows = lln_topline(args.theta, args.taus, RngSpec(args.seed, args.stream), draws=args.draws)
    if args.format == "json":
        text = json.dumps([r.to_json() for r in rows], indent=2) + "\n"
    else:
        header = f"{'tau':>7} {'ratio':>8} {'target':>8} {'rel.err':>8}  pass\n"
        text = header + "".join(
            f"{r.tau:7.3f} {r.ratio:8.4f} {r.target:8.4f} {r.error / r.target:8.4f}  {'yes' if r.passed else 'no'}\n"
            for r in rows
        )
    _emit(text, args.out)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def cmd_render(args) -> int:
    traj = _trajectory_from(args)
    text = render_ensemble(traj, args.top, args.format)
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poissonized-rs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw point configurations as JSON lines")
    _common(p)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--k", type=int, help="lattice size (geometric model)")
    p.add_argument("--samples", type=int, default=1)
    p.set_defaults(func=cmd_sample)

    for name, func, formats, default in (
        ("trajectory", cmd_trajectory, ("json", "csv"), "json"),
        ("render", cmd_render, ("svg", "csv"), "svg"),
    ):
        p = sub.add_parser(name, help=f"{name} of the decorated RS diagram process")
        _common(p)
        p.add_argument("input", nargs="?", help="configuration or trajectory JSON (sampled if omitted)")
        p.add_argument("--theta", type=float, default=1.0)
        p.add_argument("--format", choices=formats, default=default)
        if name == "render":
            p.add_argument("--top", type=int, default=0, help="lines to draw (0: every moving line)")
        p.set_defaults(func=func)

    p = sub.add_parser("prob", help="exact probability of an FddQuery")
    p.add_argument("query", help="query JSON: path, '-' or inline")
    p.add_argument("--k", type=int, help="evaluate the lattice model with this k")
    p.add_argument("--out")
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("config", nargs="?", help="suite config JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--stream", type=int)
    p.add_argument("--streams", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--criteria", nargs="+", choices=CRITERIA_NAMES)
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lln", help="top-line law of large numbers table")
    _common(p)
    p.add_argument("--theta", type=float, default=100.0)
    p.add_argument("--taus", type=float, nargs="+", default=[0.0, 0.5, -0.5])
    p.add_argument("--draws", type=int, default=20)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_lln)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
