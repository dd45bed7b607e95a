"""Command-line front end: run patterns, evaluate expressions, add numbers.

Output is line-oriented ``key=value`` text so scripts can diff it; pass
``--pretty`` for a human-readable rendition.  Exit codes are stable:
0 success, 2 input or parse error, 3 semantic error, 4 calibration
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import circuits, components, engine
from .circuits import ExprSyntaxError, MissingVariableError
from .components import CalibrationError, NoValidPlacementError, evaluate_gate
from .engine import Universe, bounding_box, find_gliders, population, states
from .patterns import CATALOG_NAMES, CatalogError, Pattern, RleError, catalog, parse_rle

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SEMANTIC = 3
EXIT_CALIBRATION = 4

_REPORTS = ("population", "bbox", "gliders", "stabilization")


class CliError(Exception):
    """A user-facing failure carrying its exit code."""

    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _resolve_pattern(token: str) -> Pattern:
    """A catalog name, else a path to an RLE file."""
    if token in CATALOG_NAMES:
        return catalog(token)
    path = Path(token)
    if path.is_file():
        return parse_rle(path.read_text(), name=path.stem)
    names = ", ".join(CATALOG_NAMES)
    raise CliError(
        EXIT_INPUT,
        f"cannot resolve pattern {token!r}: not a file and not one of {names}",
    )


# ---------------------------------------------------------------------------
# run


def _save_figure(
    path: Path,
    title: str,
    xs: Sequence[int],
    series: dict[str, Sequence[int]],
    vline: Optional[int] = None,
) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for label, ys in series.items():
        ax.plot(xs, ys, label=label)
    if vline is not None:
        ax.axvline(vline, color="tab:red", linestyle="--", label=f"stabilized at {vline}")
    ax.set_xlabel("generation")
    ax.set_title(title)
    if len(series) > 1 or vline is not None:
        ax.legend()
    else:
        ax.set_ylabel(next(iter(series)))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _cmd_run(args: argparse.Namespace) -> int:
    p = _resolve_pattern(args.pattern)
    u = Universe(p.cells)

    if args.report == "stabilization":
        found = (
            engine.detect_stabilization(u, args.generations, args.max_period)
            if args.generations > 0
            else None
        )
        at = "none" if found is None else str(found.stabilized_at)
        if args.pretty:
            if found is None:
                print(f"{p.name} did not stabilize within {args.generations} generations")
            else:
                print(
                    f"{p.name} stabilized after {found.stabilized_at} generations "
                    f"(period {found.period})"
                )
        else:
            print(f"stabilized_at={at}")
        if args.figure is not None:
            pops = [population(cur) for cur in states(u, args.generations)]
            _save_figure(
                args.figure,
                f"{p.name}: population",
                range(args.generations + 1),
                {"population": pops},
                vline=None if found is None else found.stabilized_at,
            )
        return EXIT_OK

    rows = []
    for gen, cur in enumerate(states(u, args.generations)):
        if gen % args.every:
            continue
        if args.report == "population":
            rows.append((gen, population(cur)))
        elif args.report == "gliders":
            rows.append((gen, len(find_gliders(cur))))
        else:
            rows.append((gen, bounding_box(cur)))

    if args.report == "bbox":
        if args.pretty:
            print(f"{'generation':>10}  bbox")
        for gen, box in rows:
            if box is None:
                text = "empty" if args.pretty else "none"
            elif args.pretty:
                (x0, y0), (x1, y1) = box
                text = f"({x0},{y0})..({x1},{y1})  {x1 - x0 + 1}x{y1 - y0 + 1}"
            else:
                (x0, y0), (x1, y1) = box
                text = f"{x0},{y0},{x1},{y1}"
            if args.pretty:
                print(f"{gen:>10}  {text}")
            else:
                print(f"generation={gen} bbox={text}")
    else:
        if args.pretty:
            print(f"{'generation':>10}  {args.report}")
        for gen, value in rows:
            if args.pretty:
                print(f"{gen:>10}  {value}")
            else:
                print(f"generation={gen} {args.report}={value}")

    if args.figure is not None:
        xs = [gen for gen, _ in rows]
        if args.report == "bbox":
            series = {
                "width": [0 if b is None else b[1][0] - b[0][0] + 1 for _, b in rows],
                "height": [0 if b is None else b[1][1] - b[0][1] + 1 for _, b in rows],
            }
        else:
            series = {args.report: [value for _, value in rows]}
        _save_figure(args.figure, f"{p.name}: {args.report}", xs, series)
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval


def _parse_assignment(tokens: Sequence[str]) -> dict[str, bool]:
    assignment: dict[str, bool] = {}
    for tok in tokens:
        name, eq, value = tok.partition("=")
        if not name or eq != "=" or value not in ("0", "1"):
            raise CliError(EXIT_INPUT, f"bad assignment {tok!r}: expected NAME=0|1")
        assignment[name] = value == "1"
    return assignment


def _cmd_eval(args: argparse.Namespace) -> int:
    expr = circuits.parse_expr(args.expression)
    assignment = _parse_assignment(args.assignment)
    c = circuits.compile(expr)
    result = circuits.evaluate(c, assignment)
    word = "true" if result else "false"
    if args.pretty:
        bound = " ".join(f"{k}={int(v)}" for k, v in sorted(assignment.items()))
        print(
            f"{args.expression.strip()} with {bound or 'no inputs'} -> {word} "
            f"(probed at generation {c.probe_generation}, {c.gun_count} guns)"
        )
    else:
        print(f"result={word}")
        print(f"probe_generation={c.probe_generation}")
        print(f"gun_count={c.gun_count}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# adder


def _cmd_adder(args: argparse.Namespace) -> int:
    spec = circuits.add(args.x, args.y)
    if args.pretty:
        print(f"{spec.x} + {spec.y} = {spec.result}")
    else:
        print(f"result={spec.result}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# render


def _write_pbm(path: Path, live: frozenset, region: tuple[int, int, int, int]) -> None:
    x0, y0, x1, y1 = region
    lines = ["P1", f"# region {x0} {y0} {x1} {y1}", f"{x1 - x0 + 1} {y1 - y0 + 1}"]
    for y in range(y0, y1 + 1):
        row = "".join("1" if (x, y) in live else "0" for x in range(x0, x1 + 1))
        lines.extend(row[i : i + 70] for i in range(0, len(row), 70))
    path.write_text("\n".join(lines) + "\n")


def _cmd_render(args: argparse.Namespace) -> int:
    p = _resolve_pattern(args.pattern)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    samples = [
        (gen, cur.live)
        for gen, cur in enumerate(states(Universe(p.cells), args.generations))
        if gen % args.every == 0
    ]
    # One crop shared by every frame, so the files diff cleanly.
    everything = frozenset().union(*(live for _, live in samples))
    if everything:
        xs = [x for x, _ in everything]
        ys = [y for _, y in everything]
        region = (min(xs), min(ys), max(xs), max(ys))
    else:
        region = (0, 0, 0, 0)
    digits = max(1, len(str(args.generations)))
    for gen, live in samples:
        name = f"{p.name}_{gen:0{digits}d}.pbm"
        _write_pbm(out_dir / name, live, region)
        if not args.pretty:
            print(f"frame={name}")
    if args.pretty:
        x0, y0, x1, y1 = region
        print(
            f"wrote {len(samples)} frames to {out_dir} "
            f"(region ({x0},{y0})..({x1},{y1}))"
        )
    else:
        print(f"frames={len(samples)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# calibrate


def _cmd_calibrate(args: argparse.Namespace) -> int:
    kind = args.gate
    search = None
    if args.search_range is not None:
        # Truncate each component's candidate schedule; 0 disables the
        # search outright.
        search = {
            label: offsets[: args.search_range]
            for label, offsets in components._DEFAULT_SEARCH[kind].items()
        }
    t = components.calibrate(kind, search)
    out_dir = Path(args.out) if args.out else None
    components.save_gate_fixture(t, out_dir)
    slots = ("A",) if kind == "NOT" else ("A", "B")
    semantics = {
        "AND": lambda env: env["A"] and env["B"],
        "OR": lambda env: env["A"] or env["B"],
        "NOT": lambda env: not env["A"],
    }[kind]
    passed = 0
    cases = []
    for bits in range(2 ** len(slots)):
        env = {s: bool((bits >> (len(slots) - 1 - i)) & 1) for i, s in enumerate(slots)}
        got = evaluate_gate(t, env)
        want = semantics(env)
        ok = got == want
        passed += ok
        cases.append((env, got, want, ok))
    total = len(cases)
    if args.pretty:
        print(f"{kind} gate calibrated (probe generation {t.probe_generation})")
        for env, got, want, ok in cases:
            bound = " ".join(f"{s}={int(env[s])}" for s in slots)
            print(f"  {bound} -> {str(got).lower()} "
                  f"(expected {str(want).lower()}) {'PASS' if ok else 'FAIL'}")
        print(f"{passed}/{total} assignments pass")
    else:
        print(f"kind={kind}")
        print(f"probe_generation={t.probe_generation}")
        for env, got, want, ok in cases:
            bits = "".join(str(int(env[s])) for s in slots)
            print(
                f"case={bits} result={str(got).lower()} "
                f"expected={str(want).lower()} status={'pass' if ok else 'fail'}"
            )
        print(f"passed={passed}/{total}")
    return EXIT_OK if passed == total else EXIT_CALIBRATION


# ---------------------------------------------------------------------------
# wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lifelogic",
        description="Glider-stream logic in Conway's Game of Life.",
    )
    parser.add_argument(
        "--pretty", action="store_true", help="human-readable output instead of key=value"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate a pattern and report metrics")
    run_p.add_argument("pattern", help="catalog name or RLE file path")
    run_p.add_argument("generations", type=_nonnegative)
    run_p.add_argument("--report", choices=_REPORTS, default="population")
    run_p.add_argument(
        "--every", type=_positive, default=1, metavar="N", help="reporting interval"
    )
    run_p.add_argument(
        "--max-period",
        type=_positive,
        default=2,
        metavar="P",
        help="longest residue period the stabilization scan accepts",
    )
    run_p.add_argument(
        "--figure",
        type=Path,
        default=None,
        metavar="PATH",
        help="also plot the reported metric to an image file",
    )
    run_p.set_defaults(func=_cmd_run)

    eval_p = sub.add_parser("eval", help="compile an expression and evaluate it")
    eval_p.add_argument("expression")
    eval_p.add_argument(
        "assignment", nargs="*", metavar="NAME=0|1", help="one binding per variable"
    )
    eval_p.set_defaults(func=_cmd_eval)

    adder_p = sub.add_parser("adder", help="add two 2-bit binary numbers")
    adder_p.add_argument("x", help="two binary digits, e.g. 11")
    adder_p.add_argument("y", help="two binary digits")
    adder_p.set_defaults(func=_cmd_adder)

    render_p = sub.add_parser("render", help="dump portable-bitmap frames")
    render_p.add_argument("pattern", help="catalog name or RLE file path")
    render_p.add_argument("generations", type=_nonnegative)
    render_p.add_argument(
        "--every", type=_positive, default=1, metavar="N", help="sampling interval"
    )
    render_p.add_argument("--out-dir", default=".", metavar="DIR")
    render_p.set_defaults(func=_cmd_render)

    cal_p = sub.add_parser("calibrate", help="search, certify and save a gate fixture")
    cal_p.add_argument("gate", choices=("AND", "OR", "NOT"), type=str.upper)
    cal_p.add_argument("--out", default=None, metavar="DIR", help="fixture directory")
    cal_p.add_argument(
        "--search-range",
        type=_nonnegative,
        default=None,
        metavar="N",
        help="try only the first N placements per component (0 disables the search)",
    )
    cal_p.set_defaults(func=_cmd_calibrate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except MissingVariableError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_SEMANTIC
    except (circuits.PlacementConflictError, circuits.AlignmentFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except NoValidPlacementError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (ExprSyntaxError, RleError, CatalogError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
