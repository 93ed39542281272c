"""Batch front-end over the built-in models.

Subcommands: stats, transition, sweep, comm, signal, moc, replay.  Every
run resolves its parameters from flags, then an optional key-value config
file (flags win), then built-in defaults.  CSV goes to stdout unless --out
is given; whenever a run writes files it also writes a manifest
(<first output>.manifest.json) recording the command line, resolved model,
quadruple, scheme and seed, so the run can be replayed byte for byte.

Exit codes: 0 success, 2 usage error (unknown model, malformed angles,
conflicting scheme flags), 3 numerical-invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Callable, Iterable, Sequence
from xml.sax.saxutils import escape

from . import __version__
from .core import (
    CONTEXT_LABELS,
    AngleQuadruple,
    GridScheme,
    MonteCarloScheme,
    NumericalInvariantError,
    Scheme,
    default_grid_resolution,
    make_angle,
)
from .inequalities import BETA_SIGNS, bound_for_signs, hardy_bounds, quantum_stats, stats_from_model
from .models import ModelChoice, biased_distribution, resolve_model
from .ordering import moc_demo
from .protocols import average_bits_identity, detailed_balance, marginal_shift, simulate_game
from .transition import TransitionSetId, full_report

TOOL_NAME = "eprb-lab"

_DEFAULT_THETA = math.pi / 4
_DEFAULT_SEED = 42
_DEFAULT_STEPS = 181
_DEFAULT_RUNS = 1_000_000


# ---------------------------------------------------------------------------
# Option resolution: flag, then config entry, then built-in default.


def _read_config(path: str) -> dict[str, str]:
    """Parse a key-value file: one `name = value` per line, `#` comments."""
    table: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'name = value', got {raw!r}")
        key, _, value = line.partition("=")
        table[key.strip().lstrip("-").replace("_", "-")] = value.strip()
    return table


class _Options:
    """Merged view over parsed flags and a config table."""

    def __init__(self, args: argparse.Namespace, config: dict[str, str]):
        self._flags = vars(args)
        self._config = config

    def flag_given(self, key: str) -> bool:
        return self._flags.get(key.replace("-", "_")) is not None

    def in_config(self, key: str) -> bool:
        return key in self._config

    def get(self, key: str, default: object, parse: Callable[[str], object]) -> object:
        value = self._flags.get(key.replace("-", "_"))
        if value is not None:
            return value
        if key in self._config:
            text = self._config[key]
            try:
                return parse(text)
            except ValueError:
                raise ValueError(f"config entry {key} = {text!r} is malformed") from None
        return default


def _resolve_scheme(opts: _Options, dimension: int, seed: int) -> Scheme:
    # A flag-level grid/mc choice shadows both config entries, so a config
    # file holding `grid = ...` can still be overridden by --mc alone.
    if opts.flag_given("grid") or opts.flag_given("mc"):
        grid = opts.get("grid", None, int) if opts.flag_given("grid") else None
        mc = opts.get("mc", None, int) if opts.flag_given("mc") else None
    else:
        grid = opts.get("grid", None, int)
        mc = opts.get("mc", None, int)
    if grid is not None and mc is not None:
        raise ValueError("--grid and --mc are mutually exclusive")
    if mc is not None:
        return MonteCarloScheme(n=int(mc), seed=seed)
    resolution = int(grid) if grid is not None else default_grid_resolution(dimension)
    return GridScheme(resolution=resolution)


def _resolve_quadruple(opts: _Options) -> AngleQuadruple:
    angles = opts.get("angles", None, str)
    if angles is not None:
        parts = str(angles).split(",")
        if len(parts) != 4:
            raise ValueError("--angles needs four comma-separated radians: a,a',b,b'")
        try:
            values = [float(part) for part in parts]
        except ValueError:
            raise ValueError(f"malformed angles {angles!r}") from None
        return AngleQuadruple(
            a=make_angle(values[0]),
            a_prime=make_angle(values[1]),
            b=make_angle(values[2]),
            b_prime=make_angle(values[3]),
        )
    theta = float(opts.get("theta", _DEFAULT_THETA, float))
    return AngleQuadruple.chain(theta)


def _resolve_model_choice(opts: _Options, default: str) -> ModelChoice:
    return resolve_model(str(opts.get("model", default, str)))


def _require_hidden_variables(choice: ModelChoice) -> None:
    if choice.hv is None:
        raise ValueError(
            f"model {choice.name!r} provides analytic statistics only; "
            "this command needs a hidden-variable model"
        )


# ---------------------------------------------------------------------------
# Serialization.


def _fmt(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _csv_bytes(header: Sequence[str], rows: Iterable[Sequence[object]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(value) for value in row])
    return buffer.getvalue().encode("utf-8")


def _quadruple_json(quadruple: AngleQuadruple | None) -> dict[str, float] | None:
    if quadruple is None:
        return None
    return {
        name.replace("'", "_prime"): angle.radians
        for name, angle in quadruple.named_angles().items()
    }


def _emit(
    payload: bytes,
    out: str | None,
    *,
    subcommand: str,
    argv: Sequence[str],
    model: str | None,
    quadruple: AngleQuadruple | None,
    scheme_label: str,
    seed: int | None,
    parameters: dict[str, object],
    side_outputs: Sequence[str] = (),
) -> int:
    """Write the CSV (file or stdout) and, when files exist, the manifest."""
    outputs: list[str] = []
    if out is not None:
        Path(out).write_bytes(payload)
        outputs.append(out)
    else:
        sys.stdout.write(payload.decode("utf-8"))
    outputs.extend(side_outputs)
    if outputs:
        manifest = {
            "tool": TOOL_NAME,
            "tool_version": __version__,
            "subcommand": subcommand,
            "command_line": list(argv),
            "model": model,
            "quadruple": _quadruple_json(quadruple),
            "scheme": scheme_label,
            "seed": seed,
            "parameters": parameters,
            "outputs": outputs,
        }
        Path(outputs[0] + ".manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    return 0


_SVG_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _svg_line_plot(title: str, series: Sequence[tuple[str, list[tuple[float, float]]]]) -> bytes:
    """A self-contained line plot: axes, ticks, legend, one polyline per series."""
    width, height = 720.0, 480.0
    left, right, top, bottom = 64.0, 16.0, 28.0, 44.0
    points = [(x, y) for _, pts in series for x, y in pts]
    if not points:
        raise ValueError("nothing to plot")
    x_min = min(x for x, _ in points)
    x_max = max(x for x, _ in points)
    y_min = min(y for _, y in points)
    y_max = max(y for _, y in points)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0
    margin = 0.05 * (y_max - y_min)
    y_min -= margin
    y_max += margin

    def px(x: float) -> float:
        return left + (x - x_min) / (x_max - x_min) * (width - left - right)

    def py(y: float) -> float:
        return height - bottom - (y - y_min) / (y_max - y_min) * (height - top - bottom)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{escape(title)}</text>',
        f'<line x1="{left:.1f}" y1="{py(y_min):.1f}" x2="{left:.1f}" y2="{py(y_max):.1f}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{left:.1f}" y1="{py(y_min):.1f}" x2="{width - right:.1f}" '
        f'y2="{py(y_min):.1f}" stroke="black" stroke-width="1"/>',
    ]
    for i in range(6):
        x_val = x_min + i * (x_max - x_min) / 5
        y_val = y_min + i * (y_max - y_min) / 5
        parts.append(
            f'<line x1="{px(x_val):.1f}" y1="{py(y_min):.1f}" x2="{px(x_val):.1f}" '
            f'y2="{py(y_min) + 4:.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px(x_val):.1f}" y="{py(y_min) + 18:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{format(x_val, ".3g")}</text>'
        )
        parts.append(
            f'<line x1="{left - 4:.1f}" y1="{py(y_val):.1f}" x2="{left:.1f}" '
            f'y2="{py(y_val):.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{left - 8:.1f}" y="{py(y_val) + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{format(y_val, ".3g")}</text>'
        )
    for k, (label, pts) in enumerate(series):
        color = _SVG_PALETTE[k % len(_SVG_PALETTE)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        legend_y = top + 14 + 16 * k
        parts.append(
            f'<line x1="{width - right - 150:.1f}" y1="{legend_y:.1f}" '
            f'x2="{width - right - 126:.1f}" y2="{legend_y:.1f}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{width - right - 120:.1f}" y="{legend_y + 4:.1f}" '
            f'font-family="sans-serif" font-size="11">{escape(label)}</text>'
        )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Subcommands.


def _cmd_stats(opts: _Options, argv: Sequence[str]) -> int:
    choice = _resolve_model_choice(opts, "singlet")
    quadruple = _resolve_quadruple(opts)
    seed = int(opts.get("seed", _DEFAULT_SEED, int))
    if choice.kind == "quantum":
        scheme_label = "analytic"
        manifest_seed = None
        stats = quantum_stats(quadruple)
    else:
        assert choice.hv is not None and choice.distribution is not None
        scheme = _resolve_scheme(opts, choice.hv.space.dimension, seed)
        scheme_label = scheme.label
        manifest_seed = scheme.seed
        stats = stats_from_model(choice.hv, choice.distribution, quadruple, scheme)
    rows = []
    for i, ((alice, bob), theta) in enumerate(
        zip(quadruple.contexts(), quadruple.context_thetas())
    ):
        rows.append(
            [
                CONTEXT_LABELS[i],
                alice.radians,
                bob.radians,
                theta,
                stats.p_plus[i],
                stats.p_minus[i],
            ]
        )
    payload = _csv_bytes(["context", "alice", "bob", "theta", "p_plus", "p_minus"], rows)
    return _emit(
        payload,
        opts.get("out", None, str),
        subcommand="stats",
        argv=argv,
        model=choice.name,
        quadruple=quadruple,
        scheme_label=scheme_label,
        seed=manifest_seed,
        parameters={},
    )


def _cmd_transition(opts: _Options, argv: Sequence[str]) -> int:
    choice = _resolve_model_choice(opts, "singlet")
    _require_hidden_variables(choice)
    assert choice.hv is not None and choice.distribution is not None
    quadruple = _resolve_quadruple(opts)
    seed = int(opts.get("seed", _DEFAULT_SEED, int))
    scheme = _resolve_scheme(opts, choice.hv.space.dimension, seed)
    report = full_report(choice.hv, choice.distribution, quadruple, scheme)
    rows = [
        [name, value, std_error, scheme.label, scheme.seed]
        for name, value, std_error in report.csv_rows()
    ]
    payload = _csv_bytes(["name", "value", "std_error", "scheme", "seed"], rows)
    return _emit(
        payload,
        opts.get("out", None, str),
        subcommand="transition",
        argv=argv,
        model=choice.name,
        quadruple=quadruple,
        scheme_label=scheme.label,
        seed=scheme.seed,
        parameters={},
    )


def _sweep_row(choice: ModelChoice, theta: float, scheme: Scheme) -> list[object]:
    quadruple = AngleQuadruple.chain(theta)
    if choice.kind == "quantum":
        stats = quantum_stats(quadruple)
        sigma_minus: float | None = None
        avg_bits: float | None = None
    else:
        assert choice.hv is not None and choice.distribution is not None
        stats = stats_from_model(choice.hv, choice.distribution, quadruple, scheme)
        report = full_report(choice.hv, choice.distribution, quadruple, scheme)
        sigma_minus = report.sigma_minus.value
        avg_bits, _ = average_bits_identity(report)
    bounds = hardy_bounds(stats)
    hardy_bound = max(0.0, bound_for_signs(stats, BETA_SIGNS[0]))
    return [theta, hardy_bound, bounds.unified, bounds.bell_lhs, sigma_minus, avg_bits]


def _cmd_sweep(opts: _Options, argv: Sequence[str]) -> int:
    choice = _resolve_model_choice(opts, "quantum")
    theta_min = float(opts.get("theta-min", 0.0, float))
    theta_max = float(opts.get("theta-max", math.pi, float))
    steps = int(opts.get("steps", _DEFAULT_STEPS, int))
    if steps < 2:
        raise ValueError(f"--steps must be at least 2, got {steps}")
    seed = int(opts.get("seed", _DEFAULT_SEED, int))
    if choice.kind == "quantum":
        scheme: Scheme | None = None
        scheme_label = "analytic"
        manifest_seed = None
    else:
        assert choice.hv is not None
        scheme = _resolve_scheme(opts, choice.hv.space.dimension, seed)
        scheme_label = scheme.label
        manifest_seed = scheme.seed
    thetas = [theta_min + i * (theta_max - theta_min) / (steps - 1) for i in range(steps)]
    rows = [_sweep_row(choice, theta, scheme) for theta in thetas]  # type: ignore[arg-type]
    header = ["theta", "hardy_bound", "unified", "bell_lhs", "sigma_minus", "avg_bits"]
    payload = _csv_bytes(header, rows)

    side_outputs: list[str] = []
    svg_path = opts.get("svg", None, str)
    if svg_path is not None:
        series = []
        for column, name in ((1, "hardy_bound"), (2, "unified"), (3, "bell_lhs"),
                             (4, "sigma_minus"), (5, "avg_bits")):
            pts = [(row[0], row[column]) for row in rows if row[column] is not None]
            if pts:
                series.append((name, pts))
        svg = _svg_line_plot(f"{choice.name}: chain sweep", series)
        Path(str(svg_path)).write_bytes(svg)
        side_outputs.append(str(svg_path))

    return _emit(
        payload,
        opts.get("out", None, str),
        subcommand="sweep",
        argv=argv,
        model=choice.name,
        quadruple=None,
        scheme_label=scheme_label,
        seed=manifest_seed,
        parameters={"theta_min": theta_min, "theta_max": theta_max, "steps": steps},
        side_outputs=side_outputs,
    )


def _cmd_comm(opts: _Options, argv: Sequence[str]) -> int:
    choice = _resolve_model_choice(opts, "singlet")
    _require_hidden_variables(choice)
    assert choice.hv is not None and choice.distribution is not None
    quadruple = _resolve_quadruple(opts)
    runs = int(opts.get("runs", _DEFAULT_RUNS, int))
    seed = int(opts.get("seed", _DEFAULT_SEED, int))
    summary, run_stream = simulate_game(choice.hv, choice.distribution, quadruple, runs, seed)

    side_outputs: list[str] = []
    log_path = opts.get("log", None, str)
    if log_path is not None:
        dimension = choice.hv.space.dimension
        header = (
            ["run"]
            + [f"lambda_{axis}" for axis in range(dimension)]
            + ["alice_setting", "bob_setting", "region", "bits", "outcome_a", "outcome_b"]
        )
        with open(str(log_path), "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for entry in run_stream:
                writer.writerow(
                    [_fmt(entry.index)]
                    + [_fmt(coord) for coord in entry.lam]
                    + [
                        entry.alice_setting,
                        entry.bob_setting,
                        entry.region,
                        _fmt(entry.bits),
                        _fmt(entry.outcome_a),
                        _fmt(entry.outcome_b),
                    ]
                )
        side_outputs.append(str(log_path))

    header = ["n_runs", "seed", "average_bits", "bits_std_error", "sigma_minus_bound"]
    row: list[object] = [
        summary.n_runs,
        summary.seed,
        summary.average_bits,
        summary.bits_std_error,
        summary.sigma_minus_bound,
    ]
    for i in range(4):
        header += [f"p_plus_{i + 1}", f"p_minus_{i + 1}", f"count_{i + 1}"]
        row += [summary.stats.p_plus[i], summary.stats.p_minus[i], summary.context_counts[i]]
    payload = _csv_bytes(header, [row])
    return _emit(
        payload,
        opts.get("out", None, str),
        subcommand="comm",
        argv=argv,
        model=choice.name,
        quadruple=quadruple,
        scheme_label=f"game(runs={runs},seed={seed})",
        seed=seed,
        parameters={"runs": runs},
        side_outputs=side_outputs,
    )


def _cmd_signal(opts: _Options, argv: Sequence[str]) -> int:
    choice = _resolve_model_choice(opts, "singlet")
    _require_hidden_variables(choice)
    assert choice.hv is not None and choice.distribution is not None
    b_setting = make_angle(float(opts.get("b-setting", 0.0, float)))
    a1 = make_angle(float(opts.get("a1", 0.0, float)))
    a2 = make_angle(float(opts.get("a2", math.pi / 2, float)))
    q = opts.get("q", None, float)
    dist = choice.distribution if q is None else biased_distribution(choice.hv, float(q))
    seed = int(opts.get("seed", _DEFAULT_SEED, int))
    scheme = _resolve_scheme(opts, choice.hv.space.dimension, seed)
    # B's outcome at b as Alice switches a1 <-> a2: the bob@b transition set
    # of the quadruple (a1, a2, b, b).
    quadruple = AngleQuadruple(a=a1, a_prime=a2, b=b_setting, b_prime=b_setting)
    shift = marginal_shift(choice.hv, dist, b_setting, a1, a2, scheme)
    gap = detailed_balance(choice.hv, dist, quadruple, TransitionSetId.BOB_AT_B, scheme)
    header = [
        "model",
        "distribution",
        "b_setting",
        "a1",
        "a2",
        "marginal_shift",
        "balance_gap",
        "scheme",
    ]
    row = [
        choice.name,
        dist.label,
        b_setting.radians,
        a1.radians,
        a2.radians,
        shift,
        gap,
        scheme.label,
    ]
    payload = _csv_bytes(header, [row])
    return _emit(
        payload,
        opts.get("out", None, str),
        subcommand="signal",
        argv=argv,
        model=choice.name,
        quadruple=quadruple,
        scheme_label=scheme.label,
        seed=scheme.seed,
        parameters={"q": None if q is None else float(q), "distribution": dist.label},
    )


def _cmd_moc(opts: _Options, argv: Sequence[str]) -> int:
    choice = _resolve_model_choice(opts, "sequential-singlet")
    if choice.sequential is None:
        raise ValueError(
            f"model {choice.name!r} does not resolve measurement order; "
            "this command needs an order-resolved model"
        )
    quadruple = _resolve_quadruple(opts)
    seed = int(opts.get("seed", _DEFAULT_SEED, int))
    scheme = _resolve_scheme(opts, choice.sequential.space.dimension, seed)
    report = moc_demo(choice.sequential, quadruple, scheme)
    named = quadruple.named_angles()
    header = [
        "model",
        "a",
        "a_prime",
        "b",
        "b_prime",
        "pair",
        "wing",
        "own",
        "other",
        "moc_measure",
        "moc_std_error",
        "induced_sigma_minus",
        "induced_bell_lhs",
        "quantum_required",
        "scheme",
    ]
    row = [
        choice.name,
        named["a"].radians,
        named["a'"].radians,
        named["b"].radians,
        named["b'"].radians,
        report.pair,
        report.wing,
        report.own.radians,
        report.other.radians,
        report.moc_measure.value,
        report.moc_measure.std_error,
        report.induced_sigma_minus.value,
        report.induced_bell_lhs,
        report.quantum_required,
        scheme.label,
    ]
    payload = _csv_bytes(header, [row])
    return _emit(
        payload,
        opts.get("out", None, str),
        subcommand="moc",
        argv=argv,
        model=choice.name,
        quadruple=quadruple,
        scheme_label=scheme.label,
        seed=scheme.seed,
        parameters={},
    )


def _cmd_replay(args: argparse.Namespace) -> int:
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    command_line = manifest.get("command_line")
    if not isinstance(command_line, list) or not all(isinstance(s, str) for s in command_line):
        raise ValueError(f"{args.manifest}: no usable command_line entry")
    return main(command_line)


# ---------------------------------------------------------------------------
# Parser and entry point.


def _add_common_flags(parser: argparse.ArgumentParser, default_model: str) -> None:
    parser.add_argument("--model", help=f"model name (default {default_model})")
    parser.add_argument("--angles", help="a,a',b,b' in radians; overrides --theta")
    parser.add_argument(
        "--theta", type=float, help="chain angle: a-b = b-a' = a'-b' = theta (default pi/4)"
    )
    parser.add_argument("--grid", type=int, metavar="N", help="midpoint grid, N cells per axis")
    parser.add_argument("--mc", type=int, metavar="N", help="Monte Carlo with N samples")
    parser.add_argument("--seed", type=int, metavar="S", help="PRNG seed (default 42)")
    parser.add_argument(
        "--out", metavar="PATH", help="write CSV to PATH plus PATH.manifest.json (default stdout)"
    )
    parser.add_argument(
        "--config", metavar="PATH", help="key-value file mirroring these flags; flags win"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Deterministic hidden-variable laboratory for the two-wing "
        "spin experiment: statistics, transition sets, Bell/Hardy bounds, the "
        "communication game, signal locality and measurement-ordering checks.",
    )
    parser.add_argument(
        "--version", action="version", version=f"{TOOL_NAME} {__version__}"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_stats = sub.add_parser("stats", help="per-context product statistics")
    _add_common_flags(p_stats, "singlet")

    p_transition = sub.add_parser(
        "transition", help="transition-set, partition and region measures"
    )
    _add_common_flags(p_transition, "singlet")

    p_sweep = sub.add_parser("sweep", help="bound curves over a theta range")
    _add_common_flags(p_sweep, "quantum")
    p_sweep.add_argument("--theta-min", type=float, help="sweep start (default 0)")
    p_sweep.add_argument("--theta-max", type=float, help="sweep end (default pi)")
    p_sweep.add_argument("--steps", type=int, help=f"sample count (default {_DEFAULT_STEPS})")
    p_sweep.add_argument("--svg", metavar="PATH", help="also write a line plot to PATH")

    p_comm = sub.add_parser("comm", help="play the classical-communication game")
    _add_common_flags(p_comm, "singlet")
    p_comm.add_argument("--runs", type=int, help=f"number of runs (default {_DEFAULT_RUNS})")
    p_comm.add_argument("--log", metavar="PATH", help="also write a per-run CSV log to PATH")

    p_signal = sub.add_parser(
        "signal", help="marginal shift and detailed-balance gap at one wing"
    )
    _add_common_flags(p_signal, "singlet")
    p_signal.add_argument(
        "--q", type=float, help="bias weight; replaces the equilibrium distribution"
    )
    p_signal.add_argument("--b-setting", type=float, help="B's fixed setting (default 0)")
    p_signal.add_argument("--a1", type=float, help="Alice's first setting (default 0)")
    p_signal.add_argument("--a2", type=float, help="Alice's second setting (default pi/2)")

    p_moc = sub.add_parser("moc", help="measurement-ordering contextuality demonstration")
    _add_common_flags(p_moc, "sequential-singlet")

    p_replay = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p_replay.add_argument("manifest", help="path to a .manifest.json file")

    return parser


_DISPATCH: dict[str, Callable[[_Options, Sequence[str]], int]] = {
    "stats": _cmd_stats,
    "transition": _cmd_transition,
    "sweep": _cmd_sweep,
    "comm": _cmd_comm,
    "signal": _cmd_signal,
    "moc": _cmd_moc,
}


def main(argv: Sequence[str] | None = None) -> int:
    args_list = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(args_list)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2
    try:
        if args.subcommand == "replay":
            return _cmd_replay(args)
        config = _read_config(args.config) if args.config else {}
        opts = _Options(args, config)
        return _DISPATCH[args.subcommand](opts, args_list)
    except NumericalInvariantError as exc:
        print(f"{TOOL_NAME}: numerical invariant violated: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"{TOOL_NAME}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
