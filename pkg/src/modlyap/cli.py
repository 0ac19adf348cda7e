"""Command-line front end: exponent computations, dumps, checks, plots.

Subcommands: lyap (periodic, tilde, estimate, attain, val), cycint,
farey, markov, verify, plot.  Machine output is versioned JSON or CSV;
plots are self-contained SVG.  Exit codes: 0 success, 1 computation
failure, 2 usage error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

from .cycint import cycle_integral
from .errors import (
    BoundViolated,
    ConvexityViolated,
    EmptyData,
    IdentityFailed,
    ModlyapError,
    MonotonicityViolated,
    TriangleViolated,
)
from .farey import FareyFraction, FareyPath, farey_level, markov_word, minimal_level
from .lyap import (
    construct_attainer,
    lambda_estimate,
    lambda_periodic,
    tilde_level_data,
    tilde_lambda,
    val,
)
from .modfun import FourierSeries, get_series, read_series_file
from .verify import (
    check_convexity,
    check_golden_silver_bounds,
    check_poly_identities,
    check_triangle,
    default_t_grid,
    run_all,
    scan_F_lemmas,
)
from .words import format_cf, format_word, parse_word

FORMAT_VERSION = 1

_VERIFY_ERRORS = (
    IdentityFailed,
    MonotonicityViolated,
    BoundViolated,
    TriangleViolated,
    ConvexityViolated,
)


# ------------------------------------------------------------- config


@dataclass
class RunConfig:
    """Knobs shared by the subcommands; round-trips through JSON."""

    f: str = "j"
    order: int = 64
    series_n: int = 24
    t_points: int = 64
    level: int = 8
    k_max: int = 4
    steps: int = 10
    n_max: int = 2000
    seed: int = 7
    out: str = "text"
    out_file: str = ""

    _BOUNDS = {
        "order": (2, 512),
        "series_n": (1, 64),
        "t_points": (8, 512),
        "level": (0, 12),
        "k_max": (0, 4),
        "steps": (1, 64),
        "n_max": (1, 200000),
    }

    def __post_init__(self):
        for name, (lo, hi) in self._BOUNDS.items():
            v = getattr(self, name)
            if not lo <= v <= hi:
                raise ValueError(f"{name} = {v} outside [{lo}, {hi}]")
        if self.out not in ("text", "json", "csv", "svg"):
            raise ValueError(f"unknown output format {self.out!r}")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {fld.name for fld in fields(cls)}
        bad = set(data) - known
        if bad:
            raise ValueError(f"unknown config keys: {sorted(bad)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))


def _apply_config_file(args: argparse.Namespace) -> None:
    """Merge --config JSON over the parsed flags (file wins)."""
    if not getattr(args, "config", None):
        return
    with open(args.config, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    merged = RunConfig.from_dict({**RunConfig().as_dict(), **data})
    for key in data:
        if hasattr(args, key):
            setattr(args, key, getattr(merged, key))


# ------------------------------------------------------------ parsing


def _word_type(text: str):
    try:
        word = parse_word(text)
    except Exception as exc:
        raise ValueError(str(exc)) from exc
    return word


def _fraction_type(text: str) -> FareyFraction:
    try:
        return FareyFraction.parse(text)
    except Exception as exc:
        raise ValueError(str(exc)) from exc


def _tau0_type(text: str) -> complex:
    try:
        z = complex(text.replace("i", "j"))
    except Exception as exc:
        raise ValueError(f"bad tau0 literal {text!r}") from exc
    if z.imag <= 0:
        raise ValueError("tau0 must have positive imaginary part")
    return z


def _series_for(selector: str, n: int) -> FourierSeries:
    if selector.startswith("file:"):
        return read_series_file(selector[5:])
    return get_series(selector, n)


def _fmt(x: float) -> str:
    return format(float(x), ".11g")


# ------------------------------------------------------------ emitters


def render_json(payload: dict) -> str:
    body = dict(payload)
    body["format_version"] = FORMAT_VERSION
    return json.dumps(body, sort_keys=True, separators=(",", ":")) + "\n"


def render_csv(header: str, rows) -> str:
    lines = [f"# format_version {FORMAT_VERSION}", header]
    lines.extend(rows)
    return "\n".join(lines) + "\n"


def emit_plot(points, x_range=(0.0, 0.5), y_range=(620.0, 685.0)) -> str:
    """Self-contained scatter/line SVG of (x, value) pairs.

    Input order does not matter; points are sorted on x first so equal
    datasets always render to identical bytes.
    """
    pts = sorted((float(x), float(y)) for x, y in points)
    if not pts:
        raise EmptyData("nothing to plot")
    width, height, pad = 640, 480, 60
    x0, x1 = x_range
    y0, y1 = y_range
    if x1 <= x0 or y1 <= y0:
        raise ValueError("plot ranges must be increasing")

    def sx(x: float) -> float:
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y: float) -> float:
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- format_version {FORMAT_VERSION} -->",
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" '
        f'height="{height - 2 * pad}" fill="none" stroke="black"/>',
    ]
    for x, anchor in ((x0, "start"), (x1, "end")):
        parts.append(
            f'<text x="{sx(x):.2f}" y="{height - pad + 18}" font-size="12" '
            f'text-anchor="{anchor}">{x:.6g}</text>'
        )
    for y in (y0, y1):
        parts.append(
            f'<text x="{pad - 8}" y="{sy(y):.2f}" font-size="12" '
            f'text-anchor="end" dominant-baseline="middle">{y:.6g}</text>'
        )
    if len(pts) > 1:
        coords = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="steelblue"/>')
    for x, y in pts:
        parts.append(f'<circle cx="{sx(x):.3f}" cy="{sy(y):.3f}" r="2.5" fill="crimson"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _write_output(text: str, out_file: str) -> None:
    if out_file:
        with open(out_file, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------- subcommands


def _cmd_lyap(args) -> str:
    f = _series_for(args.f, args.series_n)
    if args.action == "periodic":
        if args.word is None:
            raise ValueError("lyap periodic needs --word")
        value = lambda_periodic(args.word, f, args.order)
        if args.out == "json":
            return render_json(
                {"word": format_word(args.word), "f": args.f, "value": value}
            )
        return _fmt(value) + "\n"

    if args.action == "tilde":
        data = tilde_level_data(args.level, f, args.order)
        if args.out == "json":
            return render_json(
                {
                    "level": args.level,
                    "f": args.f,
                    "points": [
                        {"p": fr.p, "q": fr.q, "value": v} for fr, v in data
                    ],
                }
            )
        rows = [
            f"{fr.p},{fr.q},{repr(fr.p / fr.q)},{repr(v)}" for fr, v in data
        ]
        return render_csv("p,q,x,value", rows)

    if args.action == "estimate":
        if args.period:
            x = (tuple(args.pre) if args.pre else (), tuple(args.period))
        elif args.x is not None:
            x = Fraction(args.x)
        else:
            raise ValueError("lyap estimate needs --x or --period")
        est = lambda_estimate(x, args.n_max, f, args.order, args.sample_every)
        if args.out == "json":
            return render_json(
                {
                    "status": est.status,
                    "estimate": est.estimate,
                    "limsup_window": est.limsup_window,
                    "samples": [[n, r] for n, r in est.samples],
                }
            )
        return f"{est.status} {_fmt(est.estimate)}\n"

    if args.action == "attain":
        res = construct_attainer(args.target, f, args.steps, args.order)
        if args.out == "json":
            return render_json(
                {
                    "target": res.target,
                    "a": res.a,
                    "word": format_word(res.word),
                    "switch_indices": list(res.switch_indices),
                    "trace": [[n, r] for n, r in res.trace],
                    "estimate": res.estimate.estimate,
                }
            )
        lines = [
            f"a {res.a}",
            f"switches {','.join(str(n) for n in res.switch_indices)}",
            f"estimate {_fmt(res.estimate.estimate)}",
            f"word {format_word(res.word)}",
        ]
        return "\n".join(lines) + "\n"

    if args.action == "val":
        if args.word is not None:
            word = args.word
        elif args.frac is not None:
            word = markov_word(args.frac)
        else:
            raise ValueError("lyap val needs --word or --frac")
        return _fmt(val(word, args.order, f)) + "\n"

    raise ValueError(f"unknown lyap action {args.action!r}")


def _cmd_cycint(args) -> str:
    f = _series_for(args.f, args.series_n)
    result = cycle_integral(args.word, f, args.method, args.order, args.tau0)
    return render_json(
        {
            "word": format_word(args.word),
            "method": result.method,
            "re": result.value.real,
            "im": result.value.imag,
            "quad_order": result.order,
            "est_error": result.est_error,
        }
    )


def _cmd_farey(args) -> str:
    if args.x is not None:
        path = FareyPath.from_fraction(Fraction(str(args.x)), args.n_max)
        rows = [f"# turns {path.turns}"]
        rows.extend(
            f"{i},{fr.p},{fr.q}" for i, fr in enumerate(path.fractions())
        )
        return render_csv("n,p,q", rows)
    nodes = farey_level(args.tree, args.level)
    rows = []
    for fr in nodes:
        word = format_word(markov_word(fr)) if args.tree == "half" else ""
        lvl = minimal_level(fr) if args.tree == "half" else args.level
        rows.append(f'{lvl},{fr.p},{fr.q},"{word}"')
    return render_csv("level,p,q,word", rows)


def _cmd_markov(args) -> str:
    word = markov_word(args.frac)
    if args.out == "json":
        return render_json(
            {
                "p": args.frac.p,
                "q": args.frac.q,
                "level": minimal_level(args.frac),
                "word": format_word(word),
                "cf": format_cf(word),
                "s": word.total,
            }
        )
    return f"{format_word(word)}\n"


# suites whose default margins double precision resolves; deeper levels
# need an explicit --level and may fail on noise-sized gaps
_SUITE_LEVELS = {"bounds": (6, 8), "triangle": (2, 6), "convexity": (4, 10)}


def _cmd_verify(args):
    ts = default_t_grid(args.t_points)
    f = _series_for(args.f, args.series_n)
    suite = args.suite

    def lvl(name: str) -> int:
        default, cap = _SUITE_LEVELS[name]
        return default if args.level is None else min(args.level, cap)

    if suite == "all":
        report = run_all(f, t_points=args.t_points)
    elif suite == "poly":
        report = check_poly_identities()
    elif suite == "control":
        # deliberately broken remainder: exercises the failure exit path
        report = check_poly_identities({"h": 236})
    elif suite == "flemmas":
        report = scan_F_lemmas(grid_t=ts)
    elif suite == "bounds":
        report = check_golden_silver_bounds(lvl("bounds"), ts)
    elif suite == "triangle":
        report = check_triangle(lvl("triangle"), args.k_max, ts)
    elif suite == "convexity":
        report = check_convexity(lvl("convexity"), f, seed=args.seed)
    else:
        raise ValueError(f"unknown suite {suite!r}")
    code = 0 if report.passed else 3
    if args.out == "json":
        return code, render_json(report.as_dict())
    if hasattr(report, "reports"):
        lines = [f"{r.name}: {'pass' if r.passed else 'FAIL'}" for r in report.reports]
    else:
        lines = [f"{report.name}: {'pass' if report.passed else 'FAIL'}"]
    return code, "\n".join(lines) + "\n"


def _read_plot_csv(path: str):
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line[0].isalpha():
                continue
            cols = line.split(",")
            if len(cols) >= 4:
                points.append((float(cols[2]), float(cols[3])))
            elif len(cols) >= 2:
                points.append((float(cols[0]), float(cols[1])))
    return points


def _cmd_plot(args) -> str:
    points = _read_plot_csv(args.csv)
    return emit_plot(points, (args.x_min, args.x_max), (args.y_min, args.y_max))


# -------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--f", default="j", help="series: j, one, or file:<path>")
    p.add_argument("--order", type=int, default=64, help="quadrature order")
    p.add_argument("--series-n", type=int, default=24, dest="series_n",
                   help="series truncation")
    p.add_argument("--out", default="text", choices=("text", "json", "csv", "svg"))
    p.add_argument("--out-file", default="", dest="out_file")
    p.add_argument("--config", default="", help="JSON config; overrides flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modlyap",
        description="Lyapunov exponents of modular cycle integrals over Farey paths",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_lyap = sub.add_parser("lyap", help="exponent computations")
    p_lyap.add_argument("action",
                        choices=("periodic", "tilde", "estimate", "attain", "val"))
    p_lyap.add_argument("--word", type=_word_type, default=None)
    p_lyap.add_argument("--frac", type=_fraction_type, default=None)
    p_lyap.add_argument("--level", type=int, default=8)
    p_lyap.add_argument("--x", default=None, help="rational like 2/3")
    p_lyap.add_argument("--pre", type=_int_list, default=None)
    p_lyap.add_argument("--period", type=_int_list, default=None)
    p_lyap.add_argument("--n-max", type=int, default=2000, dest="n_max")
    p_lyap.add_argument("--sample-every", type=int, default=0, dest="sample_every")
    p_lyap.add_argument("--target", type=float, default=300.0)
    p_lyap.add_argument("--steps", type=int, default=10)
    _add_common(p_lyap)

    p_cyc = sub.add_parser("cycint", help="one cycle integral")
    p_cyc.add_argument("--word", type=_word_type, required=True)
    p_cyc.add_argument("--method", default="s", choices=("s", "k", "direct"))
    p_cyc.add_argument("--quad-order", type=int, default=64, dest="order")
    p_cyc.add_argument("--tau0", type=_tau0_type, default=complex(0.0, 1.0))
    _add_common_no_order(p_cyc)

    p_far = sub.add_parser("farey", help="paths and tree level dumps")
    p_far.add_argument("--x", default=None, help="rational for a turn path")
    p_far.add_argument("--n-max", type=int, default=16, dest="n_max")
    p_far.add_argument("--tree", default="half", choices=("half", "full"))
    p_far.add_argument("--level", type=int, default=4)
    _add_common(p_far)

    p_mark = sub.add_parser("markov", help="word of a half-tree fraction")
    p_mark.add_argument("--frac", type=_fraction_type, required=True)
    _add_common(p_mark)

    p_ver = sub.add_parser("verify", help="theorem-check suites")
    p_ver.add_argument(
        "--suite", default="all",
        choices=("all", "poly", "flemmas", "bounds", "triangle", "convexity",
                 "control"),
    )
    p_ver.add_argument("--level", type=int, default=None)
    p_ver.add_argument("--k-max", type=int, default=4, dest="k_max")
    p_ver.add_argument("--tgrid", type=int, default=64, dest="t_points")
    p_ver.add_argument("--seed", type=int, default=7)
    _add_common(p_ver)

    p_plot = sub.add_parser("plot", help="SVG from a CSV dataset")
    p_plot.add_argument("--csv", required=True)
    p_plot.add_argument("--x-min", type=float, default=0.0, dest="x_min")
    p_plot.add_argument("--x-max", type=float, default=0.5, dest="x_max")
    p_plot.add_argument("--y-min", type=float, default=620.0, dest="y_min")
    p_plot.add_argument("--y-max", type=float, default=685.0, dest="y_max")
    _add_common(p_plot)

    return parser


def _int_list(text: str):
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except Exception as exc:
        raise ValueError(f"bad integer list {text!r}") from exc


def _add_common_no_order(p: argparse.ArgumentParser) -> None:
    p.add_argument("--f", default="j", help="series: j, one, or file:<path>")
    p.add_argument("--series-n", type=int, default=24, dest="series_n")
    p.add_argument("--out", default="json", choices=("text", "json"))
    p.add_argument("--out-file", default="", dest="out_file")
    p.add_argument("--config", default="", help="JSON config; overrides flags")


_HANDLERS = {
    "lyap": _cmd_lyap,
    "cycint": _cmd_cycint,
    "farey": _cmd_farey,
    "markov": _cmd_markov,
    "verify": _cmd_verify,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        out = _HANDLERS[args.command](args)
    except _VERIFY_ERRORS as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ModlyapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    code, text = out if isinstance(out, tuple) else (0, out)
    _write_output(text, args.out_file)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
