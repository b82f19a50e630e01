"""Command line entry point: ``screened-lgf {tabulate,probe,bench,app3d,walk}``.

Tables are written as CSV with ``# key=value`` metadata lines above an
``n,m,value`` header, or as JSON holding the same fields. Values use the
shortest decimal that round-trips a 64-bit float.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import LatticeConfig, Method, ToleranceError, as_tolerance, select_method
from .fft_batch import batch_table
from .quad1d import DEFAULT_DELTA, trapezoid_eval
from .series import series_eval, series_table

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TOLERANCE = 3
EXIT_DIVERGENCE = 4

TOOL = "screened-lgf"


@dataclass
class LgfTableFile:
    """Metadata strings plus (n, m, value) rows; metadata is kept verbatim."""

    metadata: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [f"# {k}={v}" for k, v in self.metadata.items()]
        lines.append("n,m,value")
        lines += [f"{n},{m},{float(v)!r}" for n, m, v in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {"metadata": self.metadata, "rows": [[n, m, float(v)] for n, m, v in self.rows]}
        return json.dumps(payload, indent=1) + "\n"

    def dumps(self, fmt: str = "csv") -> str:
        return self.to_json() if fmt == "json" else self.to_csv()

    @classmethod
    def from_csv(cls, text: str) -> "LgfTableFile":
        meta, rows = {}, []
        lines = iter(text.splitlines())
        for line in lines:
            if line.startswith("# "):
                key, _, value = line[2:].partition("=")
                meta[key] = value
            elif line == "n,m,value":
                break
            else:
                raise ValueError(f"unexpected line before header: {line!r}")
        for line in lines:
            n, m, v = line.split(",")
            rows.append((int(n), int(m), float(v)))
        return cls(meta, rows)

    @classmethod
    def from_json(cls, text: str) -> "LgfTableFile":
        payload = json.loads(text)
        rows = [(int(n), int(m), float(v)) for n, m, v in payload["rows"]]
        return cls({k: str(v) for k, v in payload["metadata"].items()}, rows)

    @classmethod
    def loads(cls, text: str) -> "LgfTableFile":
        return cls.from_json(text) if text.lstrip().startswith("{") else cls.from_csv(text)

    def values(self) -> np.ndarray:
        """Rows as a dense ``[m, n]`` array."""
        n = np.array([r[0] for r in self.rows])
        m = np.array([r[1] for r in self.rows])
        out = np.full((m.max() + 1, n.max() + 1), np.nan)
        out[m, n] = [r[2] for r in self.rows]
        return out


def _config(args) -> LatticeConfig:
    if args.c2 is not None:
        return LatticeConfig(args.alpha1, args.c2)
    return LatticeConfig.from_c(args.alpha1, args.c)


def _metadata(cfg: LatticeConfig, eps: float, delta: float, choice, **extra) -> dict:
    meta = {
        "tool": TOOL,
        "version": __version__,
        "alpha1": repr(cfg.alpha1),
        "c2": repr(cfg.c2),
        "eps": repr(eps),
        "delta": repr(delta),
        "method": choice.tag.value,
        "n_terms" if choice.tag is Method.SERIES else "n_pts_used": str(choice.size),
        "certificate": repr(choice.certificate),
        "bound_source": choice.bound_source,
    }
    meta.update({k: str(v) for k, v in extra.items()})
    return meta


def tabulate(cfg: LatticeConfig, L: int, M: int, eps: float, delta: float = DEFAULT_DELTA,
             threads: int | None = None) -> LgfTableFile:
    """B_c on [0, L] x [0, M] through the backend chosen by select_method."""
    if L < 0 or M < 0:
        raise ValueError("L and M must be >= 0")
    tol = as_tolerance(eps)
    choice = select_method(cfg, tol, row_length=L + 1, n_max=L, delta=delta)
    if choice.tag is Method.SERIES:
        values = series_table(cfg, L, M, max(choice.size, 1))
    else:
        values = batch_table(cfg, M, L, tol, delta, threads).values
    rows = [(n, m, values[m, n]) for m in range(M + 1) for n in range(L + 1)]
    return LgfTableFile(_metadata(cfg, tol.eps, delta, choice, L=L, M=M), rows)


def probe(cfg: LatticeConfig, n: int, m: int, eps: float, delta: float = DEFAULT_DELTA) -> LgfTableFile:
    tol = as_tolerance(eps)
    choice = select_method(cfg, tol, n_max=abs(n), delta=delta)
    if choice.tag is Method.SERIES:
        value = series_eval(cfg, (n, m), max(choice.size, 1))
    else:
        value = trapezoid_eval(cfg, (n, m), choice.size)
    return LgfTableFile(_metadata(cfg, tol.eps, delta, choice), [(n, m, value)])


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_block(meta: dict, header: str, rows) -> str:
    lines = [f"# {k}={v}" for k, v in meta.items()] + [header]
    lines += [",".join(str(x) if not isinstance(x, float) else repr(x) for x in r) for r in rows]
    return "\n".join(lines) + "\n"


def _cmd_tabulate(args) -> int:
    table = tabulate(_config(args), args.L, args.M, args.eps, args.delta, args.threads)
    _emit(table.dumps(args.format), args.output)
    return EXIT_OK


def _cmd_probe(args) -> int:
    _emit(probe(_config(args), args.n, args.m, args.eps, args.delta).dumps(args.format), args.output)
    return EXIT_OK


def _cmd_bench(args) -> int:
    from .bench import run_bench
    from .oracles import OracleDivergenceWarning

    cfg = _config(args)
    as_tolerance(args.eps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OracleDivergenceWarning)
        records = run_bench(cfg, args.L, args.M, args.eps, repeats=args.repeats,
                            methods=args.methods, delta=args.delta)
    meta = {"tool": TOOL, "version": __version__, "alpha1": repr(cfg.alpha1), "c2": repr(cfg.c2),
            "eps": repr(args.eps), "L": args.L, "M": args.M, "repeats": args.repeats}
    rows = [(r.method, r.seconds, r.speedup, r.max_abs_error, str(r.flagged).lower(), r.note)
            for r in records]
    if args.format == "json":
        text = json.dumps({"metadata": {k: str(v) for k, v in meta.items()},
                           "rows": [r.__dict__ for r in records]}, indent=1) + "\n"
    else:
        text = _csv_block(meta, "method,seconds,speedup,max_abs_error,flagged,note", rows)
    _emit(text, args.output)
    divergent = any(r.flagged for r in records if r.method == "bessel")
    if divergent:
        print("bench: some Bessel oracle values did not converge", file=sys.stderr)
    return EXIT_DIVERGENCE if divergent else EXIT_OK


def _cmd_app3d(args) -> int:
    from .periodic3d import convergence_study

    as_tolerance(args.eps)
    meta = {"tool": TOOL, "version": __version__, "eps": repr(args.eps), "norm": "max"}
    rows = []
    for ratio in args.ratio:
        levels, slope = convergence_study(ratio, tuple(args.levels), args.eps)
        meta[f"slope_ratio_{ratio:g}"] = repr(slope)
        rows += [(ratio, lv.n_p, lv.dx2, lv.max_error) for lv in levels]
    _emit(_csv_block(meta, "ratio,n_p,dx2,max_error", rows), args.output)
    return EXIT_OK


_RAYS = {
    "horizontal": lambda k: (k, 0),
    "vertical": lambda k: (0, k),
    "diagonal": lambda k: (k, k),
}


def _cmd_walk(args) -> int:
    from .randomwalk import WalkParams, mc_simulate, return_probability

    if args.pk is not None:
        w = WalkParams.scaled_family(args.pk)
    elif args.p1 is not None and args.p2 is not None:
        w = WalkParams(args.p1, args.p2)
    else:
        raise ValueError("give --p1 and --p2, or --pk for the p1 = 0.2 (1 - pk), p2 = 0.3 (1 - pk) family")
    rays = list(_RAYS) if args.ray == "all" else [args.ray]
    points = [(name, _RAYS[name](k)) for name in rays for k in range(args.max + 1)]
    rho = return_probability(w, [p for _, p in points], args.eps)
    meta = {"tool": TOOL, "version": __version__, "p1": repr(w.p1), "p2": repr(w.p2),
            "pk": repr(w.pk), "eps": repr(args.eps)}
    header = "ray,n,m,rho"
    if args.mc:
        meta.update(trials=args.mc, seed=args.seed)
        header += ",mc,mc_se"
    rows = []
    for name, p in points:
        row = [name, p[0], p[1], rho[p]]
        if args.mc:
            row += list(mc_simulate(w, p, args.mc, args.seed))
        rows.append(tuple(row))
    _emit(_csv_block(meta, header, rows), args.output)
    return EXIT_OK


def _add_lattice(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha1", type=float, default=1.0, help="anisotropy in (0, 1]")
    screen = p.add_mutually_exclusive_group(required=True)
    screen.add_argument("--c", type=float, help="screening c (c2 = c**2)")
    screen.add_argument("--c2", type=float, help="screening coefficient c2")
    p.add_argument("--eps", type=float, default=1e-12, help="absolute tolerance")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)


def _add_output(p: argparse.ArgumentParser, formats: bool = True) -> None:
    if formats:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tabulate", help="table of B_c on [0, L] x [0, M]")
    _add_lattice(p)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--threads", type=int, default=None)
    _add_output(p)
    p.set_defaults(func=_cmd_tabulate)

    p = sub.add_parser("probe", help="single value with its certificate")
    _add_lattice(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _add_output(p)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("bench", help="compare evaluation paths against the Bessel oracle")
    _add_lattice(p)
    p.add_argument("--L", type=int, default=99)
    p.add_argument("--M", type=int, default=99)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--methods", nargs="+", default=["series", "trapezoid", "fft_batch", "bessel"],
                   choices=["series", "trapezoid", "fft_batch", "bessel"])
    _add_output(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("app3d", help="convergence study of the periodic 3D solver")
    p.add_argument("--ratio", type=float, nargs="+", default=[2.0, 4.0], help="dx2 / dx1 values")
    p.add_argument("--levels", type=int, nargs="+", default=[8, 16, 32, 64], help="points per period")
    p.add_argument("--eps", type=float, default=1e-10)
    _add_output(p, formats=False)
    p.set_defaults(func=_cmd_app3d)

    p = sub.add_parser("walk", help="return probabilities of a walk with killing")
    p.add_argument("--p1", type=float)
    p.add_argument("--p2", type=float)
    p.add_argument("--pk", type=float, help="use the p1 = 0.2 (1 - pk), p2 = 0.3 (1 - pk) family")
    p.add_argument("--ray", choices=[*_RAYS, "all"], default="all")
    p.add_argument("--max", type=int, default=10)
    p.add_argument("--mc", type=int, default=0, help="Monte Carlo trials per point (0 = off)")
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--eps", type=float, default=1e-12)
    _add_output(p, formats=False)
    p.set_defaults(func=_cmd_walk)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ToleranceError as exc:
        print(f"{TOOL}: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ValueError, MemoryError) as exc:
        print(f"{TOOL}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
