"""Command-line entry point.

Subcommands
-----------
exact-table
    Exact table ``b(m, n)`` for ``|m| <= M_max``, ``n <= N_max`` as CSV or JSON.
    Tables are cached on disk, keyed by ``(N_max, M_max, prescription,
    FORMAT_VERSION)``.
compare
    Exact vs asymptotic vs Wright reconstruction rows for selected ``m``.
verify
    Identity and bound verification suites, one PASS/FAIL line each.
bessel
    Ad-hoc evaluation of ``I_l(x)``.
residue-series
    Integer coefficients of ``eta(2 tau)^8 / eta(tau)^16``.

CSV schemas
-----------
exact-table:    ``m,n,im_numerator,im_denominator`` (``b(m, n) = i * num / den``)
compare:        ``n,m,exact,asymptotic,ratio,wright,wright_over_exact``
bessel:         ``l,x,scaled,value``
residue-series: ``n,coefficient``

JSON output mirrors the CSV columns as a list of row objects, except
``exact-table --format json`` which writes the cache document itself.

Exit status: 0 success, 1 verification failure, 2 usage error, 3 resource or
convergence failure.  Progress goes to standard error, results to standard
output or ``--out``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import mpmath
from filelock import FileLock

from . import checks, circle_method, fourier_extract, qseries, specfun
from .errors import EtaThetaError, InsufficientSupportError, NotConvergedError, OutOfRangeError

__all__ = [
    "RunConfig",
    "main",
    "cmd_exact_table",
    "cmd_compare",
    "cmd_verify",
    "cmd_bessel",
    "cmd_residue_series",
    "cached_table",
    "default_cache_dir",
]

CACHE_ENV = "ETATHETA_CACHE_DIR"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    N_max: int = 50
    M_max: int | None = None
    n_grid: tuple[int, ...] = ()
    m_list: tuple[int, ...] = (1,)
    tol: float = 1e-4
    band: float | None = None
    wright_max_n: int = 50
    precision: str = "double"
    cache_dir: Path | None = None
    fmt: str = "csv"
    out: Path | None = None
    threads: int = 1
    prescription: str = "average"
    suites: tuple[str, ...] = ()
    bessel_l: int = 0
    bessel_x: tuple[float, ...] = ()
    scaled: bool = False
    quiet: bool = False

    def __post_init__(self):
        if self.N_max < 0:
            raise ValueError("--n-max must be non-negative")
        if self.M_max is not None and self.M_max < 0:
            raise ValueError("--m-max must be non-negative")
        if any(n < 0 for n in self.n_grid):
            raise ValueError("--n-grid entries must be non-negative")
        if self.tol <= 0:
            raise ValueError("--tol must be positive")
        if self.band is not None and self.band <= 0:
            raise ValueError("--band must be positive")
        if self.threads < 1:
            raise ValueError("--threads must be >= 1")
        if self.fmt not in ("csv", "json"):
            raise ValueError("--format must be csv or json")
        if self.precision not in ("double", "extended"):
            raise ValueError("--precision must be double or extended")
        if self.prescription not in fourier_extract.PRESCRIPTIONS:
            raise ValueError(f"--prescription must be one of {fourier_extract.PRESCRIPTIONS}")
        unknown = [s for s in self.suites if s not in checks.SUITES]
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(unknown)}")


def _progress(config: RunConfig, msg: str) -> None:
    if not config.quiet:
        print(msg, file=sys.stderr, flush=True)


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "etatheta"


def _cache_path(cache_dir: Path, N: int, M: int, prescription: str) -> Path:
    return cache_dir / f"btable-N{N}-M{M}-{prescription}-v{fourier_extract.FORMAT_VERSION}.json"


def cached_table(config: RunConfig, N: int, M: int) -> tuple[fourier_extract.CoeffTable, bool]:
    """Load the table from the cache or compute and store it; returns ``(table, hit)``."""
    cache_dir = config.cache_dir or default_cache_dir()
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = _cache_path(cache_dir, N, M, config.prescription)
    with FileLock(str(path) + ".lock"):
        if path.exists():
            _progress(config, f"cache hit: {path}")
            return fourier_extract.CoeffTable.from_json(json.loads(path.read_text())), True
        _progress(config, f"computing b(m, n) for N_max={N}, M_max={M} [{config.prescription}]")
        t0 = time.perf_counter()
        table = fourier_extract.b_table(N, M, prescription=config.prescription, threads=config.threads)
        _progress(config, f"done in {time.perf_counter() - t0:.1f}s; writing {path}")
        tmp = path.with_suffix(".tmp")
        tmp.write_text(table.dumps())
        tmp.replace(path)
    return table, False


def _emit(config: RunConfig, text: str) -> None:
    if config.out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        config.out.parent.mkdir(parents=True, exist_ok=True)
        config.out.write_text(text)


def _rows_text(config: RunConfig, columns: list[str], rows: list[dict]) -> str:
    if config.fmt == "json":
        return json.dumps([{c: r[c] for c in columns} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow(["" if r[c] is None else r[c] for c in columns])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_exact_table(config: RunConfig) -> int:
    M = config.M_max if config.M_max is not None else 20
    table, _ = cached_table(config, config.N_max, M)
    _emit(config, table.to_csv() if config.fmt == "csv" else table.dumps() + "\n")
    return EXIT_OK


def _fmt_float(x) -> str | None:
    return None if x is None else f"{x:.12g}"


def cmd_compare(config: RunConfig) -> int:
    n_grid = config.n_grid or (5, 20, 35, 50)
    M = max(max(abs(m) for m in config.m_list), 1)
    if config.M_max is not None:
        M = max(M, config.M_max)
    table, _ = cached_table(config, max(max(n_grid), config.N_max), M)
    spec = circle_method.QuadratureSpec(rtol=min(1e-9, config.tol * 1e-3))
    dps = 30 if config.precision == "extended" else mpmath.mp.dps
    rows, failures = [], []
    with mpmath.workdps(dps):
        for m in config.m_list:
            _progress(config, f"compare m={m}")
            report = circle_method.convergence_report(
                m, n_grid, spec, table, prescription=config.prescription, wright_max_n=config.wright_max_n
            )
            for r in report:
                rows.append(
                    {
                        "n": r["n"],
                        "m": r["m"],
                        "exact": str(r["exact"]),
                        "asymptotic": _fmt_float(r["theorem1"]),
                        "ratio": _fmt_float(r["ratio"]),
                        "wright": _fmt_float(r["wright"]),
                        "wright_over_exact": _fmt_float(r["wright_over_exact"]),
                    }
                )
                wr = r["wright_over_exact"]
                if wr is not None and abs(wr - 1) > config.tol:
                    failures.append(f"m={m} n={r['n']}: wright/exact - 1 = {wr - 1:.3e} > {config.tol:g}")
                if config.band is not None and r["ratio"] is not None and abs(r["ratio"] - 1) > config.band:
                    failures.append(f"m={m} n={r['n']}: |ratio - 1| = {abs(r['ratio'] - 1):.3f} > {config.band:g}")
    cols = ["n", "m", "exact", "asymptotic", "ratio", "wright", "wright_over_exact"]
    _emit(config, _rows_text(config, cols, rows))
    for f in failures:
        print(f"FAIL {f}", file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    names = config.suites or tuple(checks.SUITES)
    failed = 0
    lines = []
    for name in names:
        _progress(config, f"suite {name}")
        t0 = time.perf_counter()
        for res in checks.SUITES[name]():
            lines.append(f"[{name}] {res.line()}")
            if config.out is None:
                print(lines[-1], flush=True)
            failed += not res.passed
        _progress(config, f"  {time.perf_counter() - t0:.1f}s")
    if config.out is not None:
        _emit(config, "\n".join(lines) + "\n")
    _progress(config, f"{len(lines) - failed} passed, {failed} failed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_bessel(config: RunConfig) -> int:
    if not config.bessel_x:
        raise ValueError("bessel needs at least one --x value")
    rows = []
    for x in config.bessel_x:
        v = specfun.bessel_i(config.bessel_l, x, scaled=config.scaled, precision=config.precision)
        rows.append({"l": config.bessel_l, "x": repr(x), "scaled": int(config.scaled), "value": str(v.value)})
    _emit(config, _rows_text(config, ["l", "x", "scaled", "value"], rows))
    return EXIT_OK


def cmd_residue_series(config: RunConfig) -> int:
    _progress(config, f"residue series to n={config.N_max}")
    coeffs = qseries.residue_series(config.N_max).integer_coefficients()
    rows = [{"n": n, "coefficient": c} for n, c in enumerate(coeffs)]
    _emit(config, _rows_text(config, ["n", "coefficient"], rows))
    return EXIT_OK


COMMANDS = {
    "exact-table": cmd_exact_table,
    "compare": cmd_compare,
    "verify": cmd_verify,
    "bessel": cmd_bessel,
    "residue-series": cmd_residue_series,
}


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-max", type=int, default=50, dest="n_max")
    common.add_argument("--m-max", type=int, default=None, dest="m_max")
    common.add_argument("--prescription", choices=fourier_extract.PRESCRIPTIONS, default="average")
    common.add_argument("--precision", choices=("double", "extended"), default="double")
    common.add_argument("--cache-dir", type=Path, default=None, help=f"default: ${CACHE_ENV} or ~/.cache/etatheta")
    common.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--quiet", action="store_true", help="suppress progress on stderr")

    parser = argparse.ArgumentParser(prog="etatheta", description="Fourier coefficients of an eta-theta quotient.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sub.add_parser("exact-table", parents=[common], help="exact table b(m, n)")

    p = sub.add_parser("compare", parents=[common], help="exact vs asymptotic vs Wright rows")
    p.add_argument("--m", type=_int_list, default=(1,), dest="m_list", help="comma-separated m values")
    p.add_argument("--n-grid", type=_int_list, default=(), dest="n_grid")
    p.add_argument("--tol", type=float, default=1e-4, help="relative tolerance for wright/exact")
    p.add_argument("--band", type=float, default=None, help="optional |ratio - 1| band for the asymptotic column")
    p.add_argument("--wright-max-n", type=int, default=50, dest="wright_max_n")

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", action="append", default=[], dest="suites", choices=sorted(checks.SUITES))

    p = sub.add_parser("bessel", parents=[common], help="evaluate I_l(x)")
    p.add_argument("--l", type=int, default=0, dest="bessel_l")
    p.add_argument("--x", type=_float_list, default=(), dest="bessel_x")
    p.add_argument("--scaled", action="store_true", help="return exp(-x) I_l(x)")

    sub.add_parser("residue-series", parents=[common], help="coefficients of eta(2 tau)^8 / eta(tau)^16")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kw = dict(
        subcommand=args.subcommand,
        N_max=args.n_max,
        M_max=args.m_max,
        precision=args.precision,
        cache_dir=args.cache_dir,
        fmt=args.fmt,
        out=args.out,
        threads=args.threads,
        prescription=args.prescription,
        quiet=args.quiet,
    )
    for name in ("m_list", "n_grid", "tol", "band", "wright_max_n", "bessel_l", "bessel_x", "scaled"):
        if hasattr(args, name):
            kw[name] = getattr(args, name)
    if hasattr(args, "suites"):
        kw["suites"] = tuple(args.suites)
    return RunConfig(**kw)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        config = config_from_args(args)
        return COMMANDS[config.subcommand](config)
    except (ValueError, OutOfRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotConvergedError, InsufficientSupportError, MemoryError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except EtaThetaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
