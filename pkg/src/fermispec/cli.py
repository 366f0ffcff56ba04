"""Command-line front end.

Every subcommand writes one CSV (comma separated, shortest round-trip
floats, ``\\n`` line endings) and prints a short summary. ``--emit-plot``
adds a matplotlib script next to the CSV; running it draws the figure.
Exit codes: 0 success, 1 numerical failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import experiments as ex
from .freefermion import NumericalError
from .model import ChainSpec
from .oracle import MAX_SITES, dense_ground_state, oracle_schmidt
from .spectrum import entropy, entropy_contributions, top_k_weights

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    """Write rows atomically: temp file in the target directory, then rename."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    _atomic_write(path, buf.getvalue())


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path: Path) -> list[dict]:
    """Parse a CSV written by this tool; numeric fields come back as int/float."""

    def convert(text: str):
        try:
            return int(text)
        except ValueError:
            pass
        try:
            return float(text)
        except ValueError:
            return text

    with open(path, newline="") as fh:
        return [{k: convert(v) for k, v in row.items()} for row in csv.DictReader(fh)]


PLOT_TEMPLATE = '''\
"""Plot {csv_name}. Generated by fermispec; run with python."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
CSV_PATH = HERE / {csv_rel!r}

with open(CSV_PATH, newline="") as fh:
    rows = list(csv.DictReader(fh))

x = [float(r[{x!r}]) for r in rows]
fig, ax = plt.subplots(figsize=(5, 3.5))
for col in {ys!r}:
    ax.plot(x, [float(r[col]) for r in rows], marker="o", ms=3, label=col)
ax.set_xlabel({xlabel!r})
ax.set_yscale({yscale!r})
{extra}ax.legend(frameon=False, fontsize="small")
fig.tight_layout()
fig.savefig(CSV_PATH.with_suffix(".png"), dpi=150)
'''


def write_plot_script(csv_path: Path, x: str, ys: list[str], xlabel: str | None = None,
                      yscale: str = "linear", vline: float | None = None, logx: bool = False) -> Path:
    csv_path = Path(csv_path)
    script = csv_path.with_name(csv_path.stem + "_plot.py")
    extra = ""
    if vline is not None:
        extra += f"ax.axvline({vline!r}, color='0.5', lw=0.8)\n"
    if logx:
        extra += "ax.set_xscale('log', base=2)\n"
    text = PLOT_TEMPLATE.format(
        csv_name=csv_path.name,
        csv_rel=csv_path.name,
        x=x,
        ys=list(ys),
        xlabel=xlabel or x,
        yscale=yscale,
        extra=extra,
    )
    _atomic_write(script, text)
    return script


def _print_fit(label: str, fit: ex.FitResult) -> None:
    print(f"{label}: slope={fit.slope:.6g} intercept={fit.intercept:.6g} "
          f"residual={fit.residual:.3g} ({fit.domain})")


# --------------------------------------------------------------------------
# validation helpers
# --------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _field(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(value) or value < 0:
        raise argparse.ArgumentTypeError(f"field must be finite and >= 0, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return values


def _cut(args) -> int:
    cut = args.n // 2 if args.cut is None else args.cut
    if not 1 <= cut <= args.n:
        raise UsageError(f"--cut must lie in [1, {args.n}], got {cut}")
    return cut


def _grid(args) -> np.ndarray:
    if args.steps < 1:
        raise UsageError("--steps must be >= 1 (empty field grid)")
    if args.h_max < args.h_min:
        raise UsageError("--h-max must not be below --h-min")
    return np.linspace(args.h_min, args.h_max, args.steps)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_sweep_field(args) -> int:
    cut = _cut(args)
    rows = ex.field_sweep(args.n, _grid(args), cut)
    write_csv(args.out, ex.SweepRow.columns(), [r.as_dict() for r in rows])
    peak = max(rows, key=lambda r: r.entropy_bits)
    print(f"wrote {len(rows)} rows to {args.out}; max entropy {peak.entropy_bits:.6g} bits at h={peak.field:.6g}")
    if args.emit_plot:
        write_plot_script(args.out, "field", ["entropy_bits"], xlabel="h", vline=1.0)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cut = _cut(args)
    spec = ex.chain_spectrum(args.n, args.h, cut)
    lam = [t.weight for t in top_k_weights(spec, args.k)]
    s = entropy_contributions(lam)
    rows = [
        {"n": i + 1, "lambda_n": w, "s_n": float(sn), "O_n": math.sqrt(w)}
        for i, (w, sn) in enumerate(zip(lam, s))
    ]
    write_csv(args.out, ["n", "lambda_n", "s_n", "O_n"], rows)
    print(f"N={args.n} h={args.h!r} cut={cut}: S={entropy(spec):.10g} bits, nu_min={spec.nus[0]:.6g}")
    if args.emit_plot:
        write_plot_script(args.out, "n", ["lambda_n"], yscale="log")
    return EXIT_OK


def cmd_scaling(args) -> int:
    rows, fit = ex.scaling_run(args.sizes, args.h)
    write_csv(args.out, ex.SweepRow.columns(), [r.as_dict() for r in rows])
    write_csv(_fit_path(args.out), ex.FitResult.columns(), [fit.as_dict()])
    _print_fit("S vs log2 N", fit)
    if args.emit_plot:
        write_plot_script(args.out, "n_sites", ["entropy_bits"], xlabel="N", logx=True)
    return EXIT_OK


def cmd_decay_fit(args) -> int:
    lam, fit = ex.decay_fit(args.n, args.h, _cut(args), args.k)
    rows = [{"n": i + 1, "lambda_n": w, "ln_lambda_n": math.log(w)} for i, w in enumerate(lam)]
    write_csv(args.out, ["n", "lambda_n", "ln_lambda_n"], rows)
    write_csv(_fit_path(args.out), ex.FitResult.columns(), [fit.as_dict()])
    _print_fit("ln lambda_n vs n", fit)
    if args.emit_plot:
        write_plot_script(args.out, "n", ["lambda_n"], yscale="log")
    return EXIT_OK


def cmd_error_growth(args) -> int:
    rows, fit_o, fit_s = ex.error_growth(args.sizes, args.h, args.chi_o, args.chi_s, args.fit_above)
    write_csv(args.out, ex.ErrorRow.columns(), [r.as_dict() for r in rows])
    write_csv(_fit_path(args.out), ex.FitResult.columns(), [fit_o.as_dict(), fit_s.as_dict()])
    _print_fit(f"delta_o (chi'={args.chi_o})", fit_o)
    _print_fit(f"delta_s (chi'={args.chi_s})", fit_s)
    if args.emit_plot:
        write_plot_script(args.out, "n_sites", ["delta_o", "delta_s"], xlabel="N")
    return EXIT_OK


def cmd_overlaps(args) -> int:
    cut = _cut(args)
    grid = _grid(args)
    columns = ["n_sites", "field", "cut"] + [f"overlap_{i}" for i in range(1, args.k + 1)]

    def row(h):
        o = [math.sqrt(t.weight) for t in top_k_weights(ex.chain_spectrum(args.n, h, cut), args.k)]
        o += [0.0] * (args.k - len(o))
        return {"n_sites": args.n, "field": float(h), "cut": cut,
                **{f"overlap_{i + 1}": v for i, v in enumerate(o)}}

    rows = ex._ordered_map(row, list(grid))
    write_csv(args.out, columns, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.emit_plot:
        write_plot_script(args.out, "field", columns[3:], xlabel="h", vline=1.0)
    return EXIT_OK


def cmd_oracle_compare(args) -> int:
    if args.n > MAX_SITES:
        raise UsageError(f"oracle-compare needs --n <= {MAX_SITES}, got {args.n}")
    if args.n < 2:
        raise UsageError("oracle-compare needs --n >= 2")
    cut = _cut(args)
    if cut >= args.n:
        raise UsageError(f"--cut must lie in [1, {args.n - 1}] for oracle-compare")
    exact = oracle_schmidt(dense_ground_state(ChainSpec(args.n, args.h)), cut)
    spec = ex.chain_spectrum(args.n, args.h, cut)
    k = min(args.k, exact.values.size)
    ff = np.array([t.weight for t in top_k_weights(spec, k)])
    ref = exact.values[:k]
    diff = np.abs(ff - ref)
    rows = [
        {"n": i + 1, "lambda_ff": a, "lambda_oracle": b, "abs_diff": d}
        for i, (a, b, d) in enumerate(zip(ff, ref, diff))
    ]
    write_csv(args.out, ["n", "lambda_ff", "lambda_oracle", "abs_diff"], rows)
    s_ff = entropy(spec)
    print(f"N={args.n} h={args.h!r} cut={cut}: max |lambda_ff - lambda_oracle| = {diff.max():.3e}")
    print(f"entropy: free fermion {s_ff:.12g}, oracle {exact.entropy_bits:.12g}, "
          f"|diff| = {abs(s_ff - exact.entropy_bits):.3e}")
    if args.emit_plot:
        write_plot_script(args.out, "n", ["lambda_ff", "lambda_oracle"], yscale="log")
    return EXIT_OK


def _fit_path(path: Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + "_fit.csv")


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermispec",
        description="Entanglement spectra of the open transverse-field Ising chain via free fermions.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        epilog="Worker threads for sweeps: set FERMISPEC_THREADS (default min(8, cpu count)).",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    fmt = argparse.ArgumentDefaultsHelpFormatter

    def add(name, func, help_, *, n=50, h=None, cut=True, k=None, grid=False, sizes=None):
        p = sub.add_parser(name, help=help_, description=help_, formatter_class=fmt)
        if n is not None:
            p.add_argument("--n", type=_positive_int, default=n, help="number of sites N")
        if h is not None:
            p.add_argument("--h", type=_field, default=h, help="transverse field h")
        if cut:
            p.add_argument("--cut", type=_positive_int, default=None,
                           help="sites kept from the left edge (default: N/2)")
        if k is not None:
            p.add_argument("--k", type=_positive_int, default=k, help="number of leading Schmidt terms")
        if grid:
            p.add_argument("--h-min", type=_field, default=0.0, help="lowest field")
            p.add_argument("--h-max", type=_field, default=2.0, help="highest field")
            p.add_argument("--steps", type=_nonneg_int, default=41, help="number of field values")
        if sizes is not None:
            p.add_argument("--sizes", type=_int_list, default=sizes, help="comma-separated system sizes")
        p.add_argument("--out", type=Path, default=Path(f"{name}.csv"), help="output CSV path")
        p.add_argument("--emit-plot", action="store_true", help="also write a matplotlib script next to the CSV")
        p.set_defaults(func=func)
        return p

    add("sweep-field", cmd_sweep_field, "entropy and leading weights against the field h", n=10, grid=True)
    add("spectrum", cmd_spectrum, "leading reduced-density-matrix eigenvalues at one (N, h)", h=1.0, k=10)
    add("scaling", cmd_scaling, "half-chain entropy against N with a fit of S vs log2 N",
        n=None, h=1.0, cut=False, sizes=[16, 32, 64, 128, 256])
    add("decay-fit", cmd_decay_fit, "fit ln lambda_n against n for the leading weights", h=1.0, k=10)
    p = add("error-growth", cmd_error_growth, "truncation errors against N with linear fits for large N",
            n=None, h=1.0, cut=False, sizes=[50, 80, 120, 160, 200, 280, 400])
    p.add_argument("--chi-o", type=_positive_int, default=4, help="terms kept for the overlap error")
    p.add_argument("--chi-s", type=_positive_int, default=3, help="terms kept for the entropy error")
    p.add_argument("--fit-above", type=_nonneg_int, default=100, help="fit only sizes N above this")
    add("overlaps", cmd_overlaps, "leading overlaps O_n against the field h", n=10, k=4, grid=True)
    add("oracle-compare", cmd_oracle_compare, "compare free-fermion weights with exact diagonalisation",
        n=8, h=1.0, k=16)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ex.SweepError) as exc:
        if isinstance(exc, ex.SweepError) and not isinstance(exc.__cause__, ValueError):
            print(f"error: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
