"""Command-line front end.

    memflow relax          s_{2 alpha} (or s_mu) for one kernel, optional sweep
    memflow resolvent      resolvent kernel b
    memflow evolve         Hermite coefficients of the PDE solution
    memflow entropy-decay  entropy vs the s_{2 alpha} envelope
    memflow sweep          one s curve per parameter value
    memflow verify         the full verification suite

Exit status: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from memflow import checks, output
from memflow import entropy as ent
from memflow import kernels as K
from memflow import spectral as sp
from memflow import volterra as vt
from memflow.errors import MemflowError, PositivityError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
AXES = ("beta", "nu", "alpha", "mu")


class InputError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def _threads():
    raw = os.environ.get("MEMFLOW_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise InputError(f"MEMFLOW_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _grid(args):
    try:
        return vt.TimeGrid(args.t_end, args.dt)
    except MemflowError as exc:
        raise InputError(str(exc)) from None


def _kernel(args):
    try:
        return K.parse_kernel(args.kernel)
    except MemflowError as exc:
        raise InputError(f"--kernel: {exc}") from None


def _mu(args):
    return args.mu if args.mu is not None else 2.0 * args.alpha


def _datum(args, size):
    if args.datum is None:
        c = [1.0, 0.2]
    elif Path(args.datum).is_file():
        c = []
        for line in Path(args.datum).read_text().split():
            c.extend(_floats(line))
    else:
        c = _floats(args.datum)
    if len(c) > size:
        raise InputError(f"datum has {len(c)} coefficients but --nmax allows {size}")
    out = np.zeros(size)
    out[: len(c)] = c
    return out


def _out(args):
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# -- relax / sweep ---------------------------------------------------------

def _sweep_member(kernel, grid, alpha, mu, axis, value):
    if axis in ("beta", "nu"):
        kernel = K.with_param(kernel, axis, value)
    elif axis == "alpha":
        alpha, mu = value, 2.0 * value
    elif axis == "mu":
        mu = value
    return alpha, vt.solve_relaxation(kernel, mu, grid)


def run_relax(args, require_axis=False):
    kernel, grid = _kernel(args), _grid(args)
    if (args.axis is None) != (args.values is None):
        raise InputError("--axis and --values go together")
    if require_axis and args.axis is None:
        raise InputError("sweep needs --axis and --values")
    out = _out(args)
    t = grid.times
    if args.axis is None:
        mu = _mu(args)
        s = vt.solve_relaxation(kernel, mu, grid)
        floor = np.exp(-mu * t)
        path = output.write_csv(out / "relax.csv", ("t", "s"), zip(t, s.values))
        output.write_csv(out / "relax_memoryless.csv", ("t", "s"), zip(t, floor))
        output.write_svg(out / "relax.svg", [
            (kernel.describe(), t, s.values, False),
            (f"exp(-{mu:g} t)", t, floor, True),
        ], title=f"relaxation function, mu={mu:g}", ylabel="s")
        print(f"wrote {path}")
        try:
            print(vt.tail_slopes(s).summary())
        except MemflowError:
            pass
        return EXIT_OK

    if args.axis not in AXES:
        raise InputError(f"--axis must be one of {AXES}")
    values = _floats(args.values)
    if not values or any(not v > 0 for v in values):
        raise InputError("--values must be positive numbers")
    try:
        if args.axis in ("beta", "nu"):
            for v in values:
                K.with_param(kernel, args.axis, v)
        with ThreadPoolExecutor(max_workers=min(_threads(), len(values))) as pool:
            futures = [pool.submit(_sweep_member, kernel, grid, args.alpha, _mu(args), args.axis, v)
                       for v in values]
            results = [f.result() for f in futures]
    except MemflowError as exc:
        raise InputError(str(exc)) from None
    header = ["t"] + [f"s[{args.axis}={v:g}]" for v in values] + ["memoryless"]
    base_alpha = args.alpha if args.axis != "alpha" else values[0]
    floor_mu = _mu(args) if args.axis not in ("alpha", "mu") else 2.0 * base_alpha
    floor = np.exp(-floor_mu * t)
    cols = [t] + [r[1].values for r in results] + [floor]
    path = output.write_csv(out / f"sweep_{args.axis}.csv", header, zip(*cols))
    series = [(f"{args.axis}={v:g}", t, r[1].values, False) for v, r in zip(values, results)]
    series.append((f"exp(-{floor_mu:g} t)", t, floor, True))
    output.write_svg(out / f"sweep_{args.axis}.svg", series,
                     title=f"{kernel.describe()}: varying {args.axis}", ylabel="s")
    print(f"wrote {path}")
    return EXIT_OK


def run_resolvent(args):
    kernel, grid = _kernel(args), _grid(args)
    out = _out(args)
    b = vt.solve_resolvent(kernel, grid)
    path = output.write_csv(out / "resolvent.csv", ("t", "b"), zip(grid.times, b.values))
    output.write_svg(out / "resolvent.svg", [(kernel.describe(), grid.times, b.values, False)],
                     title="resolvent kernel", ylabel="b")
    print(f"wrote {path}")
    return EXIT_OK


# -- spectral --------------------------------------------------------------

def _evolve(args):
    kernel, grid = _kernel(args), _grid(args)
    if not args.alpha > 0:
        raise InputError("--alpha must be positive")
    basis = sp.HermiteBasis(args.alpha, args.nmax)
    return kernel, grid, basis, sp.evolve(_datum(args, basis.size), kernel, basis, grid)


def _snapshot_times(grid, count=6):
    return sorted({grid.index(round(grid.n_steps * i / (count - 1)) * grid.dt)
                   for i in range(count)})


def run_evolve(args):
    kernel, grid, basis, state = _evolve(args)
    out = _out(args)
    t = grid.times
    rows = ((t[m], n, state.coeffs[n, m]) for m in range(grid.n_steps + 1) for n in range(basis.size))
    path = output.write_csv(out / "coefficients.csv", ("t", "n", "c"), rows)
    w = basis.half_width
    x = np.linspace(-w, w, 241)
    idx = _snapshot_times(grid)
    field = ((t[m], xi, ui) for m in idx for xi, ui in zip(x, sp.evaluate(state, m, x)))
    output.write_csv(out / "field.csv", ("t", "x", "u"), field)
    output.write_svg(out / "field.svg",
                     [(f"t={t[m]:g}", x, sp.evaluate(state, m, x), False) for m in idx],
                     title=f"u(t, x), {kernel.describe()}", xlabel="x", ylabel="u")
    print(f"wrote {path}")
    c0 = state.coeffs[:, 0]
    norm = float(np.linalg.norm(c0))
    if norm > 0:
        # reported, not certified: weight carried by the highest retained mode
        print(f"truncation: |c_{basis.max_degree}(0)| / |c(0)| = {abs(c0[-1]) / norm:.3e}")
    return EXIT_OK


def run_entropy_decay(args):
    kernel, grid, basis, state = _evolve(args)
    times = _floats(args.times) if args.times else [float(grid.times[m]) for m in range(0, grid.n_steps + 1, max(1, grid.n_steps // 100))]
    try:
        idx = [grid.index(tt) for tt in times]
    except MemflowError as exc:
        raise InputError(str(exc)) from None
    snaps = [state.snapshot(0)] + [state.snapshot(i) for i in idx]
    if args.nodes:
        rule = ent.gauss_quadrature(args.alpha, args.nodes)
        for s in snaps:
            ent.entropy_functional(s, rule)
    else:
        nz = np.flatnonzero(state.coeffs[:, 0])
        degree = int(nz[-1]) if nz.size else 0
        rule = ent.positive_rule(snaps, args.alpha, min_nodes=degree + 2)
    rep = ent.verify_decay(state, kernel, rule, times, mu=args.mu)
    out = _out(args)
    path = output.write_csv(out / "entropy.csv",
                            ("t", "entropy", "envelope", "memoryless", "margin"), rep.rows())
    output.write_svg(out / "entropy.svg", [
        ("Ent(u(t))", rep.times, rep.entropy, False),
        (f"s_{rep.mu:g}(t) Ent(u0)", rep.times, rep.envelope, False),
        (f"exp(-{2 * args.alpha:g} t) Ent(u0)", rep.times, rep.memoryless, True),
    ], title=f"entropy decay, {kernel.describe()}", ylabel="entropy")
    print(f"wrote {path}")
    print(f"nodes={rule.n_nodes} Ent(u0)={rep.initial_entropy:.6e} "
          f"worst margin={rep.worst_margin:.6e} tolerance={rep.tolerance:.6e}")
    if not rep.passed:
        print("FAIL: entropy exceeds the envelope", file=sys.stderr)
        return EXIT_FAIL
    print("PASS")
    return EXIT_OK


# -- verify ----------------------------------------------------------------

def run_verify(args):
    only = None
    if args.only:
        only = [s.strip() for s in args.only.split(",") if s.strip()]
        bad = set(only) - set(checks.SUITES)
        if bad:
            raise InputError(f"unknown suite(s) {sorted(bad)}; choose from {checks.SUITES}")
    extra = []
    if args.kernel:
        extra.append(_kernel(args))
        if only is not None and "kernels" not in only:
            only = ["kernels"] + only
    results = checks.run(only, extra)
    n_fail = sum(not c.passed for c in results)
    lines = [c.line() for c in results]
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if args.out:
        (_out(args) / "verify.txt").write_text(report)
    return EXIT_OK if n_fail == 0 else EXIT_FAIL


# -- parser ----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kernel", default="exponential nu=1", help="kernel descriptor")
    common.add_argument("--alpha", type=float, default=1.0)
    common.add_argument("--mu", type=float, default=None, help="relaxation rate (default 2*alpha)")
    common.add_argument("--dt", type=float, default=1e-3)
    common.add_argument("--t-end", type=float, default=5.0)
    common.add_argument("--out", default="out")

    spectral = argparse.ArgumentParser(add_help=False)
    spectral.add_argument("--nmax", type=int, default=16)
    spectral.add_argument("--nodes", type=int, default=None,
                          help="quadrature nodes (default: largest positive rule <= 64)")
    spectral.add_argument("--datum", default=None,
                          help="Hermite coefficients c0,c1,... or a file of them")
    spectral.add_argument("--times", default=None, help="sample times (grid nodes)")

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--axis", choices=AXES, default=None)
    sweep.add_argument("--values", default=None)

    p = argparse.ArgumentParser(prog="memflow", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("relax", parents=[common, sweep])
    sub.add_parser("sweep", parents=[common, sweep])
    sub.add_parser("resolvent", parents=[common])
    sub.add_parser("evolve", parents=[common, spectral])
    sub.add_parser("entropy-decay", parents=[common, spectral])
    v = sub.add_parser("verify")
    v.add_argument("--only", default=None, help=f"comma-separated suites from {','.join(checks.SUITES)}")
    v.add_argument("--kernel", default=None, help="also audit this kernel")
    v.add_argument("--out", default=None)
    return p


COMMANDS = {
    "relax": run_relax,
    "sweep": lambda a: run_relax(a, require_axis=True),
    "resolvent": run_resolvent,
    "evolve": run_evolve,
    "entropy-decay": run_entropy_decay,
    "verify": run_verify,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except PositivityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, MemflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
