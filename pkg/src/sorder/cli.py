"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fock_oracle as fo
from . import hermite2d as h2
from . import ordered_algebra as oa
from . import phase_space as ps
from . import verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def parse_complex(text: str) -> complex:
    """``"re,im"`` or ``"re"``."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im' or 're', got {text!r}")


def nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.15g} {sign} {abs(z.imag):.15g}i"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def cmd_eval_hermite(args) -> int:
    value = h2.h2_eval(args.m, args.n, args.x, args.y, args.tau)
    print(format_complex(value))
    if args.check_laguerre:
        if args.m != args.n or args.tau == 0:
            print("laguerre check needs m == n and tau != 0", file=sys.stderr)
            return EXIT_USAGE
        via = h2.h2_diagonal_laguerre(args.n, args.x, args.y, args.tau)
        print(f"laguerre: {format_complex(via)}")
        print(f"difference: {abs(value - via):.3g}")
    return EXIT_OK


def cmd_convert_order(args) -> int:
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    try:
        poly = oa.OrderedPoly.from_json(text)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(oa.convert_poly(poly, args.t).to_json() + "\n", args.out)
    return EXIT_OK


def _exp_dict(E: oa.OrderedExp) -> dict:
    def c(z):
        z = complex(z)
        return {"re": z.real, "im": z.imag}

    return {
        "prefactor": c(E.prefactor),
        "n": E.n,
        "m": E.m,
        "kappa": c(E.kappa),
        "lambda": c(E.lam),
        "order": E.order,
    }


def cmd_projector(args) -> int:
    if args.t == -1:
        print("error: --t -1 is the antinormal pole of the projector expansion", file=sys.stderr)
        return EXIT_USAGE
    E = oa.projector(args.n, args.m, args.t)
    if args.laguerre_form:
        if args.n != args.m:
            print("error: --laguerre-form needs n == m", file=sys.stderr)
            return EXIT_USAGE
        f = 2 / (args.t + 1)
        kappa = (args.t**2 - 1) / 4
        doc = {
            "n": args.n,
            "order": args.t,
            "f": f,
            "kappa": kappa,
            "prefactor": f ** (2 * args.n + 1) * kappa**args.n,
            "exponent": -f,
            "polynomial": oa.projector_laguerre(args.n, args.t).to_dict(),
        }
        _emit(json.dumps(doc) + "\n", args.out)
    elif args.expand is not None:
        _emit(oa.exp_to_poly(E, args.expand).to_json() + "\n", args.out)
    else:
        _emit(json.dumps(_exp_dict(E)) + "\n", args.out)
    if args.verify:
        if max(args.n, args.m) >= args.D - args.margin:
            print("error: projector indices must lie inside the interior block", file=sys.stderr)
            return EXIT_USAGE
        cutoff = args.expand if args.expand is not None else None
        M = fo.eval_exp(E, args.D, cutoff)
        dist = fo.matrix_distance(M, fo.basis_projector(args.n, args.m, args.D), args.margin)
        ok = dist < args.tol
        print(f"interior distance to E_{args.n}{args.m} (D={args.D}, margin={args.margin}): {dist:.3e}")
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


def cmd_quasiprob_grid(args) -> int:
    if args.t == -1:
        print("error: --t -1 is a pole of the quasiprobability symbol", file=sys.stderr)
        return EXIT_USAGE
    grid = ps.sample_grid(lambda a: ps.w_projector(args.n, args.m, a, args.t), args.L, args.N)
    text = grid.to_csv() if args.format == "csv" else grid.to_json() + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    tolerances = {}
    for item in args.tol or ():
        name, _, value = item.partition("=")
        try:
            tolerances[name] = float(value)
        except ValueError:
            print(f"error: bad --tol {item!r}, expected name=value", file=sys.stderr)
            return EXIT_USAGE
    cfg = verify.VerifyConfig(
        D=args.D, cutoff=args.cutoff, margin=args.margin, L=args.L, N=args.N, tolerances=tolerances
    )
    print(f"{'suite':<12} {'check':<26} {'max error':>11} {'tol':>8}  result")
    first_failure = None
    for res in verify.run_suite(args.suite, cfg):
        status = "PASS" if res.passed else "FAIL"
        note = f"  ({res.detail})" if res.detail else ""
        print(f"{res.suite:<12} {res.name:<26} {res.max_err:>11.3e} {res.tol:>8.0e}  {status}{note}")
        if not res.passed and first_failure is None:
            first_failure = res.name
    if args.suite in ("phase-space", "all") and (args.t is not None or args.beta is not None):
        t = 0.0 if args.t is None else args.t
        beta = 0j if args.beta is None else args.beta
        if not -1 < t < 1:
            print("error: --t must lie in (-1, 1) for the integration formula", file=sys.stderr)
            return EXIT_USAGE
        grid = ps.QuadratureGrid(args.L, args.N)
        print(f"integration formula at t={t:g}, beta={format_complex(beta)}")
        print(f"{'n':>2} {'m':>2}  {'lhs':<40} {'rhs':<40} {'abs err':>10}")
        for n in range(4):
            for m in range(4):
                chk = ps.verify_integration_formula(n, m, beta, t, grid)
                print(
                    f"{n:>2} {m:>2}  {format_complex(chk.lhs):<40} {format_complex(chk.rhs):<40}"
                    f" {chk.abs_err:>10.3e}"
                )
    if first_failure:
        print(f"FAILED: {first_failure}")
        return EXIT_FAIL
    print("all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sorder", description="s-ordered boson operators, Fock projectors and their symbols."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-hermite", help="evaluate h_{m,n}(x, y | tau)")
    p.add_argument("--m", type=nonneg_int, required=True)
    p.add_argument("--n", type=nonneg_int, required=True)
    p.add_argument("--x", type=parse_complex, default=0j)
    p.add_argument("--y", type=parse_complex, default=0j)
    p.add_argument("--tau", type=parse_complex, default=0j)
    p.add_argument("--check-laguerre", action="store_true", help="cross-check a diagonal value via L_n")
    p.set_defaults(func=cmd_eval_hermite)

    p = sub.add_parser("convert-order", help="re-express a JSON OrderedPoly at order t")
    p.add_argument("--input", default="-", help="JSON file, '-' for stdin")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_convert_order)

    p = sub.add_parser("projector", help="t-ordered form of |n><m|")
    p.add_argument("--n", type=nonneg_int, required=True)
    p.add_argument("--m", type=nonneg_int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--expand", type=nonneg_int, metavar="CUTOFF", help="emit the expanded OrderedPoly")
    p.add_argument("--laguerre-form", action="store_true")
    p.add_argument("--verify", action="store_true", help="oracle distance to E_nm")
    p.add_argument("--D", type=int, default=30)
    p.add_argument("--margin", type=nonneg_int, default=fo.DEFAULT_MARGIN)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_projector)

    p = sub.add_parser("quasiprob-grid", help="sample W_{|n><m|}(alpha, -t) on a grid")
    p.add_argument("--n", type=nonneg_int, required=True)
    p.add_argument("--m", type=nonneg_int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--L", type=float, default=ps.DEFAULT_L)
    p.add_argument("--N", type=int, default=ps.DEFAULT_N)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_quasiprob_grid)

    p = sub.add_parser("verify", help="run oracle verification suites")
    p.add_argument("--suite", choices=(*verify.SUITES, "all"), default="all")
    p.add_argument("--t", type=float)
    p.add_argument("--beta", type=parse_complex)
    p.add_argument("--D", type=int, default=30)
    p.add_argument("--cutoff", type=nonneg_int, default=40)
    p.add_argument("--margin", type=nonneg_int, default=fo.DEFAULT_MARGIN)
    p.add_argument("--L", type=float, default=ps.DEFAULT_L)
    p.add_argument("--N", type=int, default=ps.DEFAULT_N)
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a check tolerance")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, IndexError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
