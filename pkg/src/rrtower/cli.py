"""Command-line interface: ``rrtower <command> ...``.

Exit status is 0 on success, 2 on usage errors and 1 on computation errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cache
from .codes import generator_matrix, min_distance_bruteforce
from .field import FieldError, make_field_ctx
from .funcrep import Monomial, TowerFunction, expand_at_infinity, expand_at_pminus1
from .ladder import basis_index, dim
from .semigroup import semigroup_from_ladder
from .tower import genus

MAX_LEVEL = 10


class UsageError(Exception):
    pass


def _prime(p: int) -> int:
    try:
        make_field_ctx(p)
    except FieldError as exc:
        raise UsageError(str(exc)) from None
    return p


def _level(j: int, bound: int = MAX_LEVEL) -> int:
    if j < 0:
        raise UsageError("--level must be >= 0")
    if j > bound:
        raise UsageError(f"--level {j} exceeds the bound {bound}")
    return j


def _series_json(s) -> dict:
    return {"val": s.val, "prec": s.prec, "coeffs": [str(c) for c in s.coeffs()]}


def cmd_genus(args) -> str:
    j = args.level
    if j < 0:
        raise UsageError("--level must be >= 0")
    g = genus(j)
    if args.format == "json":
        return json.dumps({"j": j, "genus": g})
    return str(g)


def cmd_semigroup(args) -> str:
    j = _level(args.level)
    p = _prime(args.prime)
    ladder = cache.load_or_build(p, j, cache.cache_dir(args.cache), symbolic=False)
    sg = semigroup_from_ladder(ladder)
    if args.format == "json":
        return json.dumps(sg.to_json())
    return sg.text()


def cmd_ladder(args) -> str:
    j = _level(args.level)
    p = _prime(args.prime)
    ladder = cache.load_or_build(p, j, cache.cache_dir(args.cache))
    if args.format == "json":
        return cache.dumps(ladder)
    lines = [f"# p={p} j={j} genus={genus(j)}", "# m c pole_order w"]
    for m, (c, w) in enumerate(zip(ladder.c, ladder.w)):
        lines.append(f"{m} {c} {2**j * c + m} {w}")
    return "\n".join(lines)


def _basis_strings(ladder, s):
    out = []
    for m, l in basis_index(ladder, s):
        f = ladder.w[m]
        if l:
            f = f * Monomial.of({0: l})
        out.append((2**ladder.j * (ladder.c[m] + l) + m, m, l, f))
    return out


def cmd_basis(args) -> str:
    j = _level(args.level)
    p = _prime(args.prime)
    ladder = cache.load_or_build(p, j, cache.cache_dir(args.cache))
    items = _basis_strings(ladder, args.s)
    if args.format == "json":
        return json.dumps(
            {
                "p": p,
                "j": j,
                "s": args.s,
                "dim": dim(ladder, args.s),
                "basis": [{"pole": po, "m": m, "l": l, "f": f.to_json()} for po, m, l, f in items],
            },
            sort_keys=True,
        )
    lines = [f"# dim L({args.s} P_inf^{j}) = {len(items)}"]
    lines += [f"{po}\t{f}" for po, m, l, f in items]
    return "\n".join(lines)


def cmd_code(args) -> str:
    j = _level(args.level, 6)
    p = _prime(args.prime)
    if args.s < 0:
        raise UsageError("--s must be >= 0")
    M = generator_matrix(j, args.s, p)
    if args.matrix_out:
        path = Path(args.matrix_out)
        if args.format == "csv" or path.suffix == ".csv":
            path.write_text(M.to_csv())
        else:
            path.write_text(json.dumps(M.to_json(), sort_keys=True))
    info = {"n": M.n, "k": M.rank(), "designed_d": M.designed_distance()}
    if args.distance:
        info["d"] = min_distance_bruteforce(M)
    if args.format == "json":
        out = M.to_json()
        out.update(info)
        return json.dumps(out, sort_keys=True)
    if args.format == "csv":
        return M.to_csv().rstrip("\n")
    return " ".join(f"{k}={v}" for k, v in info.items())


def cmd_expand(args) -> str:
    j = _level(args.level)
    p = _prime(args.prime)
    if not 0 <= args.gen <= j:
        raise UsageError("--gen must lie in 0..level")
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    ctx = make_field_ctx(p)
    f = TowerFunction.monomial(ctx, j, Monomial.of({args.gen: 1}))
    if args.at == "pminus1":
        if j < 1:
            raise UsageError("expansion at P_-1 in t = 1 - x0 needs --level >= 1")
        s = expand_at_pminus1(f, args.order)
    else:
        s = expand_at_infinity(f, args.order)
    if args.format == "json":
        return json.dumps(_series_json(s))
    return str(s)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rrtower",
        description="Riemann-Roch bases and Weierstrass semigroups on the tower x_{j+1}^2 = (x_j^2+1)/(2x_j).",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, prime=True, fmt=("text", "json")):
        sp.add_argument("--level", type=int, required=True, help="tower level j")
        if prime:
            sp.add_argument("--prime", type=int, default=3, help="odd prime p (field F_{p^2})")
        sp.add_argument("--format", choices=fmt, default=fmt[0])

    sp = sub.add_parser("genus", help="genus of T_j")
    common(sp, prime=False)
    sp.set_defaults(func=cmd_genus)

    sp = sub.add_parser("semigroup", help="Weierstrass semigroup H(P_inf^j)")
    common(sp)
    sp.add_argument("--cache", default=None, help="ladder cache directory")
    sp.set_defaults(func=cmd_semigroup)

    sp = sub.add_parser("ladder", help="c-table and functions w_m")
    common(sp)
    sp.add_argument("--cache", default=None, help="ladder cache directory")
    sp.set_defaults(func=cmd_ladder)

    sp = sub.add_parser("basis", help="Hermitian basis of L(s P_inf^j)")
    common(sp)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--cache", default=None, help="ladder cache directory")
    sp.set_defaults(func=cmd_basis)

    sp = sub.add_parser("code", help="generator matrix of C_L(s P_inf^j, D^j)")
    common(sp, fmt=("text", "json", "csv"))
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--matrix-out", default=None, help="write the matrix to this file")
    sp.add_argument("--distance", action="store_true", help="brute-force the minimum distance")
    sp.set_defaults(func=cmd_code)

    sp = sub.add_parser("expand", help="series expansion of a generator x_K")
    common(sp)
    sp.add_argument("--gen", type=int, required=True)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--at", choices=("pminus1", "infinity"), required=True)
    sp.set_defaults(func=cmd_expand)
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.func(args)
    except UsageError as exc:
        print(f"rrtower {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # computation failure
        print(f"rrtower {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
