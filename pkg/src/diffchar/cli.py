"""Command-line front end.

Results go to stdout as compact JSON (or an aligned table with ``--table``),
diagnostics to stderr.  Exit status: 0 on success, 2 on a usage error,
1 when a computation rejects its input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from diffchar import deligne as dl
from diffchar import homology as hm
from diffchar import models as md
from diffchar import secondary as sc
from diffchar import series as sr
from diffchar.errors import PreconditionError
from diffchar.forms import characteristic_form, transgress
from diffchar.scalars import CircleValue, ScalarK


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- formatting --------------------------------------------------------------------


def _scalar_out(x):
    if isinstance(x, CircleValue):
        x = x.rep
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, ScalarK):
        return str(x.as_rational()) if x.is_rational() else str(x)
    return x


def _float_out(x, digits: int) -> str:
    import mpmath

    if isinstance(x, CircleValue):
        x = x.rep
    if isinstance(x, (int, Fraction)):
        x = ScalarK.coerce(x)
    if isinstance(x, ScalarK):
        v = x.evaluate(digits)
    else:
        v = x
    with mpmath.workdps(digits):
        if isinstance(v, mpmath.mpc) and v.imag == 0:
            v = v.real
        return mpmath.nstr(v, digits)


def _emit(obj, args, out):
    if args.table:
        out.write(_table(obj))
    else:
        out.write(json.dumps(obj, separators=(",", ":"), ensure_ascii=False))
        out.write("\n")


def _table(obj) -> str:
    if isinstance(obj, dict):
        rows = [obj]
    elif isinstance(obj, list) and obj and all(isinstance(r, dict) for r in obj):
        rows = obj
    elif isinstance(obj, list):
        return "".join(f"{i}\t{v}\n" for i, v in enumerate(obj))
    else:
        return f"{obj}\n"
    cols = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    cells = [[_cell(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, separators=(",", ":"), ensure_ascii=False)
    return str(v)


def _parse_ints(values) -> list:
    """Accept ``3``, ``1,2,5`` or ranges ``1:10`` (inclusive)."""
    out = []
    for v in values:
        for part in str(v).split(","):
            try:
                if ":" in part:
                    a, b = part.split(":", 1)
                    out.extend(range(int(a), int(b) + 1))
                elif part.strip():
                    out.append(int(part))
            except ValueError:
                raise UsageError(f"expected an integer, a list or a range a:b, got {v!r}") from None
    return out


def _sweep(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


# -- subcommands -------------------------------------------------------------------

_SERIES = {
    "todd": lambda a: sr.todd_series(a.order),
    "todd_genus": lambda a: sr.todd_genus_series(a.order),
    "ahat": lambda a: sr.ahat_factor(a.order),
    "l": lambda a: sr.l_genus_series(a.order),
    "euler": lambda a: sr.euler_series(a.order),
    "rho": lambda a: sr.rho_ch(a.k, a.order),
    "su2_rep": lambda a: sr.su2_rep_ch(a.n, a.order),
    "e": lambda a: sr.e_series(a.group, a.order),
}

_GENERA = {
    "todd": sr.todd_genus_series,
    "l": sr.l_genus_series,
    "signature": sr.l_genus_series,
    "ahat": sr.ahat_factor,
    "euler": sr.euler_series,
}


def cmd_series(args):
    s = _SERIES[args.name](args)
    exact = [str(c) for c in s.coeffs]
    if args.float_digits:
        return [{"k": i, "exact": e, "float": _float_out(c, args.float_digits)} for i, (e, c) in enumerate(zip(exact, s.coeffs))]
    return exact


def cmd_genus(args):
    rows = []
    for n in _parse_ints(args.n):
        value = sr.genus_cpn(_GENERA[args.name](max(n, 0)), n)
        row = {"genus": args.name, "n": n, "value": str(value)}
        if args.float_digits:
            row["float"] = _float_out(value, args.float_digits)
        rows.append(row)
    return rows[0] if len(rows) == 1 else rows


def _model(args) -> md.ModelBundle:
    if not args.model:
        raise UsageError("--model is required")
    return md.catalog(args.model)


def cmd_chern(args):
    m = _model(args)
    if m.curvature is None:
        if args.form_class not in m.characteristic:
            raise PreconditionError(f"model {m.name} only stores {sorted(m.characteristic)}")
        form = m.characteristic[args.form_class]
    else:
        form = characteristic_form(args.form_class)(m.curvature)
    value = md.integrate_fund(form, m)
    out = {"model": m.name, "class": args.form_class, "form": str(form), "integral": _scalar_out(value)}
    if args.float_digits:
        out["float"] = _float_out(value, args.float_digits)
    return out


def cmd_transgress(args):
    m = _model(args)
    if m.connection is None:
        raise PreconditionError(f"model {m.name} has no connection matrix")
    A0 = m.flat_connection if m.flat_connection is not None else md.ConnectionMatrix.trivial(m.base, m.connection.size)
    w = transgress(A0, m.connection, args.form_class)
    value = md.integrate_fund(w, m)
    out = {
        "model": m.name,
        "class": args.form_class,
        "transgression": str(w),
        "d_check": True,
        "integral": _scalar_out(value),
        "value": _scalar_out(CircleValue(value)),
    }
    if args.float_digits:
        out["float"] = _float_out(value, args.float_digits)
    return out


def _cs_lens3(k):
    return k, sc.cs_lens3(k), sc.cs_lens3_refined(k)


def _cs_circle(nkr):
    n, k, r = nkr
    return nkr, sc.cs_unit_circle_bundle(n, k, r)


def _cs_line(pjn):
    p, j, n = pjn
    return pjn, sc.cs_flat_lens_line(p, j, n)


def cmd_cs(args):
    def value_row(v, **params):
        row = dict(params)
        row["value"] = _scalar_out(v)
        if args.float_digits:
            row["float"] = _float_out(v, args.float_digits)
        return row

    if args.case == "lens3":
        ks = _parse_ints(args.k or ["1"])
        res = _sweep(_cs_lens3, ks, args.jobs)
        rows = [value_row(ref if args.refined else v, **({"k": k} if len(ks) > 1 else {})) for k, v, ref in res]
    elif args.case == "circle":
        items = [(n, k, r) for n in _parse_ints(args.n or ["1"]) for k in _parse_ints(args.k or ["1"]) for r in _parse_ints(args.r or ["1"])]
        res = _sweep(_cs_circle, items, args.jobs)
        multi = len(items) > 1
        rows = [value_row(v, **(dict(zip("nkr", p)) if multi else {})) for p, v in res]
    else:
        items = [(p, j, n) for p in _parse_ints(args.p or ["1"]) for j in _parse_ints(args.j or ["1"]) for n in _parse_ints(args.n or ["1"])]
        res = _sweep(_cs_line, items, args.jobs)
        multi = len(items) > 1
        rows = [value_row(v, **(dict(zip("pjn", p)) if multi else {})) for p, v in res]
    return rows[0] if len(rows) == 1 else rows


def cmd_e_invariant(args):
    if args.case:
        vec = sc.e_invariant_vector(args.case)
        return {"case": args.case, "values": [_scalar_out(v) for v in vec], "order": sc.e_order(args.case)}
    const = sc.e_framed_const(args.group)
    out = {"constant": _scalar_out(sr.e_series(args.group, 0)[0]), "order": sc.e_order(args.group)}
    if args.float_digits:
        out["float"] = _float_out(const, args.float_digits)
    if not args.constant:
        out["series"] = [str(c) for c in sr.e_series(args.group, args.order).coeffs]
    return out


def _class_arg(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse class JSON: {exc}") from None
    return dl.from_json(data)


def cmd_deligne(args):
    if args.op == "cup":
        if args.x is None or args.y is None:
            raise UsageError("cup needs --x and --y")
        res = dl.cup(_class_arg(args.x), _class_arg(args.y))
    elif args.op == "fiber":
        if args.x is None:
            raise UsageError("fiber needs --x")
        res = dl.fiber_int_s1(_class_arg(args.x), args.factor)
    elif args.op == "holonomy":
        alpha = dl.FourierFn.from_json(json.loads(args.alpha or "{}"), 1)
        return {"exponent": _scalar_out(dl.holonomy_exponent(alpha)), "c1_hat": _scalar_out(dl.c1_hat(alpha).value)}
    else:
        if args.x is None:
            raise UsageError("curvature needs --x")
        x = _class_arg(args.x)
        return {"R": str(x.R()), "I": x.I()}
    if isinstance(res, dl.DCTop):
        out = {"ev": _scalar_out(res.value)}
        if args.float_digits:
            out["float"] = _float_out(res.value, args.float_digits)
        return out
    if isinstance(res, (int, CircleValue)):
        return {"value": _scalar_out(res)}
    return res.to_json()


def _complex_from_args(args) -> hm.CellComplex:
    if args.complex:
        text = args.complex
        if not text.lstrip().startswith(("[", "{")):
            with open(text) as fh:
                text = fh.read()
        return hm.CellComplex.from_json(json.loads(text))
    name = (args.space or "").lower()
    parts = name.split(":")
    if len(parts) > 1 and not all(x.lstrip("-").isdigit() for x in parts[1:]):
        raise UsageError(f"bad space {name!r}")
    if parts[0] == "rp" and len(parts) == 2:
        return hm.rp(int(parts[1]))
    if parts[0] == "lens" and len(parts) == 3:
        return hm.lens(int(parts[1]), int(parts[2]))
    if parts[0] == "sphere" and len(parts) == 2:
        return hm.sphere(int(parts[1]))
    if parts[0] == "torus" and len(parts) == 2:
        return hm.torus_complex(int(parts[1]))
    if name in hm.STANDARD:
        return hm.STANDARD[name]()
    raise UsageError("give --complex JSON or --space {circle, rp2, rp3, t2, rp:N, lens:N:P, sphere:N, torus:N}")


def cmd_homology(args):
    c = _complex_from_args(args)
    if args.bockstein is not None:
        if args.cochain is None:
            raise UsageError("--bockstein needs --cochain")
        cochain = [Fraction(v) for v in args.cochain.split(",")]
        return {"bockstein": c.bockstein(args.bockstein, cochain).to_json()}
    groups = c.cohomology(args.coeff)
    return [dict(degree=k, **g.to_json()) for k, g in enumerate(groups)]


def cmd_models(args):
    if not args.name:
        return list(md.CATALOG_NAMES)
    return md.catalog(args.name).to_json()


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--order", type=int, default=sr.DEFAULT_ORDER, help="truncation order (default 16)")
    common.add_argument("--json", action="store_true", help="JSON output (the default)")
    common.add_argument("--table", action="store_true", help="aligned table output")
    common.add_argument("--float-digits", type=int, default=0, metavar="D", help="add numeric values (tau -> 2 pi i)")
    common.add_argument("--model", help="model name, e.g. cpn_taut(2)")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers for parameter sweeps")

    p = _Parser(prog="diffchar", description="Exact computations with characteristic classes and differential cohomology.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("series", parents=[common], help="named power series")
    s.add_argument("name", choices=sorted(_SERIES))
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--group", default="S1")
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("genus", parents=[common], help="genus of CP^n")
    s.add_argument("name", choices=sorted(_GENERA))
    s.add_argument("--n", nargs="+", default=["2"])
    s.set_defaults(func=cmd_genus)

    s = sub.add_parser("chern", parents=[common], help="characteristic form of a model and its integral")
    s.add_argument("--class", dest="form_class", default="c1")
    s.set_defaults(func=cmd_chern)

    s = sub.add_parser("transgress", parents=[common], help="transgression from the flat connection of a model")
    s.add_argument("--class", dest="form_class", default="c1")
    s.set_defaults(func=cmd_transgress)

    s = sub.add_parser("cs", parents=[common], help="Chern-Simons invariants")
    s.add_argument("case", choices=["lens3", "circle", "lens-line"])
    s.add_argument("--k", nargs="+")
    s.add_argument("--n", nargs="+")
    s.add_argument("--r", nargs="+")
    s.add_argument("--p", nargs="+")
    s.add_argument("--j", nargs="+")
    s.add_argument("--refined", action="store_true")
    s.set_defaults(func=cmd_cs)

    s = sub.add_parser("e-invariant", parents=[common], help="e-invariant series, constants and orders")
    s.add_argument("--group", default="S1")
    s.add_argument("--case", help="S1, SU2, SO3 or SU2_S4")
    s.add_argument("--constant", action="store_true", help="only the constant term and its order")
    s.set_defaults(func=cmd_e_invariant)

    s = sub.add_parser("deligne", parents=[common], help="differential cohomology of S^1 and T^2")
    s.add_argument("op", choices=["cup", "fiber", "holonomy", "curvature"])
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--factor", type=int, default=2, choices=[1, 2])
    s.add_argument("--alpha")
    s.set_defaults(func=cmd_deligne)

    s = sub.add_parser("homology", parents=[common], help="cellular cohomology and Bockstein")
    s.add_argument("--space")
    s.add_argument("--complex", help="JSON (or a path to JSON) with boundary matrices")
    s.add_argument("--coeff", default="Z")
    s.add_argument("--bockstein", type=int, metavar="K")
    s.add_argument("--cochain", help="comma-separated rationals")
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("models", parents=[common], help="list or export catalog models")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_models)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.order < 0:
            raise UsageError("--order must be >= 0")
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        result = args.func(args)
    except UsageError as exc:
        err.write(f"{exc}\n")
        out.write(json.dumps({"error": str(exc), "kind": "usage"}, separators=(",", ":")) + "\n")
        return 2
    except (PreconditionError, ArithmeticError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        out.write(json.dumps({"error": str(exc), "kind": type(exc).__name__}, separators=(",", ":")) + "\n")
        return 1
    _emit(result, args, out)
    return 0


def main() -> None:
    try:
        code = run()
    except SystemExit as exc:  # --help
        code = exc.code if isinstance(exc.code, int) else 0
    sys.exit(code)


if __name__ == "__main__":
    main()
