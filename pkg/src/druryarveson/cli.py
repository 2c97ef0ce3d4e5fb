"""Command-line driver.

Exit codes: 0 success, 1 a verdict failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import drury, hankel, kernelcalc, opmodel, staircase
from .grammar import GrammarError, format_poly, format_set, parse_poly, parse_set
from .multiindex import DegreeBox, compositions
from .opmodel import Polynomial, TruncatedBasis

CSV_COLUMNS = [
    "config_id", "seed", "d", "set", "poly", "r", "norm_QA", "norm_QBX_final",
    "mult_lower_final", "verdict1", "verdict2", "converged",
]


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def parse_point(text: str) -> list[complex]:
    try:
        return [complex(c.strip().replace("i", "j")) for c in text.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse point {text!r}; use e.g. 0.3,0.4 or 0.1+0.2i,0.3") from None


def _emit(args, payload: dict, summary: str):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
        print(summary)
    else:
        print(text)


def _cplx(c: complex):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


def cmd_set_check(args) -> int:
    if args.gens is not None:
        X = parse_set(f"gens: {args.gens}", args.d)
    elif args.set is not None:
        X = parse_set(args.set, args.d)
    else:
        raise ConfigError("set check needs --gens or --set")
    grid = tuple(max((g[j] for g in X.generators), default=0) + 1 for j in range(X.d))
    members = [n for n in np.ndindex(*grid) if X.member(n)]
    payload = {
        "set": format_set(X),
        "d": X.d,
        "monotone": staircase.is_lower_set(staircase.ExplicitSet(X.d, frozenset(members), grid)),
        "bounded": X.is_bounded(),
        "shape_condition": staircase.shape_condition(X, grid),
    }
    if X.is_bounded():
        payload["maximal_elements"] = [list(m) for m in staircase.maximal_elements(X)]
    _emit(args, payload, f"set {payload['set']}: bounded={payload['bounded']}")
    return 0


def cmd_kernel_eval(args) -> int:
    z, w = parse_point(args.z), parse_point(args.w)
    p = kernelcalc.KernelPoint(z, w)
    X = parse_set(args.set, p.d)
    res = kernelcalc.projected_kernel_series(X, p, args.tol)
    payload = {
        "set": format_set(X),
        "value": _cplx(res.value),
        "tail_bound": res.tail_bound,
        "degree": res.degree,
        "variant": "series",
        "mismatch": None,
    }
    _emit(args, payload, f"k^X = {res.value} (tail <= {res.tail_bound:.3g})")
    return 0


def cmd_kernel_compare(args) -> int:
    z, w = parse_point(args.z), parse_point(args.w)
    d = args.d if args.d is not None else len(z)
    if len(z) != d or len(w) != d:
        raise ConfigError(f"points must have dimension {d}")
    if not 1 <= args.slab_axis <= d:
        raise ConfigError(f"--slab-axis must lie in 1..{d}")
    p = kernelcalc.KernelPoint(z, w)
    X = staircase.StaircaseSet.slab(d, args.slab_axis - 1, args.N)
    series = kernelcalc.projected_kernel_series(X, p, args.tol)
    forms = {v: kernelcalc.slab_kernel(args.slab_axis - 1, args.N, p, v)
             for v in kernelcalc.SLAB_VARIANTS}
    allowed = series.tail_bound + args.tol
    mismatch = {v: abs(val - series.value) for v, val in forms.items()}
    selected = next((v for v in kernelcalc.SLAB_VARIANTS if mismatch[v] <= allowed), None)
    payload = {
        "series": _cplx(series.value),
        "tail_bound": series.tail_bound,
        "corrected": _cplx(forms["corrected"]),
        "as_printed": _cplx(forms["as-printed"]),
        "mismatch": mismatch,
        "selected": selected,
    }
    _emit(args, payload, f"selected variant: {selected}")
    return 0 if selected is not None else 1


def cmd_op_norm(args) -> int:
    Q = parse_poly(args.poly, args.d)
    X = parse_set(args.set, Q.d)
    box = DegreeBox(Q.d, args.box_degree)
    if args.target == "hankel":
        if len(Q.coeffs) != 1:
            raise ConfigError("--target hankel needs a single monomial symbol")
        (m, c), = Q.coeffs.items()
        mat = c * hankel.complete_hankel_matrix(m, box)
        size = len(box)
    else:
        basis = TruncatedBasis(X, box)
        tup = opmodel.backshift_tuple(basis) if args.target == "backshift" else opmodel.mult_tuple(basis)
        mat = opmodel.poly_apply(Q, tup)
        size = len(basis)
    norm = opmodel.op_norm(mat)
    payload = {"norm": norm, "box": args.box_degree, "basis_size": size, "target": args.target,
               "set": format_set(X), "poly": format_poly(Q)}
    _emit(args, payload, f"norm = {norm!r}")
    return 0


def cmd_hankel_decompose(args) -> int:
    X = parse_set(args.set, args.d)
    box = DegreeBox(X.d, args.box_degree)
    payload = hankel.decompose(X, box)
    payload.update(set=format_set(X), box=args.box_degree)
    _emit(args, payload, f"{len(payload['symbols'])} symbols, verified={payload['verified']}")
    return 0 if payload["verified"] else 1


def random_polynomial(rng: np.random.Generator, d: int, degree: int) -> Polynomial:
    """Gaussian complex coefficients on every monomial of degree <= ``degree``, 3 decimals."""
    coeffs = {}
    for k in range(degree + 1):
        for n in compositions(k, d):
            re_, im_ = np.round(rng.standard_normal(2), 3)
            coeffs[n] = complex(float(re_), float(im_))
    return Polynomial(d, coeffs)


def _polys_for(cfg: dict, d: int, rng: np.random.Generator) -> list[Polynomial]:
    spec = str(cfg.get("poly", "1"))
    if spec.startswith("random:"):
        opts = dict(kv.split("=") for kv in spec[len("random:"):].split(","))
        degree, count = int(opts.get("degree", 2)), int(opts.get("count", 1))
        return [random_polynomial(rng, d, degree) for _ in range(count)]
    return [parse_poly(spec, d)]


def load_configs(path: str) -> list[dict]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if isinstance(data, dict):
        data = data.get("configs", [data] if "d" in data else [])
    if not isinstance(data, list) or not data:
        raise ConfigError("config file holds no experiment configurations")
    return data


def run_config(config_id: int, cfg: dict, seed: int) -> list[dict]:
    """Run one configuration; one row per polynomial."""
    try:
        d = int(cfg["d"])
        X = parse_set(str(cfg.get("set", "full")), d)
        r = float(cfg.get("r", 0.9))
        construction = cfg.get("construction", "backshift")
        schedule = [int(D) for D in cfg.get("box_schedule", [4, 6, 8])]
        tols = cfg.get("tolerances", {})
        slack = float(tols.get("verdict", opmodel.NORM_SLACK))
        conv = float(tols.get("convergence", 1e-6))
        if not schedule:
            raise ConfigError("empty box_schedule")
        if slack <= 0 or conv <= 0:
            raise ConfigError("tolerances must be positive")
        ss = np.random.SeedSequence([seed, config_id])
        tuple_seed, poly_seed = ss.spawn(2)
        if construction == "backshift":
            D_A = int(cfg.get("tuple_box_degree", max(schedule)))
            T = drury.make_scaled_backshift_tuple(X, DegreeBox(d, D_A), r)
        elif construction == "diag":
            T = drury.make_random_commuting_tuple(tuple_seed, int(cfg.get("dim", 4)), d, r)
        else:
            raise ConfigError(f"unknown construction {construction!r}")
        polys = _polys_for(cfg, d, np.random.default_rng(poly_seed))
        rows = []
        for Q in polys:
            rep = drury.verify_inequality(Q, T, X, schedule, slack, conv)
            rows.append({
                "config_id": config_id, "seed": seed, "d": d, "set": format_set(X),
                "poly": format_poly(Q), "r": repr(r), "norm_QA": repr(rep.norm_QA),
                "norm_QBX_final": repr(rep.qbx[-1]), "mult_lower_final": repr(rep.mult_lower[-1]),
                "verdict1": "pass" if rep.verdict1 else "fail", "verdict2": rep.verdict2,
                "converged": str(rep.converged).lower(),
            })
        return rows
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise ConfigError(f"config {config_id}: {exc}") from None
        raise ConfigError(f"config {config_id}: {exc!r}") from None


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_drury_verify(args) -> int:
    configs = load_configs(args.config)
    if args.tol is not None:
        for cfg in configs:
            cfg.setdefault("tolerances", {})["verdict"] = args.tol
    rows = []
    for i, cfg in enumerate(configs):
        rows.extend(run_config(i, cfg, args.seed))
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    failed = [row for row in rows if row["verdict1"] == "fail" or row["verdict2"] == "fail"]
    inconclusive = sum(row["verdict2"] == "inconclusive" for row in rows)
    print(f"{len(rows)} checks, {len(failed)} failed, {inconclusive} inconclusive",
          file=sys.stdout if args.out else sys.stderr)
    for row in failed:
        print(f"  config {row['config_id']} failed: poly={row['poly']}", file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="druryarveson", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(group: str, name: str, func, help_: str):
        if group not in sub.groups:
            sub.groups[group] = groups.add_parser(group).add_subparsers(
                dest="command", required=True, parser_class=_Parser)
        p = sub.groups[group].add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write machine-readable output here")
        return p
    sub.groups = {}

    p = sub("set", "check", cmd_set_check, "properties of a staircase set")
    p.add_argument("--gens", help='complement generators, e.g. "2,0;0,3"')
    p.add_argument("--set", help="set grammar")
    p.add_argument("--d", type=int)

    p = sub("kernel", "eval", cmd_kernel_eval, "evaluate k^X(w, z) by certified series")
    p.add_argument("--set", default="full")
    p.add_argument("--z", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub("kernel", "compare", cmd_kernel_compare, "slab closed forms against the series")
    p.add_argument("--slab-axis", type=int, default=1)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--z", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub("op", "norm", cmd_op_norm, "norm of Q applied to a compressed tuple")
    p.add_argument("--set", default="full")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--box-degree", type=int, required=True)
    p.add_argument("--target", choices=["backshift", "mult", "hankel"], default="backshift")

    p = sub("hankel", "decompose", cmd_hankel_decompose, "rectangle cover and Hankel kernels")
    p.add_argument("--set", required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--box-degree", type=int, required=True)

    p = sub("drury", "verify", cmd_drury_verify, "run the inequality harness over a config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, help="override the verdict slack for every config")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "tol", None) is not None and args.tol <= 0:
            raise ConfigError("--tol must be positive")
        return args.func(args)
    except (ConfigError, GrammarError, kernelcalc.ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
