"""Command-line entry point.

Subcommands: potential (pointwise kernel evaluation, CSV), kernel (grid
decomposition report, JSON), lil (Monte Carlo exceedance table, CSV), rebirth
(chain simulation and the isomorphism check), verify (the acceptance
battery).  Every stochastic command takes a seed and writes byte-identical
output for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bases import (ExpDecayBase, HitZeroLevyBase, LevyBase, PQBase,
                    ScaleMinBase, StableHitZeroBase, VBetaBase, VPQBase)
from .diffusion import PQPotential, ScalePotential
from .excessive import excessive_from_spec
from .expressions import expr_from_spec
from .exponents import exponent_from_spec
from .kernel_algebra import GridSpec, assemble_kernel, decompose, rowsum_residuals
from .potentials import LevyPotential
from .rebirth import PartialRebirthModel, chain_from_spec, ek_identity_check
from .sampling import lil_harness
from .verify import SUITES, run_suite

__all__ = ["main", "base_from_spec"]


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def base_from_spec(spec: dict):
    """Kernel-family dispatcher for the JSON wire format."""
    if "family" not in spec:
        raise ValueError("base spec needs a 'family' field")
    family = spec["family"]
    body = {k: v for k, v in spec.items() if k != "family"}
    if family == "levy":
        pot = LevyPotential(exponent_from_spec(body.pop("psi")),
                            beta=float(body.pop("beta")))
        _reject_extra(body, family)
        return LevyBase(pot)
    if family == "levy_hit_zero":
        pot = LevyPotential(exponent_from_spec(body.pop("psi")), beta=0.0)
        _reject_extra(body, family)
        return HitZeroLevyBase(pot)
    if family == "levy_v":
        pot = LevyPotential(exponent_from_spec(body.pop("psi")),
                            beta=float(body.pop("beta")))
        _reject_extra(body, family)
        return VBetaBase(pot)
    if family == "stable_hit_zero":
        rho = float(body.pop("rho"))
        _reject_extra(body, family)
        return StableHitZeroBase(rho)
    if family == "exp_decay":
        beta = float(body.pop("beta", 0.5))
        c = float(body.pop("C", 0.5))
        _reject_extra(body, family)
        return ExpDecayBase(beta, c)
    if family in ("pq", "vpq"):
        pot = PQPotential(expr_from_spec(body.pop("p")),
                          expr_from_spec(body.pop("q")),
                          beta=float(body.pop("beta")),
                          interval=tuple(body.pop("interval", (-2.0, 2.0))))
        _reject_extra(body, family)
        return PQBase(pot) if family == "pq" else VPQBase(pot)
    if family == "scale":
        pot = ScalePotential(expr_from_spec(body.pop("s")),
                             hi=float(body.pop("hi", 10.0)))
        _reject_extra(body, family)
        return ScaleMinBase(pot)
    raise ValueError(f"unknown base family {family!r}")


def _reject_extra(body: dict, family: str):
    if body:
        raise ValueError(f"unknown fields for family {family!r}: {sorted(body)}")


def _write_lines(path, lines):
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# -- potential ------------------------------------------------------------

def _cmd_potential_eval(args) -> int:
    rows = ["x,y,value,err_bound"]
    xs = [float(v) for v in args.x]
    ys = [float(v) for v in args.y] if args.y else [None] * len(xs)
    if len(ys) == 1 and len(xs) > 1:
        ys = ys * len(xs)
    if args.family:
        spec = _load_json(args.spec)
        base = base_from_spec({**spec, "family": args.family}
                              if "family" not in spec else spec)
        for x, y in zip(xs, ys):
            yy = x if y is None else y
            rows.append(f"{x!r},{yy!r},{base.kernel(x, yy)!r},0.0")
    else:
        from .quadrature import QuadratureConfig
        cfg = QuadratureConfig()
        if args.tol_scale != 1.0:
            cfg = QuadratureConfig(abs_tol=cfg.abs_tol * args.tol_scale,
                                   rel_tol=cfg.rel_tol * args.tol_scale)
        pot = LevyPotential(exponent_from_spec(_load_json(args.psi)),
                            beta=args.beta, quad=cfg)
        for x, y in zip(xs, ys):
            if args.kind == "u":
                val, err = pot.u_with_error(x)
                y_out = ""
            elif args.kind == "sigma2":
                val, err = pot.sigma2_with_error(x)
                y_out = ""
            elif args.kind == "u0":
                if y is None:
                    raise SystemExit("u0 needs --y")
                val, err, y_out = pot.u0(x, y), 0.0, repr(y)
            else:
                if y is None:
                    raise SystemExit("vbeta needs --y")
                val, err, y_out = pot.v(x, y), 0.0, repr(y)
            rows.append(f"{x!r},{y_out},{val!r},{err!r}")
    _write_lines(args.out, rows)
    return 0


# -- kernel ---------------------------------------------------------------

def _cmd_kernel_analyze(args) -> int:
    base = base_from_spec(_load_json(args.base))
    f = excessive_from_spec(_load_json(args.f), base)
    g = excessive_from_spec(_load_json(args.g), base)
    d, theta, n, q = args.grid.split(",")
    spec = GridSpec(d=float(d), theta=float(theta), n=int(n), q=float(q),
                    direction=args.direction)
    dec = decompose(assemble_kernel(base, f, g, spec))
    report = {
        "nu": dec.nu,
        "rho": dec.rho,
        "rowsums": rowsum_residuals(dec),
        "mmatrix_ok": bool(dec.a_is_m_matrix and dec.a_sym_is_m_matrix),
        "det_ratio": dec.det_ratio_error,
        "cond": dec.kernel.cond,
        "m": spec.m,
    }
    _write_lines(args.out, [json.dumps(report, sort_keys=True)])
    return 0


# -- lil --------------------------------------------------------------------

def _cmd_lil_run(args) -> int:
    cfg = _load_json(args.config)
    known = {"base", "schedule", "grid", "k", "paths", "seed", "f", "g"}
    extra = set(cfg) - known
    if extra:
        raise SystemExit(f"unknown config keys: {sorted(extra)}")
    base = base_from_spec(cfg["base"])
    grid = cfg["grid"]
    specs = [GridSpec(d=float(grid["d"]), theta=float(grid["theta"]), n=int(n),
                      q=float(grid["q"]), direction=int(grid.get("direction", 1)))
             for n in cfg["schedule"]]
    f = excessive_from_spec(cfg["f"], base) if "f" in cfg else None
    g = excessive_from_spec(cfg["g"], base) if "g" in cfg else None
    rows = lil_harness(base, f, g, specs, k=int(cfg.get("k", 1)),
                       n_paths=int(cfg["paths"]), seed=int(cfg["seed"]))
    lines = ["n,m_n,epsilon,freq_lower,freq_upper,nu,paths"]
    for r in rows:
        lines.append(f"{r.n},{r.m},{r.epsilon!r},{r.freq_lower!r},"
                     f"{r.freq_upper!r},{r.nu!r},{r.paths}")
    _write_lines(args.out, lines)
    return 0


# -- rebirth -----------------------------------------------------------------

def _cmd_rebirth_sim(args) -> int:
    chain, mu, _ = chain_from_spec(_load_json(args.model))
    model = PartialRebirthModel(chain, mu)
    res = model.simulate(args.start, args.paths, args.seed)
    ext = model.extension()
    n = chain.n_states
    lines = ["state,mean_local_time,std_error,expected"]
    means = res.local_times.mean(axis=0)
    ses = res.local_times.std(axis=0, ddof=1) / np.sqrt(args.paths)
    labels = [str(i) for i in range(n)] + ["return_point"]
    for lab, mean, se, want in zip(labels, means, ses, ext.u_ext[args.start]):
        lines.append(f"{lab},{float(mean)!r},{float(se)!r},{float(want)!r}")
    _write_lines(args.out, lines)
    return 0


def _cmd_rebirth_check_ek(args) -> int:
    chain, _, _ = chain_from_spec(_load_json(args.model))
    s = args.s

    def f(x):
        return np.exp(-s * np.sum(x, axis=1))

    rep = ek_identity_check(chain, args.y, f, args.paths, args.seed)
    report = {"lhs": rep.lhs, "rhs": rep.rhs, "z": rep.z,
              "lhs_se": rep.lhs_se, "rhs_se": rep.rhs_se}
    _write_lines(args.out, [json.dumps(report, sort_keys=True)])
    return 0 if abs(rep.z) <= 4.0 else 1


# -- verify ------------------------------------------------------------------

def _cmd_verify(args) -> int:
    results = run_suite(args.suite)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permlab",
        description="kernel, potential, and local-time laboratory")
    parser.add_argument("--threads", type=int, default=1,
                        help="reserved; computation is single-threaded")
    parser.add_argument("--tol-scale", type=float, default=1.0,
                        help="multiply evaluation tolerances for exploratory "
                             "runs; the verify battery ignores it")
    sub = parser.add_subparsers(dest="command", required=True)

    p_pot = sub.add_parser("potential", help="evaluate potential kernels")
    pot_sub = p_pot.add_subparsers(dest="subcommand", required=True)
    p_eval = pot_sub.add_parser("eval")
    p_eval.add_argument("--psi", help="exponent spec JSON path")
    p_eval.add_argument("--beta", type=float, default=0.0)
    p_eval.add_argument("--kind", choices=["u", "sigma2", "u0", "vbeta"],
                        default="u")
    p_eval.add_argument("--family",
                        choices=["pq", "vpq", "scale", "exp_decay",
                                 "stable_hit_zero"],
                        help="closed-form family instead of --psi")
    p_eval.add_argument("--spec", help="family spec JSON path")
    p_eval.add_argument("--x", nargs="+", required=True)
    p_eval.add_argument("--y", nargs="*")
    p_eval.add_argument("--out", default="-")
    p_eval.set_defaults(func=_cmd_potential_eval)

    p_ker = sub.add_parser("kernel", help="grid kernel decomposition")
    ker_sub = p_ker.add_subparsers(dest="subcommand", required=True)
    p_an = ker_sub.add_parser("analyze")
    p_an.add_argument("--base", required=True)
    p_an.add_argument("--f", required=True)
    p_an.add_argument("--g", required=True)
    p_an.add_argument("--grid", required=True, metavar="d,theta,n,q")
    p_an.add_argument("--direction", type=int, default=1, choices=[1, -1])
    p_an.add_argument("--emit", choices=["json"], default="json")
    p_an.add_argument("--out", default="-")
    p_an.set_defaults(func=_cmd_kernel_analyze)

    p_lil = sub.add_parser("lil", help="iterated-logarithm Monte Carlo")
    lil_sub = p_lil.add_subparsers(dest="subcommand", required=True)
    p_run = lil_sub.add_parser("run")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default="-")
    p_run.set_defaults(func=_cmd_lil_run)

    p_reb = sub.add_parser("rebirth", help="chain simulation and checks")
    reb_sub = p_reb.add_subparsers(dest="subcommand", required=True)
    p_sim = reb_sub.add_parser("sim")
    p_sim.add_argument("--model", required=True)
    p_sim.add_argument("--paths", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--start", type=int, default=0)
    p_sim.add_argument("--out", default="-")
    p_sim.set_defaults(func=_cmd_rebirth_sim)
    p_ek = reb_sub.add_parser("check-ek")
    p_ek.add_argument("--model", required=True)
    p_ek.add_argument("--y", type=int, default=0)
    p_ek.add_argument("--s", type=float, default=0.5)
    p_ek.add_argument("--paths", type=int, required=True)
    p_ek.add_argument("--seed", type=int, required=True)
    p_ek.add_argument("--out", default="-")
    p_ek.set_defaults(func=_cmd_rebirth_check_ek)

    p_ver = sub.add_parser("verify", help="run the acceptance battery")
    p_ver.add_argument("--suite", choices=sorted(SUITES), default="full")
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        parser.exit(2, f"error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
