"""
Command-line entry point.

    hamext --config run.json --command identities --out report.json

Exit codes: 0 when every check passes, 1 when a numerical verdict fails,
2 for a malformed configuration, 3 for an internal error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dynamics as dyn
from . import extensions as ext
from . import halfline as hl
from .config import (
    ConfigError,
    decode_complex,
    decode_matrix,
    decode_vector,
    encode_complex,
    load_config,
)
from .errors import DimensionError, WeightError
from .quotient import build_space
from .relations import adjoint, contains
from .system import IntegerInterval, Side, symplectic_unit, validate_system

__all__ = ["main", "run", "COMMANDS"]


def _check(name, anchor, ok, **detail):
    return {"name": name, "paper_anchor": anchor, "pass": bool(ok), "detail": detail}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return encode_complex(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def _rng(cfg, stream):
    return np.random.default_rng([cfg.seed, stream])


def _cvec(rng, size):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def _window(cfg, f):
    if cfg.window is not None:
        return cfg.window
    iv = f.interval
    return IntegerInterval(iv.a, min(iv.b, iv.a + 2))


# -- commands ------------------------------------------------------------------
def cmd_check(cfg):
    checks, out = [], []
    for i, f in enumerate(cfg.fields()):
        w = _window(cfg, f)
        rep = validate_system(f, w, cfg.lambdas, cfg.c0 if cfg.c0 is not None else w.a, cfg.tol)
        out.append(rep.to_dict())
        checks.append(_check(f"standing assumptions [{i}]",
                             "invertibility of I-A, I-D and window definiteness",
                             rep.verdict == "pass", a1=rep.a1, definite=rep.definite))
    return out, checks


def cmd_solve(cfg):
    opts = cfg.solve
    side = Side(int(opts.get("side", 1)))
    rng = _rng(cfg, 1)
    checks, out = [], []
    for i, f in enumerate(cfg.fields()):
        iv, n = f.interval, f.n
        t0 = int(opts.get("t0", iv.a))
        y0 = decode_vector(opts["y0"]) if "y0" in opts else _cvec(rng, 2 * n)
        if "g" in opts:
            g = np.array([decode_vector(r) for r in opts["g"]])
        else:
            g = _cvec(rng, (iv.n_points, 2 * n))
        worst_res = worst_voc = 0.0
        for lam in cfg.lambdas:
            y = dyn.solve_forced_ivp(side, f, lam, g, t0, y0, cfg.tol)
            yv = dyn.solve_voc(side, f, lam, g, t0, y0, cfg.tol)
            res, scale = dyn.system_residual(side, f, lam, y, g)
            worst_res = max(worst_res, float(res.max() / scale))
            rel = np.abs(y.values - yv.values).max() / max(1.0, np.abs(y.values).max())
            worst_voc = max(worst_voc, float(rel))
            if cfg.instances == 1:
                out.append({"lambda": lam, "y": y.values})
        checks.append(_check(f"forced recursion residual [{i}]", "inhomogeneous system",
                             worst_res <= cfg.tol.residual, max_scaled_residual=worst_res))
        checks.append(_check(f"variation of constants [{i}]", "variation-of-constants formula",
                             worst_voc <= cfg.tol.voc_rtol, max_relative_gap=worst_voc))
    return out, checks


def cmd_fundamental(cfg):
    checks, out = [], []
    for i, f in enumerate(cfg.fields()):
        c0 = cfg.c0 if cfg.c0 is not None else f.interval.a
        for lam in cfg.lambdas:
            for side in Side:
                Y = dyn.fundamental_matrix(side, f, lam, c0, cfg.tol)
                res, scale = dyn.system_residual(side, f, lam, Y.values)
                ok = np.array_equal(Y(c0), np.eye(2 * f.n)) and res.max() / scale <= cfg.tol.residual
                checks.append(_check(f"fundamental matrix side {side.value} [{i}] λ={lam}",
                                     "fundamental matrix normalised at c0", ok,
                                     scaled_residual=float(res.max() / scale)))
                if cfg.instances == 1:
                    out.append({"lambda": lam, "side": side.value, "c0": c0, "Y": Y.values})
    return out, checks


def cmd_identities(cfg):
    rng = _rng(cfg, 2)
    checks, out = [], []
    worst = {"conservation": 0.0, "wronskian": 0.0, "lagrange": 0.0, "shift": 0.0}
    for f in cfg.fields():
        iv, n = f.interval, f.n
        for lam in cfg.lambdas:
            m, w = dyn.symplectic_defect(f, lam, tol=cfg.tol)
            worst["conservation"] = max(worst["conservation"], m)
            worst["wronskian"] = max(worst["wronskian"], w)
            Y = dyn.fundamental_values(f, Side.ONE, lam, iv.a, cfg.tol)
            RY = dyn.shift(Y)
            for j, t in enumerate(iv.sites):
                M = dyn.shift_matrix(f, Side.ONE, lam, t)
                d = np.abs(M @ Y[j] - RY[j]).max() / (1 + np.abs(Y[j]).max())
                worst["shift"] = max(worst["shift"], float(d))
        fx = _cvec(rng, (iv.n_points, 2 * n))
        gy = _cvec(rng, (iv.n_points, 2 * n))
        x = dyn.solve_forced_ivp(Side.ONE, f, 0.0, fx, iv.a, _cvec(rng, 2 * n), cfg.tol)
        y = dyn.solve_forced_ivp(Side.TWO, f, 0.0, gy, iv.b + 1, _cvec(rng, 2 * n), cfg.tol)
        rep = dyn.lagrange_report(f, x, fx, y, gy, lams=(), tol=cfg.tol)
        worst["lagrange"] = max(worst["lagrange"], rep.scaled_gap)
    out.append(worst)
    checks.append(_check("symplectic conservation", "Y2*(t, conj λ) J Y1(t, λ) = J",
                         worst["conservation"] <= cfg.tol.residual, max_scaled=worst["conservation"]))
    checks.append(_check("Wronskian constancy", "constancy of y2* J y1",
                         worst["wronskian"] <= cfg.tol.residual, max_scaled=worst["wronskian"]))
    checks.append(_check("shift identity", "R(y) expressed through y(t)",
                         worst["shift"] <= cfg.tol.residual, max_scaled=worst["shift"]))
    checks.append(_check("Lagrange identity", "summed Lagrange identity",
                         worst["lagrange"] <= cfg.tol.residual, max_scaled_gap=worst["lagrange"]))
    return out, checks


def cmd_bvp(cfg):
    opts = cfg.bvp
    side = Side(int(opts.get("side", 1)))
    rng = _rng(cfg, 3)
    checks, out = [], []
    for i, f in enumerate(cfg.fields()):
        iv, n = f.interval, f.n
        w = IntegerInterval(**opts["window"]) if "window" in opts else iv
        alpha = decode_vector(opts["alpha"]) if "alpha" in opts else _cvec(rng, 2 * n)
        beta = decode_vector(opts["beta"]) if "beta" in opts else _cvec(rng, 2 * n)
        g, y = dyn.patch_bvp(side, f, w, alpha, beta, cfg.tol)
        scale = 1 + max(np.abs(alpha).max(), np.abs(beta).max())
        bres = float(max(np.abs(y(w.a) - alpha).max(), np.abs(y(w.b + 1) - beta).max()) / scale)
        res, sc = dyn.system_residual(side, f.restrict(w), 0.0, y, g)
        sres = float(res.max() / sc)
        checks.append(_check(f"patch boundary values [{i}]", "two-point patch problem",
                             bres <= cfg.tol.boundary, scaled=bres))
        checks.append(_check(f"patch system residual [{i}]", "two-point patch problem",
                             sres <= cfg.tol.residual, scaled=sres))
        if cfg.instances == 1:
            out.append({"g": g.values, "y": y.values})
    return out, checks


def _sets(f, tol):
    space = build_space(f, tol)
    return (ext.build_relation_set(Side.ONE, f, space, tol=tol),
            ext.build_relation_set(Side.TWO, f, space, tol=tol))


def cmd_relations(cfg):
    checks, out = [], []
    for i, f in enumerate(cfg.fields()):
        s1, s2 = _sets(f, cfg.tol)
        d1 = adjoint(s1.H0).equals(s2.H, cfg.tol)
        d2 = adjoint(s2.H0).equals(s1.H, cfg.tol)
        mc = all(s.H0.equals(s.H00, cfg.tol) for s in (s1, s2))
        nest = all(contains(s.H.basis, s.H0.basis, cfg.tol) for s in (s1, s2))
        alt = ext.build_maximal(Side.ONE, f, s1.space, c0=f.interval.b, tol=cfg.tol).equals(s1.H, cfg.tol)
        out.append({"rank": s1.space.rank, "dim_H1": s1.H.dim, "dim_H1_0": s1.H0.dim,
                    "dim_H2": s2.H.dim, "dim_H2_0": s2.H0.dim,
                    "unique_representatives": s1.well_defined and s2.well_defined})
        checks.append(_check(f"duality [{i}]", "adjoint of the minimal relation is the other maximal relation",
                             d1 and d2, side1=d1, side2=d2))
        checks.append(_check(f"minimal characterization [{i}]", "minimal relation as boundary-zero pairs",
                             mc))
        checks.append(_check(f"nesting [{i}]", "minimal inside maximal", nest and alt, c0_independent=alt))
    return out, checks


def _q_family(cfg, n, rng):
    opts = cfg.q
    if "bases" in opts:
        fam = []
        for b in opts["bases"]:
            M = np.array([decode_vector(r) for r in b]) if b else np.zeros((0, 0))
            fam.append(ext.BoundarySubspace(M.T if M.size else np.zeros((2 * n, 0))))
        return fam
    return ext.sample_boundary_subspaces(2 * n, rng, int(opts.get("samples_per_dim", 20)))


def cmd_extensions(cfg):
    rng = _rng(cfg, 4)
    checks, out = [], []
    for i, f in enumerate(cfg.fields()):
        n = f.n
        sets = _sets(f, cfg.tol)
        s1, s2 = sets
        fam = _q_family(cfg, n, rng)
        q_ok, worst, lp_ok = True, 0.0, True
        for Q in fam:
            v = ext.verify_qstar_adjoint(f, Q, sets, cfg.tol)
            q_ok &= v.passed
            worst = max(worst, v.max_angle)
            lp = ext.limit_point_emulation(f, Q, sets, cfg.tol)
            lp_ok &= bool(lp.quasi_self_adjoint) == (Q.dim == n)
        dim_ok = True
        dom = ext.representative_domain(s1, s2)
        for Qc in ext.boundary_family(4 * n, int(cfg.qc.get("samples", 20)), rng):
            T = s1.extension(Qc)
            d = dom(T, "T").shape[1] - dom(s1.H0, "T").shape[1]
            dim_ok &= d == Qc.dim
        out.append({"q_samples": len(fam), "max_angle": worst})
        checks.append(_check(f"Q* law [{i}]", "adjoint of the Q-restricted relation is the Q*-restricted one",
                             q_ok, max_angle=worst))
        checks.append(_check(f"extension dimension [{i}]", "boundary data parametrise extensions", dim_ok))
        checks.append(_check(f"dim Q = n classification [{i}]",
                             "quasi self-adjoint extensions have dim Q = n", lp_ok))
    return out, checks


def cmd_double(cfg):
    rng = _rng(cfg, 5)
    checks, out = [], []
    for i, f in enumerate(cfg.fields()):
        n = f.n
        dbl = ext.build_doubled(f)
        P = dbl.field.P_all
        herm = bool(np.array_equal(P, np.conj(np.swapaxes(P, 1, 2))))
        y1, y2 = _cvec(rng, 2 * n), _cvec(rng, 2 * n)
        x1, x2 = _cvec(rng, 2 * n), _cvec(rng, 2 * n)
        u1, u2 = dbl.unpack_y(dbl.pack_y(y1, y2))
        pack = max(np.abs(u1 - y1).max(), np.abs(u2 - y2).max())
        J, JJ = symplectic_unit(n), symplectic_unit(2 * n)
        lhs = dbl.pack_y(y1, y2).conj() @ JJ @ dbl.pack_y(x1, x2)
        rhs = y2.conj() @ J @ x1 + y1.conj() @ J @ x2
        bil = abs(lhs - rhs)
        sets = _sets(f, cfg.tol)
        fam = ext.boundary_family(4 * n, int(cfg.qc.get("samples", 50)), rng)
        counter, corollary, triv, rule, add = [], True, True, True, 0.0
        for Qc in fam:
            rep = ext.correspondence_check(f, Qc, sets=sets, dbl=dbl, seed=cfg.seed, tol=cfg.tol)
            if not rep.equivalence_holds:
                counter.append({"dim_Qc": Qc.dim, "quasi": rep.quasi_self_adjoint,
                                "bold_self_adjoint": rep.bold_self_adjoint})
            corollary &= rep.corollary["holds"]
            triv &= all(rep.trivial_intersections.values())
            rule &= rep.doubled_adjoint_rule
            add = max(add, rep.norm_additivity, rep.coupled_residual)
        out.append({"family": len(fam), "counterexamples": counter})
        checks.append(_check(f"doubled P Hermitian [{i}]", "doubled coefficient matrix", herm))
        checks.append(_check(f"packing [{i}]", "E1, E2 invertible", pack <= 1e-12, gap=float(pack)))
        checks.append(_check(f"bilinear identity [{i}]", "y* J x = y2* J x1 + y1* J x2",
                             bil <= 1e-12 * (1 + abs(rhs)), gap=float(bil)))
        checks.append(_check(f"solution correspondence [{i}]", "doubled solutions and norm additivity",
                             add <= cfg.tol.residual, worst=add))
        checks.append(_check(f"trivial intersections [{i}]", "H1(0) ∩ N(H2) = {0}", triv))
        checks.append(_check(f"doubled adjoint rule [{i}]", "adjoint of a generated relation", rule))
        checks.append(_check(f"correspondence equivalence [{i}]",
                             "quasi self-adjoint iff doubled relation self-adjoint",
                             not counter, counterexamples=len(counter)))
        checks.append(_check(f"corollary [{i}]", "minimal relation quasi self-adjoint iff doubled minimal self-adjoint",
                             corollary))
    return out, checks


def _generator(cfg):
    opts = cfg.halfline
    kind = opts.get("generator", "free")
    n = cfg.n
    if kind == "free":
        return hl.free_generator(n)
    if kind == "decaying":
        return hl.decaying_weight_generator(n, float(opts.get("base", 4.0)))
    if kind == "constant":
        c = cfg.coefficients
        get = lambda k, d: decode_matrix(c[k]) if k in c else d
        Z, I = np.zeros((n, n)), np.eye(n)
        return hl.constant_generator(get("A", Z), get("B", Z), get("C", Z), get("D", Z),
                                     get("W1", I), get("W2", I))
    raise ConfigError(f"unknown half-line generator {kind!r}")


def cmd_classify(cfg):
    opts = cfg.halfline
    gen = _generator(cfg)
    a = int(opts.get("a", 0))
    horizons = opts.get("horizons", [a + 6, a + 9, a + 12, a + 15])
    lams = [decode_complex(x) for x in opts.get("lambdas", [[0, 1], [0, -1]])]
    scan = hl.halfline_deficiency_scan(gen, cfg.n, horizons, lams, a, cfg.tol)
    crit = hl.limit_point_criterion_check(gen, cfg.n, int(opts.get("criterion_horizon", 60)),
                                          int(opts.get("trials", 27)), a, scan, cfg.seed,
                                          tol=cfg.tol)
    out = [{"scan": scan.to_dict(), "criterion": crit.to_dict()}]
    checks = [_check("scan and criterion agree", "limit point iff boundary form vanishes at infinity",
                     crit.consistent, scan=scan.verdict, criterion=crit.verdict)]
    if "expect" in opts:
        checks.append(_check("expected classification", "deficiency indices 2n in the limit point case",
                             scan.verdict == opts["expect"], verdict=scan.verdict))
    csv_path = cfg.output.get("csv")
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write(scan.to_csv())
    return out, checks


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "fundamental": cmd_fundamental,
    "identities": cmd_identities,
    "bvp": cmd_bvp,
    "relations": cmd_relations,
    "extensions": cmd_extensions,
    "double": cmd_double,
    "classify": cmd_classify,
}


def run(command, cfg):
    """Run ``command`` on a parsed config; returns ``(exit_code, report_dict)``."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {sorted(COMMANDS)}")
    try:
        results, checks = COMMANDS[command](cfg)
    except (DimensionError, WeightError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    ok = all(c["pass"] for c in checks)
    report = {
        "command": command,
        "seed": cfg.seed,
        "n": cfg.n,
        "instances": cfg.instances,
        "results": results,
        "paper_checks": checks,
        "verdict": "pass" if ok else "fail",
    }
    return (0 if ok else 1), _jsonable(report)


def _parser():
    p = argparse.ArgumentParser(prog="hamext", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--command", required=True, choices=sorted(COMMANDS))
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--lambda", dest="lambdas", action="append", metavar="RE,IM",
                   help="spectral parameter (repeatable); replaces the config list")
    p.add_argument("--tol-override", action="append", default=[], metavar="KEY=VAL")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.lambdas:
            try:
                cfg.lambdas = [complex(*map(float, s.split(","))) for s in args.lambdas]
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad --lambda value: {exc}") from exc
        for item in args.tol_override:
            key, sep, val = item.partition("=")
            if not sep:
                raise ConfigError(f"--tol-override expects KEY=VAL, got {item!r}")
            try:
                cfg.tol = cfg.tol.replace(**{key.strip(): float(val)})
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"bad tolerance override {item!r}: {exc}") from exc
        code, report = run(args.command, cfg)
    except ConfigError as exc:
        print(f"hamext: configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - mapped to the internal-error exit code
        print(f"hamext: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
