"""Experiment harness and command line entry point.

Subcommands: descend, lastfall, solve-linearized, verify (thm11 | thm26 |
solver | example) and gen.  Campaign rows are recomputable from (seed,
instance id) alone; CSV outputs therefore contain only deterministic fields,
with wall-clock timings kept to the JSON summaries.
"""

import argparse
import csv
import io
import json
import random
import sys
import time
from dataclasses import dataclass

from . import univar
from .descent import (build_F1, build_Fprime, build_Fprime1, f1_points,
                      fprime1_points, make_descent_context)
from .errors import SearchBudgetExceeded
from .falldeg import PointsOracle, last_fall_degree
from .gf import make_field
from .linsys import (LinearizedPoly, brute_force_solve, enumerate_solutions,
                     full_space, gbar_system, linearized_to_form, reducibility_check,
                     solve_structured, subspace_from_fW, subspace_equal)
from .poly import PolySystem, Ring, monomials_up_to


# -- instance generation --------------------------------------------------------


def gen_random_system(ring, degree, count, rng):
    """Dense uniform systems: every monomial of degree <= `degree` gets a
    uniform coefficient; all-zero polynomials are redrawn."""
    monos = monomials_up_to(ring.nvars, degree)
    out = []
    for _ in range(count):
        while True:
            f = ring.from_terms((e, rng.randrange(ring.coeff_order)) for e in monos)
            if not f.is_zero():
                break
        out.append(f)
    return PolySystem(ring, out)


def gen_random_linearized(field, m, bound, count, rng, exact_top=True):
    """Random linearized polynomials, coefficient rows uniform over k."""
    out = []
    for _ in range(count):
        while True:
            rows = [tuple(rng.randrange(field.order) for _ in range(bound))
                    for _ in range(m)]
            lp = LinearizedPoly(field, rows, bound=bound)
            if lp.is_zero():
                continue
            if exact_top and all(r[bound - 1] == 0 for r in lp.coeffs):
                continue
            break
        out.append(lp)
    return out


def linearized_system_poly(F, field, m):
    ring = Ring(field, "k", [f"X{i}" for i in range(m)])
    return PolySystem(ring, [lp.to_poly(ring) for lp in F])


# -- campaigns -------------------------------------------------------------------


@dataclass
class CampaignResult:
    name: str
    columns: tuple
    rows: list          # list of dicts matching columns (deterministic)
    timings_ms: list
    passed: int
    failed: int
    inconclusive: int

    @property
    def ok(self):
        return self.failed == 0 and self.inconclusive == 0

    def summary(self):
        return {
            "campaign": self.name,
            "passed": self.passed,
            "failed": self.failed,
            "inconclusive": self.inconclusive,
            "total": len(self.rows),
            "wall_ms_total": round(sum(self.timings_ms), 3),
        }


def _tally(rows):
    passed = sum(1 for r in rows if r["status"] == "pass")
    failed = sum(1 for r in rows if r["status"] == "fail")
    inconc = sum(1 for r in rows if r["status"] == "inconclusive")
    return passed, failed, inconc


_THM11_COMBOS = tuple((p, n, m) for p in (2, 3) for n in (2, 3) for m in (1, 2))


def verify_thm_1_1(seed=0, per_combo=25, combos=_THM11_COMBOS, degree_max=3,
                   certifier="points", cap=None):
    """Exact equality of max(fall degree, q*deg) across the descent, on seeded
    random systems.  Rows with an uncertified side are inconclusive."""
    rows = []
    timings = []
    fields = {}
    instance = 0
    for (p, n, m) in combos:
        key = (p, n)
        if key not in fields:
            fields[key] = make_field(p, 1, n)
        field = fields[key]
        ctx = make_descent_context(field, m)
        for j in range(per_combo):
            t0 = time.perf_counter()
            rng = random.Random(f"{seed}:thm11:{p}:{n}:{m}:{j}")
            degree = rng.randint(1, degree_max)
            F = gen_random_system(ctx.ring_original, degree, m, rng)
            dF = int(F.degree)
            F1 = build_F1(F, ctx)
            Fp1 = build_Fprime1(F, ctx)
            if certifier == "points":
                o1 = PointsOracle(F1.ring, f1_points(F, ctx))
                o2 = PointsOracle(Fp1.ring, fprime1_points(F, ctx))
            else:
                o1 = o2 = None
            prof1 = last_fall_degree(F1, cap=cap, oracle=o1)
            prof2 = last_fall_degree(Fp1, cap=cap, oracle=o2)
            qd = field.q * dF
            lhs = max(prof1.last_fall_degree, qd)
            rhs = max(prof2.last_fall_degree, qd)
            if not (prof1.certified and prof2.certified):
                status = "inconclusive"
            else:
                status = "pass" if lhs == rhs else "fail"
            rows.append({
                "instance": instance, "p": p, "e": 1, "n": n, "m": m,
                "deg_F": dF, "d_F1": prof1.last_fall_degree,
                "d_Fprime1": prof2.last_fall_degree, "q_deg_F": qd,
                "lhs": lhs, "rhs": rhs,
                "cert_F1": int(prof1.certified), "cert_Fprime1": int(prof2.certified),
                "status": status,
            })
            timings.append((time.perf_counter() - t0) * 1000)
            instance += 1
    passed, failed, inconc = _tally(rows)
    cols = ("instance", "p", "e", "n", "m", "deg_F", "d_F1", "d_Fprime1",
            "q_deg_F", "lhs", "rhs", "cert_F1", "cert_Fprime1", "status")
    return CampaignResult("thm11", cols, rows, timings, passed, failed, inconc)


_THM26_COMBOS = tuple((n, m, c) for n in (2, 3, 4) for m in (1, 2) for c in (1, 2))


def verify_thm_2_6(seed=0, per_combo=9, combos=_THM26_COMBOS, certifier="points",
                   max_attempts=200):
    """Fall-degree bound for descended linearized systems that pass the
    reducibility test for W = k (q = 2)."""
    rows = []
    timings = []
    instance = 0
    for (n, m, c) in combos:
        field = make_field(2, 1, n)
        space = full_space(field)
        ctx = make_descent_context(field, m)
        accepted = 0
        attempt = 0
        while accepted < per_combo and attempt < max_attempts:
            t0 = time.perf_counter()
            rng = random.Random(f"{seed}:thm26:{n}:{m}:{c}:{attempt}")
            attempt += 1
            npolys = rng.randint(1, m)
            F = gen_random_linearized(field, m, c + 1, npolys, rng)
            try:
                rep = reducibility_check(F, space, m=m, seed=rng.randrange(2**30))
            except SearchBudgetExceeded:
                continue
            if not rep.reducible:
                continue
            accepted += 1
            Fsys = linearized_system_poly(F, field, m)
            dF = int(Fsys.degree)
            Fp1 = build_Fprime1(Fsys, ctx)
            oracle = (PointsOracle(Fp1.ring, fprime1_points(Fsys, ctx))
                      if certifier == "points" else None)
            prof = last_fall_degree(Fp1, oracle=oracle)
            bound = max((field.q - 1) * m + 1, field.q * dF)
            if not prof.certified:
                status = "inconclusive"
            else:
                status = "pass" if prof.last_fall_degree <= bound else "fail"
            rows.append({
                "instance": instance, "p": 2, "e": 1, "n": n, "m": m,
                "npolys": npolys, "deg_F": dF, "reducible": 1,
                "d_Fprime1": prof.last_fall_degree, "bound": bound,
                "cert": int(prof.certified), "status": status,
            })
            timings.append((time.perf_counter() - t0) * 1000)
            instance += 1
    passed, failed, inconc = _tally(rows)
    cols = ("instance", "p", "e", "n", "m", "npolys", "deg_F", "reducible",
            "d_Fprime1", "bound", "cert", "status")
    return CampaignResult("thm26", cols, rows, timings, passed, failed, inconc)


_SOLVER_COMBOS = tuple((n, m) for n in (2, 3, 4) for m in (1, 2))


def verify_solver(seed=0, per_combo=84, combos=_SOLVER_COMBOS, check_fall_bound=True,
                  point_budget=4096):
    """Structured solver vs the stacked-kernel oracle on random (F, W)."""
    rows = []
    timings = []
    instance = 0
    for (n, m) in combos:
        field = make_field(2, 1, n)
        divisors = [d for d in univar.monic_divisors(field.kprime,
                                                     univar.x_pow_n_minus_one(field.kprime, field.n))
                    if univar.degree(d) >= 1]
        spaces = {tuple(d): subspace_from_fW(d, field) for d in divisors}
        for j in range(per_combo):
            t0 = time.perf_counter()
            rng = random.Random(f"{seed}:solver:{n}:{m}:{j}")
            fw = divisors[rng.randrange(len(divisors))]
            space = spaces[tuple(fw)]
            npolys = rng.randint(1, 2)
            F = gen_random_linearized(field, m, field.n, npolys, rng, exact_top=False)
            oracle_sb = brute_force_solve(F, space, m=m)
            row = {
                "instance": instance, "p": 2, "e": 1, "n": n, "m": m,
                "fW": "".join(str(c) for c in fw), "nprime": space.nprime,
                "npolys": npolys, "dim_oracle": oracle_sb.dim,
            }
            try:
                rep = reducibility_check(F, space, m=m, seed=rng.randrange(2**30))
            except SearchBudgetExceeded:
                rep = None
            if rep is not None and rep.reducible:
                sb = solve_structured(F, space, m=m, report=rep)
                equal = subspace_equal(sb, oracle_sb)
                fall_ok = 1
                if check_fall_bound:
                    fall_ok = int(_gbar_fall_bound_holds(F, space, m))
                row.update({
                    "reducible": 1, "dim_structured": sb.dim,
                    "equal": int(equal), "fall_bound_ok": fall_ok,
                })
                row["status"] = "pass" if (equal and fall_ok) else "fail"
            else:
                crosscheck = 1
                if field.q ** (m * space.nprime) <= point_budget:
                    pts = set(enumerate_solutions(F, space, m=m, budget=point_budget))
                    crosscheck = int(_points_match_basis(pts, oracle_sb, space, m))
                row.update({
                    "reducible": 0, "dim_structured": -1,
                    "equal": -1, "fall_bound_ok": crosscheck,
                })
                row["status"] = "pass" if crosscheck else "fail"
            rows.append(row)
            timings.append((time.perf_counter() - t0) * 1000)
            instance += 1
    passed, failed, inconc = _tally(rows)
    cols = ("instance", "p", "e", "n", "m", "fW", "nprime", "npolys",
            "dim_oracle", "reducible", "dim_structured", "equal",
            "fall_bound_ok", "status")
    return CampaignResult("solver", cols, rows, timings, passed, failed, inconc)


def _gbar_fall_bound_holds(F, space, m):
    """d of (input forms + rewriting relations) <= (q-1)m + 1 when certified."""
    field = space.field
    forms = [linearized_to_form(lp, space) for lp in F if not lp.is_zero()]
    system = gbar_system(forms, space, m)
    pts = _gbar_points(F, space, m)
    prof = last_fall_degree(system, oracle=PointsOracle(system.ring, pts))
    if not prof.certified:
        return True  # uncertified rows are not counted against the bound
    return prof.last_fall_degree <= (field.q - 1) * m + 1


def _gbar_points(F, space, m):
    """Zero set of the rewritten system from the oracle's solution basis."""
    field = space.field
    sols = brute_force_solve(F, space, m=m)
    pts = []
    from itertools import product as iproduct

    gens = sols.generators
    for combo in iproduct(range(field.q), repeat=len(gens)):
        point = [0] * m
        for c, gen in zip(combo, gens):
            if c == 0:
                continue
            for i in range(m):
                point[i] = field.add(point[i], field.mul(c, gen[i]))
        flat = []
        for i in range(m):
            for jj in range(space.nprime):
                flat.append(field.frob(point[i], jj))
        pts.append(tuple(flat))
    return pts


def _points_match_basis(points, basis, space, m):
    """The enumerated zero set must be exactly the span of the basis."""
    field = space.field
    from itertools import product as iproduct

    span = set()
    for combo in iproduct(range(field.q), repeat=basis.dim):
        point = [0] * m
        for c, gen in zip(combo, basis.generators):
            if c == 0:
                continue
            for i in range(m):
                point[i] = field.add(point[i], field.mul(c, gen[i]))
        span.add(tuple(point))
    return span == set(points)


def verify_example(seed=0, per_n=10, ns=(3, 5), certifier="points", max_attempts=400):
    """The bivariate shape a x^{q^2} + b x^q + c x + u y^{q^2} + v y^q + w y at
    q = 2: whenever one of the univariate companions is coprime to x^n - 1,
    the descended-plus-field-equations system falls no later than 2q."""
    rows = []
    timings = []
    instance = 0
    q = 2
    for n in ns:
        field = make_field(2, 1, n)
        ctx = make_descent_context(field, 2)
        xn1 = tuple(univar.x_pow_n_minus_one(field.k, n))
        accepted = 0
        attempt = 0
        while accepted < per_n and attempt < max_attempts:
            rng = random.Random(f"{seed}:example:{n}:{attempt}")
            attempt += 1
            a, b, c = (rng.randrange(field.order) for _ in range(3))
            u, v, w = (rng.randrange(field.order) for _ in range(3))
            gcd_x = univar.gcd(field.k, (c, b, a), xn1)
            gcd_y = univar.gcd(field.k, (w, v, u), xn1)
            if gcd_x != (1,) and gcd_y != (1,):
                continue
            accepted += 1
            t0 = time.perf_counter()
            lp = LinearizedPoly(field, [(c, b, a), (w, v, u)], bound=3)
            Fsys = linearized_system_poly([lp], field, 2)
            Fp1 = build_Fprime1(Fsys, ctx)
            oracle = (PointsOracle(Fp1.ring, fprime1_points(Fsys, ctx))
                      if certifier == "points" else None)
            prof = last_fall_degree(Fp1, oracle=oracle)
            if not prof.certified:
                status = "inconclusive"
            else:
                status = "pass" if prof.last_fall_degree <= 2 * q else "fail"
            rows.append({
                "instance": instance, "n": n,
                "gcd_x_trivial": int(gcd_x == (1,)), "gcd_y_trivial": int(gcd_y == (1,)),
                "d_Fprime1": prof.last_fall_degree, "bound": 2 * q,
                "cert": int(prof.certified), "status": status,
            })
            timings.append((time.perf_counter() - t0) * 1000)
            instance += 1
        if accepted < per_n:
            raise RuntimeError(f"could not draw {per_n} admissible instances at n={n}")
    passed, failed, inconc = _tally(rows)
    cols = ("instance", "n", "gcd_x_trivial", "gcd_y_trivial", "d_Fprime1",
            "bound", "cert", "status")
    return CampaignResult("example", cols, rows, timings, passed, failed, inconc)


# -- output ----------------------------------------------------------------------


def campaign_csv(result):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([row[c] for c in result.columns])
    return buf.getvalue()


def campaign_json(result):
    rows = []
    for row, ms in zip(result.rows, result.timings_ms):
        r = dict(row)
        r["wall_ms"] = round(ms, 3)  # non-deterministic; excluded from the CSV
        rows.append(r)
    return json.dumps({"summary": result.summary(), "rows": rows}, indent=2,
                      sort_keys=True)


def write_campaign(result, outdir):
    import os

    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, f"{result.name}.csv")
    json_path = os.path.join(outdir, f"{result.name}.json")
    with open(csv_path, "w") as fh:
        fh.write(campaign_csv(result))
    with open(json_path, "w") as fh:
        fh.write(campaign_json(result))
    return csv_path, json_path


# -- command line ----------------------------------------------------------------


def _load_json_arg(path):
    with open(path) as fh:
        return json.load(fh)


def _field_from_config(cfg):
    return make_field(cfg["p"], cfg.get("e", 1), cfg["n"],
                      m1=cfg.get("m1"), m2=cfg.get("m2"))


def cmd_gen(args):
    cfg = _load_json_arg(args.config) if args.config else {}
    field = _field_from_config(cfg.get("field", {"p": 2, "e": 1, "n": 2}))
    m = cfg.get("m", 1)
    degree = cfg.get("degree", 2)
    count = cfg.get("count", m)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    rng = random.Random(f"{seed}:gen")
    if cfg.get("linearized"):
        F = gen_random_linearized(field, m, cfg.get("bound", field.n), count, rng)
        system = linearized_system_poly(F, field, m)
    else:
        ring = Ring(field, "k", [f"X{i}" for i in range(m)])
        system = gen_random_system(ring, degree, count, rng)
    out = system.to_json_str()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return 0


def cmd_descend(args):
    system = PolySystem.from_json_str(open(args.system).read())
    field = system.ring.field
    basis = json.loads(args.basis) if args.basis else None
    ctx = make_descent_context(field, system.ring.nvars, basis=basis)
    if args.emit == "Fprime":
        out = build_Fprime(system, ctx).descended
    elif args.emit == "Fprime1":
        out = build_Fprime1(system, ctx)
    else:
        out = build_F1(system, ctx)
    text = out.to_json_str()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_lastfall(args):
    system = PolySystem.from_json_str(open(args.system).read())
    prof = last_fall_degree(system, cap=args.cap, certify=args.certify,
                            order=args.order)
    payload = json.dumps(prof.to_json_obj(), indent=2, sort_keys=True)
    if args.out:
        import os

        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "lastfall.json"), "w") as fh:
            fh.write(payload + "\n")
        with open(os.path.join(args.out, "lastfall.csv"), "w") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            for row in prof.csv_rows():
                writer.writerow(row)
    else:
        print(payload)
        writer = csv.writer(sys.stdout, lineterminator="\n")
        for row in prof.csv_rows():
            writer.writerow(row)
    return 0


def cmd_solve_linearized(args):
    cfg = _load_json_arg(args.config)
    field = _field_from_config(cfg["field"])
    m = cfg["m"]
    F = [LinearizedPoly(field, rows) for rows in cfg["coeffs"]]
    space = subspace_from_fW(tuple(cfg["fw"]), field)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    result = {}
    oracle_sb = brute_force_solve(F, space, m=m)
    if args.oracle:
        chosen = oracle_sb
        result["mode"] = "oracle"
    else:
        sb = solve_structured(F, space, m=m, seed=seed)
        chosen = sb
        result["mode"] = "structured"
        result["trace"] = {
            "final_gcd": list(sb.trace.final_gcd),
            "eliminated_stages": list(sb.trace.active_stages),
            "substitutions": {
                str(s): [list(r) for r in lp.coeffs]
                for s, lp in sb.trace.substitutions.items()
            },
        }
        if args.compare:
            result["agrees_with_oracle"] = subspace_equal(sb, oracle_sb)
    result["dim"] = chosen.dim
    result["generators"] = [[field.coords(v) for v in gen] for gen in chosen.generators]
    result["coord_matrix"] = [[int(c) for c in row] for row in chosen.coord_matrix]
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


_CAMPAIGNS = {
    "thm11": verify_thm_1_1,
    "thm26": verify_thm_2_6,
    "solver": verify_solver,
    "example": verify_example,
}


def cmd_verify(args):
    cfg = _load_json_arg(args.config) if args.config else {}
    kwargs = dict(cfg.get(args.campaign, {}))
    if args.seed is not None:
        kwargs["seed"] = args.seed
    result = _CAMPAIGNS[args.campaign](**kwargs)
    if args.out:
        write_campaign(result, args.out)
    if args.format == "json" or not args.out:
        print(json.dumps(result.summary(), indent=2, sort_keys=True))
    else:
        print(campaign_csv(result), end="")
    ok = result.failed == 0 and (result.inconclusive == 0 or args.allow_inconclusive)
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="lastfall")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    parser.add_argument("--config", default=None, help="JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random system file")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("descend", help="emit a descended or chain-extended system")
    p.add_argument("system", help="input system JSON file")
    p.add_argument("--emit", choices=("Fprime", "Fprime1", "F1"), default="Fprime1")
    p.add_argument("--basis", default=None, help="JSON list of basis element codes")
    p.set_defaults(func=cmd_descend)

    p = sub.add_parser("lastfall", help="fall profile of a system")
    p.add_argument("system", help="input system JSON file")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--certify", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--order", choices=("grevlex", "grlex"), default="grevlex")
    p.set_defaults(func=cmd_lastfall)

    p = sub.add_parser("solve-linearized", help="solve a linearized system over W")
    p.add_argument("--oracle", action="store_true", help="force the brute-force path")
    p.add_argument("--compare", action="store_true", help="also run and diff the oracle")
    p.set_defaults(func=cmd_solve_linearized)

    p = sub.add_parser("verify", help="run a verification campaign")
    p.add_argument("campaign", choices=tuple(_CAMPAIGNS))
    p.add_argument("--allow-inconclusive", action="store_true")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
