"""Experiment runner: deterministic desk-scale pipelines over the library,
reporting JSON-lines records (plus CSV pair tables for plotting).

Exit codes: 0 all checks passed, 1 a certificate or check failed (the report
carries a witness record), 2 usage error, 3 a budget was exhausted without a
verdict.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from fractions import Fraction

from . import farey
from .farey import INFINITY, MappingClass, Slope, act
from . import hypgraph
from .hypgraph import FareyOracle
from . import projections
from .projections import TorusAnnuli, estimate_constants
from . import raag
from . import subgroups
from . import bassserre
from .bassserre import FactorSpec, build_ball, free_product_check, phi, qi_certificate
from . import constructions
from .constructions import (FamilySpec, check_displacing, check_misaligned,
                            check_separated, conjugate_twist_family,
                            separation_constants, twist_orbit_family)

SEED_ENV = "RGFLAB_SEED"

PASS, FAIL, USAGE, NO_VERDICT = 0, 1, 2, 3


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else obj.numerator
    if isinstance(obj, Slope):
        return str(obj)
    if isinstance(obj, MappingClass):
        return list(obj.entries())
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(x) for x in obj)
    if isinstance(obj, dict):
        return {str(_jsonable(k)): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    return obj


def emit(records, out_path=None):
    text = "".join(json.dumps(_jsonable(r), sort_keys=True) + "\n" for r in records)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def emit_csv(pairs, out_path=None, header=("d_T", "d_S")):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in sorted(pairs):
        writer.writerow(row)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def family_to_json(family: FamilySpec) -> dict:
    doc = {"factors": [
        {"name": f.name,
         "generators": [list(g.entries()) for g in f.group.generators],
         "boundary": sorted(str(s) for s in f.boundary),
         "budget": f.budget}
        for f in family.factors]}
    if family.betas is not None:
        doc["betas"] = [sorted(str(s) for s in b) for b in family.betas]
    return doc


def family_from_json(doc: dict) -> FamilySpec:
    factors = []
    for fd in doc["factors"]:
        group = subgroups.MatrixGroup.of(*[MappingClass.from_entries(e) for e in fd["generators"]])
        boundary = frozenset(Slope.parse(s) for s in fd["boundary"])
        factors.append(FactorSpec(fd["name"], group, boundary, fd.get("budget", 2)))
    betas = None
    if "betas" in doc:
        betas = [frozenset(Slope.parse(s) for s in b) for b in doc["betas"]]
    return FamilySpec(factors, betas)


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        return int(env)
    raise SystemExit_usage("a seed is required for sampled scans (--seed or $" + SEED_ENV + ")")


class SystemExit_usage(Exception):
    pass


# --- subcommand handlers ----------------------------------------------------


def cmd_farey(args):
    a, b = Slope.parse(args.a), Slope.parse(args.b)
    if args.action == "dist":
        d = farey.farey_distance(a, b)
        bfs, stable = farey.stabilized_bfs_distance(a, b, args.oracle_bound)
        rec = {"record": "farey-dist", "a": str(a), "b": str(b), "distance": d,
               "oracle": {"value": bfs, "stabilized": stable,
                          "bounds": [args.oracle_bound, 2 * args.oracle_bound],
                          "agrees": bfs == d}}
        code = PASS if bfs == d else (FAIL if stable else NO_VERDICT)
        return code, [rec], None
    path = farey.farey_geodesic(a, b)
    rec = {"record": "farey-geodesic", "a": str(a), "b": str(b),
           "length": len(path) - 1, "vertices": [str(v) for v in path],
           "valid": farey.is_geodesic(path)}
    return (PASS if rec["valid"] else FAIL), [rec], None


def cmd_delta_estimate(args):
    seed = _seed(args)
    oracle = FareyOracle()
    rng = random.Random(seed)
    pts = {INFINITY}
    while len(pts) < args.points:
        pts.add(projections.random_slope(rng, args.qmax))
    est = hypgraph.estimate_delta(sorted(pts, key=lambda s: (s.q, s.p)), oracle,
                                  max_quadruples=args.max_quadruples, seed=seed)
    rec = {"record": "delta-estimate", "delta": est.delta, "points": args.points,
           "qmax": args.qmax, "exhaustive": est.exhaustive,
           "quadruples": est.quadruples_scanned, "seed": seed,
           "witness": [str(x) for x in est.witness] if est.witness else None}
    return PASS, [rec], None


def cmd_constants(args):
    seed = _seed(args)
    est = estimate_constants(TorusAnnuli(), seed=seed, n_triples=args.triples,
                             n_geodesics=args.geodesics, qmax=args.qmax)
    rec = {"record": "constants", "M_emp": est.M_emp, "B_emp": est.B_emp,
           "c_emp": est.c_emp, "stable": est.stable, "samples": est.samples,
           "seed": seed}
    return (PASS if est.stable else NO_VERDICT), [rec], None


def cmd_persistence(args):
    seed = _seed(args)
    rng = random.Random(seed)
    torus = TorusAnnuli()
    M = args.M if args.M is not None else 3
    B = args.B if args.B is not None else 2
    strength = M + 3 * B + 2
    base = Slope(0, 1)
    start = constructions.slope_at_distance(base, 3)
    records = []
    failures = 0
    for i in range(args.sequences):
        length = rng.randrange(3, args.max_length + 1)
        seq = projections.twist_pivot_sequence(base, start, strength, length, rng)
        rep = projections.persistence_check(torus, seq, M=M, B=B)
        ok = (not rep.hypothesis_ok) or rep.conclusions_ok
        failures += 0 if ok else 1
        records.append({"record": "persistence", "index": i, "length": length,
                        "hypothesis_ok": rep.hypothesis_ok,
                        "conclusions_ok": rep.conclusions_ok,
                        "failures": rep.failures})
    summary = {"record": "persistence-summary", "sequences": args.sequences,
               "M": M, "B": B, "violations": failures, "seed": seed}
    return (PASS if failures == 0 else FAIL), records + [summary], None


def cmd_raag(args):
    graph = raag.PresentationGraph.of(args.vertices, [tuple(e) for e in json.loads(args.edges)])
    if args.action == "nf":
        w = _parse_word(args.word)
        nf = raag.normal_form(graph, w)
        rec = {"record": "raag-nf", "input": _word_str(w), "normal_form": _word_str(nf)}
        return PASS, [rec], None
    comps = raag.components(graph)
    rec = {"record": "raag-components", "components": [sorted(c) for c in comps]}
    return PASS, [rec], None


def _parse_word(text: str) -> tuple:
    # "x1^2 x2^-1 x3" with 1-based generator names
    out = []
    for tok in text.split():
        if not tok.startswith("x"):
            raise SystemExit_usage(f"bad syllable {tok!r}")
        body = tok[1:]
        if "^" in body:
            g, e = body.split("^")
        else:
            g, e = body, "1"
        out.append((int(g) - 1, int(e)))
    return tuple(out)


def _word_str(w) -> str:
    if not w:
        return "1"
    return " ".join(f"x{g+1}" + (f"^{e}" if e != 1 else "") for g, e in w)


def _load_family(args) -> FamilySpec:
    with open(args.family) as fh:
        return family_from_json(json.load(fh))


def cmd_tree(args):
    family = _load_family(args)
    if args.action == "build":
        ball = build_ball(family.factors, args.radius)
        recs = [{"record": "tree-ball", "radius": args.radius,
                 "type1": len(ball.vertices(1)), "type2": len(ball.vertices(2)),
                 "truncated": len(ball.truncated)}]
        for v in ball.vertices():
            recs.append({"record": "tree-vertex", "kind": v.kind,
                         "syllables": len(v.prefix), "factor": v.factor,
                         "distance": ball.distance[v]})
        return PASS, recs, None
    if args.action == "qi":
        ball = build_ball(family.factors, args.radius)
        images = phi(ball, Slope.parse(args.base_curve))
        rep = qi_certificate(ball, images, kappa=args.kappa)
        rec = {"record": "qi-certificate", "radius": args.radius,
               "pairs": len(rep.pairs), "min_ratio": rep.min_ratio,
               "kappa_witness": rep.kappa_witness,
               "benchmark_half_dT_minus_4": rep.benchmark_ok,
               "kappa_given": rep.kappa_given, "kappa_given_ok": rep.kappa_given_ok,
               "envelope": {str(k): v for k, v in sorted(rep.lower_envelope.items())},
               "fit": rep.fit}
        code = PASS if rep.benchmark_ok and (rep.kappa_given_ok in (None, True)) else FAIL
        return code, [rec], rep.pairs
    rep = free_product_check(family.factors, budget=args.budget)
    rec = {"record": "free-product", "budget": args.budget,
           "identity_convention": "projective",
           "no_relation": rep.no_relation, "words_checked": rep.words_checked,
           "witness": _witness_json(rep.witness)}
    return PASS, [rec], None


def _witness_json(witness):
    if witness is None:
        return None
    return [{"factor": i, "matrix": list(m.entries())} for i, m in witness]


def cmd_cert(args):
    family = _load_family(args)
    if args.action == "separated":
        rep = check_separated(family, args.D)
        rec = {"record": "cert-separated", "D": args.D, "min": rep.minimum,
               "matrix": rep.matrix, "ok": rep.ok}
        return (PASS if rep.ok else FAIL), [rec], None
    if args.action == "misaligned":
        rep = check_misaligned(family, args.A)
        rec = {"record": "cert-misaligned", "A": args.A, "min": rep.minimum,
               "ok": rep.ok, "vacuous": rep.vacuous,
               "table": {f"{i},{j},{k}": v for (i, j, k), v in sorted(rep.table.items())}}
        return (PASS if rep.ok else FAIL), [rec], None
    rep = check_displacing(family, args.L, shell_bound=args.shell_bound)
    rec = {"record": "cert-displacing", "L": args.L,
           "stabilize_ok": rep.stabilize_ok, "separation_ok": rep.separation_ok,
           "min_margin": rep.min_margin, "misses": rep.misses, "ok": rep.ok}
    if rep.misses:
        return NO_VERDICT, [rec], None
    return (PASS if rep.ok else FAIL), [rec], None


def cmd_experiment(args):
    seed = _seed(args)
    if args.kind == "prop91":
        tw = twist_orbit_family(args.dprime, window=args.window, seed=seed,
                                factor_budget=args.factor_budget)
        records = [{"record": "prop91-family", "dprime": tw.dprime, "D": tw.D,
                    "N": tw.N, "center": str(tw.center), "window": tw.window,
                    "constants": tw.constants,
                    "boundaries": [sorted(str(s) for s in f.boundary) for f in tw.family.factors]},
                   {"record": "prop91-separation", "min": tw.separation.minimum,
                    "matrix": tw.separation.matrix, "ok": tw.separation.ok,
                    "window_ok": tw.distance_window_ok},
                   {"record": "prop91-misalignment", "min": tw.misalignment.minimum,
                    "ok": tw.misalignment.ok}]
        ball = build_ball(tw.family.factors, args.radius)
        images = phi(ball, tw.base)
        qi = qi_certificate(ball, images)
        records.append({"record": "qi-certificate", "radius": args.radius,
                        "pairs": len(qi.pairs), "min_ratio": qi.min_ratio,
                        "kappa_witness": qi.kappa_witness,
                        "benchmark_half_dT_minus_4": qi.benchmark_ok})
        records.append({"record": "family-json", "family": family_to_json(tw.family)})
        ok = tw.separation.ok and tw.misalignment.ok and tw.distance_window_ok and qi.benchmark_ok
        return (PASS if ok else FAIL), records, qi.pairs

    if args.kind == "theorem-b":
        est = estimate_constants(TorusAnnuli(), seed=seed, n_triples=args.triples,
                                 n_geodesics=args.geodesics, qmax=args.qmax)
        rng = random.Random(seed + 7)
        curves = [projections.random_slope(rng, 200) for _ in range(args.curve_samples)]
        factor = FactorSpec.twist("H", INFINITY, power=2, budget=3)
        delta = Fraction(args.delta) if args.delta is not None else Fraction(1)
        dd = constructions.definite_distance_scan(factor, curves, est.M_emp)
        gb = constructions.gromov_bound_scan(factor, curves, delta, dd.K_emp)
        A, D = separation_constants(gb.Kp_emp, delta)
        records = [{"record": "theorem-b-constants", "M_emp": est.M_emp,
                    "B_emp": est.B_emp, "c_emp": est.c_emp, "delta": delta,
                    "K_emp": dd.K_emp, "K_closed_form": dd.K_closed_form,
                    "Kp_emp": gb.Kp_emp, "Kp_closed_form": gb.closed_form,
                    "Kp_within_closed_form": gb.within_closed_form,
                    "A": A, "D": D}]
        dprime = int(D) + 8 + (1 if D != int(D) else 0)
        tw = twist_orbit_family(dprime, window=3, seed=seed, M_emp=est.M_emp,
                                factor_budget=args.factor_budget)
        sep_at_D = check_separated(tw.family, int(D))
        mis_at_A = check_misaligned(tw.family, A)
        ball = build_ball(tw.family.factors, args.radius)
        images = phi(ball, tw.base)
        qi = qi_certificate(ball, images)
        fp = free_product_check(tw.family.factors, budget=args.budget)
        rng2 = random.Random(seed + 11)
        words = [bassserre.random_alternating_word(tw.family.factors, rng2)
                 for _ in range(args.words)]
        lox = bassserre.loxodromic_scan(words)
        records += [
            {"record": "theorem-b-family", "dprime": dprime,
             "separated_at_D": sep_at_D.ok, "misaligned_at_A": mis_at_A.ok},
            {"record": "free-product", "budget": args.budget,
             "identity_convention": "projective",
             "no_relation": fp.no_relation, "witness": _witness_json(fp.witness)},
            {"record": "qi-certificate", "radius": args.radius,
             "pairs": len(qi.pairs), "min_ratio": qi.min_ratio,
             "kappa_witness": qi.kappa_witness,
             "benchmark_half_dT_minus_4": qi.benchmark_ok},
            {"record": "loxodromic-scan", "checked": lox.checked,
             "skipped": lox.skipped, "all_loxodromic": lox.all_loxodromic},
        ]
        ok = (sep_at_D.ok and mis_at_A.ok and fp.no_relation and qi.benchmark_ok
              and lox.all_loxodromic)
        return (PASS if ok else FAIL), records, qi.pairs

    cf = conjugate_twist_family(args.D, seed=seed,
                                relation_budget=args.budget,
                                factor_budget=args.factor_budget)
    records = [{"record": "example92-family", "D": cf.D,
                "T": list(cf.T.entries()),
                "boundaries": [sorted(str(s) for s in f.boundary) for f in cf.family.factors]},
               {"record": "example92-separation", "min": cf.separation.minimum,
                "ok": cf.separation.ok},
               {"record": "example92-misalignment", "min": cf.misalignment.minimum,
                "fails_at_2": not cf.misalignment.ok},
               {"record": "example92-relation", "found": cf.relation_found,
                "identity_convention": "projective",
                "witness": _witness_json(cf.relation_witness)},
               {"record": "family-json", "family": family_to_json(cf.family)}]
    ok = cf.separation.ok and (not cf.misalignment.ok) and cf.relation_found
    return (PASS if ok else FAIL), records, None


# --- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON file supplying defaults for the flags")
    shared.add_argument("--output", help="write JSON-lines report here (stdout otherwise)")
    shared.add_argument("--format", choices=("json", "csv"), default="json")
    shared.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV})")
    p = argparse.ArgumentParser(prog="rgflab", description=__doc__, parents=[shared])
    sub = p.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[shared], **kw)

    pf = add_parser("farey", help="exact Farey distances and geodesics")
    pf.add_argument("action", choices=("dist", "geodesic"))
    pf.add_argument("a")
    pf.add_argument("b")
    pf.add_argument("--oracle-bound", type=int, default=64)
    pf.set_defaults(func=cmd_farey)

    pd = add_parser("delta-estimate", help="four-point delta on slope samples")
    pd.add_argument("--points", type=int, default=40)
    pd.add_argument("--qmax", type=int, default=50)
    pd.add_argument("--max-quadruples", type=int, default=200000)
    pd.set_defaults(func=cmd_delta_estimate)

    pc = add_parser("constants", help="empirical projection constants")
    pc.add_argument("action", choices=("estimate",))
    pc.add_argument("--triples", type=int, default=2000)
    pc.add_argument("--geodesics", type=int, default=400)
    pc.add_argument("--qmax", type=int, default=1000)
    pc.set_defaults(func=cmd_constants)

    pp = add_parser("persistence", help="projection persistence on generated sequences")
    pp.add_argument("action", choices=("check",))
    pp.add_argument("--sequences", type=int, default=50)
    pp.add_argument("--max-length", type=int, default=8)
    pp.add_argument("--M", type=int)
    pp.add_argument("--B", type=int)
    pp.set_defaults(func=cmd_persistence)

    pr = add_parser("raag", help="normal forms and graph components")
    pr.add_argument("action", choices=("nf", "components"))
    pr.add_argument("--vertices", type=int, required=True)
    pr.add_argument("--edges", default="[]", help='JSON list of [i, j] pairs, 0-based')
    pr.add_argument("--word", default="", help='e.g. "x1^2 x2^-1"')
    pr.set_defaults(func=cmd_raag)

    pt = add_parser("tree", help="Bass-Serre balls, embedding certificates, relations")
    pt.add_argument("action", choices=("build", "qi", "free-product"))
    pt.add_argument("--family", required=True, help="FamilySpec JSON file")
    pt.add_argument("--radius", type=int, default=4)
    pt.add_argument("--base-curve", default="1/1")
    pt.add_argument("--kappa", type=int)
    pt.add_argument("--budget", type=int, default=8)
    pt.set_defaults(func=cmd_tree)

    pcert = add_parser("cert", help="family certificates")
    pcert.add_argument("action", choices=("separated", "misaligned", "displacing"))
    pcert.add_argument("--family", required=True)
    pcert.add_argument("--D", type=int, default=5)
    pcert.add_argument("--A", type=int, default=2)
    pcert.add_argument("--L", type=int, default=11)
    pcert.add_argument("--shell-bound", type=int, default=40)
    pcert.set_defaults(func=cmd_cert)

    pe = add_parser("experiment", help="end-to-end reproductions")
    pe.add_argument("kind", choices=("prop91", "theorem-b", "example92"))
    pe.add_argument("--dprime", type=int, default=20)
    pe.add_argument("--window", type=int, default=5)
    pe.add_argument("--radius", type=int, default=6)
    pe.add_argument("--D", type=int, default=8)
    pe.add_argument("--budget", type=int, default=8)
    pe.add_argument("--factor-budget", type=int, default=2)
    pe.add_argument("--words", type=int, default=100)
    pe.add_argument("--curve-samples", type=int, default=60)
    pe.add_argument("--triples", type=int, default=1000)
    pe.add_argument("--geodesics", type=int, default=300)
    pe.add_argument("--qmax", type=int, default=800)
    pe.add_argument("--delta", type=int)
    pe.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    # config file: values splice in right after the subcommand, so explicit
    # flags given later still override them
    if "--config" in argv:
        i = argv.index("--config")
        with open(argv[i + 1]) as fh:
            conf = json.load(fh)
        argv = argv[:i] + argv[i + 2:]
        extra = []
        for k, v in conf.items():
            extra += [f"--{k.replace('_', '-')}", str(v)]
        takes_value = {"--output", "--format", "--seed"}
        cmd_at = None
        skip = False
        for pos, tok in enumerate(argv):
            if skip:
                skip = False
                continue
            if tok in takes_value:
                skip = True
                continue
            if not tok.startswith("-"):
                cmd_at = pos
                break
        if cmd_at is None:
            print("usage error: --config requires a subcommand", file=sys.stderr)
            return USAGE
        # subcommands may carry one positional action/kind token next
        insert_at = cmd_at + 1
        if insert_at < len(argv) and not argv[insert_at].startswith("-"):
            insert_at += 1
        argv = argv[:insert_at] + extra + argv[insert_at:]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else 0
    try:
        code, records, pairs = args.func(args)
    except SystemExit_usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    echoed = []
    skip = False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in ("--output", "--config"):
            skip = True
            continue
        echoed.append(tok)
    seed_used = getattr(args, "seed", None)
    if seed_used is None and os.environ.get(SEED_ENV) is not None:
        seed_used = int(os.environ[SEED_ENV])
    config_echo = {"record": "config", "argv": echoed, "seed": seed_used}
    records = [config_echo] + records
    if args.format == "csv" and pairs is not None:
        emit_csv(pairs, args.output)
    else:
        emit(records, args.output)
        if pairs is not None and args.output:
            emit_csv(pairs, args.output + ".csv")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
