"""Command-line interface: config-driven runs with JSON and text reports.

Exit codes: 0 for verified/certified/computed outcomes, 1 for refutations
and counterexamples, 2 for inconclusive verdicts, 3 for usage, config or
internal errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from random import Random

from . import hyperspace, ifs, maps, oracle, report as report_mod
from .bounds import DEFAULT_SEED, Bounds
from .config import LabConfig, load_config, parse_set
from .errors import (
    ConfigError,
    ContractViolation,
    GroundMismatchError,
    IntegrityError,
    ValidationError,
)
from .instances import parity_lab
from .render import format_point, format_set
from .report import Report
from .setalg import Atom, BlockElem, SymbolicSet, enumerate_sets, random_set

__all__ = ["main", "run"]


def _resolve_map(config: LabConfig, name: str) -> maps.PiecewiseMap:
    if name not in config.maps:
        raise ConfigError(
            f"unknown map {name!r}; config defines {sorted(config.maps)}"
        )
    return config.maps[name]


def _resolve_system(config: LabConfig, name: str) -> ifs.IFS:
    if name not in config.systems:
        raise ConfigError(
            f"unknown ifs {name!r}; config defines {sorted(config.systems)}"
        )
    return config.systems[name]


def _parse_set_arg(config: LabConfig, text: str) -> SymbolicSet:
    return parse_set(config.ground, text, where=f"set argument {text!r}")


# ---------------------------------------------------------------------------
# Command handlers: each returns (details, verdict, exit_code, facts)
# ---------------------------------------------------------------------------


def _cmd_check_space(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    topo = config.topology
    g = config.ground
    bounds = config.bounds
    problems = []
    if not topo.is_open(g.empty()):
        problems.append("the empty set is not open")
    if not topo.is_open(g.whole()):
        problems.append("the whole space is not open")
    points = [Atom(a) for a in g.atoms]
    points.extend(
        BlockElem(b, i) for b in g.blocks for i in range(1, bounds.max_index + 1)
    )
    if not topo.t1_sample(points):
        problems.append("a sampled singleton is not closed")
    sample = []
    for s in enumerate_sets(g, 2, 1):
        sample.append(s)
        if len(sample) >= 40:
            break
    opens = [s for s in sample if topo.is_open(s)]
    law_violations = 0
    for x in opens:
        for y in opens:
            if not topo.is_open(x.union(y)) or not topo.is_open(x.intersect(y)):
                law_violations += 1
    if law_violations:
        problems.append(
            f"{law_violations} sampled union/intersection pairs left the opens"
        )
    details = {
        "atoms": list(g.atoms),
        "blocks": list(g.blocks),
        "clauses": len(topo.clauses),
        "points_sampled": len(points),
        "open_samples": len(opens),
        "problems": problems,
    }
    if problems:
        return details, "space-problems", 1, ()
    return (
        details,
        "space-verified",
        0,
        ("singleton closedness and open-set laws hold on all samples",),
    )


def _cmd_closure(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    s = _parse_set_arg(config, args.set)
    topo = config.topology
    closure = topo.closure(s)
    details = {
        "set": format_set(s),
        "closure": format_set(closure),
        "interior": format_set(topo.interior(s)),
        "is_open": topo.is_open(s),
        "is_closed": topo.is_closed(s),
    }
    return details, "computed", 0, ()


def _cmd_image(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    m = _resolve_map(config, args.map)
    s = _parse_set_arg(config, args.set)
    details = {
        "map": args.map,
        "set": format_set(s),
        "image": format_set(m.image(s)),
        "preimage": format_set(m.preimage(s)),
    }
    return details, "computed", 0, ()


def _cmd_check_closed_map(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    m = _resolve_map(config, args.map)
    verdict = maps.is_closed_map_bounded(
        m, config.topology, config.bounds, seed=args.seed
    )
    details, verdict_str, code = report_mod.summarize_closed_map(verdict)
    details["map"] = args.map
    return details, verdict_str, code, ()


def _cmd_contraction(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    m = _resolve_map(config, args.map)
    chain = maps.space_chain(m, args.n_max or config.bounds.n_max)
    verdict = maps.is_topological_contraction(
        m,
        config.topology,
        n_max=args.n_max or config.bounds.n_max,
        bounds=config.bounds,
        seed=args.seed,
    )
    details, verdict_str, code = report_mod.summarize_contraction(verdict)
    details["map"] = args.map
    details["space_chain"] = report_mod.summarize_chain(chain)
    return details, verdict_str, code, ()


def _cmd_contractivity(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    system = _resolve_system(config, args.ifs)
    verdict = ifs.contractivity_certificate(
        system, config.topology, args.n_max or config.bounds.n_max
    )
    details, verdict_str, code = report_mod.summarize_contractivity(verdict)
    details["ifs"] = args.ifs
    return details, verdict_str, code, ()


def _cmd_attractor(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    system = _resolve_system(config, args.ifs)
    verdict = ifs.attractor_from_space(
        system, config.topology, args.n_max or config.bounds.n_max
    )
    details, verdict_str, code = report_mod.summarize_attractor(verdict)
    details["ifs"] = args.ifs
    if isinstance(verdict, ifs.AttractorFound):
        fixed = system.hutchinson(verdict.attractor) == verdict.attractor
        details["fixed_exactly"] = fixed
        if not fixed:
            return details, "attractor-not-fixed", 1, ()
    return details, verdict_str, code, ()


def _cmd_fixed_points(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    system = _resolve_system(config, args.ifs)
    found = ifs.fixed_point_search(
        system, config.topology, config.bounds, args.n_max or config.bounds.n_max
    )
    details = {
        "ifs": args.ifs,
        "fixed_points": [format_set(s) for s in found],
        "count": len(found),
    }
    return details, "enumerated", 0, ()


def _cmd_not_closed(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    system = _resolve_system(config, args.ifs)
    target = _parse_set_arg(config, args.set)
    rep = hyperspace.non_closedness_report(
        system, config.topology, target, config.bounds, seed=args.seed
    )
    details, verdict_str, code = report_mod.summarize_nonclosedness(rep)
    details["ifs"] = args.ifs
    details["target"] = format_set(target)
    return details, verdict_str, code, ()


def _cmd_oracle_fuzz(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    g = config.ground
    algebra = oracle.fuzz_set_algebra(
        g, n_triples=args.n, trunc_n=args.N, seed=args.seed
    )
    rng = Random(args.seed + 1)
    probe_sets = [random_set(rng, g) for _ in range(20)]
    map_outcomes = {}
    total_mismatches = algebra.mismatches
    for name, m in sorted(config.maps.items()):
        outcome = oracle.check_map_pointwise(m, probe_sets, trunc_n=args.N)
        map_outcomes[name] = {
            "checked": outcome.checked,
            "mismatches": outcome.mismatches,
            "first_mismatch": outcome.first_mismatch,
        }
        total_mismatches += outcome.mismatches
    details = {
        "algebra": {
            "triples": algebra.checked,
            "truncation": args.N,
            "mismatches": algebra.mismatches,
            "first_mismatch": algebra.first_mismatch,
        },
        "maps": map_outcomes,
    }
    if total_mismatches:
        return details, "oracle-mismatch", 1, ()
    return (
        details,
        "oracle-agreement",
        0,
        (
            f"{algebra.checked} random set-operation triples agree with the "
            f"truncation oracle at N={args.N}",
            "map application, images and preimages agree with the pointwise "
            f"oracle on all probed points for {len(map_outcomes)} maps",
        ),
    )


def _cmd_reproduce(config: LabConfig, args) -> tuple[dict, str, int, tuple]:
    lab = parity_lab()
    g = lab.ground
    topo = lab.topology
    bounds = lab.bounds
    system = lab.systems["parity"]
    solo = lab.systems["solo_a"]
    details: dict = {}
    facts: list[str] = []
    ok = True

    def stage(name: str, passed: bool, data: dict, fact: str) -> None:
        nonlocal ok
        data["ok"] = passed
        details[name] = data
        if passed:
            facts.append(fact)
        else:
            ok = False

    for name in ("to_a", "to_b"):
        verdict = maps.is_closed_map_bounded(
            lab.maps[name], topo, bounds, seed=args.seed
        )
        data, verdict_str, _ = report_mod.summarize_closed_map(verdict)
        stage(
            f"closed_map_{name}",
            isinstance(verdict, maps.ClosedMapVerified),
            {"verdict": verdict_str, **data},
            f"map {name} carries every enumerated and sampled closed set to a "
            "closed set",
        )

    ab = g.finite((Atom("a"), Atom("b")))
    expected_depths = {
        1: (g.block_all("EVEN").union(ab),),
        2: (ab,),
        3: (g.singleton(Atom("a")), g.singleton(Atom("b"))),
    }
    for depth, want in expected_depths.items():
        got = system.depth_images(depth)
        passed = set(got.images) == set(want)
        stage(
            f"depth_images_{depth}",
            passed,
            {"images": [format_set(s) for s in got.images]},
            f"all word images of the space at depth {depth} are exactly as "
            "expected",
        )

    contractivity = ifs.contractivity_certificate(system, topo, bounds.n_max)
    data, verdict_str, _ = report_mod.summarize_contractivity(contractivity)
    stage(
        "contractivity",
        isinstance(contractivity, ifs.ContractivityCertified)
        and contractivity.depth == 3,
        {"verdict": verdict_str, **data},
        "the two-map system is contractive with certificate depth 3",
    )

    target_a = g.singleton(Atom("a"))
    membership = hyperspace.is_in_hutchinson_image(system, topo, target_a, bounds)
    data, verdict_str, _ = report_mod.summarize_membership(membership)
    stage(
        "membership_a",
        isinstance(membership, hyperspace.NotInImageCertified)
        and membership.admissible.is_empty(),
        {"verdict": verdict_str, **data},
        "the singleton {a} is certified outside the operator's range via an "
        "empty admissible region",
    )

    certificate = hyperspace.guided_closure_proof(system, topo, target_a, "EVEN", bounds)
    stage(
        "closure_certificate_a",
        certificate is not None,
        {
            "certificate": (
                report_mod.summarize_certificate(certificate)
                if certificate is not None
                else None
            )
        },
        "every basis neighborhood of {a} provably meets the operator's range",
    )

    nc = hyperspace.non_closedness_report(system, topo, target_a, bounds, seed=args.seed)
    data, verdict_str, _ = report_mod.summarize_nonclosedness(nc)
    stage(
        "non_closedness_a",
        nc.verdict == hyperspace.VERDICT_NON_CLOSED_CERTIFIED
        and all(r.witness is not None for r in nc.challenges),
        {"verdict": verdict_str, "challenges": len(nc.challenges)},
        "the induced set operator is certified not closed",
    )

    attractor = ifs.attractor_from_space(system, topo, bounds.n_max)
    attr_ok = (
        isinstance(attractor, ifs.AttractorFound)
        and attractor.attractor == ab
        and attractor.steps == 2
        and system.hutchinson(attractor.attractor) == attractor.attractor
    )
    data, verdict_str, _ = report_mod.summarize_attractor(attractor)
    stage(
        "attractor",
        attr_ok,
        {"verdict": verdict_str, **data},
        "the attractor is the two-atom set, reached from the whole space in "
        "2 steps and fixed exactly",
    )

    fixed = ifs.fixed_point_search(system, topo, bounds, bounds.n_max)
    stage(
        "fixed_points",
        [format_set(s) for s in fixed] == [format_set(ab)],
        {"fixed_points": [format_set(s) for s in fixed]},
        "the bounded search finds exactly one fixed point of the set operator",
    )

    witness = None
    witness_error = None
    if isinstance(attractor, ifs.AttractorFound) and isinstance(
        contractivity, ifs.ContractivityCertified
    ):
        try:
            witness = ifs.distinguishing_witness(
                system,
                topo,
                attractor.attractor,
                attractor.attractor,
                contractivity.depth,
            )
        except (ContractViolation, IntegrityError) as exc:
            witness_error = str(exc)
    stage(
        "attractor_self_witness",
        witness is None and witness_error is None,
        {"witness": None if witness is None else format_point(witness.point)},
        "no word separates the attractor from itself",
    )

    solo_contraction = maps.is_topological_contraction(
        lab.maps["to_a"], topo, n_max=bounds.n_max, bounds=bounds, seed=args.seed
    )
    solo_attractor = ifs.attractor_from_space(solo, topo, bounds.n_max)
    solo_fixed = ifs.fixed_point_search(solo, topo, bounds, bounds.n_max)
    solo_ok = (
        isinstance(solo_contraction, maps.ContractionCertified)
        and solo_contraction.stable_set == target_a
        and isinstance(solo_attractor, ifs.AttractorFound)
        and solo_attractor.attractor == target_a
        and [format_set(s) for s in solo_fixed] == [format_set(target_a)]
    )
    data, verdict_str, _ = report_mod.summarize_contraction(solo_contraction)
    stage(
        "single_map",
        solo_ok,
        {
            "contraction": {"verdict": verdict_str, **data},
            "attractor": report_mod.summarize_attractor(solo_attractor)[0],
            "fixed_points": [format_set(s) for s in solo_fixed],
        },
        "the first map alone is a topological contraction with unique fixed "
        "point {a}",
    )

    if ok:
        return details, "reproduced", 0, tuple(facts)
    return details, "reproduction-failed", 1, tuple(facts)


_HANDLERS = {
    "check-space": _cmd_check_space,
    "closure": _cmd_closure,
    "image": _cmd_image,
    "check-closed-map": _cmd_check_closed_map,
    "contraction": _cmd_contraction,
    "contractivity": _cmd_contractivity,
    "attractor": _cmd_attractor,
    "fixed-points": _cmd_fixed_points,
    "not-closed": _cmd_not_closed,
    "reproduce-paper": _cmd_reproduce,
    "oracle-fuzz": _cmd_oracle_fuzz,
}


def run(command: str, config: LabConfig, args) -> Report:
    """Dispatch one command against a loaded config; pure given the seed."""
    if command not in _HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    start = time.perf_counter()
    details, verdict, code, facts = _HANDLERS[command](config, args)
    elapsed = time.perf_counter() - start
    return Report(
        command=command,
        verdict=verdict,
        exit_code=code,
        seed=args.seed,
        bounds=config.bounds,
        config_source=config.source,
        details=details,
        facts_checked=facts,
        elapsed_s=elapsed,
    )


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a lab config (TOML)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--n-max", type=int, dest="n_max")
    common.add_argument("--max-index", type=int, dest="max_index")
    common.add_argument("--max-exceptions", type=int, dest="max_exceptions")
    common.add_argument("--samples", type=int)
    common.add_argument("--json", dest="json_path", metavar="PATH")
    common.add_argument(
        "--strict",
        action="store_true",
        help="turn sampled-validation warnings into errors",
    )
    parser = argparse.ArgumentParser(
        prog="ifslab",
        description="exact symbolic laboratory for iterated function systems "
        "on countable compact spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check-space", parents=[common])
    p = sub.add_parser("closure", parents=[common])
    p.add_argument("set")
    p = sub.add_parser("image", parents=[common])
    p.add_argument("map")
    p.add_argument("set")
    p = sub.add_parser("check-closed-map", parents=[common])
    p.add_argument("map")
    p = sub.add_parser("contraction", parents=[common])
    p.add_argument("map")
    p = sub.add_parser("contractivity", parents=[common])
    p.add_argument("ifs")
    p = sub.add_parser("attractor", parents=[common])
    p.add_argument("ifs")
    p = sub.add_parser("fixed-points", parents=[common])
    p.add_argument("ifs")
    p = sub.add_parser("not-closed", parents=[common])
    p.add_argument("ifs")
    p.add_argument("set")
    sub.add_parser(
        "reproduce-paper",
        parents=[common],
        help="run the built-in end-to-end certification pipeline",
    )
    p = sub.add_parser("oracle-fuzz", parents=[common])
    p.add_argument("--n", type=int, default=10_000, help="number of fuzz triples")
    p.add_argument("--N", type=int, default=64, help="truncation size")
    return parser


def _effective_config(args) -> LabConfig:
    if args.config:
        config = load_config(args.config, strict=args.strict)
    else:
        config = parity_lab()
    overrides = {}
    for field in ("max_index", "max_exceptions", "samples", "n_max"):
        value = getattr(args, field, None)
        if value is not None:
            overrides[field] = value
    if overrides:
        config = replace(config, bounds=replace(config.bounds, **overrides))
    return config


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _effective_config(args)
        rep = run(args.command, config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, ContractViolation, GroundMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(report_mod.render_text(rep))
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8") as handle:
            handle.write(report_mod.to_json(rep))
    return rep.exit_code
