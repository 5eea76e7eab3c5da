"""Structured run reports with JSON and text renderings.

The JSON form is versioned and deterministic: keys are sorted, sets are
rendered in canonical expression syntax, and wall-clock timing is left
out so identical runs produce identical bytes.  The text form carries the
same verdict fields plus timing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import hyperspace, ifs, maps
from .bounds import Bounds
from .render import format_point, format_set
from .setalg import SymbolicSet

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "Report",
    "to_json_dict",
    "to_json",
    "render_text",
]


@dataclass
class Report:
    command: str
    verdict: str
    exit_code: int
    seed: int
    bounds: Bounds
    config_source: str
    details: dict
    facts_checked: tuple[str, ...] = ()
    elapsed_s: float = 0.0


def _bounds_dict(b: Bounds) -> dict:
    return {
        "max_exceptions": b.max_exceptions,
        "max_index": b.max_index,
        "samples": b.samples,
        "n_max": b.n_max,
        "neighborhoods": b.neighborhoods,
    }


def to_json_dict(report: Report) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": report.command,
        "verdict": report.verdict,
        "exit_code": report.exit_code,
        "seed": report.seed,
        "bounds": _bounds_dict(report.bounds),
        "config": report.config_source,
        "details": report.details,
        "facts_checked": list(report.facts_checked),
    }


def to_json(report: Report) -> str:
    return json.dumps(to_json_dict(report), indent=2, sort_keys=True) + "\n"


def _text_lines(value, indent: int) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for key in value:
            inner = value[key]
            if isinstance(inner, (dict, list)):
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(inner, indent + 1))
            else:
                lines.append(f"{pad}{key}: {inner}")
    elif isinstance(value, list):
        for inner in value:
            if isinstance(inner, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_text_lines(inner, indent + 1))
            else:
                lines.append(f"{pad}- {inner}")
    else:
        lines.append(f"{pad}{value}")
    return lines


def render_text(report: Report) -> str:
    b = report.bounds
    lines = [
        f"command: {report.command}",
        f"config: {report.config_source}",
        f"seed: {report.seed}",
        (
            f"bounds: max_exceptions={b.max_exceptions} max_index={b.max_index} "
            f"samples={b.samples} n_max={b.n_max} neighborhoods={b.neighborhoods}"
        ),
        f"verdict: {report.verdict}",
    ]
    if report.details:
        lines.append("details:")
        lines.extend(_text_lines(report.details, 1))
    if report.facts_checked:
        lines.append("facts checked:")
        lines.extend(f"  - {fact}" for fact in report.facts_checked)
    lines.append(f"elapsed: {report.elapsed_s:.3f}s")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Verdict summarizers: (details dict, verdict string, exit code)
# ---------------------------------------------------------------------------


def fmt(s: SymbolicSet) -> str:
    return format_set(s)


def summarize_closed_map(v: maps.ClosedMapVerdict) -> tuple[dict, str, int]:
    if isinstance(v, maps.ClosedMapVerified):
        return (
            {"checked": v.checked},
            "closed-within-bounds",
            0,
        )
    return (
        {"witness": fmt(v.witness), "image": fmt(v.image)},
        "not-closed",
        1,
    )


def summarize_contraction(v: maps.ContractionVerdict) -> tuple[dict, str, int]:
    if isinstance(v, maps.ContractionCertified):
        closed_details, closed_verdict, _ = summarize_closed_map(v.closedness)
        return (
            {
                "stable_set": fmt(v.stable_set),
                "stable_at": v.stable_at,
                "closedness": {"verdict": closed_verdict, **closed_details},
            },
            "contraction-certified",
            0,
        )
    if isinstance(v, maps.ContractionRefuted):
        details: dict = {}
        if v.pair is not None:
            details["pair"] = [format_point(p) for p in v.pair]
        if v.stable_set is not None:
            details["stable_set"] = fmt(v.stable_set)
        if v.closedness is not None:
            closed_details, closed_verdict, _ = summarize_closed_map(v.closedness)
            details["closedness"] = {"verdict": closed_verdict, **closed_details}
        return details, "contraction-refuted", 1
    return {"reason": v.reason, "reached": v.reached}, "inconclusive", 2


def summarize_chain(chain: maps.SpaceChain) -> dict:
    return {
        "entries": [fmt(s) for s in chain.entries],
        "stabilized": chain.stabilized,
        "stable_at": chain.stable_at,
    }


def summarize_contractivity(v: ifs.ContractivityVerdict) -> tuple[dict, str, int]:
    if isinstance(v, ifs.ContractivityCertified):
        return {"depth": v.depth}, "contractive-certified", 0
    if isinstance(v, ifs.ContractivityRefuted):
        return (
            {
                "pair": [format_point(p) for p in v.pair],
                "stable_depth": v.stable_collection.depth,
                "stable_images": [fmt(s) for s in v.stable_collection.images],
                "refuting_cover": [fmt(s) for s in v.refuting_cover],
            },
            "contractivity-refuted",
            1,
        )
    details = {"reached": v.reached}
    if v.note:
        details["note"] = v.note
    return details, "inconclusive", 2


def summarize_attractor(v: ifs.AttractorVerdict) -> tuple[dict, str, int]:
    if isinstance(v, ifs.AttractorFound):
        return (
            {"attractor": fmt(v.attractor), "steps": v.steps},
            "attractor-found",
            0,
        )
    return {"reached": v.reached}, "inconclusive", 2


def summarize_membership(
    v: hyperspace.ImageMembershipVerdict,
) -> tuple[dict, str, int]:
    if isinstance(v, hyperspace.InImage):
        return {"witness": fmt(v.witness)}, "in-image", 0
    if isinstance(v, hyperspace.NotInImageCertified):
        return (
            {"reason": v.reason, "admissible_region": fmt(v.admissible)},
            "not-in-image-certified",
            0,
        )
    if isinstance(v, hyperspace.NotInImageBounded):
        return {"admissible_region": fmt(v.admissible)}, "not-in-image-bounded", 2
    return {"reason": v.reason}, "inconclusive", 2


def _summarize_neighborhood(n: hyperspace.BasisNeighborhood) -> dict:
    return {
        "container": fmt(n.container),
        "meeters": [fmt(v) for v in n.meeters],
    }


def summarize_certificate(cert: hyperspace.ClosureCertificate) -> dict:
    return {
        "target": fmt(cert.target),
        "point": format_point(cert.point),
        "block": cert.block,
        "clauses": [
            {"clause": f.clause_index, "outcome": f.outcome, "detail": f.detail}
            for f in cert.clause_findings
        ],
        "generic_index": cert.generic_index,
        "fibers": [
            {"index": s.index, "source": fmt(s.fiber), "image": fmt(s.image)}
            for s in (*cert.exceptional_fibers, *cert.generic_fibers)
        ],
    }


def summarize_nonclosedness(
    rep: hyperspace.NonClosednessReport,
) -> tuple[dict, str, int]:
    membership_details, membership_verdict, _ = summarize_membership(rep.membership)
    details = {
        "membership": {"verdict": membership_verdict, **membership_details},
        "certificate": (
            summarize_certificate(rep.certificate)
            if rep.certificate is not None
            else None
        ),
        "challenges": [
            {
                "neighborhood": _summarize_neighborhood(r.neighborhood),
                "witness": fmt(r.witness) if r.witness is not None else None,
            }
            for r in rep.challenges
        ],
    }
    code = {
        hyperspace.VERDICT_NON_CLOSED_CERTIFIED: 0,
        hyperspace.VERDICT_NON_CLOSED_EVIDENCE: 0,
        hyperspace.VERDICT_INCONCLUSIVE: 2,
        hyperspace.VERDICT_IN_IMAGE: 2,
    }[rep.verdict]
    return details, rep.verdict, code
