"""Reports over models: obstacle status, system/environment attribution,
improvement-cycle stage coverage, dimension balance and pattern suggestions.

All reports are pure functions of (model, catalogue) and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import re

from .catalogue import STAGES, Catalogue
from .model import ElementKind, LinkKind, Model


@dataclass(frozen=True)
class ObstacleStatus:
    obstacle: str
    targets: tuple[str, ...]
    state: str  # "resolved" | "accepted" | "open"
    resolvers: tuple[str, ...] = ()
    strategy: str | None = None


def obstacle_report(model: Model) -> list[ObstacleStatus]:
    """One entry per obstacle, id-sorted. Resolution (an incoming Resolves
    link) wins over an `accepted` annotation when both are present.
    """
    out: list[ObstacleStatus] = []
    for element in sorted(model.elements_of_kind(ElementKind.OBSTACLE),
                          key=lambda e: e.id):
        targets = tuple(l.target for l in model.outgoing(element.id, LinkKind.OBSTRUCTS))
        resolvers = tuple(l.source for l in model.incoming(element.id, LinkKind.RESOLVES))
        strategy = element.annotation("accepted")
        if resolvers:
            state = "resolved"
        elif strategy is not None:
            state = "accepted"
        else:
            state = "open"
        out.append(ObstacleStatus(element.id, targets, state, resolvers, strategy))
    return out


@dataclass(frozen=True)
class AttributionReport:
    system: tuple[str, ...]
    environment: tuple[str, ...]
    unspecified: tuple[str, ...]
    system_share: Fraction | None  # None when nothing is attributed


def attribution_report(model: Model) -> AttributionReport:
    """Partition of all non-dimension elements by system/environment mark."""
    buckets: dict[str, list[str]] = {"system": [], "environment": [], "unspecified": []}
    for element in model.elements.values():
        if element.kind is ElementKind.DIMENSION:
            continue
        buckets[element.attribution].append(element.id)
    attributed = len(buckets["system"]) + len(buckets["environment"])
    share = Fraction(len(buckets["system"]), attributed) if attributed else None
    return AttributionReport(tuple(buckets["system"]), tuple(buckets["environment"]),
                             tuple(buckets["unspecified"]), share)


@dataclass(frozen=True)
class CoverageReport:
    stages_covered: tuple[str, ...]
    fraction: Fraction
    per_stage: dict[str, tuple[str, ...]]  # stage -> pattern names


def stage_coverage(model: Model, catalogue: Catalogue) -> CoverageReport:
    """Union of the categories of every pattern woven into the model
    (identified by `pattern` provenance annotations).
    """
    woven = sorted({v for e in model.elements.values()
                    for k, v in e.annotations if k == "pattern"})
    per_stage: dict[str, list[str]] = {stage: [] for stage in STAGES}
    for name in woven:
        card = catalogue.cards.get(name)
        if card is None:
            continue
        for stage in card.categories():
            per_stage[stage].append(name)
    covered = tuple(stage for stage in STAGES if per_stage[stage])
    return CoverageReport(covered, Fraction(len(covered), len(STAGES)),
                          {stage: tuple(names) for stage, names in per_stage.items()})


def dimension_balance(model: Model) -> dict[str, int]:
    """Value counts per dimension, with zeros for declared-but-unused ones."""
    counts: dict[str, int] = {e.id: 0 for e in model.elements_of_kind(ElementKind.DIMENSION)}
    for element in model.elements_of_kind(ElementKind.VALUE):
        if element.dimension is not None:
            counts[element.dimension] = counts.get(element.dimension, 0) + 1
    return counts


#: keyword triggers for pattern suggestions; a keyword matches element names
#: as a case-insensitive word prefix ("accept" also hits "acceptance")
SUGGESTION_TRIGGERS: dict[str, tuple[str, ...]] = {
    "violation-anticipation": ("quota", "load", "capacity", "overload"),
    "distributive-justice": ("distribution", "allocation", "free", "supply"),
    "rule-acceptance": ("accept", "adhere", "adoption"),
    "transparency": ("transparent", "audit", "publish"),
    "substantial-freedom": ("capability", "fulfilment", "diversity"),
    "co-evolution": ("synergy", "innovation", "co-evolution"),
}


@dataclass(frozen=True)
class Suggestion:
    element: str
    pattern: str
    reason: str


def suggest(model: Model, catalogue: Catalogue) -> list[Suggestion]:
    """Keyword-trigger pass over element names, plus violation anticipation
    for every open obstacle. Deterministic (element id, pattern name) order.
    """
    found: dict[tuple[str, str], Suggestion] = {}
    for element in model.elements.values():
        if element.kind is ElementKind.DIMENSION:
            continue
        for pattern, keywords in SUGGESTION_TRIGGERS.items():
            for keyword in keywords:
                if re.search(r"\b" + re.escape(keyword), element.name, re.IGNORECASE):
                    key = (element.id, pattern)
                    if key not in found:
                        found[key] = Suggestion(element.id, pattern,
                                                f"name mentions '{keyword}'")
                    break
    for status in obstacle_report(model):
        if status.state == "open":
            key = (status.obstacle, "violation-anticipation")
            if key not in found:
                found[key] = Suggestion(status.obstacle, "violation-anticipation",
                                        "open obstacle")
    return [found[key] for key in sorted(found)]
