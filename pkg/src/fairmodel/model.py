"""In-memory representation of fairness/sustainability goal models.

A model is a typed graph: elements (goals, values, assumptions, obstacles,
indicators, regulations, activities, dimensions, fragment references) plus
typed directed links between them. Link endpoints are constrained by kind;
the compatibility table below is the single source of truth.

All operations are pure: they take a model and return a new one. Models are
safe to share across threads once a construction step has returned.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping

ID_RE = re.compile(r"^[a-z][a-z0-9_-]*$")

PLACEHOLDER_RE = re.compile(r"<([A-Z][A-Za-z]*)>")

#: values accepted by the `accepted` annotation on obstacles
ACCEPTANCE_STRATEGIES = frozenset({"accept", "avoid", "reduce", "restore", "weaken"})

#: element attributions (information system vs its environment)
ATTRIBUTIONS = ("system", "environment", "unspecified")


class ElementKind(str, Enum):
    GOAL = "goal"
    VALUE = "value"
    ASSUMPTION = "assumption"
    OBSTACLE = "obstacle"
    INDICATOR = "indicator"
    REGULATION = "regulation"
    ACTIVITY = "activity"
    DIMENSION = "dimension"
    FRAGMENT_REF = "ref"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: the intention family: refinable and obstructable element kinds
INTENTIONS = frozenset({ElementKind.GOAL, ElementKind.VALUE, ElementKind.ASSUMPTION})

ALL_KINDS = frozenset(ElementKind)


def is_intention(kind: ElementKind) -> bool:
    return kind in INTENTIONS


class LinkKind(str, Enum):
    REFINES = "refines"
    MEASURES = "measures"
    REGULATES = "regulates"
    OPERATIONALIZES = "operationalizes"
    OBSTRUCTS = "obstructs"
    RESOLVES = "resolves"
    UNDERPINS = "underpins"
    DETAILED_BY = "details"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: endpoint-kind compatibility table: link kind -> (allowed sources, allowed targets)
LINK_RULES: dict[LinkKind, tuple[frozenset[ElementKind], frozenset[ElementKind]]] = {
    LinkKind.REFINES: (INTENTIONS, INTENTIONS),
    LinkKind.MEASURES: (frozenset({ElementKind.INDICATOR}), frozenset({ElementKind.VALUE})),
    LinkKind.REGULATES: (frozenset({ElementKind.REGULATION}), INTENTIONS),
    LinkKind.OPERATIONALIZES: (frozenset({ElementKind.ACTIVITY}), INTENTIONS),
    LinkKind.OBSTRUCTS: (frozenset({ElementKind.OBSTACLE}), INTENTIONS),
    LinkKind.RESOLVES: (frozenset({ElementKind.ACTIVITY}), frozenset({ElementKind.OBSTACLE})),
    LinkKind.UNDERPINS: (frozenset({ElementKind.ASSUMPTION}), INTENTIONS),
    LinkKind.DETAILED_BY: (ALL_KINDS, frozenset({ElementKind.FRAGMENT_REF})),
}


def link_allowed(kind: LinkKind, source: ElementKind, target: ElementKind) -> bool:
    sources, targets = LINK_RULES[kind]
    return source in sources and target in targets


def rule_description(kind: LinkKind) -> str:
    sources, targets = LINK_RULES[kind]

    def side(kinds: frozenset[ElementKind]) -> str:
        if kinds == INTENTIONS:
            return "intention"
        if kinds == ALL_KINDS:
            return "any"
        return "|".join(sorted(k.value for k in kinds))

    return f"{kind.value}: {side(sources)} -> {side(targets)}"


class ModelError(Exception):
    """Base class for structural model errors."""


class DuplicateId(ModelError):
    pass


class IllegalField(ModelError):
    pass


class UnknownEndpoint(ModelError):
    pass


class IncompatibleEndpoints(ModelError):
    """Raised with the violated compatibility-table row in the message."""

    def __init__(self, kind: LinkKind, source: ElementKind, target: ElementKind):
        self.kind = kind
        self.source_kind = source
        self.target_kind = target
        super().__init__(
            f"{kind.value} link from {source.value} to {target.value} "
            f"violates rule '{rule_description(kind)}'"
        )


class DuplicateLink(ModelError):
    pass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line_start: int
    col_start: int
    line_end: int
    col_end: int

    def location(self) -> str:
        return f"{self.file}:{self.line_start}:{self.col_start}"


@dataclass(frozen=True)
class Element:
    id: str
    kind: ElementKind
    name: str
    dimension: str | None = None
    attribution: str = "unspecified"
    annotations: tuple[tuple[str, str], ...] = ()
    span: SourceSpan | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not ID_RE.match(self.id):
            raise IllegalField(f"element id {self.id!r} is not a valid slug")
        if self.attribution not in ATTRIBUTIONS:
            raise IllegalField(f"unknown attribution {self.attribution!r}")
        if self.dimension is not None and self.kind is not ElementKind.VALUE:
            raise IllegalField(
                f"dimension may only be set on value elements, not {self.kind.value}"
            )
        if self.annotation("accepted") is not None and self.kind is not ElementKind.OBSTACLE:
            raise IllegalField(
                f"'accepted' annotation only applies to obstacles, not {self.kind.value}"
            )

    def annotation(self, key: str) -> str | None:
        for k, v in self.annotations:
            if k == key:
                return v
        return None

    def with_annotation(self, key: str, value: str) -> Element:
        kept = tuple((k, v) for k, v in self.annotations if k != key)
        return replace(self, annotations=kept + ((key, value),))


@dataclass(frozen=True)
class Link:
    kind: LinkKind
    source: str
    target: str
    span: SourceSpan | None = field(default=None, compare=False)


def slugify(name: str) -> str:
    """Derive a valid element id from a display name."""
    slug = re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")
    if not slug or not slug[0].isalpha():
        slug = "x_" + slug if slug else "x"
    return slug


@dataclass(frozen=True)
class Model:
    """A named element/link graph with declared fragments.

    Fragments are themselves models (without nested fragments); they serve
    as reusable sub-models referenced through DetailedBy links.
    """

    name: str
    elements: dict[str, Element] = field(default_factory=dict)
    links: tuple[Link, ...] = ()
    fragments: dict[str, Model] = field(default_factory=dict)

    # -- construction -----------------------------------------------------

    def add_element(self, element: Element) -> Model:
        if element.id in self.elements:
            raise DuplicateId(f"element id {element.id!r} already bound")
        return replace(self, elements={**self.elements, element.id: element})

    def add_link(self, kind: LinkKind, source: str, target: str,
                 span: SourceSpan | None = None) -> Model:
        src = self.elements.get(source)
        if src is None:
            raise UnknownEndpoint(f"unknown link source {source!r}")
        tgt = self.elements.get(target)
        if tgt is None:
            if kind is LinkKind.DETAILED_BY and target in self.fragments:
                return self._append_link(Link(kind, source, target, span))
            raise UnknownEndpoint(f"unknown link target {target!r}")
        if not link_allowed(kind, src.kind, tgt.kind):
            raise IncompatibleEndpoints(kind, src.kind, tgt.kind)
        return self._append_link(Link(kind, source, target, span))

    def add_fragment(self, name: str, fragment: Model) -> Model:
        if name in self.fragments:
            raise DuplicateId(f"fragment name {name!r} already bound")
        if fragment.fragments:
            raise IllegalField("fragments may not declare nested fragments")
        return replace(self, fragments={**self.fragments, name: fragment})

    def _append_link(self, link: Link) -> Model:
        if any(l.kind == link.kind and l.source == link.source and l.target == link.target
               for l in self.links):
            raise DuplicateLink(
                f"duplicate {link.kind.value} link {link.source} -> {link.target}"
            )
        return replace(self, links=self.links + (link,))

    def _append_raw_link(self, link: Link) -> Model:
        """Append without endpoint resolution (parser use; validated later)."""
        return self._append_link(link)

    # -- queries ----------------------------------------------------------

    def element(self, element_id: str) -> Element:
        try:
            return self.elements[element_id]
        except KeyError:
            raise UnknownEndpoint(f"unknown element {element_id!r}") from None

    def elements_of_kind(self, kind: ElementKind) -> list[Element]:
        return [e for e in self.elements.values() if e.kind is kind]

    def links_of_kind(self, kind: LinkKind) -> list[Link]:
        return [l for l in self.links if l.kind is kind]

    def incoming(self, element_id: str, kind: LinkKind | None = None) -> list[Link]:
        return [l for l in self.links
                if l.target == element_id and (kind is None or l.kind is kind)]

    def outgoing(self, element_id: str, kind: LinkKind | None = None) -> list[Link]:
        return [l for l in self.links
                if l.source == element_id and (kind is None or l.kind is kind)]

    def subtree(self, root: str) -> list[str]:
        """The sub-model hanging off `root`: depth-first preorder over
        incoming links (refinements, measures, operationalizations, ...),
        excluding DetailedBy. Children follow link insertion order; visited
        nodes are skipped so malformed cyclic input still terminates.
        """
        if root not in self.elements:
            raise UnknownEndpoint(f"unknown element {root!r}")
        order: list[str] = []
        seen: set[str] = set()

        def visit(node: str) -> None:
            if node in seen:
                return
            seen.add(node)
            order.append(node)
            for link in self.links:
                if link.kind is LinkKind.DETAILED_BY:
                    continue
                if link.target == node and link.source in self.elements:
                    visit(link.source)

        visit(root)
        return order

    def structurally_equal(self, other: Model) -> bool:
        """Equality up to link ordering (serialization groups links by
        source element, so construction order is not preserved)."""
        return (self.name == other.name
                and self.elements == other.elements
                and set(self.links) == set(other.links)
                and self.fragments.keys() == other.fragments.keys()
                and all(f.structurally_equal(other.fragments[n])
                        for n, f in self.fragments.items()))

    def placeholders(self) -> set[str]:
        """Placeholder words (`<Word>` in display names) used in this model."""
        found: set[str] = set()
        for element in self.elements.values():
            found.update(PLACEHOLDER_RE.findall(element.name))
        return found


def build_model(name: str, elements: Iterable[Element] = (),
                links: Iterable[tuple[LinkKind, str, str]] = (),
                fragments: Mapping[str, Model] | None = None) -> Model:
    """Convenience builder applying the checked operations in sequence."""
    model = Model(name)
    for element in elements:
        model = model.add_element(element)
    for fragment_name, fragment in (fragments or {}).items():
        model = model.add_fragment(fragment_name, fragment)
    for kind, source, target in links:
        model = model.add_link(kind, source, target)
    return model
