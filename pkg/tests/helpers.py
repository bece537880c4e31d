"""Shared test helpers: seeded random model generation respecting the
endpoint-compatibility table, and a minimal scanner for rendered diagrams.
"""

from __future__ import annotations

import random
import re

from fairmodel.model import (
    Element,
    ElementKind,
    Link,
    LinkKind,
    Model,
    link_allowed,
)

_NON_DIM_KINDS = [k for k in ElementKind
                  if k not in (ElementKind.DIMENSION, ElementKind.FRAGMENT_REF)]
_NAME_CHARS = ('abcdefghijklmnopqrstuvwxyz ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789'
               ' _-.,;:!?()"\\\'éü<>')
_DIMS = ("environmental", "economic", "social", "personal", "technical")
_STRATEGIES = ("accept", "avoid", "reduce", "restore", "weaken")


def _name(rng: random.Random) -> str:
    return "".join(rng.choice(_NAME_CHARS) for _ in range(rng.randint(0, 12)))


def _elements(rng: random.Random, count: int, dims: list[str],
              prefix: str) -> list[Element]:
    out: list[Element] = []
    for i in range(count):
        kind = rng.choice(_NON_DIM_KINDS)
        annotations: list[tuple[str, str]] = []
        # canonical annotation order: target, accepted, milestone, pattern
        if kind is ElementKind.INDICATOR and rng.random() < 0.5:
            annotations.append(("target", _name(rng)))
        if kind is ElementKind.OBSTACLE and rng.random() < 0.5:
            annotations.append(("accepted", rng.choice(_STRATEGIES)))
        if rng.random() < 0.2:
            annotations.append(("milestone", "true"))
        if rng.random() < 0.2:
            annotations.append(("pattern", _name(rng)))
        dimension = None
        if kind is ElementKind.VALUE and dims and rng.random() < 0.8:
            dimension = rng.choice(dims)
        out.append(Element(
            id=f"{prefix}{i}", kind=kind, name=_name(rng), dimension=dimension,
            attribution=rng.choice(("system", "environment", "unspecified")),
            annotations=tuple(annotations)))
    return out


def _links(rng: random.Random, elements: list[Element]) -> list[Link]:
    links: list[Link] = []
    seen: set[tuple[LinkKind, str, str]] = set()
    for _ in range(rng.randint(0, 2 * len(elements))):
        a, b = rng.choice(elements), rng.choice(elements)
        kind = rng.choice(list(LinkKind))
        if kind is LinkKind.DETAILED_BY:
            continue
        key = (kind, a.id, b.id)
        if key in seen or not link_allowed(kind, a.kind, b.kind):
            continue
        seen.add(key)
        links.append(Link(kind, a.id, b.id))
    # serialization groups links under their source element
    order = {e.id: i for i, e in enumerate(elements)}
    links.sort(key=lambda l: order[l.source])
    return links


def random_model(rng: random.Random, max_elements: int = 20) -> Model:
    """A small well-formed model (endpoint table respected); may contain a
    fragment and fragment references."""
    dims = rng.sample(_DIMS, rng.randint(1, 3))
    count = rng.randint(1, max(1, max_elements - len(dims) - 2))
    elements = _elements(rng, count, dims, "e")

    model = Model(_name(rng))
    for dim in dims:
        model = model.add_element(Element(dim, ElementKind.DIMENSION, dim))
    for element in elements:
        model = model.add_element(element)
    fragment = None
    if rng.random() < 0.4:
        fragment = Model("frag")
        fragment = fragment.add_element(Element("fd", ElementKind.DIMENSION, "fd"))
        for fel in _elements(rng, rng.randint(1, 3), ["fd"], "f"):
            fel = Element(fel.id, fel.kind, fel.name,
                          dimension="fd" if fel.kind is ElementKind.VALUE else None,
                          attribution=fel.attribution, annotations=fel.annotations)
            fragment = fragment.add_element(fel)
        for link in _links(rng, list(fragment.elements.values())[1:]):
            fragment = fragment._append_raw_link(link)
        model = model.add_fragment("frag", fragment)
        ref = Element("frag_ref", ElementKind.FRAGMENT_REF, "frag")
        model = model.add_element(ref)
        elements.append(ref)
    for link in _links(rng, elements):
        model = model._append_raw_link(link)
    if fragment is not None and rng.random() < 0.5:
        anchor = rng.choice(elements)
        model = model._append_raw_link(Link(LinkKind.DETAILED_BY, anchor.id, "frag_ref"))
    return model


# -- diagram scanners --------------------------------------------------------

_DOT_NODE_RE = re.compile(r'^  "([^"]+)" \[')
_DOT_EDGE_RE = re.compile(r'^  "([^"]+)" -> "([^"]+)" \[label="([a-z]+)"\];$')
_MERMAID_NODE_RE = re.compile(r'^  ([a-z][a-z0-9_-]*)(\[\\|\[/|\(\[|\{\{|\[|\(|>)')
_MERMAID_EDGE_RE = re.compile(r'^  ([a-z][a-z0-9_-]*) -->\|([a-z]+)\| ([a-z][a-z0-9_-]*)$')


def scan_diagram(text: str, format: str) -> tuple[list[str], list[tuple[str, str, str]]]:
    """(node ids, (source, kind, target) edges) from rendered diagram text."""
    nodes: list[str] = []
    edges: list[tuple[str, str, str]] = []
    for line in text.splitlines():
        if format == "dot":
            if (m := _DOT_EDGE_RE.match(line)):
                edges.append((m.group(1), m.group(3), m.group(2)))
            elif (m := _DOT_NODE_RE.match(line)):
                nodes.append(m.group(1))
        else:
            if line.startswith(("  classDef", "  class ")):
                continue
            if (m := _MERMAID_EDGE_RE.match(line)):
                edges.append((m.group(1), m.group(2), m.group(3)))
            elif (m := _MERMAID_NODE_RE.match(line)):
                nodes.append(m.group(1))
    return nodes, edges


def grey_nodes(text: str, format: str) -> set[str]:
    """Node ids carrying the grey system fill."""
    out: set[str] = set()
    for line in text.splitlines():
        if format == "dot":
            if 'fillcolor="#d3d3d3"' in line and (m := _DOT_NODE_RE.match(line)):
                out.add(m.group(1))
        elif line.startswith("  class ") and line.endswith(" is"):
            out.update(line.split()[1].split(","))
    return out
