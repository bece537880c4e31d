"""Compile models into DOT or Mermaid diagram source.

Visual conventions: system-attributed nodes get a grey fill, obstacles a
lightning marker (octagon in DOT, hexagon in Mermaid; explosion glyphs are
unavailable in both grammars), fragment anchors a hatched/dashed style, and
value dimensions a `[dimension]` label suffix. Output is deterministic; no
layout engine is embedded.
"""

from __future__ import annotations

from .model import Element, ElementKind, LinkKind, Model
from .validator import Diagnostic, validate

GREY_FILL = "#d3d3d3"

FORMATS = ("dot", "mermaid")

DOT_SHAPES: dict[ElementKind, str] = {
    ElementKind.GOAL: "parallelogram",
    ElementKind.VALUE: "box",  # style=rounded
    ElementKind.ASSUMPTION: "trapezium",
    ElementKind.OBSTACLE: "octagon",
    ElementKind.INDICATOR: "ellipse",
    ElementKind.REGULATION: "note",
    ElementKind.ACTIVITY: "box",
    ElementKind.FRAGMENT_REF: "box",  # style=dashed
}


class RenderError(Exception):
    pass


class InvalidModel(RenderError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("model has validation errors:\n"
                         + "\n".join(d.render() for d in diagnostics))


class UnknownFormat(RenderError):
    pass


def render(model: Model, format: str) -> str:
    """Render a model that validates with zero errors. One node per
    non-dimension element, one labeled edge per link.
    """
    if format not in FORMATS:
        raise UnknownFormat(f"unknown format {format!r} (one of: {', '.join(FORMATS)})")
    errors = [d for d in validate(model) if d.severity == "error"]
    if errors:
        raise InvalidModel(errors)
    if format == "dot":
        return _render_dot(model)
    return _render_mermaid(model)


def _label(element: Element) -> str:
    label = element.name
    if element.kind is ElementKind.OBSTACLE:
        label = "⚡ " + label
    if element.dimension is not None:
        label += f" [{element.dimension}]"
    return label


def _anchor_ids(model: Model) -> set[str]:
    return {l.source for l in model.links_of_kind(LinkKind.DETAILED_BY)}


def _drawable(model: Model) -> list[Element]:
    return [e for e in model.elements.values() if e.kind is not ElementKind.DIMENSION]


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _fragment_only_targets(model: Model) -> list[str]:
    """DetailedBy targets that are bare fragment names (no FragmentRef
    element); they get a synthetic dashed node so no edge dangles."""
    out: list[str] = []
    for link in model.links_of_kind(LinkKind.DETAILED_BY):
        if link.target not in model.elements and link.target not in out:
            out.append(link.target)
    return out


def _render_dot(model: Model) -> str:
    anchors = _anchor_ids(model)
    lines = [f'digraph "{_dot_escape(model.name)}" {{', "  rankdir=TB;"]
    for name in _fragment_only_targets(model):
        lines.append(f'  "{name}" [label="{_dot_escape(name)}", shape=box, '
                     f'style="dashed"];')
    for element in _drawable(model):
        styles = []
        if element.kind is ElementKind.VALUE:
            styles.append("rounded")
        if element.kind is ElementKind.FRAGMENT_REF:
            styles.append("dashed")
        if element.id in anchors:
            styles.append("diagonals")
        attrs = [f'label="{_dot_escape(_label(element))}"',
                 f"shape={DOT_SHAPES[element.kind]}"]
        if element.attribution == "system":
            styles.append("filled")
            attrs.append(f'fillcolor="{GREY_FILL}"')
        if styles:
            attrs.append(f'style="{",".join(styles)}"')
        lines.append(f'  "{element.id}" [{", ".join(attrs)}];')
    for link in model.links:
        lines.append(f'  "{link.source}" -> "{link.target}" [label="{link.kind.value}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


_MERMAID_BRACKETS: dict[ElementKind, tuple[str, str]] = {
    ElementKind.GOAL: ("[/", "/]"),
    ElementKind.VALUE: ("(", ")"),
    ElementKind.ASSUMPTION: ("[\\", "\\]"),
    ElementKind.OBSTACLE: ("{{", "}}"),
    ElementKind.INDICATOR: ("([", "])"),
    ElementKind.REGULATION: (">", "]"),
    ElementKind.ACTIVITY: ("[", "]"),
    ElementKind.FRAGMENT_REF: ("[", "]"),
}


def _mermaid_escape(text: str) -> str:
    return text.replace('"', "&quot;")


def _render_mermaid(model: Model) -> str:
    anchors = _anchor_ids(model)
    lines = ["flowchart TD"]
    is_nodes: list[str] = []
    dashed_nodes: list[str] = []
    for name in _fragment_only_targets(model):
        lines.append(f'  {name}["{_mermaid_escape(name)}"]')
        dashed_nodes.append(name)
    for element in _drawable(model):
        opening, closing = _MERMAID_BRACKETS[element.kind]
        lines.append(f'  {element.id}{opening}"{_mermaid_escape(_label(element))}"{closing}')
        if element.attribution == "system":
            is_nodes.append(element.id)
        if element.kind is ElementKind.FRAGMENT_REF or element.id in anchors:
            dashed_nodes.append(element.id)
    for link in model.links:
        lines.append(f"  {link.source} -->|{link.kind.value}| {link.target}")
    lines.append(f"  classDef is fill:{GREY_FILL}")
    lines.append("  classDef detailed stroke-dasharray: 5 5")
    if is_nodes:
        lines.append(f"  class {','.join(is_nodes)} is")
    if dashed_nodes:
        lines.append(f"  class {','.join(dashed_nodes)} detailed")
    return "\n".join(lines) + "\n"
