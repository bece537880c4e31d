"""Well-formedness and fairness-analysis lints over parsed models.

Diagnostic codes are stable across releases:

    E001  dangling reference (link endpoint or dimension clause)
    E002  value without a dimension
    E003  cycle in the refinement graph
    E004  link violating the endpoint-compatibility table
    E005  unknown obstacle acceptance strategy
    E006  DetailedBy reference to an unknown fragment
    W101  open obstacle (neither resolved nor accepted)
    W102  inert leaf value (no operationalization, measure or assumption)
    W103  non-canonical dimension name
    W104  free-floating assumption (no underpins link)
    W105  obstacle obstructing nothing
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ACCEPTANCE_STRATEGIES,
    Element,
    ElementKind,
    LinkKind,
    Model,
    SourceSpan,
    link_allowed,
    rule_description,
)

CANONICAL_DIMENSIONS = ("environmental", "economic", "social", "personal", "technical")

#: common variants seen in the wild, mapped to their canonical dimension
DIMENSION_ALIASES = {
    "individual": "personal",
    "environ": "environmental",
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str  # "error" | "warning"
    message: str
    elements: tuple[str, ...] = ()
    span: SourceSpan | None = None

    def render(self) -> str:
        if self.span is not None:
            loc = self.span.location()
        else:
            loc = "-:0:0"
        ids = f" [{', '.join(self.elements)}]" if self.elements else ""
        return f"{loc}: {self.code} {self.severity}: {self.message}{ids}"


def _diag(code: str, message: str, elements: tuple[str, ...] = (),
          span: SourceSpan | None = None) -> Diagnostic:
    severity = "error" if code.startswith("E") else "warning"
    return Diagnostic(code, severity, message, elements, span)


def _sort_key(d: Diagnostic):
    if d.span is not None:
        return (d.span.file, d.span.line_start, d.code, d.elements)
    return ("", 0, d.code, d.elements)


def validate(model: Model) -> list[Diagnostic]:
    """Return every finding, ordered by (file, line, code). Pure; an empty
    list means the model is valid. Declared fragments are validated too.
    """
    findings = _validate_scope(model, top=True)
    for fragment in model.fragments.values():
        findings.extend(_validate_scope(fragment, top=False))
    findings.sort(key=_sort_key)
    return findings


def _validate_scope(model: Model, *, top: bool) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    elements = model.elements

    # E001/E004/E006: link endpoint resolution and compatibility
    for link in model.links:
        src = elements.get(link.source)
        if src is None:
            out.append(_diag("E001", f"link source '{link.source}' is not defined",
                             (link.source,), link.span))
            continue
        tgt = elements.get(link.target)
        if tgt is None:
            if link.kind is LinkKind.DETAILED_BY:
                if link.target not in model.fragments:
                    out.append(_diag(
                        "E006",
                        f"'{link.source}' is detailed by unknown fragment '{link.target}'",
                        (link.source, link.target), link.span))
                continue
            out.append(_diag("E001", f"link target '{link.target}' is not defined",
                             (link.target,), link.span))
            continue
        if not link_allowed(link.kind, src.kind, tgt.kind):
            out.append(_diag(
                "E004",
                f"{link.kind.value} link from {src.kind.value} '{link.source}' to "
                f"{tgt.kind.value} '{link.target}' violates '{rule_description(link.kind)}'",
                (link.source, link.target), link.span))

    # FragmentRef elements pointing at undeclared fragments (top scope only;
    # fragments themselves cannot declare fragments)
    if top:
        for element in elements.values():
            if element.kind is ElementKind.FRAGMENT_REF and element.id not in model.fragments:
                out.append(_diag(
                    "E006", f"fragment reference '{element.id}' names no declared fragment",
                    (element.id,), element.span))

    for element in elements.values():
        out.extend(_check_element(model, element))

    out.extend(_refinement_cycles(model))
    return out


def _check_element(model: Model, element: Element) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    eid = element.id

    if element.kind is ElementKind.VALUE:
        if element.dimension is None:
            out.append(_diag("E002", f"value '{eid}' has no dimension",
                             (eid,), element.span))
        else:
            dim = model.elements.get(element.dimension)
            if dim is None or dim.kind is not ElementKind.DIMENSION:
                out.append(_diag(
                    "E001", f"value '{eid}' references unknown dimension "
                            f"'{element.dimension}'", (eid,), element.span))
            if element.dimension not in CANONICAL_DIMENSIONS:
                alias = DIMENSION_ALIASES.get(element.dimension)
                hint = f" (did you mean '{alias}'?)" if alias else ""
                out.append(_diag(
                    "W103", f"dimension '{element.dimension}' of value '{eid}' is not "
                            f"among the canonical five{hint}", (eid,), element.span))
        # W102: leaf value with nothing attached
        is_leaf = not model.incoming(eid, LinkKind.REFINES)
        attached = (model.incoming(eid, LinkKind.OPERATIONALIZES)
                    or model.incoming(eid, LinkKind.MEASURES)
                    or model.incoming(eid, LinkKind.UNDERPINS))
        if is_leaf and not attached:
            out.append(_diag("W102", f"leaf value '{eid}' is inert: nothing "
                                     f"operationalizes, measures or underpins it",
                             (eid,), element.span))

    if element.kind is ElementKind.OBSTACLE:
        strategy = element.annotation("accepted")
        if strategy is not None and strategy not in ACCEPTANCE_STRATEGIES:
            allowed = ", ".join(sorted(ACCEPTANCE_STRATEGIES))
            out.append(_diag("E005", f"obstacle '{eid}' has unknown acceptance "
                                     f"strategy '{strategy}' (one of: {allowed})",
                             (eid,), element.span))
        if not model.incoming(eid, LinkKind.RESOLVES) and strategy is None:
            out.append(_diag("W101", f"obstacle '{eid}' is open: not resolved by any "
                                     f"activity and not accepted", (eid,), element.span))
        if not model.outgoing(eid, LinkKind.OBSTRUCTS):
            out.append(_diag("W105", f"obstacle '{eid}' obstructs nothing",
                             (eid,), element.span))

    if element.kind is ElementKind.ASSUMPTION:
        if not model.outgoing(eid, LinkKind.UNDERPINS):
            out.append(_diag("W104", f"assumption '{eid}' is free-floating: it "
                                     f"underpins nothing", (eid,), element.span))

    return out


def _refinement_cycles(model: Model) -> list[Diagnostic]:
    """One E003 per strongly connected component of the refinement graph
    that contains a cycle (size > 1, or a self-loop)."""
    edges: dict[str, list[str]] = {}
    for link in model.links_of_kind(LinkKind.REFINES):
        if link.source in model.elements and link.target in model.elements:
            edges.setdefault(link.source, []).append(link.target)

    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = [0]
    components: list[list[str]] = []

    def strongconnect(node: str) -> None:
        # iterative Tarjan: recursion depth is unbounded on long chains
        work = [(node, iter(edges.get(node, ())))]
        index[node] = lowlink[node] = counter[0]
        counter[0] += 1
        stack.append(node)
        on_stack.add(node)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(edges.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                components.append(component)

    for node in edges:
        if node not in index:
            strongconnect(node)

    out: list[Diagnostic] = []
    for component in components:
        is_cycle = len(component) > 1 or component[0] in edges.get(component[0], ())
        if is_cycle:
            members = tuple(sorted(component))
            span = None
            for member in members:
                element = model.elements.get(member)
                if element is not None and element.span is not None:
                    span = element.span
                    break
            out.append(_diag("E003", "refinement cycle through "
                                     + ", ".join(f"'{m}'" for m in members),
                             members, span))
    return out


def render_diagnostics(diagnostics: list[Diagnostic]) -> str:
    return "\n".join(d.render() for d in diagnostics)
