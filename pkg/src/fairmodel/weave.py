"""Instantiate pattern archetypes and graft them into models.

`instantiate` substitutes placeholder bindings into an archetype and stamps
provenance; `apply` inserts the (optionally selected) archetype elements into
a model under a fresh id prefix and links the archetype root to an anchor
element; `import_fragment` defers instead, pointing an element at a fragment
detailed in its own diagram.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .catalogue import Catalogue, PatternCard
from .model import (
    PLACEHOLDER_RE,
    Element,
    ElementKind,
    IncompatibleEndpoints,
    Link,
    LinkKind,
    Model,
    ModelError,
    UnknownEndpoint,
    link_allowed,
    slugify,
)


class WeaveError(ModelError):
    pass


class MissingBinding(WeaveError):
    def __init__(self, placeholders: list[str]):
        self.placeholders = placeholders
        super().__init__("missing bindings for placeholders: "
                         + ", ".join(placeholders))


class UnknownPlaceholder(WeaveError):
    def __init__(self, names: list[str]):
        self.names = names
        super().__init__("bindings name absent placeholders: " + ", ".join(names))


class UnknownAnchor(WeaveError):
    pass


class UnknownPattern(WeaveError):
    pass


class UnknownFragment(WeaveError):
    pass


class PrefixCollision(WeaveError):
    pass


class SelectionNotClosed(WeaveError):
    pass


@dataclass(frozen=True)
class WeaveRequest:
    name: str  # pattern name in the catalogue, or fragment name in the model
    anchor: str
    prefix: str
    bindings: dict[str, str] = field(default_factory=dict)
    selection: tuple[str, ...] | None = None  # archetype element ids
    attach_kind: LinkKind | None = None  # default: Refines (Obstructs for obstacle roots)


@dataclass(frozen=True)
class Instantiation:
    fragment: Model
    id_map: dict[str, str]  # archetype id -> instantiated id


def instantiate(card: PatternCard, bindings: dict[str, str]) -> Model:
    """Substitute bindings into every placeholder occurrence, re-slugify the
    ids of renamed elements and stamp the card name as `pattern` provenance.
    """
    return _instantiate(card.archetype, bindings, provenance=card.name).fragment


def _instantiate(archetype: Model, bindings: dict[str, str],
                 provenance: str) -> Instantiation:
    wanted = archetype.placeholders()
    missing = sorted(wanted - set(bindings))
    if missing:
        raise MissingBinding(missing)
    extra = sorted(set(bindings) - wanted)
    if extra:
        raise UnknownPlaceholder(extra)

    id_map: dict[str, str] = {}
    elements: list[Element] = []
    for element in archetype.elements.values():
        name = PLACEHOLDER_RE.sub(lambda m: bindings[m.group(1)], element.name)
        new_id = slugify(name) if name != element.name else element.id
        id_map[element.id] = new_id
        if element.kind is ElementKind.DIMENSION:
            elements.append(replace(element, id=new_id, name=name))
        else:
            elements.append(replace(element, id=new_id, name=name)
                            .with_annotation("pattern", provenance))

    out = Model(archetype.name)
    for element in elements:
        out = out.add_element(element)
    for link in archetype.links:
        out = out._append_raw_link(Link(link.kind, id_map[link.source],
                                        id_map[link.target]))
    return Instantiation(out, id_map)


def archetype_root(archetype: Model) -> Element:
    """The element grafted to the anchor: first non-dimension element."""
    for element in archetype.elements.values():
        if element.kind is not ElementKind.DIMENSION:
            return element
    raise WeaveError("archetype has no elements")


def default_attach_kind(root: Element) -> LinkKind:
    return LinkKind.OBSTRUCTS if root.kind is ElementKind.OBSTACLE else LinkKind.REFINES


def apply(model: Model, request: WeaveRequest, catalogue: Catalogue) -> Model:
    """Unfold a pattern (or a plain fragment of the model) at an anchor.

    Selected archetype elements are inserted with `prefix__` prepended to
    their ids, internal links are re-targeted, and the archetype root is
    linked to the anchor. Dimension declarations merge unprefixed.
    """
    anchor = model.elements.get(request.anchor)
    if anchor is None:
        raise UnknownAnchor(f"anchor element '{request.anchor}' is not defined")

    card = catalogue.cards.get(request.name)
    if card is not None:
        source = card.archetype
        provenance = card.name
    elif request.name in model.fragments:
        source = model.fragments[request.name]
        provenance = request.name
    else:
        raise UnknownPattern(f"'{request.name}' names no catalogue pattern "
                             f"and no model fragment")

    inst = _instantiate(source, request.bindings, provenance)

    if request.selection is None:
        selected = {e.id for e in source.elements.values()
                    if e.kind is not ElementKind.DIMENSION}
    else:
        selected = set(request.selection)
        unknown = sorted(selected - set(source.elements))
        if unknown:
            raise SelectionNotClosed("selection names unknown archetype elements: "
                                     + ", ".join(unknown))

    root = archetype_root(source)
    if root.id not in selected:
        raise SelectionNotClosed(f"selection must include the archetype root "
                                 f"'{root.id}'")
    for link in source.links:
        if link.source in selected and link.target not in selected:
            raise SelectionNotClosed(
                f"selected '{link.source}' has a {link.kind.value} link to "
                f"unselected '{link.target}'")

    attach = request.attach_kind or default_attach_kind(root)
    root_inst = inst.fragment.element(inst.id_map[root.id])
    if not link_allowed(attach, root_inst.kind, anchor.kind):
        raise IncompatibleEndpoints(attach, root_inst.kind, anchor.kind)

    marker = request.prefix + "__"
    if any(eid.startswith(marker) for eid in model.elements):
        raise PrefixCollision(f"prefix '{request.prefix}' already used in the model")

    out = model
    rename: dict[str, str] = {}
    for element in inst.fragment.elements.values():
        if element.kind is ElementKind.DIMENSION:
            if element.id not in out.elements:
                out = out.add_element(element)
            continue
        old = next(k for k, v in inst.id_map.items() if v == element.id)
        if old not in selected:
            continue
        new_id = marker + element.id
        rename[element.id] = new_id
        dim = element.dimension
        out = out.add_element(replace(element, id=new_id, dimension=dim))
    for link in inst.fragment.links:
        if link.source in rename and link.target in rename:
            out = out.add_link(link.kind, rename[link.source], rename[link.target])
    out = out.add_link(attach, rename[root_inst.id], anchor.id)
    return out


def import_fragment(model: Model, element_id: str, fragment_name: str) -> Model:
    """Point an element at a fragment detailed separately (DetailedBy link);
    the renderer hatches the anchor.
    """
    if element_id not in model.elements:
        raise UnknownEndpoint(f"unknown element '{element_id}'")
    fragment = model.fragments.get(fragment_name)
    if fragment is None:
        raise UnknownFragment(f"fragment '{fragment_name}' is not declared")
    out = model
    ref = out.elements.get(fragment_name)
    if ref is None:
        out = out.add_element(Element(fragment_name, ElementKind.FRAGMENT_REF,
                                      fragment.name))
    elif ref.kind is not ElementKind.FRAGMENT_REF:
        raise WeaveError(f"element id '{fragment_name}' already bound to a "
                         f"{ref.kind.value}, cannot reference the fragment")
    return out.add_link(LinkKind.DETAILED_BY, element_id, fragment_name)
