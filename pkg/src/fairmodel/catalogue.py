"""Pattern cards and catalogues (`.fairpat` files).

A catalogue groups pattern cards. Each card carries classification metadata
(category within the improvement cycle, sustainability dimensions), template
prose fields and a generic archetype fragment whose display names may contain
`<Word>` placeholders. The built-in catalogue ships six fairness patterns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from . import dsl
from .model import Element, ElementKind, Model, PLACEHOLDER_RE
from .validator import CANONICAL_DIMENSIONS, Diagnostic, validate

#: improvement-cycle stages (four cycle stages plus central governance)
STAGES = ("design", "adoption", "implementation", "evolution", "governance")


class CatalogueError(Exception):
    pass


class UnknownCategory(CatalogueError):
    pass


class InvalidArchetype(CatalogueError):
    def __init__(self, card_name: str, diagnostics: list[Diagnostic]):
        self.card_name = card_name
        self.diagnostics = diagnostics
        details = "; ".join(d.render() for d in diagnostics)
        super().__init__(f"archetype of pattern '{card_name}' is invalid: {details}")


@dataclass(frozen=True)
class PatternCard:
    name: str
    title: str
    category_primary: str
    category_secondary: str | None
    dimensions: tuple[str, ...]
    summary: str
    applicability: str
    content: str
    discussion: str | None
    examples: tuple[str, ...]
    related: tuple[str, ...]
    archetype: Model

    def categories(self) -> tuple[str, ...]:
        if self.category_secondary is None:
            return (self.category_primary,)
        return (self.category_primary, self.category_secondary)

    def placeholders(self) -> set[str]:
        return self.archetype.placeholders()

    def census(self) -> tuple[int, int]:
        """(non-dimension element count, internal link count) of the archetype."""
        n = sum(1 for e in self.archetype.elements.values()
                if e.kind is not ElementKind.DIMENSION)
        return n, len(self.archetype.links)


@dataclass(frozen=True)
class Catalogue:
    name: str
    version: str
    cards: dict[str, PatternCard] = field(default_factory=dict)
    notes: tuple[str, ...] = ()  # info-level findings from loading


@lru_cache(maxsize=1)
def builtin() -> Catalogue:
    """The six built-in fairness patterns."""
    text = resources.files("fairmodel").joinpath("data/builtin.fairpat").read_text("utf-8")
    return load(text, file="<builtin>")


# -- loading -----------------------------------------------------------------

_PROSE_FIELDS = ("title", "summary", "applicability", "content", "discussion")


def load(text: str, file: str = "<catalogue>") -> Catalogue:
    """Parse catalogue text; archetypes are parsed with the model grammar and
    must validate with zero errors after trivial placeholder substitution.
    """
    tokens, errors = dsl.tokenize(text, file)
    stream = dsl.TokenStream(tokens, errors)

    stream.expect_word("catalogue")
    name_tok = stream.expect("STRING", "catalogue name string")
    stream.expect_word("version")
    version_tok = stream.expect("STRING", "version string")
    stream.expect("LBRACE", "'{'")

    raw_cards: list[dict] = []
    while stream.peek().type not in ("RBRACE", "EOF"):
        if stream.at_word("pattern"):
            card = _parse_card(stream)
            if card is not None:
                raw_cards.append(card)
            continue
        stream.error("'pattern'")
        stream.skip_to_words({"pattern"})
    stream.expect("RBRACE", "'}'")
    if stream.errors:
        raise dsl.ParseFailure(stream.errors)

    cards: dict[str, PatternCard] = {}
    for raw in raw_cards:
        card = _finish_card(raw)
        if card.name in cards:
            raise CatalogueError(f"duplicate pattern name '{card.name}'")
        cards[card.name] = card

    notes = tuple(
        f"pattern '{card.name}' relates to undocumented pattern '{rel}'"
        for card in cards.values()
        for rel in card.related
        if rel not in cards
    )
    return Catalogue(name_tok.value if name_tok else "",
                     version_tok.value if version_tok else "",
                     cards, notes)


def _parse_card(stream: dsl.TokenStream) -> dict | None:
    stream.advance()  # 'pattern'
    name_tok = stream.expect("WORD", "pattern slug")
    raw: dict = {"name": name_tok.value if name_tok else "?",
                 "examples": [], "related": (), "dimensions": (),
                 "category_primary": None, "category_secondary": None,
                 "archetype_decls": None}
    stream.expect("LBRACE", "'{'")
    while stream.peek().type not in ("RBRACE", "EOF"):
        tok = stream.peek()
        if tok.type != "WORD":
            stream.error("a card field")
            stream.advance()
            continue
        word = tok.value
        if word in _PROSE_FIELDS:
            stream.advance()
            val = stream.expect("STRING", f"{word} string")
            if val:
                raw[word] = val.value
            continue
        if word == "example":
            stream.advance()
            val = stream.expect("STRING", "example string")
            if val:
                raw["examples"].append(val.value)
            continue
        if word == "category":
            stream.advance()
            primary = stream.expect("WORD", "category name")
            if primary:
                raw["category_primary"] = primary.value
            if stream.peek().type == "LBRACKET":
                stream.advance()
                secondary = stream.expect("WORD", "secondary category")
                if secondary:
                    raw["category_secondary"] = secondary.value
                stream.expect("RBRACKET", "']'")
            continue
        if word in ("dimensions", "related"):
            stream.advance()
            raw[word] = tuple(_parse_word_list(stream))
            continue
        if word == "archetype":
            stream.advance()
            stream.expect("LBRACE", "'{'")
            decls, _ = dsl._parse_items(stream, allow_fragments=False)
            stream.expect("RBRACE", "'}'")
            raw["archetype_decls"] = decls
            continue
        stream.error("a card field")
        stream.advance()
    stream.expect("RBRACE", "'}'")
    return raw


def _parse_word_list(stream: dsl.TokenStream) -> list[str]:
    words: list[str] = []
    stream.expect("LBRACKET", "'['")
    while stream.peek().type not in ("RBRACKET", "EOF"):
        tok = stream.peek()
        if tok.type == "WORD":
            words.append(tok.value)
            stream.advance()
        elif tok.type == "COMMA":
            stream.advance()
        else:
            stream.error("an id or ']'")
            stream.advance()
    stream.expect("RBRACKET", "']'")
    return words


def _finish_card(raw: dict) -> PatternCard:
    name = raw["name"]
    primary = raw["category_primary"]
    if primary not in STAGES:
        raise UnknownCategory(f"pattern '{name}': unknown category {primary!r}")
    secondary = raw["category_secondary"]
    if secondary is not None and secondary not in STAGES:
        raise UnknownCategory(f"pattern '{name}': unknown category {secondary!r}")
    for dim in raw["dimensions"]:
        if dim not in CANONICAL_DIMENSIONS:
            raise CatalogueError(f"pattern '{name}': unknown dimension {dim!r}")

    decls = raw["archetype_decls"]
    archetype = dsl._build_scope(name, decls or [], errors := [])
    if errors:
        raise dsl.ParseFailure(errors)
    probe = _substitute_trivially(archetype)
    problems = [d for d in validate(probe) if d.severity == "error"]
    if problems:
        raise InvalidArchetype(name, problems)

    return PatternCard(
        name=name,
        title=raw.get("title", name),
        category_primary=primary,
        category_secondary=secondary,
        dimensions=raw["dimensions"],
        summary=raw.get("summary", ""),
        applicability=raw.get("applicability", ""),
        content=raw.get("content", ""),
        discussion=raw.get("discussion"),
        examples=tuple(raw["examples"]),
        related=raw["related"],
        archetype=archetype,
    )


def _substitute_trivially(archetype: Model) -> Model:
    out = Model(archetype.name)
    for element in archetype.elements.values():
        trivial = PLACEHOLDER_RE.sub(lambda m: m.group(1), element.name)
        out = out.add_element(Element(element.id, element.kind, trivial,
                                      dimension=element.dimension,
                                      attribution=element.attribution,
                                      annotations=element.annotations))
    for link in archetype.links:
        out = out._append_raw_link(link)
    return out


# -- serialization -----------------------------------------------------------


def dump(catalogue: Catalogue) -> str:
    lines = [f"catalogue {dsl._quote(catalogue.name)} version "
             f"{dsl._quote(catalogue.version)} {{"]
    for card in catalogue.cards.values():
        lines.append(f"  pattern {card.name} {{")
        lines.append(f"    title {dsl._quote(card.title)}")
        cat = f"    category {card.category_primary}"
        if card.category_secondary:
            cat += f" [{card.category_secondary}]"
        lines.append(cat)
        lines.append(f"    dimensions [{', '.join(card.dimensions)}]")
        lines.append(f"    summary {dsl._quote(card.summary)}")
        lines.append(f"    applicability {dsl._quote(card.applicability)}")
        lines.append(f"    content {dsl._quote(card.content)}")
        if card.discussion is not None:
            lines.append(f"    discussion {dsl._quote(card.discussion)}")
        for example in card.examples:
            lines.append(f"    example {dsl._quote(example)}")
        if card.related:
            lines.append(f"    related [{', '.join(card.related)}]")
        lines.append("    archetype {")
        body = dsl.serialize_fragment_body(card.archetype, "      ")
        if body:
            lines.append(body.rstrip("\n"))
        lines.append("    }")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- search ------------------------------------------------------------------


def search(catalogue: Catalogue, category: str | None = None,
           dimension: str | None = None, keyword: str | None = None
           ) -> list[PatternCard]:
    """Conjunctive filtering; keyword matches case-insensitively against
    title, summary and content. Ranking: keyword match count descending,
    then name ascending. An empty query returns all cards name-sorted.
    """
    scored: list[tuple[int, str, PatternCard]] = []
    for card in catalogue.cards.values():
        if category is not None and category not in card.categories():
            continue
        if dimension is not None and dimension not in card.dimensions:
            continue
        hits = 0
        if keyword is not None:
            haystack = f"{card.title}\n{card.summary}\n{card.content}".lower()
            hits = haystack.count(keyword.lower())
            if hits == 0:
                continue
        scored.append((-hits, card.name, card))
    scored.sort(key=lambda t: (t[0], t[1]))
    return [card for _, _, card in scored]
