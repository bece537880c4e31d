"""Textual concrete syntax for goal models (`.fair` files).

Grammar (normative):

    model     := "model" STRING "{" item* "}"
    item      := dimension | element | fragment
    dimension := "dimension" ID
    element   := KINDKW ID STRING clause* block?
    KINDKW    := goal | value | assumption | obstacle | indicator
               | regulation | activity | ref
    clause    := "in" ID | "@is" | "@env" | "target" STRING
               | "accepted" ID | "milestone" | "pattern" STRING
    block     := "{" relation* "}"
    relation  := RELKW ID
    RELKW     := refines | measures | regulates | operationalizes
               | obstructs | resolves | underpins | details
    fragment  := "fragment" ID "{" item* "}"

Comments run from `#` to end of line. Strings are double-quoted with
backslash escapes for `"` and `\\`. Relations are written on the source
element. Forward references are allowed; unresolved references are not
parse errors (the validator reports them as E001).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ID_RE,
    Element,
    ElementKind,
    Link,
    LinkKind,
    Model,
    ModelError,
    SourceSpan,
    link_allowed,
    rule_description,
)

KIND_KEYWORDS = {
    "goal": ElementKind.GOAL,
    "value": ElementKind.VALUE,
    "assumption": ElementKind.ASSUMPTION,
    "obstacle": ElementKind.OBSTACLE,
    "indicator": ElementKind.INDICATOR,
    "regulation": ElementKind.REGULATION,
    "activity": ElementKind.ACTIVITY,
    "ref": ElementKind.FRAGMENT_REF,
}

RELATION_KEYWORDS = {
    "refines": LinkKind.REFINES,
    "measures": LinkKind.MEASURES,
    "regulates": LinkKind.REGULATES,
    "operationalizes": LinkKind.OPERATIONALIZES,
    "obstructs": LinkKind.OBSTRUCTS,
    "resolves": LinkKind.RESOLVES,
    "underpins": LinkKind.UNDERPINS,
    "details": LinkKind.DETAILED_BY,
}

ITEM_KEYWORDS = set(KIND_KEYWORDS) | {"dimension", "fragment"}

#: canonical emission order for reserved annotation keys
RESERVED_ANNOTATIONS = ("target", "accepted", "milestone", "pattern")


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    expected: str
    found: str

    def render(self) -> str:
        return (f"{self.span.location()}: syntax error: expected {self.expected}, "
                f"found {self.found}")


class ParseFailure(Exception):
    """Raised when parsing fails; carries every recovered error."""

    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("\n".join(e.render() for e in errors))


# -- tokenizer -------------------------------------------------------------

_PUNCT = {"{": "LBRACE", "}": "RBRACE", "[": "LBRACKET", "]": "RBRACKET", ",": "COMMA"}


@dataclass(frozen=True)
class Token:
    type: str  # WORD | STRING | AT_WORD | LBRACE | RBRACE | LBRACKET | RBRACKET | COMMA | EOF
    value: str
    span: SourceSpan


def tokenize(text: str, file: str) -> tuple[list[Token], list[ParseError]]:
    tokens: list[Token] = []
    errors: list[ParseError] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def span(l0: int, c0: int, l1: int, c1: int) -> SourceSpan:
        return SourceSpan(file, l0, c0, l1, c1)

    while i < n:
        ch = text[i]
        if ch == "\r":
            i += 1
            continue
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        l0, c0 = line, col
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, span(l0, c0, l0, c0)))
            i += 1
            col += 1
            continue
        if ch == '"':
            i += 1
            col += 1
            out: list[str] = []
            closed = False
            while i < n:
                c = text[i]
                if c == "\n":
                    break
                if c == "\\" and i + 1 < n and text[i + 1] in '"\\':
                    out.append(text[i + 1])
                    i += 2
                    col += 2
                    continue
                if c == '"':
                    i += 1
                    col += 1
                    closed = True
                    break
                out.append(c)
                i += 1
                col += 1
            if not closed:
                errors.append(ParseError(span(l0, c0, line, max(col - 1, 1)),
                                         "closing '\"'", "end of line"))
            tokens.append(Token("STRING", "".join(out), span(l0, c0, line, max(col - 1, 1))))
            continue
        if ch == "@":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i + 1:j]
            width = j - i
            tokens.append(Token("AT_WORD", word, span(l0, c0, l0, c0 + width - 1)))
            i = j
            col += width
            continue
        if ch.isalnum() or ch in "_-":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_-"):
                j += 1
            word = text[i:j]
            tokens.append(Token("WORD", word, span(l0, c0, l0, c0 + (j - i) - 1)))
            col += j - i
            i = j
            continue
        errors.append(ParseError(span(l0, c0, l0, c0), "a token", repr(ch)))
        i += 1
        col += 1
    tokens.append(Token("EOF", "", span(line, col, line, col)))
    return tokens, errors


# -- parser ----------------------------------------------------------------


@dataclass
class _ElementDecl:
    element: Element
    relations: list[tuple[LinkKind, str, SourceSpan]]


class TokenStream:
    """Shared token cursor for the model and catalogue parsers."""

    def __init__(self, tokens: list[Token], errors: list[ParseError]):
        self.tokens = tokens
        self.pos = 0
        self.errors = errors

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "EOF":
            self.pos += 1
        return tok

    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok.type == "WORD" and tok.value in words

    def error(self, expected: str, tok: Token | None = None) -> None:
        tok = tok or self.peek()
        found = tok.value if tok.type != "EOF" else "end of input"
        self.errors.append(ParseError(tok.span, expected, found or tok.type))

    def expect(self, type_: str, expected: str) -> Token | None:
        tok = self.peek()
        if tok.type != type_:
            self.error(expected)
            return None
        return self.advance()

    def expect_word(self, word: str) -> Token | None:
        tok = self.peek()
        if tok.type != "WORD" or tok.value != word:
            self.error(f"'{word}'")
            return None
        return self.advance()

    def skip_to_words(self, words: set[str], *, stop_at_rbrace: bool = True) -> None:
        """Panic-mode recovery: drop tokens until a safe synchronization point."""
        while True:
            tok = self.peek()
            if tok.type == "EOF":
                return
            if tok.type == "WORD" and tok.value in words:
                return
            if stop_at_rbrace and tok.type == "RBRACE":
                return
            self.advance()


def parse(text: str, file: str = "<input>") -> Model:
    """Parse `.fair` source into a Model. Raises ParseFailure with every
    recovered error; unresolved references are deferred to the validator.
    """
    tokens, errors = tokenize(text, file)
    stream = TokenStream(tokens, errors)

    stream.expect_word("model")
    name_tok = stream.expect("STRING", "model name string")
    name = name_tok.value if name_tok else ""
    stream.expect("LBRACE", "'{'")
    decls, fragments = _parse_items(stream, allow_fragments=True)
    stream.expect("RBRACE", "'}'")
    if stream.peek().type != "EOF":
        stream.error("end of input")

    model = _build_scope(name, decls, stream.errors)
    for frag_name, (frag_decls, frag_span) in fragments.items():
        fragment = _build_scope(frag_name, frag_decls, stream.errors)
        try:
            model = model.add_fragment(frag_name, fragment)
        except ModelError as exc:
            stream.errors.append(ParseError(frag_span, "a fresh fragment name", str(exc)))

    if stream.errors:
        raise ParseFailure(stream.errors)
    return model


def _parse_items(stream: TokenStream, *, allow_fragments: bool):
    decls: list[_ElementDecl] = []
    fragments: dict[str, tuple[list[_ElementDecl], SourceSpan]] = {}
    while True:
        tok = stream.peek()
        if tok.type in ("RBRACE", "EOF"):
            break
        if tok.type == "WORD" and tok.value == "dimension":
            stream.advance()
            id_tok = stream.expect("WORD", "dimension id")
            if id_tok and ID_RE.match(id_tok.value):
                decls.append(_ElementDecl(
                    Element(id_tok.value, ElementKind.DIMENSION, id_tok.value,
                            span=id_tok.span), []))
            elif id_tok:
                stream.error("a valid slug id", id_tok)
            continue
        if tok.type == "WORD" and tok.value == "fragment":
            stream.advance()
            id_tok = stream.expect("WORD", "fragment name")
            frag_name = id_tok.value if id_tok else "?"
            if not allow_fragments:
                stream.error("no nested fragment", tok)
            stream.expect("LBRACE", "'{'")
            inner_decls, _ = _parse_items(stream, allow_fragments=False)
            stream.expect("RBRACE", "'}'")
            if allow_fragments and id_tok:
                if not ID_RE.match(frag_name):
                    stream.error("a valid slug id", id_tok)
                elif frag_name in fragments:
                    stream.error("a fresh fragment name", id_tok)
                else:
                    fragments[frag_name] = (inner_decls, id_tok.span)
            continue
        if tok.type == "WORD" and tok.value in KIND_KEYWORDS:
            decl = _parse_element(stream)
            if decl is not None:
                decls.append(decl)
            continue
        stream.error("an element kind, 'dimension' or 'fragment'")
        stream.skip_to_words(ITEM_KEYWORDS)
    return decls, fragments


def _parse_element(stream: TokenStream) -> _ElementDecl | None:
    kind_tok = stream.advance()
    kind = KIND_KEYWORDS[kind_tok.value]
    id_tok = stream.expect("WORD", "element id")
    if id_tok is None:
        stream.skip_to_words(ITEM_KEYWORDS)
        return None
    if not ID_RE.match(id_tok.value):
        stream.error("a valid slug id", id_tok)
        stream.skip_to_words(ITEM_KEYWORDS)
        return None
    name_tok = stream.expect("STRING", "display name string")
    if name_tok is None:
        stream.skip_to_words(ITEM_KEYWORDS)
        return None

    dimension: str | None = None
    attribution = "unspecified"
    annotations: list[tuple[str, str]] = []
    end_span = name_tok.span

    while True:
        tok = stream.peek()
        if tok.type == "AT_WORD":
            stream.advance()
            if tok.value == "is":
                attribution = "system"
            elif tok.value == "env":
                attribution = "environment"
            else:
                stream.error("'@is' or '@env'", tok)
            end_span = tok.span
            continue
        if tok.type != "WORD":
            break
        if tok.value == "in":
            stream.advance()
            dim_tok = stream.expect("WORD", "dimension id")
            if dim_tok:
                if kind is not ElementKind.VALUE:
                    stream.error("'in' clause only on value elements", tok)
                else:
                    dimension = dim_tok.value
                end_span = dim_tok.span
            continue
        if tok.value in ("target", "pattern"):
            stream.advance()
            val_tok = stream.expect("STRING", f"{tok.value} string")
            if val_tok:
                annotations.append((tok.value, val_tok.value))
                end_span = val_tok.span
            continue
        if tok.value == "accepted":
            stream.advance()
            val_tok = stream.expect("WORD", "acceptance strategy")
            if val_tok:
                if kind is not ElementKind.OBSTACLE:
                    stream.error("'accepted' clause only on obstacles", tok)
                else:
                    annotations.append(("accepted", val_tok.value))
                end_span = val_tok.span
            continue
        if tok.value == "milestone":
            stream.advance()
            annotations.append(("milestone", "true"))
            end_span = tok.span
            continue
        break

    relations: list[tuple[LinkKind, str, SourceSpan]] = []
    if stream.peek().type == "LBRACE":
        stream.advance()
        while True:
            tok = stream.peek()
            if tok.type in ("RBRACE", "EOF"):
                break
            if tok.type == "WORD" and tok.value in RELATION_KEYWORDS:
                stream.advance()
                tgt_tok = stream.expect("WORD", "target id")
                if tgt_tok:
                    relations.append((RELATION_KEYWORDS[tok.value], tgt_tok.value,
                                      SourceSpan(tok.span.file,
                                                 tok.span.line_start, tok.span.col_start,
                                                 tgt_tok.span.line_end, tgt_tok.span.col_end)))
                continue
            stream.error("a relation keyword")
            stream.skip_to_words(set(RELATION_KEYWORDS))
        stream.expect("RBRACE", "'}'")

    span = SourceSpan(kind_tok.span.file, kind_tok.span.line_start, kind_tok.span.col_start,
                      end_span.line_end, end_span.col_end)
    try:
        element = Element(id_tok.value, kind, name_tok.value, dimension=dimension,
                          attribution=attribution, annotations=tuple(annotations),
                          span=span)
    except ModelError as exc:
        stream.errors.append(ParseError(span, "a well-formed element", str(exc)))
        return None
    return _ElementDecl(element, relations)


def _build_scope(name: str, decls: list[_ElementDecl], errors: list[ParseError]) -> Model:
    model = Model(name)
    for decl in decls:
        try:
            model = model.add_element(decl.element)
        except ModelError as exc:
            assert decl.element.span is not None
            errors.append(ParseError(decl.element.span, "a fresh element id", str(exc)))
    for decl in decls:
        if decl.element.id not in model.elements:
            continue
        for kind, target, span in decl.relations:
            tgt = model.elements.get(target)
            if tgt is not None and not link_allowed(kind, decl.element.kind, tgt.kind):
                errors.append(ParseError(
                    span, f"endpoints satisfying '{rule_description(kind)}'",
                    f"{decl.element.kind.value} -> {tgt.kind.value}"))
                continue
            try:
                # unresolved targets stay in the model for the validator (E001/E006)
                model = model._append_raw_link(Link(kind, decl.element.id, target, span))
            except ModelError as exc:
                errors.append(ParseError(span, "a fresh link", str(exc)))
    return model


# -- serializer ------------------------------------------------------------


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


_KIND_TO_KEYWORD = {v: k for k, v in KIND_KEYWORDS.items()}
_LINK_TO_KEYWORD = {v: k for k, v in RELATION_KEYWORDS.items()}


def _element_line(element: Element) -> str:
    parts = [_KIND_TO_KEYWORD[element.kind], element.id, _quote(element.name)]
    if element.dimension is not None:
        parts += ["in", element.dimension]
    if element.attribution == "system":
        parts.append("@is")
    elif element.attribution == "environment":
        parts.append("@env")
    for key in RESERVED_ANNOTATIONS:
        value = element.annotation(key)
        if value is None:
            continue
        if key == "milestone":
            parts.append("milestone")
        elif key == "accepted":
            parts += ["accepted", value]
        else:
            parts += [key, _quote(value)]
    return " ".join(parts)


def _serialize_body(model: Model, indent: str, lines: list[str]) -> None:
    dims = [e for e in model.elements.values() if e.kind is ElementKind.DIMENSION]
    others = [e for e in model.elements.values() if e.kind is not ElementKind.DIMENSION]
    for dim in dims:
        lines.append(f"{indent}dimension {dim.id}")
    for element in others:
        out = [l for l in model.links if l.source == element.id]
        header = indent + _element_line(element)
        if not out:
            lines.append(header)
            continue
        lines.append(header + " {")
        for link in out:
            lines.append(f"{indent}  {_LINK_TO_KEYWORD[link.kind]} {link.target}")
        lines.append(indent + "}")


def serialize(model: Model) -> str:
    """Canonical text form: dimensions first, elements in insertion order,
    links grouped under their source element. Deterministic; LF endings.
    """
    lines = [f"model {_quote(model.name)} {{"]
    _serialize_body(model, "  ", lines)
    for frag_name, fragment in model.fragments.items():
        lines.append(f"  fragment {frag_name} {{")
        _serialize_body(fragment, "    ", lines)
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize_fragment_body(fragment: Model, indent: str) -> str:
    """Fragment items only (used by the catalogue serializer)."""
    lines: list[str] = []
    _serialize_body(fragment, indent, lines)
    return "\n".join(lines) + ("\n" if lines else "")
