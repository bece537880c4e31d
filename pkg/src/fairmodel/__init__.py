"""Toolchain for fairness/sustainability goal models: textual language,
validation, pattern catalogue, weaving, analysis reports and diagram output.
"""

from .model import (
    Element,
    ElementKind,
    Link,
    LinkKind,
    Model,
    SourceSpan,
    build_model,
)
from .dsl import ParseError, ParseFailure, parse, serialize
from .validator import Diagnostic, validate
from .catalogue import Catalogue, PatternCard, builtin
from .weave import WeaveRequest, apply, import_fragment, instantiate
from .render import render

__all__ = [
    "Element",
    "ElementKind",
    "Link",
    "LinkKind",
    "Model",
    "SourceSpan",
    "build_model",
    "ParseError",
    "ParseFailure",
    "parse",
    "serialize",
    "Diagnostic",
    "validate",
    "Catalogue",
    "PatternCard",
    "builtin",
    "WeaveRequest",
    "apply",
    "import_fragment",
    "instantiate",
    "render",
]

__version__ = "0.1.0"
