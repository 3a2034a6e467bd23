"""The ``.p6`` presentation language: parse, serialize, compile, emit."""

from .ast import Convention, FamilySpec
from .cas import DIALECTS, emit_cas
from .compiler import compile_spec
from .evaluate import ParamBinding, expand
from .parser import Diagnostic, parse
from .serialize import serialize

__all__ = [
    "Convention", "FamilySpec", "ParamBinding", "Diagnostic", "DIALECTS",
    "parse", "serialize", "compile_spec", "expand", "emit_cas",
]
