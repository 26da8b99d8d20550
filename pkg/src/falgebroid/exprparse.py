"""Expression and structure-file parsing.

Expressions use standard infix notation over declared variables with
integer literals, +, -, *, /, unary minus and ^ with non-negative
integer exponents. There is no implicit multiplication. Parsing
evaluates directly into exact rational functions.

Structure files are JSON documents with fields base_vars, rank,
product, bracket, prelie, anchor and identity; tensor entries are
expression strings.
"""

from __future__ import annotations

import json

from .errors import DivisionByZero, ExprSyntaxError, SchemaError, ShapeError, UnknownVariable
from .ring import RatFunc

_OPS = set("+-*/^()")


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "_#"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(i, f"valid token, found {ch!r}")
    tokens.append(_Token("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], variables: list[str]):
        self.tokens = tokens
        self.pos = 0
        self.variables = list(variables)
        self.index = {name: i for i, name in enumerate(self.variables)}
        self.nvars = len(self.variables)

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ExprSyntaxError(tok.pos, f"{kind!r}")
        return self.advance()

    def parse(self) -> RatFunc:
        value = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ExprSyntaxError(tok.pos, "end of expression or operator")
        return value

    def expr(self) -> RatFunc:
        value = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance()
            rhs = self.term()
            value = value + rhs if op.kind == "+" else value - rhs
        return value

    def term(self) -> RatFunc:
        value = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance()
            rhs = self.unary()
            if op.kind == "*":
                value = value * rhs
            else:
                try:
                    value = value / rhs
                except DivisionByZero:
                    raise ExprSyntaxError(op.pos, "nonzero divisor")
        return value

    def unary(self) -> RatFunc:
        if self.peek().kind == "-":
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> RatFunc:
        value = self.atom()
        while self.peek().kind == "^":
            self.advance()
            tok = self.peek()
            if tok.kind != "int":
                raise ExprSyntaxError(tok.pos, "non-negative integer exponent")
            self.advance()
            value = value ** int(tok.text)
        return value

    def atom(self) -> RatFunc:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return RatFunc.const(self.nvars, int(tok.text))
        if tok.kind == "ident":
            self.advance()
            i = self.index.get(tok.text)
            if i is None:
                raise UnknownVariable(tok.text, tok.pos)
            return RatFunc.var(self.nvars, i)
        if tok.kind == "(":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        raise ExprSyntaxError(tok.pos, "integer, variable or '('")


def parse_expr(text: str, variables: list[str]) -> RatFunc:
    """Parse expression text over the given variable names into a RatFunc."""
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError(0, "non-empty expression")
    return _Parser(_tokenize(text), variables).parse()


def print_expr(f: RatFunc, variables: list[str]) -> str:
    """Render a rational function as text that parse_expr accepts."""
    return f.format(list(variables))


# -- structure files -----------------------------------------------------


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}{key}", "missing required field")
    return doc[key]


def _parse_tensor(raw, rank: int, variables: list[str], path: str):
    """Parse a k-major rank x rank x rank nested array of expression strings."""
    if not isinstance(raw, list) or len(raw) != rank:
        raise SchemaError(path, f"expected list of {rank} matrices")
    tensor = []
    for k, mat in enumerate(raw):
        if not isinstance(mat, list) or len(mat) != rank:
            raise SchemaError(f"{path}[{k}]", f"expected {rank} rows")
        rows = []
        for i, row in enumerate(mat):
            if not isinstance(row, list) or len(row) != rank:
                raise SchemaError(f"{path}[{k}][{i}]", f"expected {rank} entries")
            entries = []
            for j, cell in enumerate(row):
                if not isinstance(cell, str):
                    raise SchemaError(f"{path}[{k}][{i}][{j}]", "expected expression string")
                entries.append(parse_expr(cell, variables))
            rows.append(entries)
        tensor.append(rows)
    return tensor


def _parse_matrix(raw, nrows: int, ncols: int, variables: list[str], path: str):
    if not isinstance(raw, list) or len(raw) != nrows:
        raise SchemaError(path, f"expected {nrows} rows")
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != ncols:
            raise SchemaError(f"{path}[{i}]", f"expected {ncols} entries")
        rows.append([parse_expr(cell, variables) if isinstance(cell, str) else _bad(f"{path}[{i}][{j}]") for j, cell in enumerate(row)])
    return rows


def _bad(path):
    raise SchemaError(path, "expected expression string")


_KNOWN_KEYS = {"name", "description", "base_vars", "rank", "product", "bracket", "prelie", "anchor", "identity"}


def parse_presentation(document):
    """Build a validated AlgebroidPresentation from a JSON document.

    Accepts JSON text or an already decoded dictionary.
    """
    from .algebroid import AlgebroidPresentation, Section

    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected a JSON object")
    for key in doc:
        if key not in _KNOWN_KEYS:
            raise SchemaError(key, "unknown field")

    base_vars = _require(doc, "base_vars", "")
    if not isinstance(base_vars, list) or not all(isinstance(v, str) and v for v in base_vars):
        raise SchemaError("base_vars", "expected list of variable names")
    if len(set(base_vars)) != len(base_vars):
        raise SchemaError("base_vars", "duplicate variable names")
    n = len(base_vars)

    rank = _require(doc, "rank", "")
    if not isinstance(rank, int) or rank < 1:
        raise SchemaError("rank", "expected integer >= 1")

    product = _parse_tensor(_require(doc, "product", ""), rank, base_vars, "product")

    bracket = None
    if doc.get("bracket") is not None:
        bracket = _parse_tensor(doc["bracket"], rank, base_vars, "bracket")
    prelie = None
    if doc.get("prelie") is not None:
        prelie = _parse_tensor(doc["prelie"], rank, base_vars, "prelie")

    anchor = None
    if doc.get("anchor") is not None:
        anchor = _parse_matrix(doc["anchor"], rank, n, base_vars, "anchor")
    if anchor is None and n > 0 and (bracket is not None or prelie is not None):
        raise SchemaError("anchor", "anchor required when bracket or prelie is present over a base")

    identity = None
    if doc.get("identity") is not None:
        raw = doc["identity"]
        if not isinstance(raw, list) or len(raw) != rank:
            raise SchemaError("identity", f"expected {rank} expression strings")
        identity = Section([parse_expr(cell, base_vars) if isinstance(cell, str) else _bad(f"identity[{i}]") for i, cell in enumerate(raw)])

    try:
        return AlgebroidPresentation(
            base_vars=list(base_vars),
            rank=rank,
            product=product,
            bracket=bracket,
            prelie=prelie,
            anchor=anchor,
            identity=identity,
        )
    except ShapeError:
        raise
    except ValueError as exc:
        raise SchemaError("$", str(exc)) from None


def presentation_to_document(A) -> dict:
    """Serialize a presentation back to the structure-file dictionary form."""
    names = A.base_vars
    doc = {"base_vars": list(names), "rank": A.rank}

    def tensor(t):
        return [[[cell.format(names) for cell in row] for row in mat] for mat in t]

    doc["product"] = tensor(A.product)
    if A.bracket is not None:
        doc["bracket"] = tensor(A.bracket)
    if A.prelie is not None:
        doc["prelie"] = tensor(A.prelie)
    if A.anchor is not None:
        doc["anchor"] = [[cell.format(names) for cell in row] for row in A.anchor]
    if A.identity is not None:
        doc["identity"] = [cell.format(names) for cell in A.identity.components]
    return doc
