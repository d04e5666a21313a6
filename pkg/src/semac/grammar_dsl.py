"""Text format for grammars and template sets.

A grammar file is a sequence of declarations::

    root query ;
    query := plus(constraint) ;
    constraint := company-atom | maturity-atom ;
    company-atom := field(ISSUING_COMPANY) lex(companies, value) opt("bonds") mark ;

Constructs: quoted literals (possibly multi-word), ``lex(name, role)``,
``field(ID)``, ``op("surface"[, "SYMBOL"])``, ``neg("surface")``,
``set(slot, value)``, ``mark``, ``opt(e)``, ``star(e[, sep])``,
``plus(e[, sep])``, ``completable(parser, "sub")``, ``compatible-value``,
``compatible-unit``, and the built-in token classes ``year``, ``date``,
``number``. ``#`` starts a comment. Template sets use the same format; a
template is simply a production reachable from the declared root.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .grammar import (
    Alt,
    CompatibleUnitConstraint,
    CompatibleValueConstraint,
    Completable,
    DateTok,
    Grammar,
    Kleene,
    LexRef,
    Lit,
    Mark,
    NegMatch,
    NumberTok,
    OpMatch,
    Opt,
    OrSep,
    Production,
    Ref,
    Seq,
    SetSlot,
    YearTok,
    finalize_grammar,
)
from .lexicon import LexiconStore


class GrammarLoadError(Exception):
    pass


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident | string | number | symbol
    value: str
    line: int
    col: int


_SYMBOLS = (":=", ";", "|", "(", ")", ",")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
_NUMBER = re.compile(r"-?\d+(\.\d+)?")

_SLOTS = {"field", "op", "number", "timeunit", "month", "sign"}
_ROLES = {"field", "value", "unit", "number", "timeunit", "keyword", "none"}
_KEYWORDS = {
    "root", "lex", "field", "op", "set", "neg", "mark", "star", "plus", "opt",
    "completable", "compatible-value", "compatible-unit", "year", "date", "number",
    "disjoin",
}


def _lex_dsl(text: str, source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise GrammarLoadError(f"{source}:{line}:{col}: unterminated string")
            toks.append(_Tok("string", text[i + 1 : j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        two = text[i : i + 2]
        if two == ":=":
            toks.append(_Tok("symbol", two, line, col))
            i += 2
            col += 2
            continue
        if ch in ";|(),":
            toks.append(_Tok("symbol", ch, line, col))
            i += 1
            col += 1
            continue
        m = _NUMBER.match(text, i)
        if m and (ch.isdigit() or ch == "-"):
            toks.append(_Tok("number", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            toks.append(_Tok("ident", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        raise GrammarLoadError(f"{source}:{line}:{col}: unexpected character {ch!r}")
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok], source: str):
        self.toks = toks
        self.i = 0
        self.source = source

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        where = f"{self.source}:{tok.line}:{tok.col}" if tok else self.source
        raise GrammarLoadError(f"{where}: {msg}")

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise GrammarLoadError(f"{self.source}: unexpected end of file")
        self.i += 1
        return tok

    def expect(self, kind: str, value: Optional[str] = None) -> _Tok:
        tok = self.next()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value or kind
            self.error(f"expected {want!r}, found {tok.value!r}", tok)
        return tok

    def at_symbol(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "symbol" and tok.value == value

    def eat_symbol(self, value: str) -> bool:
        if self.at_symbol(value):
            self.i += 1
            return True
        return False

    # -- grammar of the grammar format --------------------------------------

    def parse_file(self) -> tuple[str, dict[str, Production]]:
        root: Optional[str] = None
        prods: dict[str, Production] = {}
        while self.peek() is not None:
            tok = self.next()
            if tok.kind == "ident" and tok.value == "root":
                name = self.expect("ident")
                self.expect("symbol", ";")
                if root is not None:
                    self.error("duplicate root declaration", tok)
                root = name.value
                continue
            if tok.kind != "ident":
                self.error("expected a production name or 'root'", tok)
            if tok.value in _KEYWORDS:
                self.error(f"{tok.value!r} is a reserved word", tok)
            self.expect("symbol", ":=")
            body = self.parse_alt()
            self.expect("symbol", ";")
            if tok.value in prods:
                self.error(f"duplicate production {tok.value!r}", tok)
            prods[tok.value] = Production(tok.value, body)
        if root is None:
            raise GrammarLoadError(f"{self.source}: missing 'root' declaration")
        return root, prods

    def parse_alt(self):
        branches = [self.parse_seq()]
        while self.eat_symbol("|"):
            branches.append(self.parse_seq())
        return branches[0] if len(branches) == 1 else Alt(tuple(branches))

    def _at_term(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        if tok.kind in ("string",):
            return True
        if tok.kind == "symbol":
            return tok.value == "("
        if tok.kind == "ident":
            # a production name followed by := starts the next declaration
            nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
            if nxt is not None and nxt.kind == "symbol" and nxt.value == ":=":
                return False
            return tok.value != "root"
        return False

    def parse_seq(self):
        items = []
        while self._at_term():
            items.append(self.parse_term())
        if not items:
            self.error("empty sequence")
        return items[0] if len(items) == 1 else Seq(tuple(items))

    def parse_term(self):
        tok = self.next()
        if tok.kind == "string":
            words = tuple(tok.value.lower().split())
            if not words:
                self.error("empty literal", tok)
            return Lit((words,))
        if tok.kind == "symbol" and tok.value == "(":
            inner = self.parse_alt()
            self.expect("symbol", ")")
            return inner
        if tok.kind != "ident":
            self.error(f"unexpected {tok.value!r}", tok)
        name = tok.value
        if name == "mark":
            return Mark()
        if name == "year":
            return YearTok()
        if name == "date":
            return DateTok()
        if name == "number":
            return NumberTok()
        if name == "compatible-value":
            return CompatibleValueConstraint()
        if name == "compatible-unit":
            return CompatibleUnitConstraint()
        if name == "lex":
            self.expect("symbol", "(")
            lexname = self.expect("ident").value
            self.expect("symbol", ",")
            role = self.expect("ident").value
            self.expect("symbol", ")")
            if role not in _ROLES:
                self.error(f"unknown lexicon role {role!r}", tok)
            return LexRef(lexname, role)
        if name == "field":
            self.expect("symbol", "(")
            fid = self.expect("ident").value
            self.expect("symbol", ")")
            return SetSlot("field", fid)
        if name == "op":
            self.expect("symbol", "(")
            surface = self.expect("string").value
            symbol = surface
            if self.eat_symbol(","):
                symbol = self.expect("string").value
            self.expect("symbol", ")")
            return OpMatch(((tuple(surface.lower().split()), symbol),))
        if name == "disjoin":
            self.expect("symbol", "(")
            options = [tuple(self.expect("string").value.lower().split())]
            while self.eat_symbol(","):
                options.append(tuple(self.expect("string").value.lower().split()))
            self.expect("symbol", ")")
            return OrSep(tuple(options))
        if name == "neg":
            self.expect("symbol", "(")
            options = [tuple(self.expect("string").value.lower().split())]
            while self.eat_symbol(","):
                options.append(tuple(self.expect("string").value.lower().split()))
            self.expect("symbol", ")")
            return NegMatch(tuple(options))
        if name == "set":
            self.expect("symbol", "(")
            slot = self.expect("ident").value
            if slot not in _SLOTS:
                self.error(f"unknown slot {slot!r}", tok)
            self.expect("symbol", ",")
            vtok = self.next()
            self.expect("symbol", ")")
            if vtok.kind == "number":
                value: object = float(vtok.value) if "." in vtok.value else int(vtok.value)
            elif vtok.kind in ("string", "ident"):
                value = vtok.value
            else:
                self.error("expected a slot value", vtok)
            if slot in ("number",) and isinstance(value, str):
                self.error("slot 'number' takes a numeric value", vtok)
            if slot in ("sign", "month") and not isinstance(value, int):
                self.error(f"slot {slot!r} takes an integer value", vtok)
            return SetSlot(slot, value)
        if name in ("opt", "star", "plus"):
            self.expect("symbol", "(")
            child = self.parse_alt()
            sep = None
            if self.eat_symbol(","):
                sep = self.parse_alt()
            self.expect("symbol", ")")
            if name == "opt":
                if sep is not None:
                    self.error("opt takes one argument", tok)
                return Opt(child)
            return Kleene(child, sep, min_one=(name == "plus"))
        if name == "completable":
            self.expect("symbol", "(")
            parser = self.expect("ident").value
            self.expect("symbol", ",")
            sub = self.expect("string").value
            self.expect("symbol", ")")
            return Completable(parser, sub)
        return Ref(name)


def parse_grammar_text(text: str, source: str, store: Optional[LexiconStore] = None) -> Grammar:
    toks = _lex_dsl(text, source)
    root, prods = _Parser(toks, source).parse_file()
    try:
        return finalize_grammar(root, prods, store)
    except Exception as e:
        raise GrammarLoadError(f"{source}: {e}") from e


def load_grammar(path, store: Optional[LexiconStore] = None) -> Grammar:
    path = Path(path)
    return parse_grammar_text(path.read_text(encoding="utf-8"), str(path), store)
