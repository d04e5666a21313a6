"""Combinator grammar engine: parsing, decomposition, completion enumeration.

One grammar formalism serves the semantic parser, the template engine and
the completability analyzer. A grammar is a set of named productions over
combinator nodes (literals, lexicon references, sequences, alternations,
Kleene constructs with separators, value-compatibility constraints, the
``completable`` delegation to numeric/date sub-parsers, and ``mark`` which
closes an atom).

The walker runs in three modes over the same node set:

* PARSE    — all complete parses of a token sequence, with derivations.
* ENUM     — consume a (possibly mid-token) prefix, then extend along
             grammar paths to the next atom boundary, emitting completions.
* PROBE    — completability: can the prefix be consumed with the grammar
             still alive just beyond it? No completions are produced.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Optional

from .domain import DomainConfigError, DomainDefinition
from .ir import (
    And,
    Atom,
    AtomF,
    assemble_formula,
    BooleanValue,
    Derivation,
    EnumValue,
    ExactDate,
    Formula,
    NumericValue,
    RelativeTime,
    SpannedAtom,
    StringValue,
    TEMPORAL_UNITS,
    Value,
    canonical_key,
    conjoin,
)
from .lexicon import LexiconStore
from .textscan import PrefixInput, scan_prefix, tokenize
from .valueparsers import PARSERS, DateParser, NumericParser

PARSE, ENUM, PROBE = 0, 1, 2


class GrammarError(Exception):
    pass


# ---------------------------------------------------------------------------
# Nodes


@dataclass(frozen=True)
class Lit:
    # alternation of token sequences
    options: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class LexRef:
    lexicon: str
    role: str  # field | value | unit | number | timeunit | keyword | none


@dataclass(frozen=True)
class SetSlot:
    slot: str  # field | op | number | timeunit | month | sign
    value: object


@dataclass(frozen=True)
class OpMatch:
    # each option: (surface token sequence, op symbol)
    options: tuple[tuple[tuple[str, ...], str], ...]


@dataclass(frozen=True)
class NegMatch:
    options: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class OrSep:
    # consumes a disjunction word; the next atom joins the previous in an OR group
    options: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class Seq:
    children: tuple["GrammarNode", ...]


@dataclass(frozen=True)
class Alt:
    children: tuple["GrammarNode", ...]


@dataclass(frozen=True)
class Opt:
    child: "GrammarNode"


@dataclass(frozen=True)
class Kleene:
    child: "GrammarNode"
    separator: Optional["GrammarNode"]
    min_one: bool  # plus vs star


@dataclass(frozen=True)
class CompatibleValueConstraint:
    pass


@dataclass(frozen=True)
class CompatibleUnitConstraint:
    pass


@dataclass(frozen=True)
class Completable:
    parser: str
    sub: str  # substitution string for case ii (ellipsis)


@dataclass(frozen=True)
class Mark:
    pass


@dataclass(frozen=True)
class YearTok:
    pass


@dataclass(frozen=True)
class DateTok:
    pass


@dataclass(frozen=True)
class NumberTok:
    pass


@dataclass(frozen=True)
class Ref:
    name: str


GrammarNode = object


@dataclass
class Production:
    name: str
    body: GrammarNode
    atomic: bool = False  # contains a Mark directly (not through Refs)


@dataclass
class Grammar:
    root: str
    prods: dict[str, Production]

    def production(self, name: str) -> Production:
        return self.prods[name]


def _contains_direct_mark(node) -> bool:
    if isinstance(node, Mark):
        return True
    if isinstance(node, (Seq, Alt)):
        return any(_contains_direct_mark(c) for c in node.children)
    if isinstance(node, (Opt, Kleene)):
        inner = _contains_direct_mark(node.child)
        if isinstance(node, Kleene) and node.separator is not None:
            inner = inner or _contains_direct_mark(node.separator)
        return inner
    return False


def finalize_grammar(root: str, prods: dict[str, Production], store: Optional[LexiconStore]) -> Grammar:
    """Validate references and compute atomic-production flags."""
    if root not in prods:
        raise GrammarError(f"root production {root!r} is not defined")

    def visit(node, where):
        if isinstance(node, Ref):
            if node.name not in prods:
                raise GrammarError(f"{where}: reference to undefined production {node.name!r}")
        elif isinstance(node, LexRef):
            if store is not None:
                store.get(node.lexicon)
        elif isinstance(node, Completable):
            if node.parser not in PARSERS:
                raise GrammarError(f"{where}: unknown sub-parser {node.parser!r}")
        elif isinstance(node, (Seq, Alt)):
            for c in node.children:
                visit(c, where)
        elif isinstance(node, (Opt, Kleene)):
            visit(node.child, where)
            if isinstance(node, Kleene) and node.separator is not None:
                visit(node.separator, where)

    for p in prods.values():
        visit(p.body, p.name)
        p.atomic = _contains_direct_mark(p.body)
    return Grammar(root=root, prods=prods)


# ---------------------------------------------------------------------------
# Walk state


_EMPTY_SLOTS_FIELDS = dict(
    field=None,
    op=None,
    negated=False,
    value=None,
    number=None,
    sign=1,
    placeholder=False,
    timeunit=None,
    month=None,
    year=None,
    unit=None,
    compat_value=False,
    compat_unit=False,
)


@dataclass(frozen=True)
class Slots:
    field: Optional[str] = None
    op: Optional[str] = None
    negated: bool = False
    value: Optional[Value] = None
    number: Optional[float] = None
    sign: int = 1
    placeholder: bool = False
    timeunit: Optional[str] = None
    month: Optional[int] = None
    year: Optional[int] = None
    unit: Optional[str] = None
    compat_value: bool = False
    compat_unit: bool = False


_EMPTY_SLOTS = Slots()


@dataclass(frozen=True)
class GenTok:
    display: str
    replaces_fragment: bool = False
    weight: float = 0.0
    ellipsis: bool = False


@dataclass(frozen=True)
class WalkState:
    pos: int = 0
    gpos: int = 0  # generated token count (combined index space = pos + gpos)
    frag_done: bool = False
    gen: tuple[GenTok, ...] = ()
    slots: Slots = _EMPTY_SLOTS
    atoms: tuple[SpannedAtom, ...] = ()
    links: tuple[bool, ...] = ()  # per-atom: disjoined with the previous atom
    or_next: bool = False
    anchor: Optional[int] = None
    depth: int = 0

    @property
    def combined(self) -> int:
        return self.pos + self.gpos


Cont = Callable[[WalkState], Iterator[WalkState]]


class WalkCtx:
    def __init__(
        self,
        grammar: Grammar,
        store: LexiconStore,
        prefix: PrefixInput,
        mode: int,
        *,
        max_depth: int = 16,
        max_reps: int = 8,
        max_gen_tokens: int = 10,
        lex_gen_limit: int = 5,
        raw_cap: int = 400,
    ):
        self.grammar = grammar
        self.store = store
        self.domain = store.domain
        self.prefix = prefix
        self.texts = prefix.texts
        self.ntokens = len(prefix.tokens)
        self.partial = prefix.partial if mode != PARSE else False
        self.mode = mode
        self.max_depth = max_depth
        self.max_reps = max_reps
        self.max_gen_tokens = max_gen_tokens
        self.lex_gen_limit = lex_gen_limit
        self.raw_cap = raw_cap
        self.frozen = 0
        self.probe_success = False
        self.max_reach = 0
        self.accepts: list[WalkState] = []
        self._unit_views: dict[tuple[str, str], object] = {}

    # how many leading input tokens are complete (not a fragment)
    @property
    def complete_upto(self) -> int:
        return self.ntokens - 1 if self.partial else self.ntokens

    def extending(self, st: WalkState) -> bool:
        return st.pos == self.ntokens and (not self.partial or st.frag_done)

    def reach(self, offset: int) -> None:
        if offset > self.max_reach:
            self.max_reach = offset

    def full(self) -> bool:
        return len(self.accepts) >= self.raw_cap

    def unit_view(self, lexname: str, field_id: str):
        key = (lexname, field_id)
        if key not in self._unit_views:
            fd = self.domain.field(field_id)
            self._unit_views[key] = self.store.get(lexname).restrict_targets(
                fd.compatible_units, name=f"{lexname}:{field_id}"
            )
        return self._unit_views[key]


# ---------------------------------------------------------------------------
# Atom construction


def build_atom(slots: Slots, domain: DomainDefinition) -> Optional[Atom]:
    """Assemble an atom from accumulated slots; None when inconsistent."""
    field_id = slots.field
    value = slots.value
    if value is None:
        if slots.year is not None or slots.month is not None:
            value = ExactDate(-1, slots.month or -1, slots.year or -1)
        elif slots.number is not None and slots.timeunit is not None:
            value = RelativeTime(int(slots.number) * slots.sign, slots.timeunit)
        elif slots.number is not None or slots.placeholder:
            mag = None if slots.placeholder else slots.number
            value = NumericValue(mag, slots.unit)
        else:
            return None
    else:
        if isinstance(value, NumericValue) and slots.unit and value.unit is None:
            value = NumericValue(value.magnitude, slots.unit)
    if field_id is None:
        if isinstance(value, EnumValue):
            field_id = domain.field_of_value(value.id)
        elif isinstance(value, StringValue) and domain.keyword_field:
            field_id = domain.keyword_field
    if field_id is None or not domain.has_field(field_id):
        return None
    fd = domain.field(field_id)
    op = slots.op or ("CONTAINS" if isinstance(value, StringValue) else "=")
    if op in ("<", ">", "<=", ">=") and fd.value_kind not in ("numeric", "date"):
        return None
    kind_ok = {
        "enum": lambda v: isinstance(v, EnumValue) and v.id in fd.enum_domain,
        "numeric": lambda v: isinstance(v, NumericValue)
        and (v.unit is None or v.unit in fd.compatible_units),
        # a placeholder (unfinished literal) is acceptable where a date goes
        "date": lambda v: isinstance(v, (ExactDate, RelativeTime))
        or (isinstance(v, NumericValue) and v.magnitude is None and v.unit is None),
        "string": lambda v: isinstance(v, StringValue),
        "boolean": lambda v: isinstance(v, BooleanValue),
    }[fd.value_kind]
    if not kind_ok(value):
        return None
    try:
        return Atom(field_id, op, value, slots.negated)
    except ValueError:
        return None


# ---------------------------------------------------------------------------
# Matchers


def _common_prefix_len(a: str, b: str) -> int:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k


def _consume_word(st: WalkState, ctx: WalkCtx, word: str, weight: float = 0.0):
    """Match one expected word: consume, complete a fragment, or generate."""
    n = ctx.ntokens
    if st.pos < ctx.complete_upto:
        tok = ctx.prefix.tokens[st.pos]
        if ctx.texts[st.pos] == word:
            ctx.reach(tok.end)
            yield replace(st, pos=st.pos + 1)
        else:
            ctx.reach(tok.start + _common_prefix_len(ctx.texts[st.pos], word))
        return
    if st.pos == n - 1 and ctx.partial and not st.frag_done:
        frag = ctx.texts[st.pos]
        k = len(frag) if word.startswith(frag) else _common_prefix_len(frag, word)
        ctx.reach(ctx.prefix.tokens[st.pos].start + k)
        if not word.startswith(frag):
            return
        if ctx.mode == PROBE:
            ctx.probe_success = True
            return
        if ctx.mode == PARSE:
            return
        if word == frag:
            yield replace(st, pos=n, frag_done=True)
        else:
            yield replace(
                st,
                pos=n,
                frag_done=True,
                gpos=st.gpos + 1,
                gen=st.gen + (GenTok(word, replaces_fragment=True, weight=weight),),
            )
        return
    # input exhausted: generation
    if ctx.mode == PROBE:
        ctx.probe_success = True
        return
    if ctx.mode != ENUM or ctx.frozen or len(st.gen) >= ctx.max_gen_tokens:
        return
    yield replace(st, gpos=st.gpos + 1, gen=st.gen + (GenTok(word, weight=weight),))


def _consume_words(st: WalkState, ctx: WalkCtx, words: tuple[str, ...], weight: float = 0.0):
    states = [st]
    for w in words:
        nxt = []
        for s in states:
            nxt.extend(_consume_word(s, ctx, w, weight))
        states = nxt
        if not states:
            return
    yield from states


def _apply_entry(st: WalkState, ctx: WalkCtx, role: str, entry) -> Optional[WalkState]:
    slots = st.slots
    domain = ctx.domain
    if role == "field":
        if not domain.has_field(entry.target):
            return None
        return replace(st, slots=replace(slots, field=entry.target))
    if role == "value":
        if slots.compat_value:
            if slots.field is None:
                return None
            fd = domain.field(slots.field)
            if entry.target not in fd.enum_domain:
                return None
        return replace(st, slots=replace(slots, value=EnumValue(entry.target)))
    if role == "unit":
        if slots.compat_unit:
            if slots.field is None:
                return None
            fd = domain.field(slots.field)
            if entry.target not in fd.compatible_units:
                return None
        return replace(st, slots=replace(slots, unit=entry.target))
    if role == "number":
        try:
            num = float(entry.target)
        except ValueError:
            return None
        return replace(st, slots=replace(slots, number=num))
    if role == "timeunit":
        if entry.target not in TEMPORAL_UNITS:
            return None
        return replace(st, slots=replace(slots, timeunit=entry.target))
    if role == "keyword":
        return replace(st, slots=replace(slots, value=StringValue(entry.key)))
    return st  # role "none"


def _lex_for(node: LexRef, st: WalkState, ctx: WalkCtx):
    """The (possibly compatibility-restricted) lexicon for this reference."""
    if node.role == "value" and st.slots.compat_value and st.slots.field is not None:
        fd = ctx.domain.field(st.slots.field)
        if fd.value_type is None:
            return None
        return ctx.store.typed_view(node.lexicon, fd.value_type)
    if node.role == "unit" and st.slots.compat_unit and st.slots.field is not None:
        return ctx.unit_view(node.lexicon, st.slots.field)
    return ctx.store.get(node.lexicon)


def _match_lex(node: LexRef, st: WalkState, ctx: WalkCtx, cont: Cont):
    lex = _lex_for(node, st, ctx)
    if lex is None:
        return
    n = ctx.ntokens
    tnode = lex.root_node()
    key_so_far = ""
    j = st.pos
    while True:
        if j < ctx.complete_upto:
            word = ctx.texts[j]
            piece = word if j == st.pos else " " + word
            nxt = tnode
            matched = 0
            for ch in piece:
                nxt = nxt.children.get(ch)
                if nxt is None:
                    break
                matched += 1
            if matched < len(piece):
                base = ctx.prefix.tokens[j].start - (1 if j > st.pos else 0)
                ctx.reach(base + matched)
                return
            tnode = nxt
            key_so_far += piece
            j += 1
            ctx.reach(ctx.prefix.tokens[j - 1].end)
            for entry in tnode.items:
                st2 = _apply_entry(replace(st, pos=j), ctx, node.role, entry)
                if st2 is not None:
                    yield from cont(st2)
            continue
        break
    # input exhausted (or only a fragment left) mid-key
    if j == n - 1 and ctx.partial and not st.frag_done:
        frag = ctx.texts[j]
        piece = frag if j == st.pos else " " + frag
        fnode = tnode
        matched = 0
        for ch in piece:
            nn = fnode.children.get(ch)
            if nn is None:
                fnode = None
                break
            fnode = nn
            matched += 1
        base = ctx.prefix.tokens[j].start - (1 if j > st.pos else 0)
        ctx.reach(base + matched)
        if fnode is None:
            return
        if ctx.mode == PROBE:
            ctx.probe_success = True
            return
        if ctx.mode == PARSE:
            return
        if ctx.frozen:
            return
        word_index = j - st.pos  # index of the fragment's token within the surface
        for entry in _node_candidates(lex, fnode, ctx.lex_gen_limit):
            remainder = " ".join(entry.surface[word_index:])
            st2 = replace(
                st,
                pos=n,
                frag_done=True,
                gpos=st.gpos + len(entry.surface) - word_index,
                gen=st.gen
                + (GenTok(remainder, replaces_fragment=True, weight=entry.weight),),
            )
            st3 = _apply_entry(st2, ctx, node.role, entry)
            if st3 is not None:
                yield from cont(st3)
        return
    # pure generation (possibly continuing a partially consumed surface)
    if ctx.mode == PROBE:
        ctx.probe_success = True
        return
    if ctx.mode != ENUM or ctx.frozen or len(st.gen) >= ctx.max_gen_tokens:
        return
    consumed_words = j - st.pos
    for entry in _node_candidates(lex, tnode, ctx.lex_gen_limit):
        rest = entry.surface[consumed_words:]
        if not rest and consumed_words:
            # surface fully consumed at a token boundary: already yielded above
            continue
        display = " ".join(rest) if rest else ""
        st2 = replace(
            replace(st, pos=j),
            gpos=st.gpos + len(rest),
            gen=st.gen + ((GenTok(display, weight=entry.weight),) if display else ()),
        )
        st3 = _apply_entry(st2, ctx, node.role, entry)
        if st3 is not None:
            yield from cont(st3)


def _node_candidates(lex, tnode, limit):
    if tnode.top is not None:
        return tnode.top[:limit]
    out = []
    for e in lex._trie.iter_below(tnode):
        out.append(e)
    out.sort(key=lambda e: (-e.weight, e.key))
    return out[:limit]


def _match_completable(node: Completable, st: WalkState, ctx: WalkCtx, cont: Cont):
    parser = PARSERS[node.parser]
    n = ctx.ntokens
    if st.pos < ctx.complete_upto:
        tok = ctx.texts[st.pos]
        # an ellipsis token is a previously emitted placeholder; accepting it
        # makes ellipsis completions re-parse to their emitted formula
        if tok == node.sub or (
            node.sub and tok.endswith(node.sub) and parser.accepts_prefix(tok[: -len(node.sub)])
        ):
            ctx.reach(ctx.prefix.tokens[st.pos].end)
            yield from cont(
                replace(st, pos=st.pos + 1, slots=replace(st.slots, placeholder=True))
            )
            return
        m = parser.match_tokens(ctx.texts[: ctx.complete_upto], st.pos)
        if m is None:
            return  # failure: not a value and cannot become one
        ntok, val = m
        ctx.reach(ctx.prefix.tokens[st.pos + ntok - 1].end)
        if isinstance(val, ExactDate):
            slots = replace(st.slots, value=val)
        else:
            slots = replace(st.slots, number=float(val))
        yield from cont(replace(st, pos=st.pos + ntok, slots=slots))  # prefix parsed
        return
    if st.pos == n - 1 and ctx.partial and not st.frag_done:
        frag = ctx.texts[st.pos]
        if not parser.accepts_prefix(frag):
            return  # failure
        ctx.reach(ctx.prefix.tokens[st.pos].end)
        if ctx.mode == PROBE:
            ctx.probe_success = True
            return
        if ctx.mode == PARSE or ctx.frozen:
            return
        # the unfinished fragment is a prefix of something parsable:
        # substitute an ellipsis and leave the value unspecified
        yield from cont(
            replace(
                st,
                pos=n,
                frag_done=True,
                slots=replace(st.slots, placeholder=True),
                gpos=st.gpos + 1,
                gen=st.gen + (GenTok(frag + node.sub, replaces_fragment=True, ellipsis=True),),
            )
        )
        return
    # input exhausted: generate the bare substitution string
    if ctx.mode == PROBE:
        ctx.probe_success = True
        return
    if ctx.mode != ENUM or ctx.frozen or len(st.gen) >= ctx.max_gen_tokens:
        return
    yield from cont(
        replace(
            st,
            slots=replace(st.slots, placeholder=True),
            gpos=st.gpos + 1,
            gen=st.gen + (GenTok(node.sub, ellipsis=True),),
        )
    )


def _match_mark(st: WalkState, ctx: WalkCtx, cont: Cont):
    if ctx.frozen:
        return
    start = st.anchor if st.anchor is not None else (st.atoms[-1].end if st.atoms else 0)
    end = st.combined
    if end <= start:
        return
    atom = build_atom(st.slots, ctx.domain)
    if atom is None:
        return
    st2 = replace(
        st,
        slots=_EMPTY_SLOTS,
        atoms=st.atoms + (SpannedAtom(atom, start, end),),
        links=st.links + (st.or_next,),
        or_next=False,
        anchor=end if st.anchor is not None else None,
    )
    if ctx.mode == ENUM and ctx.extending(st2):
        # can the grammar finish right here? then this is a completion boundary
        ctx.frozen += 1
        try:
            done = next(iter(cont(st2)), None)
        finally:
            ctx.frozen -= 1
        if done is not None:
            ctx.accepts.append(done)
            return  # complete to the next full atom: cut here
    yield from cont(st2)


def _match(node, st: WalkState, ctx: WalkCtx, cont: Cont) -> Iterator[WalkState]:
    if ctx.mode == ENUM and ctx.full():
        return
    if isinstance(node, Seq):
        children = node.children

        def make(i: int) -> Cont:
            if i == len(children):
                return cont
            return lambda s: _match(children[i], s, ctx, make(i + 1))

        yield from make(0)(st)
    elif isinstance(node, Alt):
        for c in node.children:
            yield from _match(c, st, ctx, cont)
    elif isinstance(node, Opt):
        yield from _match(node.child, st, ctx, cont)
        yield from cont(st)
    elif isinstance(node, Lit):
        for words in node.options:
            for s2 in _consume_words(st, ctx, words):
                yield from cont(s2)
    elif isinstance(node, OpMatch):
        for words, sym in node.options:
            for s2 in _consume_words(st, ctx, words):
                yield from cont(replace(s2, slots=replace(s2.slots, op=sym)))
    elif isinstance(node, NegMatch):
        for words in node.options:
            for s2 in _consume_words(st, ctx, words):
                yield from cont(replace(s2, slots=replace(s2.slots, negated=True)))
    elif isinstance(node, OrSep):
        for words in node.options:
            for s2 in _consume_words(st, ctx, words):
                yield from cont(replace(s2, or_next=True))
    elif isinstance(node, SetSlot):
        yield from cont(replace(st, slots=replace(st.slots, **{node.slot: node.value})))
    elif isinstance(node, LexRef):
        yield from _match_lex(node, st, ctx, cont)
    elif isinstance(node, CompatibleValueConstraint):
        yield from cont(replace(st, slots=replace(st.slots, compat_value=True)))
    elif isinstance(node, CompatibleUnitConstraint):
        yield from cont(replace(st, slots=replace(st.slots, compat_unit=True)))
    elif isinstance(node, Completable):
        yield from _match_completable(node, st, ctx, cont)
    elif isinstance(node, Mark):
        yield from _match_mark(st, ctx, cont)
    elif isinstance(node, YearTok):
        yield from _match_year(st, ctx, cont)
    elif isinstance(node, DateTok):
        yield from _match_date(st, ctx, cont)
    elif isinstance(node, NumberTok):
        yield from _match_number(st, ctx, cont)
    elif isinstance(node, Kleene):
        yield from _match_kleene(node, st, ctx, cont)
    elif isinstance(node, Ref):
        yield from _match_ref(node, st, ctx, cont)
    else:  # pragma: no cover
        raise GrammarError(f"unknown grammar node: {node!r}")


def _match_year(st, ctx, cont):
    from .valueparsers import _year

    if st.pos < ctx.complete_upto:
        y = _year(ctx.texts[st.pos])
        if y is not None:
            ctx.reach(ctx.prefix.tokens[st.pos].end)
            yield from cont(
                replace(st, pos=st.pos + 1, slots=replace(st.slots, year=y))
            )
        return
    if st.pos == ctx.ntokens - 1 and ctx.partial and not st.frag_done:
        frag = ctx.texts[st.pos]
        if frag.isdigit() and len(frag) <= 4:
            ctx.reach(ctx.prefix.tokens[st.pos].end)
            if ctx.mode == PROBE:
                ctx.probe_success = True
        return
    if ctx.mode == PROBE:
        ctx.probe_success = True


def _match_date(st, ctx, cont):
    parser: DateParser = PARSERS["date"]
    if st.pos < ctx.complete_upto:
        m = parser.match_tokens(ctx.texts[: ctx.complete_upto], st.pos)
        if m is None:
            return
        ntok, val = m
        ctx.reach(ctx.prefix.tokens[st.pos + ntok - 1].end)
        yield from cont(
            replace(st, pos=st.pos + ntok, slots=replace(st.slots, value=val))
        )
        return
    if st.pos == ctx.ntokens - 1 and ctx.partial and not st.frag_done:
        if parser.accepts_prefix(ctx.texts[st.pos]):
            ctx.reach(ctx.prefix.tokens[st.pos].end)
            if ctx.mode == PROBE:
                ctx.probe_success = True
        return
    if ctx.mode == PROBE:
        ctx.probe_success = True


def _match_number(st, ctx, cont):
    parser: NumericParser = PARSERS["numeric"]
    if st.pos < ctx.complete_upto:
        m = parser.match_tokens(ctx.texts[: ctx.complete_upto], st.pos)
        if m is None:
            return
        ntok, mag = m
        ctx.reach(ctx.prefix.tokens[st.pos + ntok - 1].end)
        yield from cont(
            replace(st, pos=st.pos + ntok, slots=replace(st.slots, number=float(mag)))
        )
        return
    if st.pos == ctx.ntokens - 1 and ctx.partial and not st.frag_done:
        if parser.accepts_prefix(ctx.texts[st.pos]):
            ctx.reach(ctx.prefix.tokens[st.pos].end)
            if ctx.mode == PROBE:
                ctx.probe_success = True
        return
    if ctx.mode == PROBE:
        ctx.probe_success = True


def _match_kleene(node: Kleene, st: WalkState, ctx: WalkCtx, cont: Cont):
    def iterate(s: WalkState, count: int, gen_reps: int) -> Iterator[WalkState]:
        if count > 0 or not node.min_one:
            yield from cont(s)
        if count >= ctx.max_reps:
            return
        extending = ctx.extending(s) if ctx.mode == ENUM else False
        if extending and gen_reps >= 1:
            return
        before = (s.pos, s.gpos)

        def after_child(s2: WalkState) -> Iterator[WalkState]:
            if (s2.pos, s2.gpos) == before:
                return
            yield from iterate(s2, count + 1, gen_reps + (1 if extending else 0))

        if count > 0 and node.separator is not None:
            def after_sep(s1: WalkState) -> Iterator[WalkState]:
                yield from _match(node.child, s1, ctx, after_child)

            yield from _match(node.separator, s, ctx, after_sep)
        else:
            yield from _match(node.child, s, ctx, after_child)

    yield from iterate(st, 0, 0)


def _match_ref(node: Ref, st: WalkState, ctx: WalkCtx, cont: Cont):
    prod = ctx.grammar.prods.get(node.name)
    if prod is None:
        raise GrammarError(f"undefined production: {node.name}")
    if st.depth >= ctx.max_depth:
        return
    outer_depth = st.depth
    set_anchor = prod.atomic and st.anchor is None
    st2 = replace(st, depth=st.depth + 1, anchor=st.combined if set_anchor else st.anchor)

    def body_done(s: WalkState) -> Iterator[WalkState]:
        s2 = replace(s, depth=outer_depth, anchor=None if set_anchor else s.anchor)
        yield from cont(s2)

    yield from _match(prod.body, st2, ctx, body_done)


# ---------------------------------------------------------------------------
# Drivers


@dataclass(frozen=True)
class ParseResult:
    derivation: Derivation
    consumed: int

    @property
    def formula(self) -> Optional[Formula]:
        return self.derivation.formula


@dataclass(frozen=True)
class Decomposition:
    raw: str
    boundary: int  # char offset separating i_p from r_p
    tokens: tuple  # i_p tokens
    formula: Optional[Formula]
    derivation: Derivation
    remainder: str  # r_p, lstripped

    @property
    def initial_text(self) -> str:
        return self.raw[: self.boundary].strip()


def parse(grammar: Grammar, store: LexiconStore, text: str) -> list[ParseResult]:
    """All complete parses of ``text``, deterministically ranked."""
    tokens = tokenize(text)
    pi = PrefixInput(text, tuple(tokens), False)
    ctx = WalkCtx(grammar, store, pi, PARSE)
    n = ctx.ntokens

    def final(s: WalkState) -> Iterator[WalkState]:
        if s.pos == n:
            yield s

    results = []
    seen = set()
    if n == 0:
        return []
    for s in _match(Ref(grammar.root), WalkState(), ctx, final):
        formula = assemble_formula([sa.atom for sa in s.atoms], s.links)
        if formula is None:
            continue
        key = (canonical_key(formula), tuple((sa.start, sa.end) for sa in s.atoms))
        if key in seen:
            continue
        seen.add(key)
        covered = sum(sa.end - sa.start for sa in s.atoms)
        der = Derivation(formula, s.atoms, ctx.texts, s.links)
        results.append((len(s.atoms), -covered, canonical_key(formula), ParseResult(der, n)))
    results.sort(key=lambda r: r[:3])
    return [r[3] for r in results]


def decompose(grammar: Grammar, store: LexiconStore, raw: str) -> Decomposition:
    """Split a prefix into a maximal fully-parsed initial segment and the
    unrecognized remainder."""
    pi = scan_prefix(raw)
    tokens = pi.tokens
    for m in range(len(tokens), 0, -1):
        boundary = tokens[m - 1].end
        results = parse(grammar, store, raw[:boundary])
        if results:
            top = results[0]
            return Decomposition(
                raw=raw,
                boundary=boundary,
                tokens=tokens[:m],
                formula=top.formula,
                derivation=top.derivation,
                remainder=raw[boundary:].strip(),
            )
    return Decomposition(
        raw=raw,
        boundary=0,
        tokens=(),
        formula=None,
        derivation=Derivation(None, (), ()),
        remainder=raw.strip(),
    )


def backtrack(grammar: Grammar, store: LexiconStore, dec: Decomposition, steps: int) -> Decomposition:
    """Move the rightmost ``steps`` atoms of i_p to the front of r_p."""
    if steps == 0:
        return dec
    spanned = sorted(dec.derivation.spanned, key=lambda s: (s.start, s.end))
    if steps > len(spanned):
        raise ValueError(f"cannot backtrack {steps} atoms; only {len(spanned)} present")
    cut = spanned[-steps]
    new_m = cut.start
    while new_m > 0:
        boundary = dec.tokens[new_m - 1].end
        results = parse(grammar, store, dec.raw[:boundary])
        if results:
            top = results[0]
            return Decomposition(
                raw=dec.raw,
                boundary=boundary,
                tokens=dec.tokens[:new_m],
                formula=top.formula,
                derivation=top.derivation,
                remainder=dec.raw[boundary:].strip(),
            )
        new_m -= 1
    return Decomposition(
        raw=dec.raw,
        boundary=0,
        tokens=(),
        formula=None,
        derivation=Derivation(None, (), ()),
        remainder=dec.raw.strip(),
    )


@dataclass(frozen=True)
class EnumResult:
    completion: str
    formula: Formula
    dtype: str
    score: float
    generated_tokens: int


def _emit_string(ctx: WalkCtx, st: WalkState) -> str:
    raw = ctx.prefix.raw
    if not st.gen:
        return " ".join(raw.split())
    if st.gen[0].replaces_fragment:
        base = raw[: ctx.prefix.tokens[-1].start]
    else:
        base = raw
    out = " ".join(base.split())
    for g in st.gen:
        for word in g.display.split():
            if word == "," or not out:
                out += word
            else:
                out += " " + word
    return out


def enumerate_completions(
    grammar: Grammar,
    store: LexiconStore,
    prefix: str,
    limit: int,
    *,
    raw_cap: int = 200,
    lex_gen_limit: int = 5,
) -> list[EnumResult]:
    """Grammar-driven completions of ``prefix`` to the next atom boundary."""
    if limit <= 0:
        raise ValueError("limit must be positive")
    pi = scan_prefix(prefix)
    ctx = WalkCtx(grammar, store, pi, ENUM, raw_cap=raw_cap, lex_gen_limit=lex_gen_limit)
    n = ctx.ntokens

    def final(s: WalkState) -> Iterator[WalkState]:
        if s.pos == n and (not ctx.partial or s.frag_done):
            yield s

    for s in _match(Ref(grammar.root), WalkState(), ctx, final):
        ctx.accepts.append(s)
        if ctx.full():
            break

    out: list[EnumResult] = []
    seen: set = set()
    for s in ctx.accepts:
        formula = assemble_formula([sa.atom for sa in s.atoms], s.links)
        if formula is None:
            continue
        string = _emit_string(ctx, s)
        key = (string, canonical_key(formula))
        if key in seen:
            continue
        seen.add(key)
        der = Derivation(formula, s.atoms, ctx.texts, s.links)
        dtype = der.type_at(n - 1) if n else der.type_at(0)
        if dtype is None:
            continue
        score = sum(g.weight for g in s.gen)
        out.append(EnumResult(string, formula, dtype, score, s.gpos))
    out.sort(key=lambda r: (-r.score, r.generated_tokens, r.completion))
    return out[:limit]


@dataclass(frozen=True)
class CompletabilityResult:
    completable: bool
    dead_at: Optional[int]  # char index of the first dead character


def completable(grammar: Grammar, store: LexiconStore, prefix: str) -> CompletabilityResult:
    """Can the prefix be consumed and extended just beyond, to a phrase the
    grammar understands? Produces no completions."""
    pi = scan_prefix(prefix)
    if not pi.tokens:
        return CompletabilityResult(True, None)
    ctx = WalkCtx(grammar, store, pi, PROBE)
    n = ctx.ntokens

    def final(s: WalkState) -> Iterator[WalkState]:
        # a full parse with no pending fragment keeps the prefix viable;
        # a pending fragment must be explained by some consuming construct
        if not ctx.partial and s.pos == n:
            ctx.probe_success = True
        yield from ()

    for _ in _match(Ref(grammar.root), WalkState(), ctx, final):
        pass
    if ctx.probe_success:
        return CompletabilityResult(True, None)
    return CompletabilityResult(False, min(ctx.max_reach, len(prefix.rstrip())))


# completable_step: the three-way analysis of the ``completable`` construct,
# exposed directly for tests and diagnostics.


@dataclass(frozen=True)
class PrefixParsed:
    parsed: str
    rest: str


@dataclass(frozen=True)
class IsPrefixOfParsable:
    substitution: str


@dataclass(frozen=True)
class StepFailure:
    pass


def completable_step(construct: Completable, s: str):
    """Classify ``s`` against the construct's sub-parser.

    Returns PrefixParsed when a leading complete token parses and input
    continues; IsPrefixOfParsable when the (unfinished) input is a prefix of
    something parsable; StepFailure otherwise.
    """
    if construct.parser not in PARSERS:
        raise GrammarError(f"unknown sub-parser {construct.parser!r}")
    parser = PARSERS[construct.parser]
    pi = scan_prefix(s)
    if not pi.tokens:
        return IsPrefixOfParsable(construct.sub)
    complete_upto = len(pi.tokens) - 1 if pi.partial else len(pi.tokens)
    if complete_upto > 0:
        m = parser.match_tokens(pi.texts[:complete_upto], 0)
        if m is not None:
            ntok = m[0]
            end = pi.tokens[ntok - 1].end
            return PrefixParsed(s[:end], s[end:].strip())
        return StepFailure()
    frag = pi.texts[-1]
    if parser.accepts_prefix(frag):
        return IsPrefixOfParsable(construct.sub)
    return StepFailure()
