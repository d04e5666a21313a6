"""Assembly of completable domains from their asset files.

A domain directory contains ``domain.json`` plus the assets it names: a
query grammar, a template set, lexicons, an optional query log and an
optional phrase list. Loading a bundle wires these into ready-to-serve
engines behind a coordinator. Three example domains ship with the package
(corporate bonds, equity screening, news search).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .atomic import AtomicConfig, AtomicEngine, AtomModel, build_atom_model
from .coordinator import Coordinator, CoordinatorConfig
from .domain import DomainConfigError, DomainDefinition, load_domain_definition
from .grammar import Grammar
from .grammar_dsl import load_grammar
from .lexicon import Lexicon, LexiconEntry, LexiconStore, load_lexicon
from .mpc import MpcIndex
from .querylog import LogEntry, load_log, time_shift_log
from .templates import TemplateEngine


def assets_root() -> Path:
    return Path(str(resources.files("semac").joinpath("assets")))


def available_domains() -> list[str]:
    root = assets_root()
    if not root.is_dir():
        return []
    return sorted(p.name for p in root.iterdir() if (p / "domain.json").is_file())


def builtin_domain_path(name: str) -> Path:
    path = assets_root() / name / "domain.json"
    if not path.is_file():
        raise DomainConfigError(
            f"unknown built-in domain {name!r}; available: {', '.join(available_domains())}"
        )
    return path


def resolve_domain_path(name_or_path: str) -> Path:
    p = Path(name_or_path)
    if p.is_file():
        return p
    if p.is_dir() and (p / "domain.json").is_file():
        return p / "domain.json"
    return builtin_domain_path(name_or_path)


def load_phrase_list(path) -> list[tuple[str, int]]:
    """Phrase list: ``phrase<TAB>count`` per line."""
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DomainConfigError(f"{path}:{lineno}: expected 2 tab-separated fields")
        phrase, countstr = parts
        try:
            count = int(countstr)
        except ValueError:
            raise DomainConfigError(f"{path}:{lineno}: bad count {countstr!r}") from None
        if count <= 0:
            raise DomainConfigError(f"{path}:{lineno}: count must be positive")
        out.append((" ".join(phrase.lower().split()), count))
    return out


def phrase_lexicon(phrases: list[tuple[str, int]], name: str = "phrases") -> Lexicon:
    lex = Lexicon(name)
    for phrase, count in phrases:
        lex.add(LexiconEntry(tuple(phrase.split()), phrase, frozenset(), float(count)))
    return lex.freeze()


@dataclass
class DomainBundle:
    definition: DomainDefinition
    store: LexiconStore
    grammar: Grammar
    templates: Optional[Grammar]
    log: list[LogEntry]
    mpc: Optional[MpcIndex] = None
    atom_model: Optional[AtomModel] = None

    def engines(self, atomic_config: AtomicConfig = AtomicConfig()) -> dict:
        out = {}
        if self.mpc is not None:
            out["mpc"] = self.mpc
        if self.atom_model is not None:
            out["atomic"] = AtomicEngine(self.atom_model, self.grammar, self.store, atomic_config)
        if self.templates is not None:
            out["template"] = TemplateEngine(self.templates, self.store)
        return out

    def coordinator(
        self,
        config: CoordinatorConfig = CoordinatorConfig(),
        atomic_config: AtomicConfig = AtomicConfig(),
    ) -> Coordinator:
        return Coordinator(self.engines(atomic_config), config)


def load_store(definition: DomainDefinition) -> LexiconStore:
    lexicons: dict[str, Lexicon] = {}
    spec = definition.asset_paths.get("lexicons", {})
    base = definition.base_dir or Path(".")
    if isinstance(spec, dict):
        items = spec.items()
    else:
        items = ((Path(p).stem, p) for p in spec)
    for name, rel in items:
        lexicons[name] = load_lexicon(base / rel, name=name)
    phrases_rel = definition.asset_paths.get("phrases")
    if phrases_rel is not None:
        lexicons["phrases"] = phrase_lexicon(load_phrase_list(base / phrases_rel))
    return LexiconStore(definition, lexicons)


def load_bundle(
    name_or_path: str,
    *,
    build_indexes: bool = True,
    now: Optional[dt.date] = None,
    normalize_freshness: bool = True,
) -> DomainBundle:
    path = resolve_domain_path(name_or_path)
    definition = load_domain_definition(path)
    store = load_store(definition)
    grammar_path = definition.path("grammar")
    if grammar_path is None:
        raise DomainConfigError(f"{path}: domain declares no grammar")
    grammar = load_grammar(grammar_path, store)
    templates_path = definition.path("templates")
    templates = load_grammar(templates_path, store) if templates_path else None
    log_path = definition.path("log")
    log = load_log(log_path) if log_path else []
    bundle = DomainBundle(definition, store, grammar, templates, log)
    if build_indexes and log:
        now = now or dt.date.today()
        if normalize_freshness:
            entries = [s.entry for s in time_shift_log(grammar, store, log, now)]
        else:
            entries = log
        bundle.mpc, _ = MpcIndex.build(grammar, store, entries)
        bundle.atom_model, _ = build_atom_model(grammar, store, entries)
    return bundle
