"""Template-driven completion.

Templates are full-query skeletons written in the same formalism as the
query grammar; completing a prefix means walking the template set, consuming
the prefix and extending it to the next atom boundary. Infinite value spaces
(numbers, dates) appear as ``completable`` constructs, so an unfinished
number is extended with an ellipsis ("market cap > 2... usd") rather than a
guessed magnitude. Template completions are graded below log-derived ones:
they are well-formed and fully interpretable but carry no popularity
evidence.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grammar import Grammar, enumerate_completions
from .ir import Completion, Grade
from .lexicon import LexiconStore


@dataclass(frozen=True)
class TemplateConfig:
    raw_candidates: int = 100  # enumeration cap before ranking
    lex_gen_limit: int = 5  # lexicon expansions per reference


class TemplateEngine:
    def __init__(
        self,
        templates: Grammar,
        store: LexiconStore,
        config: TemplateConfig = TemplateConfig(),
    ):
        self.templates = templates
        self.store = store
        self.config = config

    def complete(self, prefix: str, k: int = 10) -> list[Completion]:
        if k <= 0:
            raise ValueError("k must be positive")
        results = enumerate_completions(
            self.templates,
            self.store,
            prefix,
            limit=min(k, self.config.raw_candidates),
            raw_cap=self.config.raw_candidates,
            lex_gen_limit=self.config.lex_gen_limit,
        )
        return [
            Completion(
                completion=r.completion,
                interpretation=r.formula,
                dtype=r.dtype,
                grade=Grade.MEDIUM,
                score=r.score,
                source="template",
                meta=(("generated_tokens", r.generated_tokens),),
            )
            for r in results
        ]
