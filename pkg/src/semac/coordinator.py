"""Completion coordination: run the algorithms, merge, grade, diversify.

The coordinator fans a prefix out to the registered engines concurrently
under a wall-clock budget, deduplicates the union (two suggestions are the
same when their canonical interpretations or their normalized strings
coincide), and weaves the survivors into one ranked list: suggestions are
grouped by (grade tier, diversification type), groups are ordered by grade
then strength, and the final list takes one suggestion per group per round,
so the visible top of the list spans distinct constraint types instead of
ten spellings of the same one.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, wait
from dataclasses import dataclass, field as dc_field
from typing import Optional, Protocol

from .ir import Completion, Grade


class CompletionEngine(Protocol):
    def complete(self, prefix: str, k: int = 10) -> list[Completion]: ...


# engines earlier in this list win ties when merging duplicates
SOURCE_PRIORITY = ("mpc", "atomic", "template")


def _priority(source: str) -> int:
    try:
        return SOURCE_PRIORITY.index(source)
    except ValueError:
        return len(SOURCE_PRIORITY)


def _norm_text(s: str) -> str:
    return " ".join(s.lower().split())


@dataclass
class CoordinatorConfig:
    k: int = 10  # display budget
    per_engine_k: int = 50
    budget_ms: Optional[float] = 50.0  # None waits for every engine
    grade_floor: Grade = Grade.LOW


@dataclass
class CoordinatorReport:
    timed_out: list[str] = dc_field(default_factory=list)
    failed: dict = dc_field(default_factory=dict)


class Coordinator:
    def __init__(self, engines: dict[str, CompletionEngine], config: CoordinatorConfig = CoordinatorConfig()):
        self.engines = dict(engines)
        self.config = config
        self._pool = ThreadPoolExecutor(max_workers=max(1, len(self.engines)))

    def close(self) -> None:
        self._pool.shutdown(wait=False, cancel_futures=True)

    # -- pipeline stages (also usable separately in tests) -------------------

    def gather(self, prefix: str, report: Optional[CoordinatorReport] = None) -> list[Completion]:
        cfg = self.config
        futures = {
            name: self._pool.submit(engine.complete, prefix, cfg.per_engine_k)
            for name, engine in self.engines.items()
        }
        timeout = None if cfg.budget_ms is None else cfg.budget_ms / 1000.0
        wait(list(futures.values()), timeout=timeout)
        out: list[Completion] = []
        for name, fut in futures.items():
            if not fut.done():
                fut.cancel()
                if report is not None:
                    report.timed_out.append(name)
                continue
            try:
                out.extend(fut.result())
            except Exception as e:
                if report is not None:
                    report.failed[name] = repr(e)
        return out

    @staticmethod
    def dedupe(completions: list[Completion]) -> list[Completion]:
        """Collapse duplicates by interpretation or by surface string; the
        better-graded (then higher-priority, then higher-scored) one wins."""
        ranked = sorted(
            completions,
            key=lambda c: (-int(c.grade), _priority(c.source), -c.score, c.completion),
        )
        by_sem: dict[str, Completion] = {}
        by_text: dict[str, Completion] = {}
        out = []
        for c in ranked:
            sem = c.key()
            text = _norm_text(c.completion)
            if sem in by_sem or text in by_text:
                continue
            by_sem[sem] = c
            by_text[text] = c
            out.append(c)
        return out

    def weave(self, completions: list[Completion], k: Optional[int] = None) -> list[Completion]:
        k = k or self.config.k
        floor = self.config.grade_floor
        eligible = [c for c in completions if c.grade >= floor]
        groups: dict[tuple[int, str], list[Completion]] = {}
        for c in eligible:
            groups.setdefault((-int(c.grade), c.dtype), []).append(c)
        for items in groups.values():
            items.sort(key=lambda c: (-c.score, _priority(c.source), c.completion))
        # tiers strictly ordered; within a tier, stronger groups first
        tiers: dict[int, list[list[Completion]]] = {}
        for (neg_grade, _), items in sorted(
            groups.items(),
            key=lambda kv: (kv[0][0], -kv[1][0].score, _priority(kv[1][0].source), kv[0][1]),
        ):
            tiers.setdefault(neg_grade, []).append(items)
        out: list[Completion] = []
        for neg_grade in sorted(tiers):
            buckets = tiers[neg_grade]
            row = 0
            while len(out) < k:
                emitted = False
                for items in buckets:
                    if row < len(items):
                        out.append(items[row])
                        emitted = True
                        if len(out) >= k:
                            break
                if not emitted:
                    break
                row += 1
            if len(out) >= k:
                break
        return out[:k]

    def complete(self, prefix: str, k: Optional[int] = None, report: Optional[CoordinatorReport] = None) -> list[Completion]:
        return self.weave(self.dedupe(self.gather(prefix, report)), k)
