"""HTTP completion service.

Serves one loaded domain over a small JSON API:

* ``GET /complete?prefix=...&k=10`` — ranked, graded completions.
* ``GET /parse?q=...`` — full parses of a complete query.
* ``GET /completability?prefix=...`` — viability of an unfinished prefix.
* ``GET /health`` — liveness plus domain metadata.

Every response carries an ``X-Handler-Ms`` header with the server-side
handling time. CORS is open so browser frontends can call the API directly.
"""

from __future__ import annotations

import time
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware

from . import __version__
from .completability import analyze
from .coordinator import Coordinator, CoordinatorConfig
from .domains import DomainBundle, load_bundle
from .grammar import parse
from .ir import Completion


def _completion_json(c: Completion) -> dict:
    return {
        "completion": c.completion,
        "interpretation": c.interpretation.serialize(),
        "dtype": c.dtype,
        "grade": c.grade.name,
        "score": c.score,
        "source": c.source,
    }


def create_app(
    bundle: Optional[DomainBundle] = None,
    *,
    domain: str = "bonds",
    coordinator: Optional[Coordinator] = None,
    config: CoordinatorConfig = CoordinatorConfig(),
) -> FastAPI:
    if bundle is None:
        bundle = load_bundle(domain)
    coord = coordinator or bundle.coordinator(config)

    app = FastAPI(title="semac completion service", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )
    app.state.bundle = bundle
    app.state.coordinator = coord

    @app.middleware("http")
    async def timing(request: Request, call_next):
        t0 = time.perf_counter()
        response = await call_next(request)
        response.headers["X-Handler-Ms"] = f"{(time.perf_counter() - t0) * 1000.0:.2f}"
        return response

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "version": __version__,
            "domain": bundle.definition.id,
            "engines": sorted(coord.engines),
        }

    @app.get("/complete")
    def complete(prefix: str = Query(...), k: int = Query(10, ge=1, le=50)):
        results = coord.complete(prefix, k)
        return {
            "prefix": prefix,
            "domain": bundle.definition.id,
            "completions": [_completion_json(c) for c in results],
        }

    @app.get("/parse")
    def parse_query(q: str = Query(...)):
        results = parse(bundle.grammar, bundle.store, q)
        return {
            "query": q,
            "parses": [
                {
                    "interpretation": r.formula.serialize(),
                    "atoms": [
                        {
                            "text": " ".join(r.derivation.tokens[s.start : s.end]),
                            "atom": s.atom.serialize(),
                            "span": [s.start, s.end],
                        }
                        for s in r.derivation.spanned
                    ],
                }
                for r in results
            ],
        }

    @app.get("/completability")
    def completability(prefix: str = Query(...)):
        result = analyze(bundle.grammar, bundle.store, prefix)
        return {
            "prefix": prefix,
            "completable": result.completable,
            "dead_at": result.dead_at,
        }

    return app
