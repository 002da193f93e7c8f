"""Read-only HTTP API over a loaded database.

Every endpoint is a pure read of the immutable :class:`Database`, so
concurrent requests never interfere. Errors are JSON objects of the shape
``{"error": <slug>, "message": <human text>}``; bad pagination and bad
query parameters are 400, unknown ids are 404.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .model import Database, Form, Language, search

__all__ = ["create_app", "MAX_PAGE_SIZE"]

MAX_PAGE_SIZE = 500
DEFAULT_PAGE_SIZE = 50

_SEARCH_FIELDS = ("form", "gloss", "headword")


class _BadRequest(Exception):
    def __init__(self, message: str):
        self.message = message


def _parse_page(limit: str | None, offset: str | None) -> tuple[int, int]:
    try:
        limit_n = DEFAULT_PAGE_SIZE if limit in (None, "") else int(limit)
        offset_n = 0 if offset in (None, "") else int(offset)
    except ValueError:
        raise _BadRequest("limit and offset must be integers") from None
    if not 1 <= limit_n <= MAX_PAGE_SIZE:
        raise _BadRequest(f"limit must be between 1 and {MAX_PAGE_SIZE}")
    if offset_n < 0:
        raise _BadRequest("offset must be >= 0")
    return limit_n, offset_n


def _language_json(lang: Language, form_count: int) -> dict:
    return {
        "id": lang.id,
        "name": lang.name,
        "clade": list(lang.clade),
        "latitude": lang.latitude,
        "longitude": lang.longitude,
        "form_count": form_count,
    }


def _form_json(form: Form) -> dict:
    return {
        "id": form.id,
        "language_id": form.language_id,
        "cognateset_id": form.cognateset_id,
        "form": form.form,
        "gloss": form.gloss,
        "native": form.native,
        "ipa": form.ipa,
        "original": form.original,
        "subset_id": form.subset_id,
        "notes": form.notes,
        "source_refs": [{"bibkey": r.bibkey, "pages": r.pages} for r in form.source_refs],
    }


def create_app(db: Database, cors_origins: tuple[str, ...] = ()) -> FastAPI:
    app = FastAPI(title="jambu", docs_url=None, redoc_url=None)

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["GET"],
            allow_headers=["*"],
        )

    @app.exception_handler(_BadRequest)
    async def bad_request_handler(request: Request, exc: _BadRequest):
        return JSONResponse(status_code=400, content={"error": "bad-request", "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "bad-request", "message": str(exc)})

    @app.exception_handler(StarletteHTTPException)
    async def http_handler(request: Request, exc: StarletteHTTPException):
        slug = "not-found" if exc.status_code == 404 else "error"
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": slug, "message": str(exc.detail)},
        )

    @app.get("/healthz")
    def healthz():
        return PlainTextResponse("ok")

    @app.get("/languages")
    def languages(clade: str = "", q: str = "", limit: str | None = None, offset: str | None = None):
        limit_n, offset_n = _parse_page(limit, offset)
        prefix = tuple(p.strip() for p in clade.split(";") if p.strip())
        needle = q.lower()
        rows = []
        for lang in sorted(db.languages, key=lambda l: l.id):
            if prefix and lang.clade[: len(prefix)] != prefix:
                continue
            if needle and needle not in lang.name.lower():
                continue
            rows.append(lang)
        items = [
            _language_json(lang, len(db.forms_by_language.get(lang.id, ())))
            for lang in rows[offset_n : offset_n + limit_n]
        ]
        return {"items": items, "total": len(rows), "limit": limit_n, "offset": offset_n}

    @app.get("/entries/{set_id}")
    def entry(set_id: str):
        cs = db.cognatesets_by_id.get(set_id)
        if cs is None:
            raise StarletteHTTPException(status_code=404, detail=f"no cognate set with id {set_id!r}")
        forms = db.forms_by_cognateset.get(set_id, ())
        grouped: dict[str, list[Form]] = {}
        for f in forms:                      # id order; grouping preserves it per language
            grouped.setdefault(f.language_id, []).append(f)
        languages = []
        for language_id in sorted(grouped):
            lang = db.languages_by_id.get(language_id)
            languages.append(
                {
                    "language": _language_json(lang, len(db.forms_by_language.get(language_id, ())))
                    if lang
                    else {"id": language_id, "name": "", "clade": [], "latitude": None, "longitude": None, "form_count": 0},
                    "forms": [_form_json(f) for f in grouped[language_id]],
                }
            )
        return {
            "cognateset": {
                "id": cs.id,
                "headword": cs.headword,
                "description": cs.description,
                "notes": cs.notes,
            },
            "form_count": len(forms),
            "languages": languages,
        }

    @app.get("/search")
    def search_endpoint(
        q: str = "",
        field: str = "form",
        lang: str = "",
        fold: str = "",
        limit: str | None = None,
        offset: str | None = None,
    ):
        limit_n, offset_n = _parse_page(limit, offset)
        if not q:
            raise _BadRequest("missing required query parameter: q")
        if field not in _SEARCH_FIELDS:
            raise _BadRequest(f"field must be one of {', '.join(_SEARCH_FIELDS)}")
        folding = fold in ("1", "true", "yes")

        if lang:
            # filter first, then page, so totals refer to the filtered list
            page = search(db, q, field, limit=len(db.forms) + 1, offset=0, fold_diacritics=folding)
            filtered = [f for f in page.items if f.language_id == lang]
            total = len(filtered)
            items = filtered[offset_n : offset_n + limit_n]
        else:
            page = search(db, q, field, limit=limit_n, offset=offset_n, fold_diacritics=folding)
            total = page.total
            items = list(page.items)

        hits = []
        for f in items:
            cs = db.cognatesets_by_id.get(f.cognateset_id)
            lang_row = db.languages_by_id.get(f.language_id)
            hits.append(
                {
                    "id": f.id,
                    "form": f.form,
                    "gloss": f.gloss,
                    "language_id": f.language_id,
                    "language_name": lang_row.name if lang_row else "",
                    "cognateset_id": f.cognateset_id,
                    "headword": cs.headword if cs else "",
                }
            )
        return {"items": hits, "total": total, "limit": limit_n, "offset": offset_n}

    @app.get("/geo")
    def geo():
        features = []
        omitted = 0
        for lang in sorted(db.languages, key=lambda l: l.id):
            if lang.latitude is None or lang.longitude is None:
                omitted += 1
                continue
            features.append(
                {
                    "id": lang.id,
                    "name": lang.name,
                    "family": lang.family,
                    "form_count": len(db.forms_by_language.get(lang.id, ())),
                    "latitude": lang.latitude,
                    "longitude": lang.longitude,
                }
            )
        return {"features": features, "omitted": omitted}

    return app
