"""HTTP facade: sessions, lexicon, suggestions, canvas, image jobs, cards.

Every module error surfaces as a stable ``{"error": {code, message, details}}``
payload whose HTTP status is mapped deterministically from the code. Session
mutations are serialized per session id; image generation runs as polled jobs.
"""

from __future__ import annotations

import os
import threading
from contextlib import contextmanager
from typing import Iterator

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__
from . import assoc, canvas, keywords
from .config import AppConfig
from .errors import ConfigError, NotFound, WordcraftError
from .gateway import Gateway, TemplateSet
from .jobs import Job, JobManager
from .lexicon import Lexicon, load_lexicon
from .models import BBox
from .profiles import get_profile
from .providers import MockProvider, OpenAICompatProvider, load_script
from .runtime import RandomIds, SequentialIds, SteppingClock, SystemClock
from .session import LearningSession, create_session, propagate_keyword_change, tick_active
from .store import SessionStore


class Service:
    """Owns the wiring: lexicon, gateway, store, jobs, clock, locks."""

    def __init__(self, config: AppConfig) -> None:
        self.config = config
        try:
            store = SessionStore(config.data_dir)
        except OSError as exc:
            raise ConfigError(f"data dir {config.data_dir!r} is not usable: {exc}") from None
        if not os.access(store.data_dir, os.W_OK | os.R_OK):
            raise ConfigError(f"data dir {config.data_dir!r} is not readable/writable")
        self.store = store
        self.profile = get_profile(config.profile)
        self.lexicon: Lexicon = load_lexicon(config.resolved_lexicon_path(), self.profile)
        templates = TemplateSet.load(config.resolved_config_dir(), self.profile.profile_id)
        if config.mock_provider:
            provider = MockProvider(load_script(config.resolved_mock_script()))
            self.clock = SteppingClock()
            self.ids = SequentialIds()
        else:
            provider = OpenAICompatProvider(config.provider_config())
            self.clock = SystemClock()
            self.ids = RandomIds()
        self.gateway = Gateway(
            provider=provider,
            templates=templates,
            profile=self.profile,
            config=config.provider_config(),
            temperatures=dict(config.temperatures),
            extra_styles=dict(config.extra_styles),
        )
        self.jobs = JobManager(workers=config.image_workers)
        self._sessions: dict[str, LearningSession] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._registry_lock = threading.Lock()

    @property
    def provider_mode(self) -> str:
        return "mock" if self.config.mock_provider else "live"

    def _lock_for(self, session_id: str) -> threading.RLock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.RLock()
            return self._locks[session_id]

    def _get(self, session_id: str) -> LearningSession:
        session = self._sessions.get(session_id)
        if session is None:
            session = self.store.load(session_id)
            self._sessions[session_id] = session
        return session

    @contextmanager
    def reader(self, session_id: str) -> Iterator[LearningSession]:
        with self._lock_for(session_id):
            yield self._get(session_id)

    @contextmanager
    def writer(self, session_id: str) -> Iterator[LearningSession]:
        """Single writer per session: mutate, then persist the new events."""
        with self._lock_for(session_id):
            session = self._get(session_id)
            before = len(session.events)
            yield session
            self.store.save(session, session.events[before:])

    def now(self) -> int:
        return self.clock.now_ms()

    def create(self, word_id: str, sense_id: str) -> LearningSession:
        session_id = self.ids.new_id("s")
        session = create_session(
            self.lexicon, word_id, sense_id, session_id=session_id, at=self.now()
        )
        with self._lock_for(session_id):
            self._sessions[session_id] = session
            self.store.save(session, session.events)
        return session

    def start_image_job(self, session_id: str, style: str, idempotency_key: str | None) -> Job:
        with self.reader(session_id) as session:
            request = canvas.build_image_request(session, style, self.gateway)
        variables = canvas.image_request_variables(request, self.gateway)
        prompt = self.gateway.render_text("image_compose", variables)
        job_id = self.ids.new_id("job")

        def generate():
            return self.gateway.call_image(prompt)

        def attach(job: Job, result) -> str:
            image_ref = self.store.write_image(session_id, job.job_id, result.data)
            with self.writer(session_id) as session:
                canvas.attach_image(
                    session,
                    image_id=job.job_id,
                    image_ref=image_ref,
                    style=style,
                    width=result.width,
                    height=result.height,
                    at=self.now(),
                )
            return image_ref

        return self.jobs.submit(
            job_id=job_id,
            session_id=session_id,
            style=style,
            idempotency_key=idempotency_key,
            generate=generate,
            attach=attach,
        )

    def record_card(self, session_id: str, allow_missing_image: bool):
        with self.writer(session_id) as session:
            card_id = self.ids.new_id("card")
            card = canvas.record_word_card(
                session,
                card_id=card_id,
                allow_missing_image=allow_missing_image,
                at=self.now(),
            )
            image_data = None
            if session.images:
                image_data = self.store.read_blob(session.images[-1].image_ref)
            self.store.write_card(card, image_data)
        return card


def session_view(session: LearningSession) -> dict:
    """Session state without the raw event log (served separately)."""
    data = session.to_dict()
    data["event_count"] = len(data.pop("events"))
    return data


# -- request bodies ----------------------------------------------------------------


class CreateSessionBody(BaseModel):
    word_id: str
    sense_id: str


class SegmentBody(BaseModel):
    start: int
    end: int


class TreeNodeBody(BaseModel):
    anchor_id: str
    concept: str
    parent_id: str | None = None
    cue: str = ""
    translation: str = ""
    origin: str = "user"


class TreeSuggestBody(BaseModel):
    count: int = 4


class KeywordSuggestBody(BaseModel):
    node_ids: list[str] = []


class KeywordSelectBody(BaseModel):
    card_id: str | None = None
    keyword: str | None = None
    explanation: str = ""
    chain_node_ids: list[str] = []


class ReplaceKeywordBody(BaseModel):
    keyword: str
    explanation: str = ""
    chain: list[str] | None = None


class LinkBody(BaseModel):
    node_a: str
    node_b: str


class LinkPatchBody(BaseModel):
    chain: str | None = None
    note: str | None = None


class BBoxBody(BaseModel):
    x: float
    y: float
    w: float
    h: float


class ElementBody(BaseModel):
    bbox: BBoxBody
    tags: list[str]
    description: str = ""


class ElementPatchBody(BaseModel):
    bbox: BBoxBody | None = None
    tags: list[str] | None = None
    description: str | None = None


class RelationBody(BaseModel):
    element_a: str
    element_b: str
    text: str = ""


class SuggestElementsBody(BaseModel):
    node_ids: list[str]


class SuggestRelationsBody(BaseModel):
    element_a: str
    element_b: str


class ImageBody(BaseModel):
    style: str
    idempotency_key: str | None = None


class CardBody(BaseModel):
    allow_missing_image: bool = False


class TickBody(BaseModel):
    delta_ms: int


# -- application -------------------------------------------------------------------


def build_app(config: AppConfig) -> FastAPI:
    service = Service(config)
    app = FastAPI(title="wordcraft", version=__version__)
    app.state.service = service

    @app.exception_handler(WordcraftError)
    async def handle_service_error(_request: Request, exc: WordcraftError) -> JSONResponse:
        return JSONResponse(status_code=exc.http_status, content={"error": exc.to_dict()})

    @app.exception_handler(RequestValidationError)
    async def handle_validation(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={
                "error": {
                    "code": "VALIDATION_ERROR",
                    "message": "invalid request body",
                    "details": {"errors": exc.errors()},
                }
            },
        )

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_error(_request: Request, exc: StarletteHTTPException) -> JSONResponse:
        code = "NOT_FOUND" if exc.status_code == 404 else "INTERNAL_ERROR"
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": {"code": code, "message": str(exc.detail), "details": {}}},
        )

    # -- health and lexicon ------------------------------------------------------

    @app.get("/healthz")
    def healthz() -> dict:
        return {
            "status": "ok",
            "provider_mode": service.provider_mode,
            "profile": service.profile.profile_id,
            "version": __version__,
        }

    @app.get("/lexicon/words")
    def search_words(q: str = "") -> dict:
        return {"words": [e.to_dict() for e in service.lexicon.search(q)]}

    # -- sessions ----------------------------------------------------------------

    @app.post("/sessions")
    def post_session(body: CreateSessionBody) -> dict:
        return session_view(service.create(body.word_id, body.sense_id))

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        with service.reader(session_id) as session:
            return session_view(session)

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str) -> dict:
        with service.reader(session_id) as session:
            return {"events": [e.to_dict() for e in session.events]}

    @app.post("/sessions/{session_id}/tick")
    def post_tick(session_id: str, body: TickBody) -> dict:
        with service.writer(session_id) as session:
            tick_active(session, body.delta_ms, at=service.now())
            return {"total_active_ms": session.total_active_ms}

    # -- segments ------------------------------------------------------------------

    @app.post("/sessions/{session_id}/segments")
    def post_segment(session_id: str, body: SegmentBody) -> dict:
        with service.writer(session_id) as session:
            segment = keywords.brush_segment(session, body.start, body.end, at=service.now())
            return {"segment": segment.to_dict(), "session": session_view(session)}

    @app.delete("/sessions/{session_id}/segments")
    def delete_segments(session_id: str) -> dict:
        with service.writer(session_id) as session:
            keywords.clear_segments(session, at=service.now())
            return session_view(session)

    # -- semantic tree ----------------------------------------------------------------

    @app.post("/sessions/{session_id}/tree/nodes")
    def post_tree_node(session_id: str, body: TreeNodeBody) -> dict:
        with service.writer(session_id) as session:
            node = keywords.add_semantic_node(
                session,
                body.anchor_id,
                body.concept,
                parent_id=body.parent_id,
                cue=body.cue,
                translation=body.translation,
                origin=body.origin,
                at=service.now(),
            )
            return node.to_dict()

    @app.post("/sessions/{session_id}/tree/{anchor_id}/suggest")
    def post_tree_suggest(session_id: str, anchor_id: str, body: TreeSuggestBody) -> dict:
        with service.reader(session_id) as session:
            suggestions = keywords.suggest_semantic_nodes(
                session, service.gateway, anchor_id, count=body.count
            )
            return {"suggestions": [s.to_dict() for s in suggestions]}

    # -- keywords ------------------------------------------------------------------------

    @app.post("/sessions/{session_id}/segments/{segment_id}/keywords/suggest")
    def post_keyword_suggest(session_id: str, segment_id: str, body: KeywordSuggestBody) -> dict:
        with service.writer(session_id) as session:
            batch = keywords.suggest_keywords(
                session, service.gateway, segment_id, body.node_ids, at=service.now()
            )
            return batch.to_dict()

    @app.post("/sessions/{session_id}/segments/{segment_id}/keywords/select")
    def post_keyword_select(session_id: str, segment_id: str, body: KeywordSelectBody) -> dict:
        with service.writer(session_id) as session:
            choice = keywords.select_keyword(
                session,
                segment_id,
                card_id=body.card_id,
                keyword=body.keyword,
                explanation=body.explanation,
                chain_node_ids=body.chain_node_ids,
                at=service.now(),
            )
            return {"choice": choice.to_dict(), "session": session_view(session)}

    @app.post("/sessions/{session_id}/keywords/{keyword_id}/replace")
    def post_keyword_replace(session_id: str, keyword_id: str, body: ReplaceKeywordBody) -> dict:
        with service.writer(session_id) as session:
            choice = propagate_keyword_change(
                session,
                keyword_id,
                keyword=body.keyword,
                explanation=body.explanation,
                chain=body.chain,
                at=service.now(),
            )
            return {"choice": choice.to_dict(), "session": session_view(session)}

    # -- association map ---------------------------------------------------------------------

    @app.post("/sessions/{session_id}/map/links")
    def post_link(session_id: str, body: LinkBody) -> dict:
        with service.writer(session_id) as session:
            link = assoc.upsert_link(session, body.node_a, body.node_b, at=service.now())
            return link.to_dict()

    @app.patch("/sessions/{session_id}/map/links/{link_id}")
    def patch_link(session_id: str, link_id: str, body: LinkPatchBody) -> dict:
        with service.writer(session_id) as session:
            if body.chain is not None:
                assoc.set_chain(
                    session,
                    link_id,
                    body.chain,
                    max_chars=service.profile.chain_max,
                    at=service.now(),
                )
            if body.note is not None:
                assoc.add_note(session, link_id, body.note, at=service.now())
            link = session.map.link(link_id)
            if link is None:
                raise NotFound(f"unknown link {link_id!r}")
            return link.to_dict()

    @app.delete("/sessions/{session_id}/map/links/{link_id}")
    def delete_link(session_id: str, link_id: str) -> dict:
        with service.writer(session_id) as session:
            assoc.delete_link(session, link_id, at=service.now())
            return session_view(session)

    @app.post("/sessions/{session_id}/map/links/{link_id}/hints")
    def post_hints(session_id: str, link_id: str) -> dict:
        with service.reader(session_id) as session:
            return {"hints": assoc.suggest_hints(session, service.gateway, link_id)}

    # -- canvas ------------------------------------------------------------------------------

    @app.post("/sessions/{session_id}/canvas/elements")
    def post_element(session_id: str, body: ElementBody) -> dict:
        with service.writer(session_id) as session:
            element = canvas.add_element(
                session,
                BBox(body.bbox.x, body.bbox.y, body.bbox.w, body.bbox.h),
                body.tags,
                body.description,
                at=service.now(),
            )
            return {
                "element": element.to_dict(),
                "recall_path": canvas.derive_recall_path(session).to_dict(),
            }

    @app.patch("/sessions/{session_id}/canvas/elements/{element_id}")
    def patch_element(session_id: str, element_id: str, body: ElementPatchBody) -> dict:
        with service.writer(session_id) as session:
            element = canvas.update_element(
                session,
                element_id,
                bbox=BBox(body.bbox.x, body.bbox.y, body.bbox.w, body.bbox.h)
                if body.bbox
                else None,
                tags=body.tags,
                description=body.description,
                at=service.now(),
            )
            return {
                "element": element.to_dict(),
                "recall_path": canvas.derive_recall_path(session).to_dict(),
            }

    @app.delete("/sessions/{session_id}/canvas/elements/{element_id}")
    def delete_element(session_id: str, element_id: str) -> dict:
        with service.writer(session_id) as session:
            canvas.delete_element(session, element_id, at=service.now())
            return {
                "session": session_view(session),
                "recall_path": canvas.derive_recall_path(session).to_dict(),
            }

    @app.post("/sessions/{session_id}/canvas/relations")
    def post_relation(session_id: str, body: RelationBody) -> dict:
        with service.writer(session_id) as session:
            relation = canvas.add_relation(
                session, body.element_a, body.element_b, body.text, at=service.now()
            )
            return {
                "relation": relation.to_dict(),
                "recall_path": canvas.derive_recall_path(session).to_dict(),
            }

    @app.delete("/sessions/{session_id}/canvas/relations/{relation_id}")
    def delete_relation(session_id: str, relation_id: str) -> dict:
        with service.writer(session_id) as session:
            canvas.delete_relation(session, relation_id, at=service.now())
            return {
                "session": session_view(session),
                "recall_path": canvas.derive_recall_path(session).to_dict(),
            }

    @app.post("/sessions/{session_id}/canvas/suggest-elements")
    def post_suggest_elements(session_id: str, body: SuggestElementsBody) -> dict:
        with service.reader(session_id) as session:
            return {
                "suggestions": canvas.suggest_visual_elements(
                    session, service.gateway, body.node_ids
                )
            }

    @app.post("/sessions/{session_id}/canvas/suggest-relations")
    def post_suggest_relations(session_id: str, body: SuggestRelationsBody) -> dict:
        with service.reader(session_id) as session:
            return {
                "suggestions": canvas.suggest_relations(
                    session, service.gateway, body.element_a, body.element_b
                )
            }

    @app.get("/sessions/{session_id}/recall-path")
    def get_recall_path(session_id: str) -> dict:
        with service.reader(session_id) as session:
            path = canvas.derive_recall_path(session).to_dict()
            cov = canvas.compute_coverage(session)
            labels = {n.node_id: n.label for n in session.map.nodes}
            path["missing_nodes"] = [labels.get(n, n) for n in cov.missing_nodes]
            path["missing_links"] = [
                [labels.get(l.endpoints[0], ""), labels.get(l.endpoints[1], "")]
                for l in session.map.links
                if l.link_id in cov.missing_links
            ]
            return path

    # -- imagery jobs and cards ----------------------------------------------------------------

    @app.get("/styles")
    def get_styles() -> dict:
        return {"styles": canvas.available_styles(service.gateway)}

    @app.post("/sessions/{session_id}/image")
    def post_image(session_id: str, body: ImageBody) -> dict:
        job = service.start_image_job(session_id, body.style, body.idempotency_key)
        return job.to_dict()

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str) -> dict:
        return service.jobs.get(job_id).to_dict()

    @app.post("/sessions/{session_id}/card")
    def post_card(session_id: str, body: CardBody) -> dict:
        card = service.record_card(session_id, body.allow_missing_image)
        return card.to_dict()

    @app.get("/cards")
    def get_cards() -> dict:
        return {"cards": [c.to_dict() for c in service.store.list_cards()]}

    @app.get("/cards/{card_id}")
    def get_card(card_id: str) -> dict:
        return service.store.read_card(card_id).to_dict()

    @app.get("/cards/{card_id}/image")
    def get_card_image(card_id: str) -> Response:
        data = service.store.read_blob(f"cards/{card_id}.png")
        return Response(content=data, media_type="image/png")

    @app.get("/images/{session_id}/{name}")
    def get_image(session_id: str, name: str) -> Response:
        data = service.store.read_blob(f"images/{session_id}/{name}")
        return Response(content=data, media_type="image/png")

    return app


def serve(config: AppConfig) -> None:
    """Build the app and block serving it."""
    import uvicorn

    from .errors import PortInUse

    app = build_app(config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    except OSError as exc:
        if exc.errno == 98:
            raise PortInUse(f"port {config.port} is already in use") from None
        raise
