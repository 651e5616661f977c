"""HTTP facade for workers, judges, and operators.

A single runtime object owns the active round: open task assignments,
submitted records, and accumulating judgments.  Reads serve from the
current snapshot; every mutation funnels through one lock, so two
concurrent identical drafts can never both be accepted.

Endpoints (JSON in/out; errors are ``{"error": code, "message": text}``):

    GET  /tasks/next?worker_id=
    GET  /prompts/{task_id}
    POST /tasks/{task_id}/check        {"draft": str}
    POST /tasks/{task_id}/submit       {"drafts": [str], "trees": [str|null]?}
    POST /records/{record_id}/judgments {"judge_id": str, "correct": bool}
    GET  /rounds/current/metrics
    POST /admin/rounds                 {"action": "start"|"advance"}
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    AlreadyFinalized,
    DuplicateJudge,
    EmptyCorpus,
    NoActiveRound,
    ParacrowdError,
    RoundAlreadyOpen,
    TaskExpired,
    UnknownRecord,
    UnknownTask,
    WrongCount,
)
from .metrics import compute_report
from .pipeline import RoundPlan, aggregate_judgments, finalize_round, intake_draft, plan_round
from .prompts import PromptSpec, ValidationVerdict, check_submission
from .records import Judgment, ParaphraseRecord, Status
from .store import Experiment
from .trees import parse_bracketed

Clock = Callable[[], datetime]


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass
class TaskAssignment:
    task_id: str
    prompt: PromptSpec
    expires_at: datetime
    worker_id: str
    seed_id: str

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "prompt": self.prompt.to_dict(),
            "expires_at": self.expires_at.isoformat(),
            "worker_id": self.worker_id,
        }


class ServiceRuntime:
    """In-memory state of the experiment being served."""

    def __init__(self, experiment: Experiment, clock: Clock = _utcnow):
        self.experiment = experiment
        self.state = experiment.load_state()
        self.clock = clock
        self.lock = threading.Lock()
        self.plan: RoundPlan | None = None
        self.open_tasks: dict[str, TaskAssignment] = {}
        self.served: set[tuple[str, str]] = set()  # (worker_id, seed_id)
        self.submissions: dict[str, int] = {}  # seed_id -> completed tasks
        self.records: dict[str, ParaphraseRecord] = {}  # this round's intake
        self.accepted: list[ParaphraseRecord] = []
        self.counts = dict(
            submitted=0,
            rejected_validation=0,
            pending_syntax=0,
            judged=0,
            accepted=0,
            rejected_judgment=0,
        )
        self.rejections: dict[str, int] = {}
        self._task_serial = 0

    # --- round lifecycle ---

    def start_round(self) -> dict:
        with self.lock:
            if self.plan is not None:
                raise RoundAlreadyOpen("advance the open round first")
            self.plan = plan_round(self.state)
            self.open_tasks.clear()
            self.served.clear()
            self.submissions = {seed.id: 0 for seed in self.state.seeds}
            for record in self.state.unverified:
                self.records[record.id] = record
            return {"round": self.state.round, "seeds": len(self.state.seeds)}

    def advance_round(self) -> dict:
        with self.lock:
            if self.plan is None:
                raise NoActiveRound("start the round before advancing it")
            pending = [
                r
                for r in self.records.values()
                if r.status in (Status.UNVERIFIED, Status.PENDING_SYNTAX)
            ]
            pending.sort(key=lambda r: r.id)
            finished = self.state.round
            next_state, report = finalize_round(
                self.state,
                self.accepted,
                pending,
                self.plan,
                dict(self.counts),
                dict(self.rejections),
            )
            self.experiment.save_round(finished, next_state, report)
            self.state = next_state
            self.plan = None
            self.open_tasks.clear()
            self.served.clear()
            self.submissions = {}
            self.records = {}
            self.accepted = []
            self.counts = {key: 0 for key in self.counts}
            self.rejections = {}
            return {"finished_round": finished, "next_round": next_state.round}

    def _require_round(self) -> RoundPlan:
        if self.plan is None:
            raise NoActiveRound("no active round; POST /admin/rounds start")
        return self.plan

    def _purge_expired(self):
        now = self.clock()
        for task_id in [t for t, a in self.open_tasks.items() if a.expires_at <= now]:
            assignment = self.open_tasks.pop(task_id)
            self.served.discard((assignment.worker_id, assignment.seed_id))

    # --- worker surface ---

    def next_task(self, worker_id: str) -> TaskAssignment | None:
        with self.lock:
            plan = self._require_round()
            self._purge_expired()
            open_per_seed: dict[str, int] = {}
            for assignment in self.open_tasks.values():
                open_per_seed[assignment.seed_id] = open_per_seed.get(assignment.seed_id, 0) + 1

            capacity = self.state.config.workers_per_seed
            eligible = [
                seed.id
                for seed in self.state.seeds
                if (worker_id, seed.id) not in self.served
                and self.submissions.get(seed.id, 0) + open_per_seed.get(seed.id, 0) < capacity
            ]
            if not eligible:
                return None
            eligible.sort(key=lambda sid: (self.submissions.get(sid, 0), sid))
            seed_id = eligible[0]

            self._task_serial += 1
            assignment = TaskAssignment(
                task_id=f"t{self.state.round}-{seed_id}-{worker_id}-{self._task_serial}",
                prompt=plan.prompts[seed_id],
                expires_at=self.clock()
                + timedelta(minutes=self.state.config.task_expiry_minutes),
                worker_id=worker_id,
                seed_id=seed_id,
            )
            self.open_tasks[assignment.task_id] = assignment
            self.served.add((worker_id, seed_id))
            return assignment

    def get_task(self, task_id: str) -> TaskAssignment:
        with self.lock:
            self._require_round()
            return self._open_task(task_id)

    def _open_task(self, task_id: str) -> TaskAssignment:
        assignment = self.open_tasks.get(task_id)
        if assignment is None:
            raise UnknownTask(f"no open task {task_id}")
        if assignment.expires_at <= self.clock():
            self.open_tasks.pop(task_id, None)
            self.served.discard((assignment.worker_id, assignment.seed_id))
            raise TaskExpired(f"task {task_id} expired")
        return assignment

    def _existing_texts(self) -> list[str]:
        texts = [r.text for r in self.state.curated]
        texts += [r.text for r in self.accepted]
        texts += [
            r.text
            for r in sorted(self.records.values(), key=lambda r: r.id)
            if r.status in (Status.UNVERIFIED, Status.PENDING_SYNTAX)
        ]
        return texts

    def check(self, task_id: str, draft: str) -> ValidationVerdict:
        with self.lock:
            self._require_round()
            assignment = self._open_task(task_id)
            return check_submission(
                draft, assignment.prompt, self._existing_texts(), None, self.state.config
            )

    def submit(
        self, task_id: str, drafts: list[str], trees: list[str | None] | None = None
    ) -> list[ValidationVerdict]:
        with self.lock:
            self._require_round()
            assignment = self._open_task(task_id)
            n = self.state.config.n_required
            if len(drafts) != n:
                raise WrongCount(f"expected {n} drafts, got {len(drafts)}")
            if trees is not None and len(trees) != n:
                raise WrongCount(f"expected {n} trees, got {len(trees)}")

            existing = self._existing_texts()
            verdicts: list[ValidationVerdict] = []
            siblings: list[str] = []
            for i, draft in enumerate(drafts):
                tree = None
                if trees is not None and trees[i]:
                    tree = parse_bracketed(trees[i])
                record_id = f"{assignment.task_id}-d{i}"
                self.counts["submitted"] += 1
                result = intake_draft(
                    draft,
                    tree,
                    assignment.prompt,
                    existing + siblings,
                    record_id,
                    assignment.worker_id,
                    self.state.round,
                    self.state.config,
                )
                verdicts.append(result.verdict)
                if result.record is None:
                    self.counts["rejected_validation"] += 1
                    for failure in result.verdict.fatal_failures:
                        key = failure.check.value
                        self.rejections[key] = self.rejections.get(key, 0) + 1
                    continue
                siblings.append(draft)
                self.records[record_id] = result.record
                if result.record.status is Status.PENDING_SYNTAX:
                    self.counts["pending_syntax"] += 1

            self.open_tasks.pop(task_id, None)
            self.submissions[assignment.seed_id] = (
                self.submissions.get(assignment.seed_id, 0) + 1
            )
            return verdicts

    # --- judge surface ---

    def add_judgment(self, record_id: str, judge_id: str, correct: bool) -> dict:
        with self.lock:
            record = self.records.get(record_id)
            if record is None:
                raise UnknownRecord(f"no record {record_id}")
            if record.status is not Status.UNVERIFIED:
                raise AlreadyFinalized(f"record {record_id} is {record.status.value}")
            if any(j.judge_id == judge_id for j in record.judgments):
                raise DuplicateJudge(f"{judge_id} already judged {record_id}")

            record = record.with_judgment(Judgment(judge_id=judge_id, correct=correct))
            config = self.state.config
            if len(record.judgments) == config.judges_per_paraphrase:
                status = aggregate_judgments(
                    record, config.accept_threshold, config.judges_per_paraphrase
                )
                record = record.with_status(status)
                self.counts["judged"] += 1
                if status is Status.ACCEPTED:
                    self.counts["accepted"] += 1
                    self.accepted.append(record)
                else:
                    self.counts["rejected_judgment"] += 1
            self.records[record_id] = record
            return {
                "record_id": record_id,
                "judgments": len(record.judgments),
                "status": record.status.value,
            }

    # --- operator surface ---

    def current_metrics(self) -> dict:
        with self.lock:
            records = self.state.curated + self.accepted
            if not records:
                raise EmptyCorpus("no curated paraphrases yet")
            seed_texts = {sid: u.text for sid, u in self.state.seed_history.items()}
            return compute_report(
                records, seed_texts, self.state.config.max_ngram, require_patterns=False
            ).to_dict()


# --- HTTP layer --------------------------------------------------------------

_STATUS_CODES: dict[str, int] = {
    "no_active_round": 409,
    "round_already_open": 409,
    "unknown_task": 404,
    "task_expired": 410,
    "wrong_count": 400,
    "duplicate_judge": 409,
    "unknown_record": 404,
    "already_finalized": 409,
    "empty_corpus": 409,
    "missing_pattern": 409,
    "empty_curated": 409,
}


class CheckBody(BaseModel):
    draft: str


class SubmitBody(BaseModel):
    drafts: list[str]
    trees: list[str | None] | None = None


class JudgmentBody(BaseModel):
    judge_id: str
    correct: bool


class AdminRoundBody(BaseModel):
    action: str


def create_app(runtime: ServiceRuntime, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="paracrowd", version="0.1.0")

    @app.exception_handler(ParacrowdError)
    async def on_error(_: Request, exc: ParacrowdError):
        return JSONResponse(
            status_code=_STATUS_CODES.get(exc.code, 400),
            content={"error": exc.code, "message": str(exc)},
        )

    @app.get("/tasks/next")
    def tasks_next(worker_id: str):
        assignment = runtime.next_task(worker_id)
        if assignment is None:
            return JSONResponse(
                status_code=404,
                content={"error": "no_task", "message": "no assignable seed left"},
            )
        return assignment.to_dict()

    @app.get("/prompts/{task_id}")
    def get_prompt(task_id: str):
        return runtime.get_task(task_id).prompt.to_dict()

    @app.post("/tasks/{task_id}/check")
    def check(task_id: str, body: CheckBody):
        return runtime.check(task_id, body.draft).to_dict()

    @app.post("/tasks/{task_id}/submit")
    def submit(task_id: str, body: SubmitBody):
        verdicts = runtime.submit(task_id, body.drafts, body.trees)
        return {"verdicts": [v.to_dict() for v in verdicts]}

    @app.post("/records/{record_id}/judgments")
    def judge(record_id: str, body: JudgmentBody):
        return runtime.add_judgment(record_id, body.judge_id, body.correct)

    @app.get("/rounds/current/metrics")
    def metrics():
        return runtime.current_metrics()

    @app.post("/admin/rounds")
    def admin_rounds(body: AdminRoundBody):
        if body.action == "start":
            return runtime.start_round()
        if body.action == "advance":
            return runtime.advance_round()
        return JSONResponse(
            status_code=400,
            content={"error": "bad_action", "message": f"unknown action {body.action!r}"},
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # mounted last so the API routes above keep precedence
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
