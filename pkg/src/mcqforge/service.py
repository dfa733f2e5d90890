"""HTTP service hosting the human-evaluation API and rating store.

Assessors are blinded: task payloads never carry the accept/reject
verdict, which exists only server-side for the statistics endpoints.
The context passage is hidden by default and exposed behind a toggle;
the toggle state is recorded with every rating so an analysis can tell
which ratings were made with the passage visible.

Status codes are part of the contract: unknown assessor 404, invalid
enum value 400, duplicate (assessor, item) rating 409.
"""

from datetime import datetime, timezone

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from mcqforge.corpus import McqItem
from mcqforge.errors import (
    DegenerateDistributionError,
    DuplicateRatingError,
    ValidationError,
)
from mcqforge.humaneval import (
    Q1,
    Q2,
    AssignmentPlan,
    RatingRecord,
    aggregate_ratings,
    chi_squared_test,
    fleiss_kappa,
    ratings_to_counts,
)
from mcqforge.store import RatingStore


def _group_counts(records: list[RatingRecord], verdicts: dict[str, bool],
                  question: str) -> list[list[int]]:
    """2 x categories table: rows accepted/rejected, columns categories."""
    cats: list = list(Q1) if question == "q1" else list(Q2)
    rows = []
    for flag in (True, False):
        in_group = [r for r in records if verdicts[r.item] == flag]
        if question == "q1":
            answers = [r.q1 for r in in_group]
        else:
            answers = [r.q2 for r in in_group if r.q2 is not None]
        rows.append([sum(1 for a in answers if a == cat) for cat in cats])
    return rows


def _kappa_block(records, plan: AssignmentPlan, question: str) -> dict:
    counts = ratings_to_counts(records, plan.shared_items, len(plan.assessors), question)
    if not counts:
        return {"status": "pending", "kappa": None, "complete_items": 0}
    try:
        result = fleiss_kappa(counts, n_raters=len(plan.assessors))
    except DegenerateDistributionError:
        return {"status": "degenerate", "kappa": None, "complete_items": len(counts)}
    return {
        "status": "ok",
        "kappa": result.kappa,
        "mean_observed_agreement": result.mean_observed_agreement,
        "expected_agreement": result.expected_agreement,
        "complete_items": result.n_subjects,
    }


def _chi2_block(records, verdicts: dict[str, bool], question: str) -> dict:
    table = _group_counts(records, verdicts, question)
    try:
        result = chi_squared_test(table)
    except ValidationError:
        # A zero row or column marginal: some group or category has no
        # ratings yet, so the test is not defined.
        return {"status": "pending", "statistic": None, "df": None, "p_value": None,
                "table": table}
    return {
        "status": "ok",
        "statistic": result.statistic,
        "df": result.df,
        "p_value": result.p_value,
        "table": table,
    }


def compute_stats(records: list[RatingRecord], plan: AssignmentPlan,
                  verdicts: dict[str, bool]) -> dict:
    """Live statistics: kappa on the shared block, chi-squared on the
    accepted/rejected split, and the percentage aggregation table."""
    known = [r for r in records if r.item in verdicts]
    return {
        "n_ratings": len(known),
        "kappa": {q: _kappa_block(known, plan, q) for q in ("q1", "q2")},
        "chi_squared": {q: _chi2_block(known, verdicts, q) for q in ("q1", "q2")},
        "aggregate": aggregate_ratings(known, verdicts),
    }


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(plan: AssignmentPlan, items: dict[str, McqItem],
               verdicts: dict[str, bool], store: RatingStore,
               show_context: bool = False,
               frontend_dir: str | None = None) -> FastAPI:
    all_ids = set(plan.shared_items)
    for ids in plan.unique_items.values():
        all_ids.update(ids)
    missing = sorted(all_ids - set(items))
    if missing:
        raise ValidationError(f"plan references unknown items: {missing[:5]}")
    missing = sorted(all_ids - set(verdicts))
    if missing:
        raise ValidationError(f"plan items without verdicts: {missing[:5]}")

    app = FastAPI(title="mcqforge human evaluation", docs_url=None, redoc_url=None)

    @app.get("/api/tasks/{assessor}")
    def tasks(assessor: str):
        if assessor not in plan.task_order:
            return _error(404, f"unknown assessor: {assessor}")
        order = plan.task_order[assessor]
        rated = store.rated_items(assessor)
        payload = []
        for position, item_id in enumerate(order, start=1):
            if item_id in rated:
                continue
            item = items[item_id]
            task = {
                "item": item_id,
                "question": item.question,
                "answer": item.answer,
                "position": position,
                "total": len(order),
            }
            if show_context:
                task["context"] = item.context
            payload.append(task)
        return {
            "assessor": assessor,
            "total": len(order),
            "completed": len(order) - len(payload),
            "show_context": show_context,
            "tasks": payload,
        }

    @app.post("/api/ratings")
    def post_rating(payload: dict):
        if not isinstance(payload, dict):
            return _error(400, "body must be a JSON object")
        assessor = payload.get("assessor")
        item_id = payload.get("item")
        if not isinstance(assessor, str) or not isinstance(item_id, str):
            return _error(400, "assessor and item are required strings")
        if assessor not in plan.task_order:
            return _error(404, f"unknown assessor: {assessor}")
        if item_id not in plan.task_order[assessor]:
            return _error(404, f"item {item_id} is not assigned to {assessor}")
        try:
            q1 = Q1(payload.get("q1"))
        except ValueError:
            return _error(400, f"invalid q1 value: {payload.get('q1')!r}")
        raw_q2 = payload.get("q2")
        q2 = None
        if raw_q2 not in (None, ""):
            try:
                q2 = Q2(raw_q2)
            except ValueError:
                return _error(400, f"invalid q2 value: {raw_q2!r}")
        record = RatingRecord(
            assessor=assessor,
            item=item_id,
            q1=q1,
            q2=q2,
            timestamp=datetime.now(timezone.utc).isoformat(),
            context_shown=show_context,
        )
        try:
            store.add(record)
        except DuplicateRatingError as e:
            return _error(409, str(e))
        order = plan.task_order[assessor]
        completed = len(store.rated_items(assessor) & set(order))
        return JSONResponse(status_code=201, content={
            "status": "recorded",
            "assessor": assessor,
            "item": item_id,
            "completed": completed,
            "total": len(order),
        })

    @app.get("/api/progress")
    def progress():
        per_assessor = {}
        for assessor, order in plan.task_order.items():
            done = len(store.rated_items(assessor) & set(order))
            per_assessor[assessor] = {"completed": done, "total": len(order)}
        return {
            "assessors": per_assessor,
            "completed": sum(v["completed"] for v in per_assessor.values()),
            "total": sum(v["total"] for v in per_assessor.values()),
        }

    @app.get("/api/stats")
    def stats():
        return compute_stats(store.records(), plan, verdicts)

    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
