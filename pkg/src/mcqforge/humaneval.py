"""Human-evaluation protocol: assignment planning, rating records,
Fleiss' kappa, Pearson's chi-squared test, and the percentage aggregation
comparing QA-accepted against QA-rejected questions.

Kappa is only well defined for a fixed rater count per subject, so it is
computed over the shared block; unique items have a single rater.
"""

import csv
import json
import math
import random
from dataclasses import dataclass
from enum import Enum

from mcqforge.errors import (
    DegenerateDistributionError,
    PlanningError,
    ValidationError,
)


class Q1(str, Enum):
    WELL_FORMED = "well_formed_and_understandable"
    UNDERSTANDABLE = "understandable_only"
    NEITHER = "neither"


class Q2(str, Enum):
    YES = "yes"
    NO = "no"
    DONT_KNOW = "dont_know"


@dataclass(frozen=True)
class RatingRecord:
    assessor: str
    item: str
    q1: Q1
    q2: Q2 | None
    timestamp: str
    # Whether the context passage was visible when the rating was made.
    context_shown: bool | None = None

    def as_dict(self) -> dict:
        d = {
            "assessor": self.assessor,
            "item": self.item,
            "q1": self.q1.value,
            "q2": self.q2.value if self.q2 is not None else None,
            "timestamp": self.timestamp,
        }
        if self.context_shown is not None:
            d["context_shown"] = self.context_shown
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RatingRecord":
        q2 = d.get("q2")
        return cls(
            assessor=str(d["assessor"]),
            item=str(d["item"]),
            q1=Q1(d["q1"]),
            q2=Q2(q2) if q2 not in (None, "") else None,
            timestamp=str(d.get("timestamp", "")),
            context_shown=d.get("context_shown"),
        )


# ---------------------------------------------------------------------------
# Assignment planning


@dataclass
class AssignmentPlan:
    assessors: list[str]
    shared_items: list[str]
    unique_items: dict[str, list[str]]
    accepted_ids: list[str]
    rejected_ids: list[str]
    task_order: dict[str, list[str]]

    def __post_init__(self):
        shared = set(self.shared_items)
        seen_unique: set[str] = set()
        for assessor, items in self.unique_items.items():
            overlap = shared & set(items)
            if overlap:
                raise ValidationError(f"shared/unique overlap for {assessor}: {sorted(overlap)}")
            dup = seen_unique & set(items)
            if dup:
                raise ValidationError(f"unique lists overlap on {sorted(dup)}")
            seen_unique |= set(items)
        if len(self.accepted_ids) != len(self.rejected_ids):
            raise ValidationError(
                f"accepted/rejected imbalance: {len(self.accepted_ids)} vs {len(self.rejected_ids)}"
            )

    @property
    def n_items(self) -> int:
        return len(self.shared_items) + sum(len(v) for v in self.unique_items.values())

    @property
    def n_tasks(self) -> int:
        return sum(len(v) for v in self.task_order.values())

    def tasks_for(self, assessor: str) -> list[str]:
        if assessor not in self.task_order:
            raise ValidationError(f"unknown assessor: {assessor}")
        return list(self.task_order[assessor])

    def as_dict(self) -> dict:
        return {
            "assessors": self.assessors,
            "shared_items": self.shared_items,
            "unique_items": self.unique_items,
            "accepted_ids": self.accepted_ids,
            "rejected_ids": self.rejected_ids,
            "task_order": self.task_order,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AssignmentPlan":
        return cls(
            assessors=list(d["assessors"]),
            shared_items=list(d["shared_items"]),
            unique_items={k: list(v) for k, v in d["unique_items"].items()},
            accepted_ids=list(d["accepted_ids"]),
            rejected_ids=list(d["rejected_ids"]),
            task_order={k: list(v) for k, v in d["task_order"].items()},
        )


def _item_id(item) -> str:
    return item.id if hasattr(item, "id") else str(item)


def build_assignment(
    accepted,
    rejected,
    n_assessors: int,
    shared_n: int,
    unique_n: int,
    seed: int = 0,
) -> AssignmentPlan:
    """Plan who rates what: a shared block every assessor rates plus a
    unique block per assessor, each half QA-accepted and half QA-rejected.
    """
    if n_assessors < 1:
        raise PlanningError(f"need at least one assessor, got {n_assessors}")
    if shared_n < 0 or unique_n < 0:
        raise PlanningError("shared_n and unique_n must be non-negative")
    accepted_ids = [_item_id(i) for i in accepted]
    rejected_ids = [_item_id(i) for i in rejected]
    overlap = set(accepted_ids) & set(rejected_ids)
    if overlap:
        raise PlanningError(f"accepted/rejected pools overlap: {sorted(overlap)[:5]}")
    total_unique = n_assessors * unique_n
    if shared_n % 2 != 0:
        raise PlanningError(f"shared_n must be even to balance the pools, got {shared_n}")
    if total_unique % 2 != 0:
        raise PlanningError(
            f"n_assessors * unique_n must be even to balance the pools, got {total_unique}"
        )
    need_each = shared_n // 2 + total_unique // 2
    for name, pool in (("accepted", accepted_ids), ("rejected", rejected_ids)):
        if len(pool) < need_each:
            raise PlanningError(
                f"{name} pool has {len(pool)} items but the plan needs {need_each} "
                f"(short by {need_each - len(pool)})"
            )

    rng = random.Random(seed)
    acc = list(accepted_ids)
    rej = list(rejected_ids)
    rng.shuffle(acc)
    rng.shuffle(rej)

    shared = acc[: shared_n // 2] + rej[: shared_n // 2]
    rng.shuffle(shared)
    unique_pool = acc[shared_n // 2 : need_each] + rej[shared_n // 2 : need_each]
    rng.shuffle(unique_pool)

    assessors = [f"assessor{i + 1}" for i in range(n_assessors)]
    unique_items = {
        a: unique_pool[i * unique_n : (i + 1) * unique_n] for i, a in enumerate(assessors)
    }
    task_order = {}
    for a in assessors:
        order = list(shared) + list(unique_items[a])
        rng.shuffle(order)
        task_order[a] = order

    used_acc = set(acc[:need_each])
    used_rej = set(rej[:need_each])
    return AssignmentPlan(
        assessors=assessors,
        shared_items=shared,
        unique_items=unique_items,
        accepted_ids=sorted(used_acc),
        rejected_ids=sorted(used_rej),
        task_order=task_order,
    )


# ---------------------------------------------------------------------------
# Fleiss' kappa


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    mean_observed_agreement: float
    expected_agreement: float
    n_subjects: int
    n_raters: int
    n_categories: int

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "mean_observed_agreement": self.mean_observed_agreement,
            "expected_agreement": self.expected_agreement,
            "n_subjects": self.n_subjects,
            "n_raters": self.n_raters,
            "n_categories": self.n_categories,
        }


def fleiss_kappa(counts, n_raters: int) -> KappaResult:
    """Fleiss' kappa over an N-subjects x k-categories count matrix.

    P_i = (sum_j n_ij^2 - n) / (n (n - 1)), expected agreement is the sum
    of squared category proportions. Negative kappa (systematic
    disagreement) is a valid output and is not clamped.
    """
    rows = [list(r) for r in counts]
    if not rows:
        raise ValidationError("counts matrix is empty")
    if n_raters < 2:
        raise ValidationError(f"n_raters must be >= 2, got {n_raters}")
    k = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != k:
            raise ValidationError(f"row {i} has {len(row)} categories, expected {k}")
        if any(c < 0 for c in row):
            raise ValidationError(f"row {i} has a negative count")
        if sum(row) != n_raters:
            raise ValidationError(
                f"row {i} sums to {sum(row)}, expected n_raters = {n_raters}"
            )
    n_subjects = len(rows)
    n = n_raters
    p_i = [(sum(c * c for c in row) - n) / (n * (n - 1)) for row in rows]
    p_bar = sum(p_i) / n_subjects
    totals = [sum(row[j] for row in rows) for j in range(k)]
    grand = n_subjects * n
    p_j = [t / grand for t in totals]
    p_e = sum(p * p for p in p_j)
    if p_e >= 1.0:
        raise DegenerateDistributionError(
            "all ratings fall in a single category; kappa is undefined"
        )
    kappa = (p_bar - p_e) / (1.0 - p_e)
    return KappaResult(
        kappa=kappa,
        mean_observed_agreement=p_bar,
        expected_agreement=p_e,
        n_subjects=n_subjects,
        n_raters=n_raters,
        n_categories=k,
    )


# ---------------------------------------------------------------------------
# Chi-squared


def _upper_gamma_q(a: float, z: float, eps: float = 1e-12, max_iter: int = 500) -> float:
    """Regularized upper incomplete gamma Q(a, z): series for z < a + 1,
    Lentz continued fraction otherwise."""
    if z < 0.0 or a <= 0.0:
        raise ValidationError(f"Q(a, z) requires a > 0 and z >= 0, got a={a}, z={z}")
    if z == 0.0:
        return 1.0
    lg = math.lgamma(a)
    prefix = math.exp(-z + a * math.log(z) - lg)
    if z < a + 1.0:
        # lower series: P(a, z) = prefix * sum, Q = 1 - P
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(max_iter):
            denom += 1.0
            term *= z / denom
            total += term
            if abs(term) < abs(total) * eps:
                return 1.0 - prefix * total
        raise ValidationError(f"series for Q({a}, {z}) did not converge")
    # continued fraction (modified Lentz)
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return prefix * h
    raise ValidationError(f"continued fraction for Q({a}, {z}) did not converge")


def chi2_survival(x: float, df: int) -> float:
    """Upper-tail probability of the chi-squared distribution: Q(df/2, x/2)."""
    if x < 0:
        raise ValidationError(f"chi-squared statistic must be >= 0, got {x}")
    if df < 1:
        raise ValidationError(f"df must be a positive integer, got {df}")
    p = _upper_gamma_q(df / 2.0, x / 2.0)
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class ChiSquaredTest:
    statistic: float
    df: int
    p_value: float

    def as_dict(self) -> dict:
        return {"statistic": self.statistic, "df": self.df, "p_value": self.p_value}


def chi_squared_test(table) -> ChiSquaredTest:
    """Pearson's chi-squared independence test over an r x c count table."""
    rows = [list(r) for r in table]
    r = len(rows)
    if r < 2:
        raise ValidationError(f"need at least 2 rows, got {r}")
    c = len(rows[0])
    if c < 2:
        raise ValidationError(f"need at least 2 columns, got {c}")
    for i, row in enumerate(rows):
        if len(row) != c:
            raise ValidationError(f"row {i} has {len(row)} cells, expected {c}")
        if any(v < 0 for v in row):
            raise ValidationError(f"row {i} contains a negative count")
    row_totals = [sum(row) for row in rows]
    col_totals = [sum(rows[i][j] for i in range(r)) for j in range(c)]
    if any(t == 0 for t in row_totals):
        raise ValidationError("a row total is zero; expected cells are undefined")
    if any(t == 0 for t in col_totals):
        raise ValidationError("a column total is zero; expected cells are undefined")
    grand = sum(row_totals)
    statistic = 0.0
    for i in range(r):
        for j in range(c):
            expected = row_totals[i] * col_totals[j] / grand
            diff = rows[i][j] - expected
            statistic += diff * diff / expected
    df = (r - 1) * (c - 1)
    return ChiSquaredTest(statistic=statistic, df=df, p_value=chi2_survival(statistic, df))


# ---------------------------------------------------------------------------
# Table aggregation


def aggregate_ratings(ratings: list[RatingRecord], verdicts: dict[str, bool]) -> dict:
    """Percentage of each answer category per (question, accepted/rejected)
    group. Q2 percentages are over the ratings that answered Q2; answers
    given when Q1 was 'neither' are included, not filtered."""
    for rating in ratings:
        if rating.item not in verdicts:
            raise ValidationError(f"no accept/reject verdict for item {rating.item}")
    out: dict = {"q1": {}, "q2": {}}
    for group, flag in (("accepted", True), ("rejected", False)):
        in_group = [r for r in ratings if verdicts[r.item] == flag]
        q1_counts = {cat: 0 for cat in Q1}
        for r in in_group:
            q1_counts[r.q1] += 1
        q1_total = len(in_group)
        out["q1"][group] = {
            cat.value: (100.0 * q1_counts[cat] / q1_total if q1_total else 0.0) for cat in Q1
        }
        answered = [r for r in in_group if r.q2 is not None]
        q2_counts = {cat: 0 for cat in Q2}
        for r in answered:
            q2_counts[r.q2] += 1
        q2_total = len(answered)
        out["q2"][group] = {
            cat.value: (100.0 * q2_counts[cat] / q2_total if q2_total else 0.0) for cat in Q2
        }
    return out


_TABLE3_LABELS = {
    Q1.WELL_FORMED.value: "Well-formed and understandable",
    Q1.UNDERSTANDABLE.value: "Only understandable",
    Q1.NEITHER.value: "Neither",
    Q2.YES.value: "Yes",
    Q2.NO.value: "No",
    Q2.DONT_KNOW.value: "I don't know",
}


def render_rating_table(aggregated: dict) -> str:
    """Text table mirroring the accepted-vs-rejected percentage layout;
    percentages rounded to integers (raw values live in the JSON output)."""
    blocks = [
        ("Question 1 (question quality)", "q1", [c.value for c in Q1]),
        ("Question 2 (answer compatibility)", "q2", [c.value for c in Q2]),
    ]
    label_w = max(len(label) for label in _TABLE3_LABELS.values()) + 2
    header = f"{'':{label_w}}  {'Accepted':>8}  {'Rejected':>8}"
    lines = [header, "-" * len(header)]
    for title, key, cats in blocks:
        lines.append(title)
        for cat in cats:
            acc = aggregated[key]["accepted"].get(cat, 0.0)
            rej = aggregated[key]["rejected"].get(cat, 0.0)
            label = _TABLE3_LABELS[cat]
            lines.append(f"  {label:{label_w - 2}}  {round(acc):>7}%  {round(rej):>7}%")
    return "\n".join(lines)


def ratings_to_counts(
    ratings: list[RatingRecord],
    shared_items: list[str],
    n_raters: int,
    question: str,
) -> list[list[int]]:
    """Subjects x categories count matrix over the shared block, keeping
    only items rated by all ``n_raters`` (required by the kappa formula)."""
    if question == "q1":
        cats: list = list(Q1)
        values = {r.item: [] for r in ratings}
        for r in ratings:
            values[r.item].append(r.q1)
    elif question == "q2":
        cats = list(Q2)
        values = {r.item: [] for r in ratings}
        for r in ratings:
            if r.q2 is not None:
                values[r.item].append(r.q2)
    else:
        raise ValidationError(f"unknown question: {question!r}")
    rows = []
    for item in shared_items:
        answers = values.get(item, [])
        if len(answers) != n_raters:
            continue
        rows.append([sum(1 for a in answers if a == cat) for cat in cats])
    return rows


# ---------------------------------------------------------------------------
# Ratings I/O


def write_ratings_jsonl(ratings: list[RatingRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in ratings:
            f.write(json.dumps(r.as_dict(), sort_keys=True, ensure_ascii=False) + "\n")


def read_ratings_jsonl(path) -> list[RatingRecord]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(RatingRecord.from_dict(json.loads(line)))
    return out


_CSV_COLUMNS = ["assessor", "item", "q1", "q2", "timestamp", "verdict"]


def write_ratings_csv(ratings: list[RatingRecord], verdicts: dict[str, bool], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(_CSV_COLUMNS)
        for r in ratings:
            verdict = verdicts.get(r.item)
            writer.writerow(
                [
                    r.assessor,
                    r.item,
                    r.q1.value,
                    r.q2.value if r.q2 is not None else "",
                    r.timestamp,
                    "" if verdict is None else ("accepted" if verdict else "rejected"),
                ]
            )


def read_ratings_csv(path) -> list[RatingRecord]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            out.append(RatingRecord.from_dict(row))
    return out
