"""RAG quality metrics and the test-set evaluation harness.

Four scores per case: answer relevancy (mean cosine between generated
answers and ground truths), context recall (fraction of ground-truth
statements attributable to the retrieved contexts), answer correctness
(weighted blend of semantic similarity and a factual F-score), and
faithfulness (fraction of answer claims supported by the contexts).

Statement extraction is deliberately naive sentence splitting — terminators
and newlines, no abbreviation handling — so every metric is deterministic
and testable offline. Statement support uses an embedding-threshold judge
by default; an LLM judge can be swapped in for higher fidelity.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

from .embed import EmbedderSpec, EmbeddingVector, cosine, make_embedder

logger = logging.getLogger(__name__)

JUDGE_EMBEDDING = "embedding-threshold"
JUDGE_LLM = "llm-judge"

DEFAULT_TAU = 0.8
DEFAULT_OMEGA = 0.25

_STATEMENT_RE = re.compile(r"(?<=[.!?])\s+|\n+")


@dataclass(frozen=True)
class TestCase:
    question: str
    ground_truth: str
    reference_contexts: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.question or not self.ground_truth:
            raise ValueError("question and ground_truth must be non-empty")


@dataclass
class EvalRecord:
    testcase: TestCase
    answer: str = ""
    retrieved_contexts: list[str] | None = None
    answer_relevancy: float | None = None
    context_recall: float | None = None
    correctness: float | None = None
    faithfulness: float | None = None
    error: str | None = None


@dataclass
class EvalReport:
    dataset_name: str
    model_name: str
    mode: str
    n_cases: int
    n_failures: int
    mean_answer_relevancy: float | None
    mean_context_recall: float | None
    mean_correctness: float | None
    mean_faithfulness: float | None
    records: list[EvalRecord] = field(default_factory=list)


@dataclass(frozen=True)
class JudgeSpec:
    kind: str = JUDGE_EMBEDDING
    tau: float = DEFAULT_TAU
    embedder: EmbedderSpec = field(default_factory=EmbedderSpec)

    def __post_init__(self):
        if self.kind not in (JUDGE_EMBEDDING, JUDGE_LLM):
            raise ValueError(f"unknown judge kind: {self.kind!r}")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must be in (0, 1)")


def split_statements(text: str) -> list[str]:
    """Split on sentence terminators followed by whitespace, and newlines.

    Intentionally naive: "Dr. Smith arrived." splits after "Dr.".
    """
    return [part.strip() for part in _STATEMENT_RE.split(text) if part and part.strip()]


class EmbeddingJudge:
    """Deterministic statement-support judge: max cosine against a pool."""

    def __init__(self, spec: JudgeSpec):
        self.spec = spec
        self._embedder = make_embedder(spec.embedder)
        self._cache: dict[str, EmbeddingVector] = {}

    @property
    def tau(self) -> float:
        return self.spec.tau

    def _embed(self, text: str) -> EmbeddingVector:
        vec = self._cache.get(text)
        if vec is None:
            vec = self._embedder.embed_text(text)
            self._cache[text] = vec
        return vec

    def similarity(self, a: str, b: str) -> float:
        return cosine(self._embed(a), self._embed(b))

    def supported(self, statement: str, pool: list[str]) -> bool:
        return any(self.similarity(statement, other) >= self.spec.tau for other in pool)

    def classify(self, answer_statements: list[str], truth_statements: list[str]) -> tuple[int, int, int]:
        """Greedy one-to-one matching in descending similarity order.

        Pairs with similarity >= tau become TP; leftovers on the answer side
        are FP, on the truth side FN.
        """
        pairs = [
            (self.similarity(a, t), i, j)
            for i, a in enumerate(answer_statements)
            for j, t in enumerate(truth_statements)
        ]
        pairs.sort(key=lambda item: (-item[0], item[1], item[2]))
        used_a: set[int] = set()
        used_t: set[int] = set()
        tp = 0
        for sim, i, j in pairs:
            if sim < self.spec.tau:
                break
            if i in used_a or j in used_t:
                continue
            used_a.add(i)
            used_t.add(j)
            tp += 1
        return tp, len(answer_statements) - tp, len(truth_statements) - tp


class LlmJudge:
    """Delegates per-statement support decisions to a chat provider."""

    _PROMPT = (
        "Reference material:\n{reference}\n\nStatement: {statement}\n\n"
        "Is the statement supported by the reference material? Answer yes or no."
    )

    def __init__(self, spec: JudgeSpec, provider, model_name: str = "judge-model"):
        self.spec = spec
        self.provider = provider
        self.model_name = model_name

    def _ask(self, statement: str, reference: str) -> bool:
        answer = self.provider.complete(
            "You judge whether statements are supported by reference material.",
            self._PROMPT.format(reference=reference, statement=statement),
            top_p=1.0,
            model=self.model_name,
        )
        return answer.strip().lower().startswith("yes")

    def supported(self, statement: str, pool: list[str]) -> bool:
        return self._ask(statement, "\n".join(pool))

    def classify(self, answer_statements: list[str], truth_statements: list[str]) -> tuple[int, int, int]:
        truth_blob = "\n".join(truth_statements)
        answer_blob = "\n".join(answer_statements)
        tp = sum(1 for s in answer_statements if self._ask(s, truth_blob))
        fp = len(answer_statements) - tp
        fn = sum(1 for s in truth_statements if not self._ask(s, answer_blob))
        return tp, fp, fn


Judge = EmbeddingJudge | LlmJudge


def make_judge(spec: JudgeSpec, provider=None) -> Judge:
    if spec.kind == JUDGE_LLM:
        if provider is None:
            raise ValueError("llm-judge requires a chat provider")
        return LlmJudge(spec, provider)
    return EmbeddingJudge(spec)


def _resolve_judge(judge) -> Judge:
    if isinstance(judge, JudgeSpec):
        return make_judge(judge)
    return judge


def relevancy_pair(answer: str, truth: str, embedder) -> float:
    return cosine(embedder.embed_text(answer), embedder.embed_text(truth))


def answer_relevancy(answers: list[str], truths: list[str], embedder) -> float:
    """Mean cosine similarity between each answer and its ground truth."""
    if not answers or len(answers) != len(truths):
        raise ValueError("answers and truths must be equal-length non-empty lists")
    return sum(relevancy_pair(a, t, embedder) for a, t in zip(answers, truths)) / len(answers)


def context_recall(ground_truth: str, retrieved_contexts: list[str], judge) -> float:
    """Fraction of ground-truth statements attributable to the contexts."""
    if not ground_truth:
        raise ValueError("ground_truth must be non-empty")
    judge = _resolve_judge(judge)
    statements = split_statements(ground_truth)
    if not statements:
        return 0.0
    pool = [s for ctx in retrieved_contexts for s in split_statements(ctx)]
    if not pool:
        return 0.0
    attributed = sum(1 for s in statements if judge.supported(s, pool))
    return attributed / len(statements)


def factual_f(tp: int, fp: int, fn: int) -> float:
    """F-score with false positives and negatives weighted by a half."""
    if min(tp, fp, fn) < 0:
        raise ValueError("counts must be non-negative")
    if tp + fp + fn == 0:
        logger.warning("factual_f over all-zero counts; degenerate comparison scored 0")
        return 0.0
    return tp / (tp + 0.5 * (fp + fn))


def classify_statements(answer: str, ground_truth: str, judge) -> tuple[int, int, int]:
    """(TP, FP, FN) statement counts between an answer and its ground truth."""
    if not answer or not ground_truth:
        raise ValueError("answer and ground_truth must be non-empty")
    judge = _resolve_judge(judge)
    return judge.classify(split_statements(answer), split_statements(ground_truth))


def combine_correctness(semantic_sim: float, factual: float, omega: float = DEFAULT_OMEGA) -> float:
    return omega * semantic_sim + (1.0 - omega) * factual


def correctness(answer: str, ground_truth: str, judge, embedder, omega: float = DEFAULT_OMEGA) -> float:
    """Weighted blend of semantic similarity and the factual F-score."""
    if not 0.0 <= omega <= 1.0:
        raise ValueError("omega must be in [0, 1]")
    semantic = relevancy_pair(answer, ground_truth, embedder)
    factual = factual_f(*classify_statements(answer, ground_truth, judge))
    return combine_correctness(semantic, factual, omega)


def faithfulness(answer: str, retrieved_contexts: list[str], judge) -> float:
    """Fraction of answer claims supported by the retrieved contexts."""
    if not answer:
        raise ValueError("answer must be non-empty")
    judge = _resolve_judge(judge)
    claims = split_statements(answer)
    if not claims:
        return 0.0
    pool = [s for ctx in retrieved_contexts for s in split_statements(ctx)]
    if not pool:
        return 0.0
    supported = sum(1 for c in claims if judge.supported(c, pool))
    return supported / len(claims)


def evaluate_case(answer: str, ground_truth: str, retrieved_contexts: list[str] | None,
                  judge, embedder, omega: float = DEFAULT_OMEGA) -> dict[str, float | None]:
    """All applicable metrics for one case.

    With no retrieved contexts (the vanilla baseline) only correctness is
    scored; relevancy, recall, and faithfulness stay absent rather than
    polluting the means with zeros.
    """
    judge = _resolve_judge(judge)
    scores: dict[str, float | None] = {
        "answer_relevancy": None,
        "context_recall": None,
        "correctness": correctness(answer, ground_truth, judge, embedder, omega),
        "faithfulness": None,
    }
    if retrieved_contexts is not None:
        scores["answer_relevancy"] = relevancy_pair(answer, ground_truth, embedder)
        scores["context_recall"] = context_recall(ground_truth, retrieved_contexts, judge)
        scores["faithfulness"] = faithfulness(answer, retrieved_contexts, judge)
    return scores


def run_eval(testset: list[TestCase], pipeline, judge, embedder, *,
             dataset_name: str = "testset", omega: float = DEFAULT_OMEGA) -> EvalReport:
    """Run the pipeline over a test set and aggregate per-metric means.

    pipeline is any object with answer_query(question) returning an object
    with .answer and .hits (hits None in vanilla mode), plus .mode and
    .model_name attributes for the report header. Per-case failures are
    recorded and excluded from the means.
    """
    if not testset:
        raise ValueError("testset must be non-empty")
    judge = _resolve_judge(judge)
    records: list[EvalRecord] = []
    for case in testset:
        record = EvalRecord(testcase=case)
        try:
            response = pipeline.answer_query(case.question)
            record.answer = response.answer
            record.retrieved_contexts = (
                [hit["snippet"] for hit in response.hits] if response.hits is not None else None
            )
            scores = evaluate_case(
                record.answer, case.ground_truth, record.retrieved_contexts,
                judge, embedder, omega,
            )
            record.answer_relevancy = scores["answer_relevancy"]
            record.context_recall = scores["context_recall"]
            record.correctness = scores["correctness"]
            record.faithfulness = scores["faithfulness"]
        except Exception as exc:
            logger.warning("case %r failed: %s", case.question[:60], exc)
            record.error = f"{type(exc).__name__}: {exc}"
        records.append(record)

    def mean_of(name: str) -> float | None:
        present = [getattr(r, name) for r in records if r.error is None and getattr(r, name) is not None]
        return sum(present) / len(present) if present else None

    return EvalReport(
        dataset_name=dataset_name,
        model_name=getattr(pipeline, "model_name", "unknown"),
        mode=getattr(pipeline, "mode", "rag"),
        n_cases=len(records),
        n_failures=sum(1 for r in records if r.error is not None),
        mean_answer_relevancy=mean_of("answer_relevancy"),
        mean_context_recall=mean_of("context_recall"),
        mean_correctness=mean_of("correctness"),
        mean_faithfulness=mean_of("faithfulness"),
        records=records,
    )


def load_testset(path) -> list[TestCase]:
    """Testset JSONL: {"question", "ground_truth", "reference_contexts"?}."""
    cases = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            refs = obj.get("reference_contexts")
            cases.append(
                TestCase(
                    question=obj["question"],
                    ground_truth=obj["ground_truth"],
                    reference_contexts=tuple(refs) if refs is not None else None,
                )
            )
    if not cases:
        raise ValueError(f"no test cases in {path}")
    return cases


def report_to_dict(report: EvalReport) -> dict:
    return {
        "dataset_name": report.dataset_name,
        "model_name": report.model_name,
        "mode": report.mode,
        "n_cases": report.n_cases,
        "n_failures": report.n_failures,
        "means": {
            "answer_relevancy": report.mean_answer_relevancy,
            "context_recall": report.mean_context_recall,
            "correctness": report.mean_correctness,
            "faithfulness": report.mean_faithfulness,
        },
        "cases": [
            {
                "question": r.testcase.question,
                "ground_truth": r.testcase.ground_truth,
                "answer": r.answer,
                "retrieved_contexts": r.retrieved_contexts,
                "scores": {
                    "answer_relevancy": r.answer_relevancy,
                    "context_recall": r.context_recall,
                    "correctness": r.correctness,
                    "faithfulness": r.faithfulness,
                },
                "error": r.error,
            }
            for r in report.records
        ],
    }


def render_report_table(report: EvalReport) -> str:
    """Aligned four-panel summary of the aggregate metric means."""
    rows = [
        ("answer_relevancy", report.mean_answer_relevancy),
        ("context_recall", report.mean_context_recall),
        ("correctness", report.mean_correctness),
        ("faithfulness", report.mean_faithfulness),
    ]
    width = max(len(name) for name, _ in rows)
    lines = [
        f"dataset: {report.dataset_name}   model: {report.model_name}   "
        f"mode: {report.mode}   cases: {report.n_cases}   failures: {report.n_failures}",
        f"{'metric'.ljust(width)}   mean",
    ]
    for name, value in rows:
        shown = f"{value:.4f}" if value is not None else "-"
        lines.append(f"{name.ljust(width)}   {shown}")
    return "\n".join(lines)
