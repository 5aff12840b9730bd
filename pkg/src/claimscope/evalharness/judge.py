"""Judge-model evaluation: claim-quality questionnaire, retrieval and label checks."""

from __future__ import annotations

from dataclasses import dataclass

from ..gateway import CompletionRequest, GatewayError
from ..llmjson import first_json_object
from ..prompts import get_template
from ..verification import JUDGE_LABEL_WORDS

# Claim-quality questionnaire. Q1 is asked with the source paragraph through
# its own prompt; Q2..Q8 are claim-only and share the generic prompt.
QUESTIONS = {
    "Q1": "Is the claim grounded by the original text?",
    "Q2": "Is the claim grammatically correct?",
    "Q3": ("Does the claim have all the necessary components (subject, predicate, "
           "and relevant qualifiers) to form a complete thought?"),
    "Q4": "Is the claim precise and specific rather than vague?",
    "Q5": ("Does the claim introduce new information rather than just restating "
           "common knowledge?"),
    "Q6": "Is the claim concise without losing essential information?",
    "Q7": "Does the claim provide enough information to be understood independently?",
    "Q8": "Would verifying the claim add value to public knowledge?",
}

QUESTION_ORDER = tuple(sorted(QUESTIONS))


@dataclass(frozen=True)
class JudgeAnswer:
    """One yes/no judgement; answer None means the judge call failed."""

    question: str
    answer: bool | None
    rationale: str = ""
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ClaimQualityRecord:
    claim: str
    answers: dict[str, JudgeAnswer]
    correct: bool      # all eight questions answered yes
    incomplete: bool   # at least one question unanswered; excluded from aggregates


def parse_judge_answer(text: str) -> tuple[bool | None, str, tuple[str, ...]]:
    """Tolerant yes/no parse: unknown or unparseable answers become no, flagged."""
    parsed = first_json_object(text)
    if parsed is None:
        return False, "", ("parse-failure",)
    raw = parsed.get("answer")
    rationale = parsed.get("rationale")
    rationale = rationale if isinstance(rationale, str) else ""
    if isinstance(raw, bool):
        return raw, rationale, ()
    if isinstance(raw, str):
        normalized = raw.strip().strip(".").casefold()
        if normalized == "yes":
            return True, rationale, ()
        if normalized == "no":
            return False, rationale, ()
    return False, rationale, ("unknown-answer",)


def _ask(gateway, messages, question: str, max_tokens: int) -> JudgeAnswer:
    request = CompletionRequest(messages=tuple(messages), max_tokens=max_tokens)
    try:
        response = gateway.complete(request)
    except GatewayError:
        return JudgeAnswer(question=question, answer=None, flags=("gateway-error",))
    answer, rationale, flags = parse_judge_answer(response.text)
    return JudgeAnswer(question=question, answer=answer, rationale=rationale, flags=flags)


def judge_claim_quality(gateway, claim: str, paragraph: str,
                        max_tokens: int = 512) -> ClaimQualityRecord:
    """Run the eight-question questionnaire for one claim."""
    answers: dict[str, JudgeAnswer] = {}
    q1 = get_template("judge_q1").messages({"claim": claim, "text": paragraph})
    answers["Q1"] = _ask(gateway, q1, "Q1", max_tokens)
    qn = get_template("judge_qn")
    for key in QUESTION_ORDER[1:]:
        messages = qn.messages({"QUESTION": QUESTIONS[key], "claim": claim})
        answers[key] = _ask(gateway, messages, key, max_tokens)
    incomplete = any(a.answer is None for a in answers.values())
    correct = not incomplete and all(a.answer for a in answers.values())
    return ClaimQualityRecord(claim=claim, answers=answers,
                              correct=correct, incomplete=incomplete)


def judge_retrieval_relevance(gateway, claim: str, paragraph: str,
                              max_tokens: int = 512) -> JudgeAnswer:
    """Does the retrieved paragraph help verify or refute the claim?"""
    messages = get_template("judge_retrieval").messages({"claim": claim, "text": paragraph})
    return _ask(gateway, messages, "retrieval", max_tokens)


def judge_label_correctness(gateway, claim: str, paragraph: str, label: str,
                            max_tokens: int = 512) -> JudgeAnswer | None:
    """Was the predicted SUPPORT/CONTRADICT label right? NEI pairs are skipped."""
    if label == "NEI":
        return None
    word = JUDGE_LABEL_WORDS[label]
    messages = get_template("judge_label").messages(
        {"SUPPORTED/REFUTED": word, "claim": claim, "text": paragraph}
    )
    return _ask(gateway, messages, "label", max_tokens)
