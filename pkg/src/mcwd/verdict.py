"""Verdicts for checked inequalities."""

from __future__ import annotations

from dataclasses import dataclass, field

from .xlog import XInterval, XReal, iv, iv_exp, iv_ln

__all__ = ["PASS", "FAIL", "INCONCLUSIVE", "BELOW_THRESHOLD", "CheckVerdict", "judge", "judge_log", "worst_status"]

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
BELOW_THRESHOLD = "below-threshold"

_RANK = {PASS: 0, BELOW_THRESHOLD: 0, INCONCLUSIVE: 1, FAIL: 2}


@dataclass(frozen=True)
class CheckVerdict:
    """Outcome of one inequality instance ``lhs REL rhs``.

    ``slack`` encloses ``rhs - lhs`` (usually a difference of logarithms),
    so ``margin`` (its lower end) is positive on a strict pass.  When the
    slack is too small to represent, ``log_abs_margin`` encloses its log.
    """

    inequality: str
    n: int | None
    status: str
    slack: XInterval
    relation: str = "<"
    log_abs_margin: XInterval | None = None
    detail: str = ""
    data: dict = field(default_factory=dict, compare=False)

    @property
    def margin(self) -> XReal:
        return self.slack.lo

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def margin_log10(self) -> str:
        if not self.slack.lo.is_finite():
            return str(self.slack.lo)
        ln10 = iv_ln(XReal(10))
        return (self.slack.lo / ln10.mid()).to_str(12)

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "inequality": self.inequality,
            "status": self.status,
            "relation": self.relation,
            "margin_log10": self.margin_log10(),
            "lo": self.slack.lo.to_str(),
            "hi": self.slack.hi.to_str(),
        }
        if self.log_abs_margin is not None:
            d["log_abs_margin"] = [self.log_abs_margin.lo.to_str(), self.log_abs_margin.hi.to_str()]
        if self.detail:
            d["detail"] = self.detail
        for k in sorted(self.data):
            d[k] = self.data[k]
        return d


def judge(inequality: str, n, slack, relation: str = "<", detail: str = "", **data) -> CheckVerdict:
    """Verdict for an enclosure of ``rhs - lhs``."""
    s = iv(slack)
    zero = XReal(0)
    if relation == "<":
        ok = s.lo > zero
        bad = s.hi <= zero
    elif relation == "<=":
        ok = s.lo >= zero
        bad = s.hi < zero
    else:
        raise ValueError(f"unknown relation {relation!r}")
    status = PASS if ok else FAIL if bad else INCONCLUSIVE
    return CheckVerdict(inequality, n, status, s, relation, None, detail, dict(data))


def judge_log(inequality: str, n, log_margin: XInterval, detail: str = "", **data) -> CheckVerdict:
    """Verdict for a slack known to be ``exp(log_margin) > 0``."""
    lm = iv(log_margin)
    slack = iv_exp(lm)
    status = PASS if lm.lo > XReal.ninf() else INCONCLUSIVE
    return CheckVerdict(inequality, n, status, slack, "<", lm, detail, dict(data))


def worst_status(verdicts) -> str:
    worst = PASS
    for v in verdicts:
        if _RANK[v.status] > _RANK[worst]:
            worst = v.status
    return worst
