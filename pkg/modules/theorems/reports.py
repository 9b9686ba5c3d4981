"""
Theorem Reports - Verdicts, Hypotheses and Replay Witnesses
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple


class Verdict(Enum):
    VERIFIED = "verified"
    CONDITIONAL = "conditional"
    INAPPLICABLE = "inapplicable"
    VIOLATED = "violated"


# Order used when several verdicts are merged into one
VERDICT_SEVERITY = {
    Verdict.VERIFIED: 0,
    Verdict.INAPPLICABLE: 1,
    Verdict.CONDITIONAL: 2,
    Verdict.VIOLATED: 3,
}


@dataclass
class TheoremReport:
    """
    Outcome of one checker on one instance

    hypotheses maps a hypothesis name to how it was settled: 'checked',
    'asserted', 'assumed' or 'failed'. The trail is a readable log of every
    comparison made, in order.
    """
    theorem: str
    filtration: str
    verdict: Verdict = Verdict.VERIFIED
    hypotheses: Dict[str, str] = field(default_factory=dict)
    quantities: Dict[str, Any] = field(default_factory=dict)
    trail: List[str] = field(default_factory=list)
    witness: Optional[Dict[str, Any]] = None

    def note(self, message: str):
        self.trail.append(message)

    def record(self, **quantities):
        self.quantities.update(quantities)

    def compare(self, label: str, holds: bool) -> bool:
        self.trail.append(f"{label}: {'holds' if holds else 'fails'}")
        return holds

    def downgrade(self, reason: str):
        """verified -> conditional; other verdicts stay"""
        if self.verdict == Verdict.VERIFIED:
            self.verdict = Verdict.CONDITIONAL
        self.trail.append(reason)

    def inapplicable(self, reason: str) -> 'TheoremReport':
        self.verdict = Verdict.INAPPLICABLE
        self.trail.append(reason)
        return self

    def violate(self, reason: str, witness: Dict[str, Any]):
        self.verdict = Verdict.VIOLATED
        self.trail.append(reason)
        self.witness = witness

    def to_dict(self) -> Dict[str, Any]:
        return {
            'theorem': self.theorem,
            'filtration': self.filtration,
            'verdict': self.verdict.value,
            'hypotheses': dict(self.hypotheses),
            'quantities': dict(self.quantities),
            'trail': list(self.trail),
            'witness': self.witness,
        }


@dataclass
class ReductionReport:
    """
    Is J a reduction of F, and with which reduction number

    reduction_number is None when no stable start was found inside the
    window ("not-within-window"). certificate_kind is 'adic-closed-form'
    when one equality J I^n = I^{n+1} proves every later index.
    """
    candidate: str
    filtration: str
    is_reduction: bool = False
    reduction_number: Optional[int] = None
    verified_window: Optional[Tuple[int, int]] = None
    certificate_kind: str = 'windowed'
    minimal: bool = False
    contained: bool = True
    trail: List[str] = field(default_factory=list)

    @property
    def reduction_label(self):
        if self.reduction_number is None:
            return 'not-within-window'
        return self.reduction_number

    def to_dict(self) -> Dict[str, Any]:
        return {
            'candidate': self.candidate,
            'filtration': self.filtration,
            'is_reduction': self.is_reduction,
            'r_J': self.reduction_label if self.is_reduction else None,
            'verified_window': list(self.verified_window) if self.verified_window else None,
            'certificate_kind': self.certificate_kind,
            'minimal': self.minimal,
            'contained_in_first_piece': self.contained,
            'trail': list(self.trail),
        }


def worst_verdict(verdicts) -> Verdict:
    verdicts = list(verdicts)
    if not verdicts:
        return Verdict.INAPPLICABLE
    return max(verdicts, key=lambda v: VERDICT_SEVERITY[v])
