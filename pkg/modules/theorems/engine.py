"""
Theorem Checkers - Hilbert Coefficient Identities on Concrete Instances
Each checker fits what it needs, compares both sides of a statement and
returns a TheoremReport. Hypothesis mismatches never raise; they give an
inapplicable verdict.
"""

import itertools
import logging
from typing import Dict, List, Optional, Sequence

from config.modules_config import get_setting
from modules.filtrations.engine import (
    FiltrationSpec,
    adic_filtration,
    graded_piece,
    normal_filtration,
    restrict_to_axis,
    rr_closed_filtration,
)
from modules.filtrations.newton import integral_closure_power
from modules.hilbert.engine import (
    HilbertSummary,
    cohomology_table_dim2,
    fit_polynomial,
    fit_polynomial_multi,
    fit_summary,
    hilbert_function,
)
from modules.monomial_core.engine import (
    MonomialIdeal,
    colength,
    contains_ideal,
    is_m_primary,
    multiply,
    power,
)
from modules.theorems.reports import ReductionReport, TheoremReport

logger = logging.getLogger(__name__)


# ============================================================================
# SHARED HELPERS
# ============================================================================

def _witness(F: FiltrationSpec, **extra) -> Dict[str, object]:
    """Everything needed to replay a violated verdict"""
    witness = {
        'ring': F.ring.describe(),
        'filtration': F.describe(),
        'base_ideals': [str(I) for I in F.base_ideals],
        'settings': {name: get_setting(name) for name in
                     ('rr_kmax', 'rr_window', 'fit_margin', 'fit_base', 'fit_max_base', 'reduction_window')},
    }
    witness.update(extra)
    return witness


def _require_cm(report: TheoremReport, F: FiltrationSpec) -> bool:
    ring = F.ring
    if not ring.is_quotient:
        report.hypotheses['cohen_macaulay'] = 'checked'
        return True
    if ring.asserted_cohen_macaulay:
        report.hypotheses['cohen_macaulay'] = 'asserted'
        return True
    report.hypotheses['cohen_macaulay'] = 'failed'
    report.inapplicable(f"{ring.describe()} is not known to be Cohen-Macaulay")
    return False


def _finish(report: TheoremReport, F: FiltrationSpec) -> TheoremReport:
    if F.ring.is_quotient and F.ring.asserted_cohen_macaulay:
        report.downgrade("Cohen-Macaulay property asserted, not proven")
    logger.debug("%s on %s: %s", report.theorem, report.filtration, report.verdict.value)
    return report


def _require_univariate(report: TheoremReport, F: FiltrationSpec) -> bool:
    if F.arity != 1:
        report.inapplicable(f"needs a Z-graded filtration, got arity {F.arity}")
        return False
    if F.dimension < 1:
        report.inapplicable("needs dimension at least 1")
        return False
    return True


def _matches_first_powers(F: FiltrationSpec, window: int) -> bool:
    """F(n) = F(1)^n for n = 1..window"""
    first = F.first_piece()
    return all(graded_piece(F, n) == power(first, n) for n in range(2, window + 1))


# ============================================================================
# REDUCTIONS
# ============================================================================

def is_reduction(J: MonomialIdeal, F: FiltrationSpec, window: Optional[int] = None) -> ReductionReport:
    """
    Does J F(n) = F(n + 1) hold for all large n, and from where on

    Adic filtrations: the first index with equality is r_J, since
    J I^n = I^{n+1} gives J I^{n+1} = I^{n+2}. Three later indices are
    re-checked anyway. Other filtrations: r_J is the least m <= W with
    equality on all of [m, m + W].

    Examples:
        J = (x^2, y^2), adic m^2 -> r_J = 1
        J = F(1) -> r_J = 0
    """
    W = get_setting('reduction_window', window)
    report = ReductionReport(candidate=str(J), filtration=F.describe(),
                             minimal=len(J.generators) == F.dimension)
    if F.arity != 1:
        report.trail.append("reductions are checked for Z-graded filtrations only")
        return report
    if not contains_ideal(F.first_piece(), J):
        report.contained = False
        report.trail.append(f"{J} is not contained in F(1) = {F.first_piece()}")
        return report

    def equal_at(n: int) -> bool:
        return multiply(J, graded_piece(F, n)) == graded_piece(F, n + 1)

    if F.is_adic:
        for n in range(0, W + 1):
            if not equal_at(n):
                continue
            rechecked = all(equal_at(n + k) for k in range(1, 4))
            report.is_reduction = True
            report.reduction_number = n
            report.verified_window = (n, n + 3)
            if rechecked:
                report.certificate_kind = 'adic-closed-form'
                report.trail.append(f"J F({n}) = F({n + 1}); re-checked through n = {n + 3}")
            else:
                report.trail.append(f"J F({n}) = F({n + 1}) but a later index failed the re-check")
                report.is_reduction = False
                report.reduction_number = None
            return report
        report.trail.append(f"J F(n) != F(n+1) for n = 0..{W}")
        return report

    equalities = [equal_at(n) for n in range(0, 2 * W + 1)]
    for m in range(0, W + 1):
        if all(equalities[m:m + W + 1]):
            report.is_reduction = True
            report.reduction_number = m
            report.verified_window = (m, m + W)
            report.trail.append(f"J F(n) = F(n+1) for n = {m}..{m + W}")
            return report
    report.trail.append(f"no run of {W + 1} equalities starting at or below {W}")
    return report


def _reduction_reports(F: FiltrationSpec, candidates: Sequence[MonomialIdeal],
                       window: Optional[int], report: TheoremReport) -> List[ReductionReport]:
    reductions = [is_reduction(J, F, window) for J in candidates]
    report.record(candidates=[r.to_dict() for r in reductions])
    for r in reductions:
        if not r.minimal:
            report.note(f"candidate {r.candidate} is not-minimal (needs {F.dimension} generators)")
    return reductions


def _least_reduction_number(reductions: Sequence[ReductionReport]) -> Optional[int]:
    """Candidate-relative r(F): minimum over minimal candidates that are reductions"""
    values = [r.reduction_number for r in reductions
              if r.minimal and r.is_reduction and r.reduction_number is not None]
    return min(values) if values else None


# ============================================================================
# UNIVARIATE THEOREMS
# ============================================================================

def check_northcott(F: FiltrationSpec) -> TheoremReport:
    """
    e_1 >= e_0 - lambda(R/F(1)) >= 0

    Example:
        m^2-adic k[x,y]: 1 >= 4 - 3 >= 0, equality on the left
    """
    report = TheoremReport('northcott', F.describe())
    if not _require_univariate(report, F) or not _require_cm(report, F):
        return report
    summary = fit_polynomial(F)
    e0, e1 = summary.e[0], summary.e[1]
    length_one = colength(F.first_piece())
    report.record(e0=e0, e1=e1, colength_F1=length_one)
    left = report.compare(f"e1 = {e1} >= e0 - lambda(R/F(1)) = {e0 - length_one}", e1 >= e0 - length_one)
    right = report.compare(f"e0 - lambda(R/F(1)) = {e0 - length_one} >= 0", e0 - length_one >= 0)
    if left and e1 == e0 - length_one:
        report.note("equality in the first inequality")
    if not (left and right):
        report.violate("Northcott inequality fails", _witness(F, e=list(summary.e), colength_F1=length_one))
    return _finish(report, F)


def check_huneke_ooishi(F: FiltrationSpec, candidates: Sequence[MonomialIdeal] = (),
                        window: Optional[int] = None) -> TheoremReport:
    """
    e_0 - e_1 = lambda(R/F(1))  iff  r(F) <= 1

    r(F) is taken over the supplied minimal candidates, so a holding left
    side with no candidate of r <= 1 stays conditional. When both sides
    hold, the consequences e_2 = ... = e_d = 0, n(F) <= 0 and
    F(n) = F(1)^n on the window are checked as well.
    """
    W = get_setting('reduction_window', window)
    report = TheoremReport('huneke-ooishi', F.describe())
    if not _require_univariate(report, F) or not _require_cm(report, F):
        return report
    summary = fit_polynomial(F)
    e = summary.e
    length_one = colength(F.first_piece())
    left = e[0] - e[1] == length_one
    reductions = _reduction_reports(F, candidates, W, report)
    r = _least_reduction_number(reductions)
    report.record(e=list(e), colength_F1=length_one, r_candidate_relative=r,
                  postulation_number=summary.postulation_number)
    report.compare(f"e0 - e1 = {e[0] - e[1]} equals lambda(R/F(1)) = {length_one}", left)
    right = r is not None and r <= 1
    report.note(f"least candidate reduction number: {r if r is not None else 'none found'}")
    witness = _witness(F, window=W, e=list(e), colength_F1=length_one, r=r)

    if left and right:
        consequences = []
        consequences.append(report.compare("e2 = ... = ed = 0", all(x == 0 for x in e[2:])))
        pn = summary.postulation_number
        consequences.append(report.compare(f"n(F) = {pn if pn is not None else '-inf'} <= 0",
                                           pn is None or pn <= 0))
        consequences.append(report.compare(f"F(n) = F(1)^n for n <= {W}", _matches_first_powers(F, W)))
        if not all(consequences):
            report.violate("r(F) <= 1 but a consequence fails", witness)
    elif left:
        report.downgrade("left side holds but no supplied candidate reaches r <= 1")
    elif right:
        report.violate("a minimal candidate has r <= 1 but e0 - e1 != lambda(R/F(1))", witness)
    elif any(rep.minimal and rep.is_reduction for rep in reductions):
        report.note("contrapositive: every minimal candidate has r >= 2")
    else:
        report.downgrade("no minimal reduction among the candidates")
    return _finish(report, F)


def check_sally_postulation(F: FiltrationSpec, J: MonomialIdeal,
                            window: Optional[int] = None) -> TheoremReport:
    """
    r_J(F) = n(F) + d, and Delta H != Delta P exactly at r_J - d

    "Exactly" is checked on the window: Delta H = Delta P for every n in
    r_J - d + 1 .. r_J - d + W.

    Needs grade G(F)_+ >= d - 1, which is never computed. It is vacuous for
    d = 1 and follows when r_J <= 1 with F(n) = F(1)^n; otherwise the
    report is conditional and a failed equality is not a violation.

    Examples:
        m-adic k[x,y], J = m: 0 = -2 + 2
        normal (x^3, y^3), J = (x^3, y^3): 1 = -1 + 2
    """
    W = get_setting('reduction_window', window)
    report = TheoremReport('sally', F.describe())
    if not _require_univariate(report, F) or not _require_cm(report, F):
        return report
    d = F.dimension
    reduction = is_reduction(J, F, W)
    report.record(candidate=reduction.to_dict())
    if not reduction.minimal:
        return report.inapplicable(f"{J} is not-minimal: a minimal reduction needs {d} generators")
    if not reduction.contained:
        return report.inapplicable(f"{J} is not contained in F(1)")
    if not reduction.is_reduction:
        report.downgrade(f"r_J is not determinable within window {W}")
        return _finish(report, F)

    summary = fit_polynomial(F)
    r = reduction.reduction_number
    pn = summary.postulation_number
    report.record(r_J=r, postulation_number=pn if pn is not None else '-inf', dimension=d)

    grade_known = d == 1 or (r <= 1 and _matches_first_powers(F, W))
    report.hypotheses['grade_G_plus_at_least_d_minus_1'] = 'checked' if grade_known else 'assumed'

    equal = report.compare(f"r_J = {r} equals n(F) + d = {pn + d if pn is not None else '-inf'}",
                           pn is not None and r == pn + d)
    k = r - d
    delta_h = hilbert_function(F, k + 1) - hilbert_function(F, k)
    delta_p = summary.evaluate(k + 1) - summary.evaluate(k)
    report.record(delta_H=delta_h, delta_P=delta_p, at=k)
    mismatch = report.compare(f"Delta H({k}) = {delta_h} differs from Delta P({k}) = {delta_p}", delta_h != delta_p)
    later = [n for n in range(k + 1, k + W + 1)
             if hilbert_function(F, n + 1) - hilbert_function(F, n) != summary.evaluate(n + 1) - summary.evaluate(n)]
    settled = report.compare(f"Delta H = Delta P for n = {k + 1}..{k + W}", not later)
    if later:
        report.record(later_mismatches=later)
    mismatch = mismatch and settled

    if equal and mismatch:
        if not grade_known:
            report.downgrade("grade G(F)_+ >= d - 1 assumed")
    elif grade_known:
        report.violate("r_J != n(F) + d under a verified grade hypothesis",
                       _witness(F, window=W, candidate=str(J), r_J=r, postulation_number=pn))
    else:
        report.downgrade("statement fails here, so the grade hypothesis must fail too")
    return _finish(report, F)


def check_nonnegativity(F: FiltrationSpec) -> TheoremReport:
    """
    e_alpha > 0 for |alpha| = d, e_alpha >= 0 for |alpha| = d-1 and d-2

    For s = 1 this is e_0 > 0, e_1 >= 0, e_2 >= 0; e_3 and beyond are
    reported without a verdict.
    """
    report = TheoremReport('nonneg', F.describe())
    if F.dimension < 1:
        return report.inapplicable("needs dimension at least 1")
    if not _require_cm(report, F):
        return report
    summary = fit_summary(F)
    d = F.dimension
    failures = []
    for alpha, value in sorted(summary.coefficients.items(), key=lambda kv: (-sum(kv[0]), kv[0])):
        size = sum(alpha)
        label = f"e_{d - size}" if F.arity == 1 else f"e_{alpha}"
        if size == d:
            if not report.compare(f"{label} = {value} > 0", value > 0):
                failures.append(label)
        elif size >= d - 2 and (size == d - 1 or d >= 2):
            if not report.compare(f"{label} = {value} >= 0", value >= 0):
                failures.append(label)
        else:
            report.note(f"{label} = {value} is outside the nonnegativity range"
                        + (" (negative values occur)" if value < 0 else ""))
    report.record(coefficients={str(a): v for a, v in sorted(summary.coefficients.items())})
    if failures:
        report.violate(f"negative coefficients {failures}", _witness(F, coefficients=report.quantities['coefficients']))
    return _finish(report, F)


# ============================================================================
# DIMENSION TWO
# ============================================================================

def check_dim2_cohomology_identities(F: FiltrationSpec, window: Optional[int] = None) -> TheoremReport:
    """
    h2_0 = e_2, h2_1 = e_0 - e_1 + e_2 - lambda(R/breve F(1)), h2 nonincreasing

    For s >= 2, h2_0 is compared with e_(0,...,0) and monotonicity is
    checked along every axis. `window` bounds the rows: 0..window on
    each axis.
    """
    report = TheoremReport('cohomology', F.describe())
    if F.dimension != 2:
        return report.inapplicable(f"needs d = 2, got d = {F.dimension}")
    if not _require_cm(report, F):
        return report
    summary = fit_summary(F)
    rows = None if window is None else list(itertools.product(range(max(window, 0) + 1), repeat=F.arity))
    table = cohomology_table_dim2(F, rows, summary)
    zero = (0,) * F.arity
    checks = []
    e_zero = summary.coefficients[zero]
    checks.append(report.compare(f"h2_0 = {table.h2(zero)} equals e_0 term {e_zero}", table.h2(zero) == e_zero))
    if F.arity == 1:
        e0, e1, e2 = summary.e
        breve_one = colength(graded_piece(rr_closed_filtration(F), 1))
        expected = e0 - e1 + e2 - breve_one
        if (1,) in table.rows:
            checks.append(report.compare(f"h2_1 = {table.h2(1)} equals e0 - e1 + e2 - lambda(R/breve F(1)) = {expected}",
                                         table.h2(1) == expected))
        report.record(h2_minus_one_derived=table.derived_rows[(-1,)])
        report.note(f"h2_-1 = e1 + e2 = {table.derived_rows[(-1,)]} (derived)")
    for n, (h1, h2) in table.rows.items():
        if h1 < 0 or h2 < 0:
            checks.append(report.compare(f"h1, h2 >= 0 at {n}", False))
    for n, (_, h2) in table.rows.items():
        for axis in range(F.arity):
            succ = tuple(k + int(i == axis) for i, k in enumerate(n))
            if succ in table.rows and table.rows[succ][1] > h2:
                checks.append(report.compare(f"h2 nonincreasing from {n} to {succ}", False))
    report.record(rows={str(n): list(v) for n, v in table.rows.items()})
    if all(checks):
        report.note("h1 and h2 nonnegative, h2 nonincreasing on the window")
    else:
        report.violate("a cohomology identity fails", _witness(F, rows=report.quantities['rows']))
    return _finish(report, F)


def check_itoh_e2(I: MonomialIdeal, candidates: Sequence[MonomialIdeal] = (),
                  window: Optional[int] = None) -> TheoremReport:
    """
    For I m-primary in dimension 2 and a minimal reduction Q the following
    agree:
        (1) e1 - e0 + lambda(R/breve I) = 0
        (2) (breve I)^2 = Q breve I
        (2') breve(I^2) = Q breve I
        (3) breve(I^{n+1}) = Q^n breve I for n = 1..N
        (4) e2 = 0
    Only (1) <=> (4) can be checked without a monomial minimal reduction.
    """
    N = get_setting('itoh_window', window)
    F = adic_filtration(I)
    report = TheoremReport('itoh-e2', F.describe())
    if F.dimension != 2:
        return report.inapplicable(f"needs d = 2, got d = {F.dimension}")
    if not _require_cm(report, F):
        return report
    summary = fit_polynomial(F)
    e0, e1, e2 = summary.e
    breve = rr_closed_filtration(F)
    breve_I = graded_piece(breve, 1)
    s1 = report.compare(f"(1) e1 - e0 + lambda(R/breve I) = {e1 - e0 + colength(breve_I)} is 0",
                        e1 - e0 + colength(breve_I) == 0)
    s4 = report.compare(f"(4) e2 = {e2} is 0", e2 == 0)
    report.record(e=list(summary.e), breve_I=str(breve_I), colength_breve_I=colength(breve_I))
    witness = _witness(F, window=N, e=list(summary.e), breve_I=str(breve_I))
    if s1 != s4:
        report.violate("(1) and (4) disagree", witness)
        return _finish(report, F)

    reductions = _reduction_reports(F, candidates, None, report)
    usable = [(Q, r) for Q, r in zip(candidates, reductions) if r.minimal and r.is_reduction]
    if not usable:
        report.downgrade("no minimal monomial reduction supplied; only (1) <=> (4) checked")
        return _finish(report, F)
    for Q, _ in usable:
        QB = multiply(Q, breve_I)
        s2 = report.compare(f"(2) with Q = {Q}", power(breve_I, 2) == QB)
        s2p = report.compare(f"(2') with Q = {Q}", graded_piece(breve, 2) == QB)
        s3 = report.compare(f"(3) with Q = {Q} for n <= {N}",
                            all(graded_piece(breve, n + 1) == multiply(power(Q, n), breve_I)
                                for n in range(1, N + 1)))
        if len({s1, s2, s2p, s3, s4}) != 1:
            report.violate(f"statements disagree for Q = {Q}", dict(witness, Q=str(Q)))
            break
    return _finish(report, F)


# ============================================================================
# MULTI-GRADED
# ============================================================================

def check_multigraded_ho(F: FiltrationSpec, candidates: Sequence[MonomialIdeal] = (),
                         window: Optional[int] = None) -> TheoremReport:
    """
    Per axis i, with F^(i) = {F(n e_i)}:
        (1) e_{(d-1)e_i}(F) >= e_1(F^(i))
        (2) e(I_i) - e_{(d-1)e_i}(F) <= lambda(R/F(e_i))
        (3) equality in (2) iff r(F^(i)) <= 1 and equality in (1)

    r(F^(i)) is candidate-relative, so (3) is confirmed in the "if"
    direction only; an equality in (2) with no candidate of r <= 1 is
    conditional.
    """
    report = TheoremReport('mgho', F.describe())
    if F.arity < 2:
        return report.inapplicable("needs s >= 2 base ideals")
    if F.dimension < 1:
        return report.inapplicable("needs dimension at least 1")
    if not _require_cm(report, F):
        return report
    d = F.dimension
    summary = fit_polynomial_multi(F)
    per_axis = {}
    failed = False
    for axis in range(F.arity):
        sub = restrict_to_axis(F, axis)
        sub_summary = fit_polynomial(sub)
        top = tuple(d * int(i == axis) for i in range(F.arity))
        below = tuple((d - 1) * int(i == axis) for i in range(F.arity))
        e_mixed = summary.coefficients[below]
        e_sub0, e_sub1 = sub_summary.e[0], sub_summary.e[1]
        length = colength(graded_piece(F, tuple(int(i == axis) for i in range(F.arity))))
        tag = f"axis {axis + 1}"
        ok = [
            report.compare(f"{tag}: e(I_i) = {e_sub0} equals e_{top} = {summary.coefficients[top]}",
                           e_sub0 == summary.coefficients[top]),
            report.compare(f"{tag} (1): e_{below} = {e_mixed} >= e1(F^(i)) = {e_sub1}", e_mixed >= e_sub1),
            report.compare(f"{tag} (2): e(I_i) - e_{below} = {e_sub0 - e_mixed} <= lambda(R/F(e_i)) = {length}",
                           e_sub0 - e_mixed <= length),
        ]
        reductions = [is_reduction(J, sub, window) for J in candidates]
        r = _least_reduction_number(reductions)
        equality = e_sub0 - e_mixed == length
        if r is not None and r <= 1 and e_mixed == e_sub1:
            ok.append(report.compare(f"{tag} (3): r <= 1 and (1) tight imply equality in (2)", equality))
        elif equality:
            report.note(f"{tag} (3): equality in (2); r(F^(i)) <= 1 not confirmed by candidates")
            ok.append(report.compare(f"{tag} (3): equality in (2) forces equality in (1)", e_mixed == e_sub1))
            if r is None or r > 1:
                report.downgrade(f"{tag}: candidate-relative reduction number cannot confirm (3)")
        per_axis[str(axis + 1)] = {'e_mixed': e_mixed, 'e0_sub': e_sub0, 'e1_sub': e_sub1,
                                   'colength_F_ei': length, 'r_candidate_relative': r}
        failed = failed or not all(ok)
    report.record(axes=per_axis)
    if failed:
        report.violate("a per-axis inequality fails", _witness(F, axes=per_axis))
    return _finish(report, F)


def check_e2_zero_multi(F: FiltrationSpec, summary: Optional[HilbertSummary] = None) -> TheoremReport:
    """
    d = 2: e_0 term = 0 implies e(I_i) - e_{e_i} = lambda(R/breve F(e_i)) for every i

    The converse needs breve F to be admissible, which is assumed; a
    failing converse is therefore conditional.
    """
    report = TheoremReport('e2zero-multi', F.describe())
    if F.dimension != 2:
        return report.inapplicable(f"needs d = 2, got d = {F.dimension}")
    if not _require_cm(report, F):
        return report
    summary = summary or fit_summary(F)
    breve = rr_closed_filtration(F)
    s = F.arity
    e_zero = summary.coefficients[(0,) * s]
    equalities = []
    rows = {}
    for axis in range(s):
        unit = tuple(int(i == axis) for i in range(s))
        top = tuple(2 * k for k in unit)
        lhs = summary.coefficients[top] - summary.coefficients[unit]
        rhs = colength(graded_piece(breve, unit))
        rows[str(axis + 1)] = {'lhs': lhs, 'colength_breve_F_ei': rhs}
        equalities.append(report.compare(f"axis {axis + 1}: e(I_i) - e_{unit} = {lhs} equals "
                                         f"lambda(R/breve F(e_i)) = {rhs}", lhs == rhs))
    report.record(e_zero=e_zero, axes=rows)
    report.hypotheses['breve_F_admissible'] = 'assumed'
    if e_zero == 0:
        if not all(equalities):
            report.violate("e_0 term vanishes but an equality fails", _witness(F, e_zero=e_zero, axes=rows))
    elif all(equalities):
        report.downgrade("equalities hold with a nonzero e_0 term; converse depends on admissibility of breve F")
    else:
        report.note("inapplicable-forward")
        report.inapplicable("e_0 term is nonzero: forward implication vacuous")
    return _finish(report, F)


def check_normal_e3(I: MonomialIdeal, window: Optional[int] = None) -> TheoremReport:
    """
    ebar_3 >= 0 for the normal filtration in dimension 3

    Also notes whether bar(I^{n+2}) = I^n bar(I^2) on the window and
    whether ebar_1 = ebar_0 - lambda(R/bar I) + 1, in which case ebar_3 is
    expected to vanish. Neither note changes the verdict.

    Example:
        (x^2, y^2, z^2) -> ebar = (8, 4, 0, 0)
    """
    N = get_setting('itoh_window', window)
    report = TheoremReport('itoh-e3', f"normal({I})")
    if I.ring.dimension != 3:
        return report.inapplicable(f"needs d = 3, got d = {I.ring.dimension}")
    if I.ring.is_quotient:
        return report.inapplicable("needs a polynomial ring")
    if not is_m_primary(I):
        return report.inapplicable(f"{I} is not m-primary")
    report.hypotheses['analytically_unramified_cm'] = 'checked'
    F = normal_filtration(I)
    summary = fit_polynomial(F)
    ebar = summary.e
    report.record(ebar=list(ebar))
    if not report.compare(f"ebar3 = {ebar[3]} >= 0", ebar[3] >= 0):
        report.violate("ebar3 is negative", _witness(F, ebar=list(ebar)))

    closure_two = integral_closure_power(I, 2)
    stable = all(integral_closure_power(I, n + 2) == multiply(power(I, n), closure_two) for n in range(1, N + 1))
    report.note(f"bar(I^(n+2)) = I^n bar(I^2) for n <= {N}: {'yes' if stable else 'no'}")
    length_bar = colength(graded_piece(F, 1))
    if ebar[1] == ebar[0] - length_bar + 1:
        report.note(f"ebar1 = ebar0 - lambda(R/bar I) + 1; ebar3 expected 0, found {ebar[3]}")
    report.record(bar_power_relation_on_window=stable, colength_bar_I=length_bar)
    return _finish(report, F)
