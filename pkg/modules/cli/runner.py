"""
Task Runner - Dispatch Instance Tasks and Run Corpora
Every task yields a TaskResult; one instance file yields a ReportDocument;
a directory yields a CorpusReport with the theorem-by-instance matrix
"""

import itertools
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from config.modules_config import TOOL_NAME, TOOL_VERSION, RUNTIME_OVERRIDES, apply_overrides, get_setting
from modules.cli.instance_parser import InstanceFile, TaskDecl, parse_instance
from modules.filtrations.engine import FiltrationSpec, ratliff_rush_closure, ratliff_rush_piece
from modules.filtrations.newton import integral_closure_power
from modules.hilbert.binomial_basis import multi_exponents
from modules.hilbert.engine import (
    cohomology_table_dim2,
    defect_table,
    fit_polynomial,
    fit_polynomial_multi,
    fit_summary,
    hilbert_table,
    index_columns,
    postulation_number,
)
from modules.monomial_core.engine import (
    MonomialIdeal,
    colength,
    contains_monomial,
    format_monomial,
    is_m_primary,
    minimal_generators,
)
from modules.theorems.engine import (
    check_dim2_cohomology_identities,
    check_e2_zero_multi,
    check_huneke_ooishi,
    check_itoh_e2,
    check_multigraded_ho,
    check_nonnegativity,
    check_normal_e3,
    check_northcott,
    check_sally_postulation,
    is_reduction,
)
from modules.theorems.reports import TheoremReport, Verdict
from shared.errors import FiltralabError, InputError

logger = logging.getLogger(__name__)


# ============================================================================
# RESULT DOCUMENTS
# ============================================================================

@dataclass
class TaskResult:
    label: str
    command: str
    status: str = 'ok'
    verdict: Optional[str] = None
    result: Dict[str, Any] = field(default_factory=dict)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    error: Optional[Dict[str, Any]] = None
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'task': self.label,
            'command': self.command,
            'status': self.status,
            'verdict': self.verdict,
            'result': self.result,
            'error': self.error,
        }


@dataclass
class ReportDocument:
    """
    Everything computed for one instance file

    The payload is deterministic; timings live in a separate section that
    is only written when requested.
    """
    instance: str
    digest: str = ''
    results: List[TaskResult] = field(default_factory=list)
    error: Optional[Dict[str, Any]] = None
    include_timing: bool = False

    @property
    def has_violation(self) -> bool:
        return any(r.verdict == Verdict.VIOLATED.value for r in self.results)

    @property
    def has_error(self) -> bool:
        return self.error is not None or any(r.status == 'error' for r in self.results)

    @property
    def exit_code(self) -> int:
        if self.has_violation:
            return 2
        return 1 if self.has_error else 0

    def verdict_counts(self) -> Counter:
        counts = Counter(r.verdict for r in self.results if r.verdict)
        counts['error'] = sum(1 for r in self.results if r.status == 'error') + int(self.error is not None)
        return counts

    def to_dict(self) -> Dict[str, Any]:
        document = {
            'tool': TOOL_NAME,
            'version': TOOL_VERSION,
            'instance': self.instance,
            'digest': self.digest,
            'results': [r.to_dict() for r in self.results],
            'error': self.error,
        }
        if self.include_timing:
            document['timing'] = {r.label: round(r.seconds, 3) for r in self.results}
        return document

    def tables(self) -> List[Tuple[str, pd.DataFrame]]:
        return [(f"{r.label} :: {name}", frame) for r in self.results for name, frame in r.tables.items()]


@dataclass
class CorpusReport:
    directory: str
    documents: List[ReportDocument] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if any(d.has_violation for d in self.documents):
            return 2
        return 1 if any(d.has_error for d in self.documents) else 0

    def verdict_counts(self) -> Counter:
        total = Counter()
        for document in self.documents:
            total.update(document.verdict_counts())
        return total

    def matrix(self) -> pd.DataFrame:
        """Verdict per (instance, check); checks are verify and expect tasks"""
        records = []
        for document in self.documents:
            name = Path(document.instance).name
            for r in document.results:
                if r.command in ('verify', 'expect'):
                    records.append({'instance': name, 'check': r.label,
                                    'verdict': r.verdict or r.status})
        if not records:
            return pd.DataFrame(columns=['instance'])
        frame = pd.DataFrame(records).drop_duplicates(['instance', 'check'], keep='last')
        matrix = frame.pivot(index='instance', columns='check', values='verdict').fillna('')
        return matrix.sort_index().reset_index()

    def violations(self) -> List[Dict[str, Any]]:
        return [{'instance': d.instance, 'task': r.label, 'witness': r.result.get('witness')}
                for d in self.documents for r in d.results if r.verdict == Verdict.VIOLATED.value]

    def to_dict(self) -> Dict[str, Any]:
        counts = self.verdict_counts()
        return {
            'tool': TOOL_NAME,
            'version': TOOL_VERSION,
            'corpus': self.directory,
            'instances': [d.to_dict() for d in self.documents],
            'summary': {
                'instances': len(self.documents),
                'counts': {k: counts.get(k, 0) for k in
                           ('verified', 'conditional', 'inapplicable', 'violated', 'error')},
                'violations': self.violations(),
            },
        }

    def tables(self) -> List[Tuple[str, pd.DataFrame]]:
        tables = [('verdict_matrix', self.matrix())]
        for document in self.documents:
            tables.extend((f"{Path(document.instance).name} :: {name}", frame)
                          for name, frame in document.tables())
        return tables


# ============================================================================
# OPTION HELPERS
# ============================================================================

def _int_option(task: TaskDecl, key: str, default=None) -> Optional[int]:
    raw = task.options.get(key)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"option {key}={raw} is not an integer", line=task.line, column=task.column)


def _index_option(task: TaskDecl, key: str, arity: int):
    """n=2 -> 2 for s = 1, n=1,2 -> (1, 2); a single value is repeated over every axis"""
    raw = task.options.get(key, '1')
    try:
        values = tuple(int(v) for v in raw.split(','))
    except ValueError:
        raise InputError(f"option {key}={raw} is not an index", line=task.line, column=task.column)
    if len(values) == 1:
        values = values * arity
    if len(values) != arity:
        raise InputError(f"option {key}={raw} has {len(values)} entries, filtration has arity {arity}",
                         line=task.line, column=task.column)
    return values[0] if arity == 1 else values


def _window_option(task: TaskDecl, F: FiltrationSpec):
    raw = task.options.get('window')
    if raw is None:
        return None
    try:
        low, high = (int(v) for v in raw.split('..')) if '..' in raw else (0, int(raw))
    except ValueError:
        raise InputError(f"window={raw} is neither N nor a..b", line=task.line, column=task.column)
    values = range(low, high + 1)
    if F.arity == 1:
        return [(k,) for k in values]
    return list(itertools.product(values, repeat=F.arity))


def _candidates(instance: InstanceFile, task: TaskDecl) -> List[MonomialIdeal]:
    names = [n for n in task.options.get('candidates', '').split(',') if n]
    names += [n for n in task.args[2:] if not instance.is_filtration(n)]
    return [instance.ideal(n) for n in names]


def _single_ideal(instance: InstanceFile, name: str) -> MonomialIdeal:
    """An ideal name, or the base ideal of a one-ideal filtration"""
    if not instance.is_filtration(name):
        return instance.ideal(name)
    F = instance.filtration(name)
    if len(F.base_ideals) != 1:
        raise InputError(f"{name} has {len(F.base_ideals)} base ideals, expected one")
    return F.base_ideals[0]


def _generators(I: MonomialIdeal) -> List[str]:
    return [format_monomial(g, I.ring.variable_names) for g in I.generators]


def _postulation_value(pn: Optional[int]):
    return '-inf' if pn is None else pn


def _rows(table: Dict, value_key: str) -> List[Dict[str, Any]]:
    return [{'n': list(n), value_key: v} for n, v in table.items()]


def _certificate(summary) -> Dict[str, Any]:
    return {k: summary.fit_certificate[k] for k in ('base', 'grid', 'verification')}


# ============================================================================
# TASK HANDLERS
# ============================================================================

def _run_hilbert(instance, task):
    F = instance.filtration(task.args[0])
    table = hilbert_table(F, _window_option(task, F))
    frame = pd.DataFrame([list(n) + [v] for n, v in table.items()], columns=index_columns(F.arity) + ['H'])
    return {'filtration': F.describe(), 'H': _rows(table, 'H')}, {'hilbert': frame}, None


def _run_coeffs(instance, task):
    F = instance.filtration(task.args[0])
    summary = fit_polynomial(F)
    result = {
        'filtration': F.describe(),
        'dimension': summary.dimension,
        'e': list(summary.e),
        'postulation_number': _postulation_value(summary.postulation_number),
        'fit_certificate': _certificate(summary),
        'H': _rows(summary.function_table, 'H'),
    }
    return result, {'coefficients': summary.to_frame()}, None


def _run_mixed(instance, task):
    F = instance.filtration(task.args[0])
    summary = fit_polynomial_multi(F)
    alphas = multi_exponents(F.arity, summary.dimension)
    columns = [f"alpha_{i + 1}" for i in range(F.arity)] + ['e_alpha']
    frame = pd.DataFrame([list(a) + [summary.coefficients[a]] for a in alphas], columns=columns)
    result = {
        'filtration': F.describe(),
        'dimension': summary.dimension,
        'e_alpha': [{'alpha': list(a), 'e': summary.coefficients[a]} for a in alphas],
        'fit_certificate': _certificate(summary),
    }
    return result, {'mixed': frame}, None


def _run_defect(instance, task):
    F = instance.filtration(task.args[0])
    table = defect_table(F, _window_option(task, F))
    result = {'filtration': F.describe(), 'rows': _rows(table.rows, 'chi'),
              'stabilization_bound': table.stabilization_bound}
    return result, {'defect': table.to_frame()}, None


def _run_postulation(instance, task):
    F = instance.filtration(task.args[0])
    summary = fit_polynomial(F)
    result = {'filtration': F.describe(), 'e': list(summary.e),
              'postulation_number': _postulation_value(summary.postulation_number)}
    return result, {}, None


def _rr_piece(instance, task, name: str) -> Tuple[MonomialIdeal, Any]:
    kmax = _int_option(task, 'kmax')
    if instance.is_filtration(name):
        F = instance.filtration(name)
        n = _index_option(task, 'n', F.arity)
        return ratliff_rush_piece(F, n, kmax=kmax), n
    n = _int_option(task, 'n', 1)
    return ratliff_rush_closure(instance.ideal(name), n, kmax=kmax), n


def _closure_piece(instance, task, name: str) -> Tuple[MonomialIdeal, int]:
    n = _int_option(task, 'n', 1)
    return integral_closure_power(_single_ideal(instance, name), n), n


def _ideal_result(target: str, n, piece: MonomialIdeal) -> Dict[str, Any]:
    return {
        'target': target,
        'n': list(n) if isinstance(n, tuple) else n,
        'generators': _generators(piece),
        'colength': colength(piece) if piece.is_unit or is_m_primary(piece) else None,
    }


def _run_rr(instance, task):
    piece, n = _rr_piece(instance, task, task.args[0])
    return _ideal_result(task.args[0], n, piece), {}, None


def _run_intclosure(instance, task):
    piece, n = _closure_piece(instance, task, task.args[0])
    return _ideal_result(task.args[0], n, piece), {}, None


def _run_cohomology(instance, task):
    F = instance.filtration(task.args[0])
    table = cohomology_table_dim2(F, _window_option(task, F))
    result = {
        'filtration': F.describe(),
        'rows': [{'n': list(n), 'h1': h1, 'h2': h2} for n, (h1, h2) in table.rows.items()],
        'derived': [{'n': list(n), 'h2': h2} for n, h2 in table.derived_rows.items()],
    }
    return result, {'cohomology': table.to_frame()}, None


def _run_reduction(instance, task):
    if len(task.args) < 2:
        raise InputError("reduction needs a filtration and a candidate", line=task.line, column=task.column)
    F = instance.filtration(task.args[0])
    report = is_reduction(instance.ideal(task.args[1]), F, _int_option(task, 'window'))
    return report.to_dict(), {}, None


def _run_verify(instance, task):
    checker, target = task.args[0], task.args[1]
    window = _int_option(task, 'window')
    if checker == 'itoh-e2':
        report = check_itoh_e2(_single_ideal(instance, target), _candidates(instance, task), window)
    elif checker == 'itoh-e3':
        report = check_normal_e3(_single_ideal(instance, target), window)
    else:
        F = instance.filtration(target)
        if checker == 'northcott':
            report = check_northcott(F)
        elif checker == 'huneke-ooishi':
            report = check_huneke_ooishi(F, _candidates(instance, task), window)
        elif checker == 'sally':
            candidates = _candidates(instance, task)
            if candidates:
                report = check_sally_postulation(F, candidates[0], window)
            else:
                report = TheoremReport('sally', F.describe()).inapplicable("no reduction candidate J supplied")
        elif checker == 'nonneg':
            report = check_nonnegativity(F)
        elif checker == 'cohomology':
            report = check_dim2_cohomology_identities(F, window)
        elif checker == 'mgho':
            report = check_multigraded_ho(F, _candidates(instance, task), window)
        else:
            report = check_e2_zero_multi(F)
    return report.to_dict(), {}, report.verdict.value


def _expected_ideal_matches(piece: MonomialIdeal, task: TaskDecl) -> bool:
    if task.relation == 'contains':
        return all(contains_monomial(piece, a) for a in task.expected)
    return minimal_generators(task.expected, piece.ring).generators == piece.generators


def _run_expect(instance, task):
    kind, target = task.args[0], task.args[1]
    if kind == 'coeffs':
        actual = list(fit_polynomial(instance.filtration(target)).e)
    elif kind == 'mixed':
        summary = fit_summary(instance.filtration(target))
        actual = [summary.coefficients[a] for a in multi_exponents(summary.arity, summary.dimension)]
    elif kind == 'colength':
        actual = (colength(instance.filtration(target).first_piece()) if instance.is_filtration(target)
                  else colength(instance.ideal(target)))
    elif kind == 'postulation':
        actual = postulation_number(instance.filtration(target))
    elif kind == 'reduction':
        report = is_reduction(instance.ideal(task.args[2]), instance.filtration(target), _int_option(task, 'window'))
        actual = report.reduction_number if report.is_reduction else None
    else:
        pick = _rr_piece if kind == 'rr' else _closure_piece
        piece, _ = pick(instance, task, target)
        holds = _expected_ideal_matches(piece, task)
        actual = _generators(piece)
        return _expect_result(instance, task, actual, holds)
    return _expect_result(instance, task, actual, actual == task.expected)


def _expect_result(instance, task, actual, holds: bool):
    verdict = Verdict.VERIFIED if holds else Verdict.VIOLATED
    expected = task.expected
    if isinstance(expected, list) and expected and isinstance(expected[0], tuple):
        expected = [format_monomial(a, instance.ring.variable_names) for a in expected]
    result = {'relation': task.relation, 'expected': expected, 'actual': actual}
    if not holds:
        result['witness'] = {'instance': instance.path, 'statement': task.to_text(), 'digest': instance.digest}
    return result, {}, verdict.value


TASK_HANDLERS = {
    'hilbert': _run_hilbert,
    'coeffs': _run_coeffs,
    'mixed': _run_mixed,
    'defect': _run_defect,
    'postulation': _run_postulation,
    'rr': _run_rr,
    'intclosure': _run_intclosure,
    'cohomology': _run_cohomology,
    'reduction': _run_reduction,
    'verify': _run_verify,
    'expect': _run_expect,
}


# ============================================================================
# RUNNING
# ============================================================================

def run_task(instance: InstanceFile, task: TaskDecl) -> TaskResult:
    """
    Run one task; library errors become an error result, never an exception

    Examples:
        "task coeffs F;" on Marley's ideal -> result['e'] == [27, 18, 4, -1]
        "task verify northcott F;" on m-adic -> verdict 'verified'
    """
    outcome = TaskResult(label=task.label(), command=task.command)
    started = time.perf_counter()
    try:
        result, tables, verdict = TASK_HANDLERS[task.command](instance, task)
        outcome.result, outcome.tables, outcome.verdict = result, tables, verdict
    except FiltralabError as exc:
        issue = exc.to_issue()
        issue['line'] = issue['line'] or task.line
        issue['column'] = issue['column'] or task.column
        if getattr(exc, 'diagnostics', None):
            issue['diagnostics'] = exc.diagnostics
        if getattr(exc, 'partial_chain', None):
            issue['partial_chain'] = exc.partial_chain
        outcome.status = 'error'
        outcome.error = issue
        logger.warning("%s: %s", task.label(), exc.message)
    outcome.seconds = time.perf_counter() - started
    logger.debug("%s finished in %.3fs", outcome.label, outcome.seconds)
    return outcome


def run_instance(instance: InstanceFile, include_timing: bool = False,
                 only: Optional[List[TaskDecl]] = None) -> ReportDocument:
    document = ReportDocument(instance.path, instance.digest, include_timing=include_timing)
    for task in (only if only is not None else instance.tasks):
        document.results.append(run_task(instance, task))
    return document


def run_instance_file(path: str, include_timing: bool = False) -> ReportDocument:
    """Parse and run one file; parse failures are recorded on the document"""
    try:
        text = Path(path).read_text(encoding='utf-8')
        instance = parse_instance(text, path=str(path))
    except FiltralabError as exc:
        logger.warning("%s: %s", path, exc)
        return ReportDocument(str(path), error=exc.to_issue(), include_timing=include_timing)
    except OSError as exc:
        return ReportDocument(str(path), include_timing=include_timing,
                              error={'line': 0, 'column': 0, 'type': 'File Error', 'token': '',
                                     'message': f"could not read {path}: {exc}"})
    return run_instance(instance, include_timing)


def _init_worker(overrides: Dict[str, int]):
    apply_overrides(**overrides)


def corpus_run(directory: str, jobs: Optional[int] = None, include_timing: bool = False) -> CorpusReport:
    """
    Run every *.flt file of a directory

    Documents come back sorted by path whatever order the workers finish
    in. An empty directory gives an empty report with exit code 0.
    """
    jobs = get_setting('jobs', jobs)
    paths = sorted(str(p) for p in Path(directory).glob('*.flt'))
    report = CorpusReport(str(directory))
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(dict(RUNTIME_OVERRIDES),)) as pool:
            documents = list(pool.map(run_instance_file, paths, [include_timing] * len(paths)))
    else:
        documents = [run_instance_file(p, include_timing) for p in paths]
    report.documents = sorted(documents, key=lambda d: d.instance)
    logger.debug("corpus %s: %d instances", directory, len(paths))
    return report
