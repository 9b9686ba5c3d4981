"""
Shared Help Text
Help strings for every subcommand and option of the filtralab CLI
"""

from config.modules_config import AVAILABLE_TASKS, THEOREM_CHECKERS

# Positional target usage per subcommand
TARGET_USAGE = {
    'hilbert': 'FILTRATION',
    'coeffs': 'FILTRATION',
    'mixed': 'FILTRATION',
    'defect': 'FILTRATION',
    'postulation': 'FILTRATION',
    'rr': 'IDEAL_OR_FILTRATION',
    'intclosure': 'IDEAL',
    'cohomology': 'FILTRATION',
    'reduction': 'FILTRATION CANDIDATE',
    'verify': 'CHECKER FILTRATION [CANDIDATE ...]',
}

HELP_TEXTS = {
    # Subcommands beyond the task registry
    'run': 'Run every task and expect statement of one instance file',
    'corpus': 'Run every *.flt file of a directory and print the verdict matrix',

    # Options
    'window': 'Window size: last index of H/defect/cohomology tables, and the '
              'reduction and Itoh windows of the checkers',
    'kmax': 'Longest Ratliff-Rush colon chain tried (env FILTRALAB_KMAX)',
    'format': 'Output format: json (default), csv, text or xlsx',
    'jobs': 'Worker processes for corpus runs',
    'output': 'Write the report to this file instead of stdout',
    'timing': 'Add a timing section (per-task seconds) to the report',
    'verbose': 'Log progress at DEBUG level on stderr',
    'n': 'Index of the graded piece for rr and intclosure (e.g. 2 or 1,2)',
    'candidates': 'Comma-separated candidate names used as reductions',
    'targets': 'Names declared in the instance file; none runs the matching tasks of the file',
}

CHECKER_TEXTS = {
    'northcott': 'e_1 >= e_0 - colength(F(1)) >= 0',
    'huneke-ooishi': 'equality in Northcott iff r_J(F) <= 1',
    'sally': 'postulation number n(F) = r_J(F) - d plus the Delta H level check',
    'nonneg': 'positivity and nonnegativity of the leading coefficients',
    'cohomology': 'dimension-two identities between h1, h2 and e_0..e_2',
    'itoh-e2': 'I-adic filtration and its Ratliff-Rush closure, d = 2: e_1 - e_0 + colength(breve I) = 0, (breve I)^2 = Q breve I, breve(I^{n+1}) = Q^n breve I and e_2 = 0 agree',
    'mgho': 'multi-graded Huneke-Ooishi on every axis',
    'e2zero-multi': 'multi-graded e_2 vanishing criterion',
    'itoh-e3': 'normal filtration: ebar_3 >= 0 and the reduction window report',
}

EPILOG = """exit codes:
  0  every verdict verified, conditional or inapplicable
  1  hard error (parse, fit, instability, unsupported request)
  2  at least one violated verdict

instance files declare a ring, ideals, filtrations, candidates, tasks and
expect statements, e.g.
  ring R = poly(x, y);
  ideal I = [x^4, x^3*y, x*y^3, y^4];
  task coeffs I;
  expect rr I n=1 contains [x^2*y^2];
"""


def get_help(key):
    """Help for a subcommand or option; registry descriptions are the fallback"""
    if key in HELP_TEXTS:
        return HELP_TEXTS[key]
    if key in AVAILABLE_TASKS:
        return AVAILABLE_TASKS[key]['description']
    return ''


def get_checker_help():
    """One line per checker for the verify subcommand"""
    return '\n'.join(f"  {name:<14} {CHECKER_TEXTS[name]}" for name in THEOREM_CHECKERS)
