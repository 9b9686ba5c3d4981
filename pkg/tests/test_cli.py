import io
import json
from pathlib import Path

import pandas as pd
import pytest

from main import build_parser, main
from modules.cli.emitter import emit, emit_csv, emit_json, emit_text, emit_xlsx, to_json_safe
from modules.cli.instance_parser import parse_instance, tokenize
from modules.cli.runner import corpus_run, run_instance, run_instance_file
from shared.errors import InputError, InstanceSyntaxError
from shared.help_text import CHECKER_TEXTS, get_checker_help

CORPUS = Path(__file__).resolve().parent.parent / 'corpus'
GOLDEN = Path(__file__).resolve().parent.parent / 'docs' / 'golden'

SQUARE_TEXT = """\
# m^2 in the plane
ring R = poly(x, y);
ideal M2 = [x^2, x*y, y^2];
candidate J = [x^2, y^2];
task coeffs M2;
task verify sally M2 J;
expect coeffs M2 = [4, 1, 0];
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return path


# ============================================================================
# PARSER
# ============================================================================

def test_tokenize_positions():
    tokens = tokenize("ring R\n  = poly(x);")
    assert (tokens[2].text, tokens[2].line, tokens[2].column) == ('=', 2, 3)


def test_parse_builds_declared_objects():
    instance = parse_instance(SQUARE_TEXT)
    assert instance.ring.variable_names == ('x', 'y')
    assert instance.ideals['M2'].generators == ((0, 2), (1, 1), (2, 0))
    assert [t.command for t in instance.tasks] == ['coeffs', 'verify', 'expect']
    assert instance.tasks[2].expected == [4, 1, 0]


def test_variable_range_and_quotient():
    instance = parse_instance("ring R = poly(x1..x4) / [x4^3] cm;\nideal I = [x1, x2^2];")
    assert instance.ring.variable_names == ('x1', 'x2', 'x3', 'x4')
    assert instance.ring.asserted_cohen_macaulay
    assert instance.ring_decl.to_text() == "ring R = poly(x1..x4) / [x4^3] cm;"


def test_undeclared_variable_reports_position():
    with pytest.raises(InstanceSyntaxError) as excinfo:
        parse_instance("ring R = poly(x, y);\nideal I = [x^2, z];")
    error = excinfo.value
    assert (error.line, error.column, error.token) == (2, 17, 'z')
    assert error.to_issue()['type'] == 'Syntax Error'


def test_misspelled_keyword_gets_suggestion():
    with pytest.raises(InstanceSyntaxError) as excinfo:
        parse_instance("ring R = poly(x, y);\ntaks coeffs I;")
    assert excinfo.value.suggestion == 'task'
    assert (excinfo.value.line, excinfo.value.column) == (2, 1)


def test_misspelled_name_gets_suggestion():
    text = "ring R = poly(x, y);\nideal Marley = [x, y];\ntask coeffs Marly;"
    with pytest.raises(InstanceSyntaxError) as excinfo:
        parse_instance(text)
    assert excinfo.value.suggestion == 'Marley'
    assert "did you mean 'Marley'?" in excinfo.value.message


def test_unknown_checker_gets_suggestion():
    text = "ring R = poly(x, y);\nideal M = [x, y];\ntask verify northcot M;"
    with pytest.raises(InstanceSyntaxError) as excinfo:
        parse_instance(text)
    assert excinfo.value.suggestion == 'northcott'


@pytest.mark.parametrize("text", [
    "ideal I = [x];",
    "ring R = poly(x);\nring S = poly(y);",
    "ring R = poly(x, y);\nideal I = [2*x];",
    "ring R = poly(x, y);\nideal I = [x^0];",
    "ring R = poly(x, y);\nideal I = [x, y]",
    "ring R = poly(x, y);\nideal I = [x];\nideal I = [y];",
    "ring R = poly(x, y);\nideal I = [x];\ntask coeffs;",
    "ring R = poly(x, y) $;",
])
def test_malformed_instances(text):
    with pytest.raises(InstanceSyntaxError):
        parse_instance(text)


def test_canonical_text_ignores_comments_and_spacing():
    spaced = SQUARE_TEXT.replace(';\n', ';\n\n# note\n').replace('= [', '=   [')
    first, second = parse_instance(SQUARE_TEXT), parse_instance(spaced)
    assert first.to_text() == second.to_text()
    assert first.digest == second.digest
    assert parse_instance(first.to_text()).digest == first.digest


def test_unknown_name_lookup_suggests():
    instance = parse_instance(SQUARE_TEXT)
    with pytest.raises(InputError, match="did you mean 'M2'"):
        instance.ideal('M22')


# ============================================================================
# RUNNER
# ============================================================================

def test_run_instance_on_square():
    document = run_instance(parse_instance(SQUARE_TEXT))
    coeffs, sally, expect = document.results
    assert coeffs.result['e'] == [4, 1, 0]
    assert coeffs.result['postulation_number'] == -1
    assert sally.verdict == 'verified'
    assert expect.verdict == 'verified'
    assert document.exit_code == 0


def test_library_error_becomes_error_result():
    text = "ring R = poly(x, y);\nideal I = [x^2, x*y];\ntask coeffs I;"
    document = run_instance(parse_instance(text))
    result = document.results[0]
    assert result.status == 'error'
    assert result.error['type'] == 'Domain Error'
    assert (result.error['line'], result.error['column']) == (3, 6)
    assert document.exit_code == 1


def test_unstable_chain_is_reported_with_partial_chain():
    text = ("ring R = poly(x, y);\nideal I = [x^4, x^3*y, x*y^3, y^4];\n"
            "task rr I kmax=2;\ntask rr I;")
    document = run_instance(parse_instance(text))
    unstable, settled = document.results
    assert unstable.error['type'] == 'Unstable'
    assert len(unstable.error['partial_chain']) == 2
    assert 'x^2*y^2' in settled.result['generators']
    assert settled.result['colength'] == 10


def test_mixed_and_cohomology_tasks():
    text = ("ring R = poly(x, y);\nideal M = [x, y];\nfiltration F = adic(M, M);\n"
            "task mixed F;\ntask cohomology M window=0..2;\ntask hilbert F window=1;")
    mixed, cohomology, hilbert = run_instance(parse_instance(text)).results
    assert [row['e'] for row in mixed.result['e_alpha']] == [1, 1, 1, 0, 0, 0]
    assert [row['n'] for row in cohomology.result['rows']] == [[0], [1], [2]]
    assert len(hilbert.result['H']) == 4


def test_verify_cohomology_honors_window():
    text = ("ring R = poly(x, y);\nideal I = [x^4, x^3*y, x*y^3, y^4];\n"
            "task verify cohomology I window=1;\ntask verify cohomology I window=5;")
    narrow, wide = run_instance(parse_instance(text)).results
    assert sorted(narrow.result['quantities']['rows']) == ['(0,)', '(1,)']
    assert len(wide.result['quantities']['rows']) == 6


def test_multi_index_option_length_mismatch():
    text = ("ring R = poly(x, y);\nideal M = [x, y];\nfiltration F = adic(M, M);\n"
            "task rr F n=1,2,3;")
    result = run_instance(parse_instance(text)).results[0]
    assert result.status == 'error'
    assert result.error['type'] == 'Input Error'


def test_violated_expectation_carries_witness():
    document = run_instance_file(str(CORPUS / 'selftest' / 'corrupted_expectation.flt'))
    result = document.results[0]
    assert result.verdict == 'violated'
    assert result.result['actual'] == [1, 0, 0]
    assert result.result['witness']['digest'] == document.digest
    assert document.exit_code == 2


def test_missing_file_is_error_document(tmp_path):
    document = run_instance_file(str(tmp_path / 'absent.flt'))
    assert document.error['type'] == 'File Error'
    assert document.exit_code == 1


def test_parse_failure_is_error_document(tmp_path):
    path = write(tmp_path, 'bad.flt', "ring R = poly(x, y);\nideal I = [x^2, z];\n")
    document = run_instance_file(str(path))
    assert document.error['line'] == 2
    assert document.results == []


def test_corpus_run_sorts_and_summarizes(tmp_path):
    write(tmp_path, 'b.flt', SQUARE_TEXT)
    write(tmp_path, 'a.flt', "ring R = poly(x, y);\nideal M = [x, y];\nexpect coeffs M = [1, 0, 0];\n")
    report = corpus_run(str(tmp_path))
    assert [Path(d.instance).name for d in report.documents] == ['a.flt', 'b.flt']
    assert report.exit_code == 0
    matrix = report.matrix()
    assert list(matrix['instance']) == ['a.flt', 'b.flt']
    summary = report.to_dict()['summary']
    assert summary['counts']['verified'] == 3
    assert summary['violations'] == []


def test_empty_corpus_exits_zero(tmp_path):
    report = corpus_run(str(tmp_path))
    assert report.documents == []
    assert report.exit_code == 0


# ============================================================================
# EMITTERS
# ============================================================================

def test_json_writes_integers_as_strings():
    payload = json.loads(emit_json(run_instance(parse_instance(SQUARE_TEXT))))
    coeffs = payload['results'][0]['result']
    assert coeffs['e'] == ['4', '1', '0']
    assert payload['results'][2]['verdict'] == 'verified'
    assert 'timing' not in payload


def test_to_json_safe_keeps_booleans_and_none():
    assert to_json_safe({'a': True, 'b': None, 'c': (1, 2)}) == {'a': True, 'b': None, 'c': ['1', '2']}


def test_json_is_byte_identical_across_runs():
    path = str(CORPUS / 'maximal_ideal_square.flt')
    assert emit_json(run_instance_file(path)) == emit_json(run_instance_file(path))


GOLDEN_COMMANDS = {
    'hilbert': ['M', '--window', '3'],
    'coeffs': ['M'],
    'mixed': ['F'],
    'defect': ['M', '--window', '3'],
    'postulation': ['M'],
    'rr': ['M', '--n', '1'],
    'intclosure': ['M', '--n', '2'],
    'cohomology': ['M', '--window', '2'],
    'reduction': ['M', 'J'],
    'verify': ['northcott', 'M'],
    'run': [],
}


def normalized(payload: bytes, digest: str) -> bytes:
    """Replace the checkout location and the instance digest by fixed markers"""
    text = payload.decode('utf-8').replace(str(GOLDEN), '<golden>')
    return text.replace(digest, '<digest>').encode('utf-8')


@pytest.mark.parametrize("command", sorted(GOLDEN_COMMANDS))
def test_subcommand_matches_golden_report(tmp_path, command):
    instance = GOLDEN / 'plane.flt'
    digest = parse_instance(instance.read_text(encoding='utf-8')).digest
    out = tmp_path / 'out.json'
    assert main([command, str(instance)] + GOLDEN_COMMANDS[command] + ['--output', str(out)]) == 0
    expected = (GOLDEN / f"{command}.json").read_bytes()
    assert normalized(out.read_bytes(), digest) == expected


def test_corpus_matches_golden_report(tmp_path):
    digest = parse_instance((GOLDEN / 'plane.flt').read_text(encoding='utf-8')).digest
    out = tmp_path / 'out.json'
    assert main(['corpus', str(GOLDEN), '--output', str(out)]) == 0
    assert normalized(out.read_bytes(), digest) == (GOLDEN / 'corpus.json').read_bytes()


def test_golden_reports_emit_the_same_bytes():
    document = run_instance_file(str(GOLDEN / 'plane.flt'))
    payload = normalized(emit(document, 'json'), document.digest)
    assert payload == (GOLDEN / 'run.json').read_bytes()


def test_timing_section_only_on_request():
    document = run_instance(parse_instance(SQUARE_TEXT), include_timing=True)
    payload = json.loads(emit_json(document))
    assert set(payload['timing']) == {r.label for r in document.results}


def test_csv_blocks():
    text = emit_csv(run_instance(parse_instance(SQUARE_TEXT))).decode('utf-8')
    assert text.startswith('# task coeffs M2 :: coefficients\n')
    assert 'coefficient,alpha,value' in text


def test_text_tree():
    text = emit_text(run_instance(parse_instance(SQUARE_TEXT))).decode('utf-8')
    assert '[verified] expect coeffs M2 = [4, 1, 0]' in text
    assert 'e: [4, 1, 0]' in text


def test_xlsx_has_one_sheet_per_table():
    document = run_instance(parse_instance(SQUARE_TEXT))
    data = emit_xlsx(document)
    assert data[:2] == b'PK'
    sheets = pd.read_excel(io.BytesIO(data), sheet_name=None)
    assert len(sheets) == len(document.tables())


def test_unknown_format_is_input_error():
    with pytest.raises(InputError):
        emit(run_instance(parse_instance(SQUARE_TEXT)), 'yaml')


# ============================================================================
# COMMAND LINE
# ============================================================================

def test_parser_has_task_subcommands():
    args = build_parser().parse_args(['coeffs', 'a.flt', 'M', '--window', '5'])
    assert (args.command, args.targets, args.window) == ('coeffs', ['M'], 5)


def test_subcommand_runs_named_target(tmp_path):
    path = write(tmp_path, 'square.flt', SQUARE_TEXT)
    out = tmp_path / 'out.json'
    assert main(['coeffs', str(path), 'M2', '--output', str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload['results'][0]['result']['e'] == ['4', '1', '0']


def test_subcommand_without_targets_runs_file_tasks(tmp_path):
    path = write(tmp_path, 'square.flt', SQUARE_TEXT)
    out = tmp_path / 'out.json'
    assert main(['verify', str(path), '--output', str(out)]) == 0
    payload = json.loads(out.read_text())
    assert [r['command'] for r in payload['results']] == ['verify']


def test_unknown_checker_on_command_line_exits_one(tmp_path):
    path = write(tmp_path, 'square.flt', SQUARE_TEXT)
    assert main(['verify', str(path), 'bogus', 'M2', '--output', str(tmp_path / 'o.json')]) == 1


def test_parse_error_exits_one(tmp_path, capsys):
    path = write(tmp_path, 'bad.flt', "ring R = poly(x, y);\nideal I = [x^2, z];\n")
    assert main(['run', str(path), '--output', str(tmp_path / 'o.json')]) == 1
    assert '1 error' in capsys.readouterr().err


def test_selftest_corpus_exits_two(tmp_path, capsys):
    out = tmp_path / 'o.json'
    assert main(['corpus', str(CORPUS / 'selftest'), '--output', str(out)]) == 2
    assert 'violated: ' in capsys.readouterr().err


def test_empty_and_missing_directories(tmp_path):
    empty = tmp_path / 'empty'
    empty.mkdir()
    assert main(['corpus', str(empty), '--output', str(tmp_path / 'o.json')]) == 0
    assert main(['corpus', str(tmp_path / 'nowhere'), '--output', str(tmp_path / 'o.json')]) == 1


def test_text_format_on_command_line(tmp_path):
    path = write(tmp_path, 'square.flt', SQUARE_TEXT)
    out = tmp_path / 'out.txt'
    assert main(['run', str(path), '--format', 'text', '--output', str(out)]) == 0
    assert '[verified]' in out.read_text()


@pytest.mark.slow
def test_full_corpus_has_no_violations(tmp_path):
    out = tmp_path / 'corpus.json'
    assert main(['corpus', str(CORPUS), '--output', str(out)]) == 0
    summary = json.loads(out.read_text())['summary']
    assert int(summary['instances']) >= 20
    assert summary['counts']['violated'] == '0'
    assert summary['counts']['error'] == '0'


def test_checker_help_states_the_checked_statements():
    assert CHECKER_TEXTS['northcott'] == 'e_1 >= e_0 - colength(F(1)) >= 0'
    assert 'Ratliff-Rush closure' in CHECKER_TEXTS['itoh-e2']
    assert not CHECKER_TEXTS['itoh-e2'].startswith('normal')
    assert 'e_2 = 0' in get_checker_help()
