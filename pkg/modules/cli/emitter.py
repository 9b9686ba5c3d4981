"""
Report Emitter - JSON, CSV, Text Tree and Excel Output

JSON writes every integer as a decimal string so arbitrarily large values
survive any reader; keys are sorted so two runs produce identical bytes.
"""

import io
import json
from fractions import Fraction
from typing import Any, List, Tuple

import pandas as pd
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from treelib import Tree

from shared.errors import InputError

OUTPUT_FORMATS = ('json', 'csv', 'text', 'xlsx')


def to_json_safe(value: Any) -> Any:
    """Integers and fractions become strings; tuples become lists"""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, Fraction)):
        return str(value)
    if isinstance(value, dict):
        return {str(k): to_json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_safe(v) for v in value]
    if hasattr(value, 'item'):
        return to_json_safe(value.item())
    return value


def emit_json(document) -> bytes:
    payload = to_json_safe(document.to_dict())
    return (json.dumps(payload, sort_keys=True, indent=2) + '\n').encode('utf-8')


def emit_csv(document) -> bytes:
    """One block per table, each headed by a '# name' line"""
    blocks = []
    for name, frame in document.tables():
        blocks.append(f"# {name}\n{frame.to_csv(index=False, lineterminator=chr(10))}")
    return '\n'.join(blocks).encode('utf-8')


# ============================================================================
# TEXT TREE
# ============================================================================

class ReportTree:
    """Builds the readable tree for the text format"""

    def __init__(self):
        self.tree = Tree()
        self.node_count = 0

    def _add(self, tag: str, parent=None) -> str:
        node_id = f"node_{self.node_count}"
        self.node_count += 1
        self.tree.create_node(tag=tag, identifier=node_id, parent=parent)
        return node_id

    def _add_value(self, key: str, value: Any, parent: str):
        if isinstance(value, dict):
            node = self._add(str(key), parent)
            for k, v in value.items():
                self._add_value(k, v, node)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            node = self._add(str(key), parent)
            for i, item in enumerate(value):
                self._add_value(f"[{i}]", item, node)
        else:
            self._add(f"{key}: {_flat(value)}", parent)

    def add_document(self, document: dict, parent=None):
        root = self._add(f"{document['instance']} ({document['digest'][:12]})", parent)
        if document.get('error'):
            self._add_value('error', document['error'], root)
        for result in document['results']:
            status = result['verdict'] or result['status']
            node = self._add(f"[{status}] {result['task']}", root)
            if result['error']:
                self._add_value('error', result['error'], node)
            for key, value in result['result'].items():
                if key not in ('H', 'rows', 'trail'):
                    self._add_value(key, value, node)
            for step in result['result'].get('trail', []):
                self._add(f"- {step}", node)
        if 'timing' in document:
            self._add_value('timing', document['timing'], root)

    def render(self) -> str:
        if self.node_count == 0:
            return "Empty report"
        return self.tree.show(stdout=False)


def _flat(value: Any) -> str:
    if value is None:
        return '-'
    if isinstance(value, (list, tuple)):
        return '[' + ', '.join(_flat(v) for v in value) + ']'
    return str(value)


def emit_text(document) -> bytes:
    payload = document.to_dict()
    builder = ReportTree()
    if 'instances' in payload:
        root = builder._add(f"corpus {payload['corpus']}")
        for item in payload['instances']:
            builder.add_document(item, root)
        builder._add_value('summary', payload['summary'], root)
    else:
        builder.add_document(payload)
    return builder.render().encode('utf-8')


# ============================================================================
# EXCEL
# ============================================================================

def _sheet_name(name: str, used: set) -> str:
    base = ''.join(c if c not in '[]:*?/\\' else '_' for c in name)[:28] or 'Sheet'
    candidate, i = base, 1
    while candidate in used:
        candidate = f"{base[:25]}_{i}"
        i += 1
    used.add(candidate)
    return candidate


def emit_xlsx(document) -> bytes:
    """One sheet per table with plain formatting"""
    tables: List[Tuple[str, pd.DataFrame]] = document.tables()
    if not tables:
        tables = [('report', pd.DataFrame({'message': ['no tables in this report']}))]
    output = io.BytesIO()
    used = set()
    plain_font = Font(name='Calibri', size=11, bold=False)
    plain_alignment = Alignment(horizontal='left', vertical='top')
    no_border = Border(left=Side(style=None), right=Side(style=None),
                       top=Side(style=None), bottom=Side(style=None))
    no_fill = PatternFill(fill_type=None)
    with pd.ExcelWriter(output, engine='openpyxl') as writer:
        for name, frame in tables:
            sheet = _sheet_name(name, used)
            frame.to_excel(writer, index=False, sheet_name=sheet)
            worksheet = writer.sheets[sheet]
            for row in worksheet.iter_rows(min_row=1, max_row=worksheet.max_row):
                for cell in row:
                    cell.font = plain_font
                    cell.alignment = plain_alignment
                    cell.border = no_border
                    cell.fill = no_fill
    return output.getvalue()


EMITTERS = {
    'json': emit_json,
    'csv': emit_csv,
    'text': emit_text,
    'xlsx': emit_xlsx,
}


def emit(document, fmt: str = 'json') -> bytes:
    """Serialize a ReportDocument or CorpusReport"""
    if fmt not in EMITTERS:
        raise InputError(f"unknown output format '{fmt}', expected one of {', '.join(OUTPUT_FORMATS)}")
    return EMITTERS[fmt](document)
