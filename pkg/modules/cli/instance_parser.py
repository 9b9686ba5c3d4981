"""
Instance Parser - Declarative Instance Files
Reads rings, ideals, filtrations, reduction candidates, tasks and expected
values from the `.flt` format:

    # Marley's ideal
    ring R = poly(x, y, z);
    ideal I = [x^3, y^3, z^3, x^2*y, x*y^2, y*z^2, x*y*z];
    filtration F = adic(I);
    candidate J = [x^3, y^3, z^3];
    task coeffs F;
    task verify huneke-ooishi F candidates=J;
    expect coeffs F = [27, 18, 4, -1];
"""

import hashlib
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from rapidfuzz import fuzz, process

from config.modules_config import AVAILABLE_TASKS, THEOREM_CHECKERS
from modules.filtrations.engine import (
    FiltrationKind,
    FiltrationSpec,
    adic_filtration,
    normal_filtration,
    product_filtration,
    rr_closed_filtration,
)
from modules.monomial_core.engine import AmbientRing, MonomialIdeal, format_monomial, minimal_generators
from shared.errors import InputError, InstanceSyntaxError

KEYWORDS = ('ring', 'ideal', 'filtration', 'candidate', 'task', 'expect')
FILTRATION_KINDS = ('adic', 'normal', 'product', 'rr')
EXPECT_KINDS = ('coeffs', 'mixed', 'colength', 'postulation', 'rr', 'intclosure', 'reduction')

TOKEN_PATTERN = re.compile(r"""
    (?P<COMMENT>\#[^\n]*)
  | (?P<NEWLINE>\n)
  | (?P<SPACE>[ \t\r]+)
  | (?P<RANGE>\.\.)
  | (?P<NUMBER>-?\d+)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
  | (?P<PUNCT>[=;,()\[\]^*/])
  | (?P<MISMATCH>.)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    """Split instance text into tokens with 1-based line and column"""
    tokens = []
    line, line_start = 1, 0
    for match in TOKEN_PATTERN.finditer(text):
        kind = match.lastgroup
        value = match.group()
        column = match.start() - line_start + 1
        if kind == 'NEWLINE':
            line += 1
            line_start = match.end()
            continue
        if kind in ('SPACE', 'COMMENT'):
            continue
        if kind == 'MISMATCH':
            raise InstanceSyntaxError(f"unexpected character '{value}'", line, column, value)
        tokens.append(Token(kind, value, line, column))
    return tokens


def suggest(token: str, choices) -> Optional[str]:
    """Closest declared name, or None when nothing is close"""
    choices = list(choices)
    if not choices:
        return None
    best = process.extractOne(token, choices, scorer=fuzz.ratio, score_cutoff=60)
    return best[0] if best else None


# ============================================================================
# DECLARATIONS
# ============================================================================

@dataclass
class RingDecl:
    name: str
    variables: Tuple[str, ...]
    variable_range: Optional[Tuple[str, str]]
    quotient: Tuple[Tuple[int, ...], ...]
    cm: bool

    def to_text(self) -> str:
        if self.variable_range:
            names = f"{self.variable_range[0]}..{self.variable_range[1]}"
        else:
            names = ', '.join(self.variables)
        text = f"ring {self.name} = poly({names})"
        if self.quotient:
            text += f" / [{', '.join(format_monomial(a, self.variables) for a in self.quotient)}]"
        if self.cm:
            text += " cm"
        return text + ";"


@dataclass
class IdealDecl:
    keyword: str  # 'ideal' or 'candidate'
    name: str
    monomials: Tuple[Tuple[int, ...], ...]
    variables: Tuple[str, ...]

    def to_text(self) -> str:
        body = ', '.join(format_monomial(a, self.variables) for a in self.monomials)
        return f"{self.keyword} {self.name} = [{body}];"


@dataclass
class FilterExpr:
    """adic(I, ...), normal(I, ...), product(axis, ...) or rr(inner)"""
    kind: str
    ideals: Tuple[str, ...] = ()
    parts: Tuple['FilterExpr', ...] = ()
    inner: Optional[Union['FilterExpr', str]] = None

    def to_text(self) -> str:
        if self.kind == 'product':
            return f"product({', '.join(p.to_text() for p in self.parts)})"
        if self.kind == 'rr':
            inner = self.inner if isinstance(self.inner, str) else self.inner.to_text()
            return f"rr({inner})"
        return f"{self.kind}({', '.join(self.ideals)})"


@dataclass
class FiltrationDecl:
    name: str
    expr: FilterExpr

    def to_text(self) -> str:
        return f"filtration {self.name} = {self.expr.to_text()};"


@dataclass
class TaskDecl:
    """
    One `task` or `expect` statement

    For expectations args[0] names the quantity, relation is "=" or
    "contains" and expected holds the recorded value (an int, a list of
    ints or a list of exponent vectors).
    """
    command: str
    args: Tuple[str, ...]
    options: Dict[str, str]
    line: int
    column: int
    relation: Optional[str] = None
    expected: object = None
    variables: Tuple[str, ...] = ()

    @property
    def is_expectation(self) -> bool:
        return self.command == 'expect'

    def _options_text(self) -> str:
        return ''.join(f" {k}={v}" for k, v in self.options.items())

    def _expected_text(self) -> str:
        if isinstance(self.expected, int):
            return str(self.expected)
        items = self.expected or []
        if items and isinstance(items[0], tuple):
            return f"[{', '.join(format_monomial(a, self.variables) for a in items)}]"
        return f"[{', '.join(str(v) for v in items)}]"

    def to_text(self) -> str:
        if self.is_expectation:
            return f"expect {' '.join(self.args)}{self._options_text()} {self.relation} {self._expected_text()};"
        return f"task {' '.join((self.command,) + self.args)}{self._options_text()};"

    def label(self) -> str:
        return self.to_text()[:-1]


# ============================================================================
# INSTANCE FILE
# ============================================================================

@dataclass
class InstanceFile:
    """Parsed instance: one ring, named objects, tasks in file order"""
    ring_decl: RingDecl
    ring: AmbientRing
    ideals: Dict[str, MonomialIdeal] = field(default_factory=dict)
    candidates: Dict[str, MonomialIdeal] = field(default_factory=dict)
    filtrations: Dict[str, FiltrationDecl] = field(default_factory=dict)
    tasks: List[TaskDecl] = field(default_factory=list)
    statements: List[object] = field(default_factory=list)
    path: str = ''
    _built: Dict[str, FiltrationSpec] = field(default_factory=dict, repr=False)

    def to_text(self) -> str:
        """Canonical form: one statement per line, comments dropped"""
        return '\n'.join(s.to_text() for s in self.statements) + '\n'

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode('utf-8')).hexdigest()

    def ideal(self, name: str) -> MonomialIdeal:
        if name in self.ideals:
            return self.ideals[name]
        if name in self.candidates:
            return self.candidates[name]
        known = list(self.ideals) + list(self.candidates) + list(self.filtrations)
        hint = suggest(name, known)
        raise InputError(f"unknown name '{name}'" + (f" (did you mean '{hint}'?)" if hint else ''), token=name)

    def is_filtration(self, name: str) -> bool:
        return name in self.filtrations

    def filtration(self, name: str) -> FiltrationSpec:
        """
        Build (once) the filtration named `name`; an ideal name means its
        adic filtration. m-primary checks happen here, not at parse time.
        """
        if name not in self._built:
            if name in self.filtrations:
                spec = self._build(self.filtrations[name].expr)
                spec.name = name
            else:
                spec = adic_filtration(self.ideal(name), name=name)
            self._built[name] = spec
        return self._built[name]

    def _build(self, expr: FilterExpr) -> FiltrationSpec:
        if expr.kind == 'adic':
            return adic_filtration(*(self.ideal(n) for n in expr.ideals))
        if expr.kind == 'normal':
            return normal_filtration(*(self.ideal(n) for n in expr.ideals))
        if expr.kind == 'product':
            parts = [(FiltrationKind(p.kind), self.ideal(p.ideals[0])) for p in expr.parts]
            return product_filtration(parts)
        inner = self.filtration(expr.inner) if isinstance(expr.inner, str) else self._build(expr.inner)
        return rr_closed_filtration(inner)


# ============================================================================
# PARSER
# ============================================================================

class InstanceParser:
    """Recursive-descent parser over the token list of one instance file"""

    def __init__(self, text: str, path: str = ''):
        self.tokens = tokenize(text)
        self.pos = 0
        self.path = path
        self.instance: Optional[InstanceFile] = None
        self.names: Dict[str, str] = {}  # name -> 'ideal' | 'candidate' | 'filtration'

    # ---- token helpers -----------------------------------------------------

    def _peek(self, offset: int = 0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def _error(self, message: str, token: Optional[Token] = None, suggestion: Optional[str] = None):
        token = token or self._peek() or (self.tokens[-1] if self.tokens else Token('EOF', '', 1, 1))
        raise InstanceSyntaxError(message, token.line, token.column, token.text, suggestion)

    def _next(self) -> Token:
        token = self._peek()
        if token is None:
            self._error("unexpected end of file, missing ';'")
        self.pos += 1
        return token

    def _expect(self, text: str) -> Token:
        token = self._next()
        if token.text != text:
            self._error(f"expected '{text}', found '{token.text}'", token)
        return token

    def _accept(self, text: str) -> bool:
        token = self._peek()
        if token is not None and token.text == text:
            self.pos += 1
            return True
        return False

    def _ident(self, what: str) -> Token:
        token = self._next()
        if token.kind != 'IDENT':
            self._error(f"expected {what}, found '{token.text}'", token)
        return token

    def _number(self) -> int:
        token = self._next()
        if token.kind != 'NUMBER':
            self._error(f"expected an integer, found '{token.text}'", token)
        return int(token.text)

    def _reference(self, kinds=('ideal', 'candidate', 'filtration')) -> str:
        token = self._ident("a declared name")
        if self.names.get(token.text) not in kinds:
            declared = [n for n, k in self.names.items() if k in kinds]
            if token.text in self.names:
                self._error(f"'{token.text}' is a {self.names[token.text]}, expected {' or '.join(kinds)}", token)
            self._error(f"undeclared identifier '{token.text}'", token, suggest(token.text, declared))
        return token.text

    def _declare(self, token: Token, kind: str):
        if token.text in self.names:
            self._error(f"'{token.text}' is already declared", token)
        if token.text in KEYWORDS:
            self._error(f"'{token.text}' is a keyword", token)
        self.names[token.text] = kind

    # ---- grammar -----------------------------------------------------------

    def parse(self) -> InstanceFile:
        while self._peek() is not None:
            keyword = self._ident("a statement keyword")
            if keyword.text == 'ring':
                self._ring()
                continue
            if keyword.text not in KEYWORDS:
                self._error(f"unknown statement '{keyword.text}'", keyword, suggest(keyword.text, KEYWORDS))
            if self.instance is None:
                self._error("declare the ring first", keyword)
            handler = {
                'ideal': self._ideal,
                'candidate': self._ideal,
                'filtration': self._filtration,
                'task': self._task,
                'expect': self._expectation,
            }[keyword.text]
            statement = handler(keyword)
            self.instance.statements.append(statement)
            if isinstance(statement, TaskDecl):
                self.instance.tasks.append(statement)
        if self.instance is None:
            self._error("instance file declares no ring")
        return self.instance

    def _ring(self):
        start = self.tokens[self.pos - 1]
        if self.instance is not None:
            self._error("exactly one ring per instance file", start)
        name = self._ident("a ring name").text
        self._expect('=')
        poly = self._ident("'poly'")
        if poly.text != 'poly':
            self._error(f"expected 'poly', found '{poly.text}'", poly, suggest(poly.text, ['poly']))
        self._expect('(')
        variables, var_range = self._variables()
        self._expect(')')
        quotient = ()
        if self._accept('/'):
            quotient = self._monomial_list(variables)
        cm = self._accept('cm')
        self._expect(';')
        decl = RingDecl(name, variables, var_range, quotient, cm)
        ring = AmbientRing(variables, quotient, asserted_cohen_macaulay=cm)
        self.instance = InstanceFile(decl, ring, path=self.path)
        self.instance.statements.append(decl)

    def _variables(self):
        first = self._ident("a variable name")
        if self._accept('..'):
            last = self._ident("a variable name")
            head = re.fullmatch(r'([A-Za-z_]+)(\d+)', first.text)
            tail = re.fullmatch(r'([A-Za-z_]+)(\d+)', last.text)
            if not head or not tail or head.group(1) != tail.group(1) or int(tail.group(2)) < int(head.group(2)):
                self._error(f"bad variable range {first.text}..{last.text}", last)
            names = tuple(f"{head.group(1)}{i}" for i in range(int(head.group(2)), int(tail.group(2)) + 1))
            return names, (first.text, last.text)
        names = [first.text]
        while self._accept(','):
            token = self._ident("a variable name")
            if token.text in names:
                self._error(f"variable '{token.text}' repeated", token)
            names.append(token.text)
        return tuple(names), None

    def _monomial_list(self, variables) -> Tuple[Tuple[int, ...], ...]:
        self._expect('[')
        monomials = []
        if self._accept(']'):
            return ()
        monomials.append(self._monomial(variables))
        while self._accept(','):
            monomials.append(self._monomial(variables))
        self._expect(']')
        return tuple(monomials)

    def _monomial(self, variables) -> Tuple[int, ...]:
        exponents = [0] * len(variables)
        token = self._peek()
        if token is not None and token.kind == 'NUMBER':
            self._next()
            if token.text != '1':
                self._error(f"coefficients are not allowed, found '{token.text}'", token)
            return tuple(exponents)
        while True:
            var = self._ident("a variable")
            if var.text not in variables:
                self._error(f"undeclared variable '{var.text}'", var, suggest(var.text, variables))
            power = 1
            if self._accept('^'):
                exp_token = self._peek()
                power = self._number()
                if power <= 0:
                    self._error(f"exponents must be positive, found {power}", exp_token)
            exponents[variables.index(var.text)] += power
            if not self._accept('*'):
                return tuple(exponents)

    def _ideal(self, keyword: Token) -> IdealDecl:
        name = self._ident(f"{keyword.text} name")
        self._declare(name, keyword.text)
        self._expect('=')
        ring = self.instance.ring
        monomials = self._monomial_list(ring.variable_names)
        self._expect(';')
        ideal = minimal_generators(monomials, ring)
        target = self.instance.ideals if keyword.text == 'ideal' else self.instance.candidates
        target[name.text] = ideal
        return IdealDecl(keyword.text, name.text, monomials, ring.variable_names)

    def _filtration(self, keyword: Token) -> FiltrationDecl:
        name = self._ident("a filtration name")
        self._expect('=')
        expr = self._filter_expr()
        self._expect(';')
        self._declare(name, 'filtration')
        decl = FiltrationDecl(name.text, expr)
        self.instance.filtrations[name.text] = decl
        return decl

    def _filter_expr(self, axis: bool = False) -> FilterExpr:
        kind = self._ident("a filtration kind")
        allowed = ('adic', 'normal') if axis else FILTRATION_KINDS
        if kind.text not in allowed:
            self._error(f"unknown filtration kind '{kind.text}'", kind, suggest(kind.text, allowed))
        self._expect('(')
        if kind.text == 'product':
            parts = [self._filter_expr(axis=True)]
            while self._accept(','):
                parts.append(self._filter_expr(axis=True))
            self._expect(')')
            return FilterExpr('product', parts=tuple(parts))
        if kind.text == 'rr':
            token = self._peek()
            if token is not None and token.text in FILTRATION_KINDS and self._peek(1) and self._peek(1).text == '(':
                inner = self._filter_expr()
            else:
                inner = self._reference()
            self._expect(')')
            return FilterExpr('rr', inner=inner)
        ideals = [self._reference(('ideal', 'candidate'))]
        while self._accept(','):
            ideals.append(self._reference(('ideal', 'candidate')))
        self._expect(')')
        if axis and len(ideals) != 1:
            self._error("each product axis takes exactly one ideal", kind)
        return FilterExpr(kind.text, ideals=tuple(ideals))

    def _options(self) -> Dict[str, str]:
        """key=value pairs; a value is atoms joined by ',' or '..'"""
        options = {}
        while True:
            token, after = self._peek(), self._peek(1)
            if token is None or token.kind != 'IDENT' or after is None or after.text != '=':
                return options
            self.pos += 2
            parts = [self._atom(token)]
            while self._peek() is not None and self._peek().text in (',', '..'):
                parts.append(self._next().text)
                parts.append(self._atom(token))
            options[token.text] = ''.join(parts)

    def _atom(self, option: Token) -> str:
        token = self._next()
        if token.kind not in ('NUMBER', 'IDENT'):
            self._error(f"option '{option.text}' needs a value, found '{token.text}'", token)
        return token.text

    def _task(self, keyword: Token) -> TaskDecl:
        command = self._ident("a task name")
        tasks = [k for k in AVAILABLE_TASKS if k != 'expect']
        if command.text not in tasks:
            self._error(f"unknown task '{command.text}'", command, suggest(command.text, tasks))
        args = []
        if command.text == 'verify':
            checker = self._ident("a checker name")
            if checker.text not in THEOREM_CHECKERS:
                self._error(f"unknown checker '{checker.text}'", checker, suggest(checker.text, THEOREM_CHECKERS))
            args.append(checker.text)
        while self._peek() is not None and self._peek().text != ';':
            after = self._peek(1)
            if after is not None and after.text == '=':
                break
            args.append(self._reference())
        options = self._options()
        if 'candidates' in options:
            for name in options['candidates'].split(','):
                if self.names.get(name) not in ('ideal', 'candidate'):
                    self._error(f"undeclared identifier '{name}'", command,
                                suggest(name, [n for n, k in self.names.items() if k != 'filtration']))
        self._expect(';')
        if len(args) == (1 if command.text == 'verify' else 0):
            self._error(f"task '{command.text}' needs a target", command)
        return TaskDecl(command.text, tuple(args), options, command.line, command.column)

    def _expectation(self, keyword: Token) -> TaskDecl:
        kind = self._ident("an expectation kind")
        if kind.text not in EXPECT_KINDS:
            self._error(f"unknown expectation '{kind.text}'", kind, suggest(kind.text, EXPECT_KINDS))
        target = self._reference()
        args = [kind.text, target]
        if kind.text == 'reduction':
            args.append(self._reference(('ideal', 'candidate')))
        options = self._options()
        variables = self.instance.ring.variable_names
        if self._accept('contains'):
            relation = 'contains'
            expected = list(self._monomial_list(variables))
        else:
            self._expect('=')
            relation = '='
            if self._peek() is not None and self._peek().text == '[':
                if kind.text in ('rr', 'intclosure'):
                    expected = list(self._monomial_list(variables))
                else:
                    self._expect('[')
                    expected = [self._number()]
                    while self._accept(','):
                        expected.append(self._number())
                    self._expect(']')
            else:
                expected = self._number()
        self._expect(';')
        return TaskDecl('expect', tuple(args), options, kind.line, kind.column,
                        relation=relation, expected=expected, variables=variables)


def parse_instance(text: str, path: str = '') -> InstanceFile:
    """
    Parse one instance file

    Examples:
        "ring R = poly(x, y); ideal I = [x^2, x*y, y^2];" -> ideal m^2
        "ideal I = [x^2, z];" with z undeclared -> InstanceSyntaxError at z

    Raises:
        InstanceSyntaxError: with line, column, token and a suggestion
    """
    return InstanceParser(text, path).parse()
