"""Boolean formulas over variables ``x1..xN``.

Surface syntax is 1-indexed; assignments are bitstrings whose character ``j``
is the value of variable ``j + 1``.  Truth tables are indexed by reading the
assignment string as a binary number, so ``x1`` is the most significant bit.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np

DEFAULT_MAX_VARS = 24


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EnumerationGuardError(FormulaError):
    pass


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Not:
    child: Node


@dataclass(frozen=True)
class And:
    left: Node
    right: Node


@dataclass(frozen=True)
class Or:
    left: Node
    right: Node


Node = Union[Var, Not, And, Or]


@dataclass(frozen=True)
class Formula:
    n_vars: int
    root: Node

    def __post_init__(self):
        if self.n_vars < 1:
            raise FormulaError("n_vars must be positive")
        for node in iter_nodes(self.root):
            if isinstance(node, Var) and not 1 <= node.index <= self.n_vars:
                raise FormulaError(
                    f"variable x{node.index} outside 1..{self.n_vars}")

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class SatSummary:
    n_vars: int
    count_sat: int
    beta_num: int
    beta_den_log2: int

    @property
    def beta(self) -> Fraction:
        return Fraction(self.beta_num, 2 ** self.beta_den_log2)

    @property
    def balanced(self) -> bool:
        return self.beta_num == 0


def iter_nodes(node: Node) -> Iterator[Node]:
    """Post-order walk (children before parent)."""
    stack: list[tuple[Node, bool]] = [(node, False)]
    while stack:
        cur, expanded = stack.pop()
        if expanded or isinstance(cur, Var):
            yield cur
            continue
        stack.append((cur, True))
        if isinstance(cur, Not):
            stack.append((cur.child, False))
        else:
            stack.append((cur.right, False))
            stack.append((cur.left, False))


def max_var_index(node: Node) -> int:
    return max((n.index for n in iter_nodes(node) if isinstance(n, Var)), default=0)


def constant_true(n_vars: int = 1) -> Formula:
    return Formula(n_vars, Or(Var(1), Not(Var(1))))


def constant_false(n_vars: int = 1) -> Formula:
    return Formula(n_vars, And(Var(1), Not(Var(1))))


# -- text grammar -----------------------------------------------------------

_TOKEN = re.compile(r"(?:(?P<var>x(?P<idx>\d+))|(?P<vars>vars\b)|(?P<num>\d+)|(?P<op>[!&|()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = pos
        if m.group("var"):
            tokens.append(("var", m.group("idx"), start))
        elif m.group("vars"):
            tokens.append(("vars", "vars", start))
        elif m.group("num"):
            tokens.append(("num", m.group("num"), start))
        else:
            tokens.append((m.group("op"), m.group("op"), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            found = tok[1] or "end of input"
            raise FormulaSyntaxError(f"expected {kind!r}, found {found!r}", tok[2])
        self.i += 1
        return tok

    def parse_or(self) -> Node:
        node = self.parse_and()
        while self.peek()[0] == "|":
            self.i += 1
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Node:
        node = self.parse_not()
        while self.peek()[0] == "&":
            self.i += 1
            node = And(node, self.parse_not())
        return node

    def parse_not(self) -> Node:
        if self.peek()[0] == "!":
            self.i += 1
            return Not(self.parse_not())
        return self.parse_atom()

    def parse_atom(self) -> Node:
        kind, value, pos = self.peek()
        if kind == "var":
            self.i += 1
            index = int(value)
            if index == 0:
                raise FormulaSyntaxError("variable index 0 (variables are 1-indexed)", pos)
            return Var(index)
        if kind == "(":
            self.i += 1
            node = self.parse_or()
            self.take(")")
            return node
        raise FormulaSyntaxError(f"unexpected {value or 'end of input'!r}", pos)


def parse_formula(text: str) -> Formula:
    """Parse ``[vars N] expr`` with ``!`` > ``&`` > ``|``, all left-associative."""
    p = _Parser(text)
    declared = None
    if p.peek()[0] == "vars":
        p.i += 1
        _, num, pos = p.take("num")
        declared = int(num)
        if declared < 1:
            raise FormulaSyntaxError("vars must be positive", pos)
    root = p.parse_or()
    p.take("eof")
    used = max_var_index(root)
    if declared is not None and declared < used:
        raise FormulaError(f"declared vars {declared} smaller than max index x{used}")
    return Formula(declared if declared is not None else used, root)


_PREC = {Or: 0, And: 1, Not: 2, Var: 3}


def _node_text(node: Node) -> str:
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Not):
        inner = _node_text(node.child)
        if _PREC[type(node.child)] < _PREC[Not]:
            inner = f"({inner})"
        return "!" + inner
    op = " | " if isinstance(node, Or) else " & "
    prec = _PREC[type(node)]
    left = _node_text(node.left)
    if _PREC[type(node.left)] < prec:
        left = f"({left})"
    right = _node_text(node.right)
    # left-associative: an equal-precedence right operand needs parentheses
    if _PREC[type(node.right)] <= prec:
        right = f"({right})"
    return left + op + right


def to_text(phi: Formula) -> str:
    """Canonical printer; ``parse_formula(to_text(phi)) == phi``."""
    body = _node_text(phi.root)
    if phi.n_vars != max_var_index(phi.root):
        return f"vars {phi.n_vars} {body}"
    return body


def dump_ast(node: Node) -> str:
    if isinstance(node, Var):
        return f"Var {node.index}"
    if isinstance(node, Not):
        return f"Not({dump_ast(node.child)})"
    name = "And" if isinstance(node, And) else "Or"
    return f"{name}({dump_ast(node.left)}, {dump_ast(node.right)})"


def _fold(cls, items: Sequence[Node]) -> Node:
    node = items[0]
    for item in items[1:]:
        node = cls(node, item)
    return node


def parse_dimacs(text: str) -> Formula:
    n = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if n is not None or len(parts) != 4 or parts[1] != "cnf":
                raise FormulaError(f"line {lineno}: malformed header {line!r}")
            try:
                n, _ = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormulaError(f"line {lineno}: malformed header {line!r}") from None
            if n < 1:
                raise FormulaError(f"line {lineno}: header needs at least one variable")
            continue
        if n is None:
            raise FormulaError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormulaError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            elif abs(lit) > n:
                raise FormulaError(f"line {lineno}: literal {lit} exceeds {n} variables")
            else:
                current.append(lit)
    if n is None:
        raise FormulaError("missing 'p cnf' header")
    if current:
        raise FormulaError("last clause is missing its terminating 0")
    if not clauses:
        return constant_true(n)
    nodes = []
    for clause in clauses:
        if not clause:
            return constant_false(n)
        lits = [Var(l) if l > 0 else Not(Var(-l)) for l in clause]
        nodes.append(_fold(Or, lits))
    return Formula(n, _fold(And, nodes))


# -- semantics --------------------------------------------------------------

def _as_bits(assignment: str | Sequence[int]) -> list[int]:
    if isinstance(assignment, str):
        if set(assignment) - {"0", "1"}:
            raise FormulaError(f"assignment {assignment!r} is not a bitstring")
        return [int(ch) for ch in assignment]
    return [int(b) & 1 for b in assignment]


def evaluate(phi: Formula, assignment: str | Sequence[int]) -> int:
    bits = _as_bits(assignment)
    if len(bits) != phi.n_vars:
        raise FormulaError(f"assignment has {len(bits)} bits, formula has {phi.n_vars} vars")
    return _eval(phi.root, bits)


def _eval(node: Node, bits: list[int]) -> int:
    if isinstance(node, Var):
        return bits[node.index - 1]
    if isinstance(node, Not):
        return 1 - _eval(node.child, bits)
    if isinstance(node, And):
        return _eval(node.left, bits) & _eval(node.right, bits)
    return _eval(node.left, bits) | _eval(node.right, bits)


def _check_guard(phi: Formula, max_vars: int):
    if phi.n_vars > max_vars:
        raise EnumerationGuardError(
            f"{phi.n_vars} variables exceeds enumeration guard {max_vars}")


def truth_table_array(phi: Formula, max_vars: int = DEFAULT_MAX_VARS) -> np.ndarray:
    """Vectorized truth table; entry ``i`` is phi on the binary expansion of i."""
    _check_guard(phi, max_vars)
    n = phi.n_vars
    idx = np.arange(2 ** n, dtype=np.int64)
    cache: dict[int, np.ndarray] = {}
    for node in iter_nodes(phi.root):
        if isinstance(node, Var):
            val = ((idx >> (n - node.index)) & 1).astype(bool)
        elif isinstance(node, Not):
            val = ~cache[id(node.child)]
        elif isinstance(node, And):
            val = cache[id(node.left)] & cache[id(node.right)]
        else:
            val = cache[id(node.left)] | cache[id(node.right)]
        cache[id(node)] = val
    return cache[id(phi.root)]


def truth_table(phi: Formula, max_vars: int = DEFAULT_MAX_VARS) -> str:
    return "".join("1" if b else "0" for b in truth_table_array(phi, max_vars))


def count_sat(phi: Formula, max_vars: int = DEFAULT_MAX_VARS) -> SatSummary:
    count = int(np.count_nonzero(truth_table_array(phi, max_vars)))
    num = 2 ** phi.n_vars - 2 * count
    den_log2 = phi.n_vars
    if num == 0:
        den_log2 = 0
    else:
        while den_log2 > 0 and num % 2 == 0:
            num //= 2
            den_log2 -= 1
    return SatSummary(phi.n_vars, count, num, den_log2)


def is_balanced(phi: Formula, max_vars: int = DEFAULT_MAX_VARS) -> bool:
    return count_sat(phi, max_vars).count_sat == 2 ** (phi.n_vars - 1)


def from_truth_table(bits: str | Sequence[int]) -> Formula:
    """Minterm DNF; the all-zero table becomes ``x1 & !x1``."""
    values = _as_bits(bits)
    size = len(values)
    if size < 2 or size & (size - 1):
        raise FormulaError(f"truth table length {size} is not a power of two >= 2")
    n = size.bit_length() - 1
    minterms = []
    for x, bit in enumerate(values):
        if not bit:
            continue
        lits = [Var(j + 1) if (x >> (n - 1 - j)) & 1 else Not(Var(j + 1)) for j in range(n)]
        minterms.append(_fold(And, lits))
    if not minterms:
        return constant_false(n)
    return Formula(n, _fold(Or, minterms))


def all_formulas(n: int) -> Iterator[Formula]:
    """Every Boolean function of n variables, ordered by truth-table index."""
    size = 2 ** n
    for t in range(2 ** size):
        yield from_truth_table(format(t, f"0{size}b"))
