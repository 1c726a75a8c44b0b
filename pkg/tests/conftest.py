import random

import numpy as np
import pytest

from qhf.circuit import (
    CX, MCX, TOF, Circuit, H, Gate, GateKind, RegisterLayout, Role, S, Sdg, T, Tdg, X,
)
from qhf.formula import And, Formula, Not, Or, Var

_W = np.exp(1j * np.pi / 4)
_DIAG = {GateKind.S: 1j, GateKind.SDG: -1j, GateKind.T: _W, GateKind.TDG: np.conj(_W)}


def dense_run(c: Circuit, x: int) -> np.ndarray:
    """Plain complex state-vector simulation; index bit q is wire q."""
    dim = 2 ** c.m
    psi = np.zeros(dim, dtype=complex)
    psi[x] = 1.0
    idx = np.arange(dim)
    for g in c.gates:
        t = 1 << g.target
        if g.kind is GateKind.H:
            lo = idx[(idx & t) == 0]
            a, b = psi[lo].copy(), psi[lo | t].copy()
            psi[lo] = (a + b) / np.sqrt(2)
            psi[lo | t] = (a - b) / np.sqrt(2)
        elif g.kind in _DIAG:
            psi[(idx & t) != 0] *= _DIAG[g.kind]
        else:
            mask = sum(1 << w for w in g.controls)
            src = np.where((idx & mask) == mask, idx ^ t, idx)
            new = np.empty_like(psi)
            new[src] = psi
            psi = new
    return psi


def random_circuit(rng: random.Random, m: int, n_gates: int, kinds) -> Circuit:
    gates = []
    kinds = [k for k in kinds if not (k == "mcx" and m < 4) and not (k == "ccx" and m < 3)]
    for _ in range(n_gates):
        kind = rng.choice(kinds)
        if kind in ("h", "x", "s", "sdg", "t", "tdg"):
            q = rng.randrange(m)
            gates.append({"h": H, "x": X, "s": S, "sdg": Sdg, "t": T, "tdg": Tdg}[kind](q))
        elif kind == "cx":
            a, b = rng.sample(range(m), 2)
            gates.append(CX(a, b))
        elif kind == "ccx":
            a, b, t = rng.sample(range(m), 3)
            gates.append(TOF(a, b, t))
        elif kind == "mcx":
            k = rng.randint(3, m - 1)
            ws = rng.sample(range(m), k + 1)
            gates.append(MCX(ws[:-1], ws[-1]))
    return Circuit.on_wires(m, gates)


def random_roles(rng: random.Random, m: int) -> RegisterLayout:
    roles = [rng.choice([Role.FREE, Role.FREE, Role.ANC0, Role.ANC1]) for _ in range(m)]
    return RegisterLayout(tuple(roles))


def random_formula(rng: random.Random, n: int, max_internal: int) -> Formula:
    """Random AST over x1..xn with at most ``max_internal`` non-variable nodes."""
    budget = [max_internal]

    def grow(depth):
        if budget[0] <= 0 or depth > 4 or rng.random() < 0.3:
            return Var(rng.randint(1, n))
        budget[0] -= 1
        op = rng.choice(["not", "and", "or"])
        if op == "not":
            return Not(grow(depth + 1))
        cls = And if op == "and" else Or
        return cls(grow(depth + 1), grow(depth + 1))

    return Formula(n, grow(0))


@pytest.fixture
def rng():
    return random.Random(1234)
