"""Compile formulas into phase oracles, Deutsch-Jozsa circuits, the
controlled gadget Q(G, phi) and the full identity-test reduction circuit.

Also hosts the analytic state formulas used as independent oracles for the
synthesized circuits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .circuit import (
    CX, H, TOF, X, Circuit, CircuitError, Gate, GateKind, RegisterLayout, Role,
    controlled_x,
)
from .exactsim import SparseState, bits_to_key
from .formula import (
    DEFAULT_MAX_VARS, And, EnumerationGuardError, Formula, Node, Not, Or, Var,
    iter_nodes, truth_table,
)
from .ring import dyadic

GADGET_TARGETS = ("CX", "TOF")


@dataclass(frozen=True)
class OracleFragment:
    circuit: Circuit
    data_span: tuple[int, int]
    kickback_wire: int
    scratch_span: tuple[int, int] | None

    @property
    def data_wires(self) -> list[int]:
        return list(range(self.data_span[0], self.data_span[1] + 1))

    @property
    def scratch_wires(self) -> list[int]:
        if self.scratch_span is None:
            return []
        return list(range(self.scratch_span[0], self.scratch_span[1] + 1))


@dataclass(frozen=True)
class ReductionLayout:
    n: int
    r1: tuple[int, ...]
    w_h: int
    w_t1: int
    r2: tuple[int, ...]
    w_a: int
    w_b: int
    w_t2: int
    kick: int
    scratch: tuple[int, ...]
    mcx_scratch: tuple[int, ...]

    @property
    def free_wires(self) -> tuple[int, int]:
        return self.w_a, self.w_b

    @property
    def abt(self) -> tuple[int, int, int]:
        return self.w_a, self.w_b, self.w_t2

    @property
    def clean_wires(self) -> dict[int, int]:
        """Helper wires and the value each must hold after every block."""
        out = {w: 0 for w in self.scratch + self.mcx_scratch}
        out[self.kick] = 1
        return out


def oracle_scratch_size(phi: Formula) -> int:
    return sum(1 for node in iter_nodes(phi.root) if not isinstance(node, Var))


def _compute_gates(root: Node, data: Sequence[int], scratch: Sequence[int]) -> tuple[list[Gate], int]:
    """XOR every internal node's value into its own clean scratch wire.

    Returns the gate list and the wire holding the root value.
    """
    wire: dict[int, int] = {}
    gates: list[Gate] = []
    free = iter(scratch)
    for node in iter_nodes(root):
        if isinstance(node, Var):
            wire[id(node)] = data[node.index - 1]
            continue
        s = next(free)
        if isinstance(node, Not):
            gates += [CX(wire[id(node.child)], s), X(s)]
        else:
            a, b = wire[id(node.left)], wire[id(node.right)]
            if a == b:
                # x & x == x | x == x
                gates.append(CX(a, s))
            elif isinstance(node, And):
                gates.append(TOF(a, b, s))
            else:
                # a | b == !(!a & !b)
                gates += [X(a), X(b), TOF(a, b, s), X(s), X(a), X(b)]
        wire[id(node)] = s
    return gates, wire[id(root)]


def phase_oracle_gates(phi: Formula, data: Sequence[int], kick: int, scratch: Sequence[int]) -> list[Gate]:
    """|x> -> (-1)^phi(x) |x> with ``kick`` held at |1> and scratch clean."""
    if len(scratch) < oracle_scratch_size(phi):
        raise CircuitError(f"oracle needs {oracle_scratch_size(phi)} scratch wires")
    compute, flag = _compute_gates(phi.root, data, scratch)
    # H-CX-H on a |1> wire imprints (-1)^flag
    kickback = [H(kick), CX(flag, kick), H(kick)]
    return compute + kickback + compute[::-1]


def dj_gates(phi: Formula, data: Sequence[int], kick: int, scratch: Sequence[int]) -> list[Gate]:
    hs = [H(q) for q in data]
    return hs + phase_oracle_gates(phi, data, kick, scratch) + hs


def _span(wires: Sequence[int]) -> tuple[int, int] | None:
    return (wires[0], wires[-1]) if wires else None


def _oracle_layout(phi: Formula) -> tuple[RegisterLayout, list[int], int, list[int]]:
    n = phi.n_vars
    s = oracle_scratch_size(phi)
    data = list(range(n))
    kick = n
    scratch = list(range(n + 1, n + 1 + s))
    roles = [Role.FREE] * n + [Role.ANC1] + [Role.ANC0] * s
    spans = {"data": (0, n - 1), "kick": (kick, kick)}
    if scratch:
        spans["scratch"] = _span(scratch)
    return RegisterLayout(tuple(roles), spans), data, kick, scratch


def synth_phase_oracle(phi: Formula) -> OracleFragment:
    layout, data, kick, scratch = _oracle_layout(phi)
    circuit = Circuit(layout, tuple(phase_oracle_gates(phi, data, kick, scratch)))
    return OracleFragment(circuit, (0, phi.n_vars - 1), kick, _span(scratch))


def synth_dj(phi: Formula) -> Circuit:
    """H^n, phase oracle, H^n on free data wires 0..n-1."""
    layout, data, kick, scratch = _oracle_layout(phi)
    return Circuit(layout, tuple(dj_gates(phi, data, kick, scratch)))


def lower_mcx(controls: Sequence[int], target: int, scratch: Sequence[int]) -> list[Gate]:
    """Multi-controlled X as a Toffoli ladder over k-2 clean scratch wires."""
    controls = list(controls)
    k = len(controls)
    if k < 3:
        raise CircuitError("lower_mcx needs at least 3 controls")
    if len(scratch) < k - 2:
        raise CircuitError(f"{k} controls need {k - 2} clean scratch wires, got {len(scratch)}")
    s = list(scratch[:k - 2])
    ladder = [TOF(controls[0], controls[1], s[0])]
    for i in range(2, k - 1):
        ladder.append(TOF(controls[i], s[i - 2], s[i - 1]))
    return ladder + [TOF(controls[-1], s[-1], target)] + ladder[::-1]


def _multi_x(controls: Sequence[int], target: int, scratch: Sequence[int], lower: bool) -> list[Gate]:
    g = controlled_x(controls, target)
    if g.kind is GateKind.MCX and lower:
        return lower_mcx(g.controls, g.target, scratch)
    return [g]


def _gadget_wire_count(kind: str) -> int:
    if kind not in GADGET_TARGETS:
        raise ValueError(f"gadget gate must be one of {GADGET_TARGETS}, got {kind!r}")
    return 2 if kind == "CX" else 3


def synth_q_gadget(phi: Formula, kind: str = "CX", lower: bool = True) -> Circuit:
    """DJ on an all-ones register, G controlled on that register, DJ again.

    Wires: register 0..n-1 (ANC1), G's wires (FREE, target last), the
    kickback wire, oracle scratch, then MCX ladder scratch when lowering.
    """
    n = phi.n_vars
    g = _gadget_wire_count(kind)
    reg = list(range(n))
    gw = list(range(n, n + g))
    kick = n + g
    s = oracle_scratch_size(phi)
    scratch = list(range(kick + 1, kick + 1 + s))
    controls = reg + gw[:-1]
    need = max(len(controls) - 2, 0) if lower and len(controls) >= 3 else 0
    mcx_scratch = list(range(kick + 1 + s, kick + 1 + s + need))
    roles = [Role.ANC1] * n + [Role.FREE] * g + [Role.ANC1] + [Role.ANC0] * (s + need)
    spans = {"R": (0, n - 1), "G": (gw[0], gw[-1]), "kick": (kick, kick)}
    if scratch:
        spans["scratch"] = _span(scratch)
    if mcx_scratch:
        spans["mcx_scratch"] = _span(mcx_scratch)
    dj = dj_gates(phi, reg, kick, scratch)
    gates = dj + _multi_x(controls, gw[-1], mcx_scratch, lower) + dj
    return Circuit(RegisterLayout(tuple(roles), spans), tuple(gates))


def synth_reduction(phi: Formula, lower: bool = True) -> tuple[Circuit, ReductionLayout]:
    """The identity-test circuit: Q(CX) with an H-conjugated control on top,
    Q(TOF) acting on the free pair (a, b) below; helpers are shared."""
    n = phi.n_vars
    r1 = tuple(range(n))
    w_h, w_t1 = n, n + 1
    r2 = tuple(range(n + 2, 2 * n + 2))
    w_a, w_b, w_t2 = 2 * n + 2, 2 * n + 3, 2 * n + 4
    kick = 2 * n + 5
    s = oracle_scratch_size(phi)
    scratch = tuple(range(kick + 1, kick + 1 + s))
    need = n if lower else 0
    mcx_scratch = tuple(range(kick + 1 + s, kick + 1 + s + need))
    roles = ([Role.ANC1] * n + [Role.ANC0, Role.ANC0] + [Role.ANC1] * n
             + [Role.FREE, Role.FREE, Role.ANC0, Role.ANC1] + [Role.ANC0] * (s + need))
    spans = {
        "R1": (r1[0], r1[-1]), "w_h": (w_h, w_h), "w_t1": (w_t1, w_t1),
        "R2": (r2[0], r2[-1]), "w_a": (w_a, w_a), "w_b": (w_b, w_b),
        "w_t2": (w_t2, w_t2), "kick": (kick, kick),
    }
    if scratch:
        spans["scratch"] = _span(scratch)
    if mcx_scratch:
        spans["mcx_scratch"] = _span(mcx_scratch)

    dj1 = dj_gates(phi, r1, kick, scratch)
    dj2 = dj_gates(phi, r2, kick, scratch)
    gates = (dj1 + [H(w_h)] + _multi_x(list(r1) + [w_h], w_t1, mcx_scratch, lower)
             + dj1 + [H(w_h)]
             + dj2 + _multi_x(list(r2) + [w_a, w_b], w_t2, mcx_scratch, lower) + dj2)
    layout = ReductionLayout(n, r1, w_h, w_t1, r2, w_a, w_b, w_t2, kick, scratch, mcx_scratch)
    return Circuit(RegisterLayout(tuple(roles), spans), tuple(gates)), layout


# -- analytic oracles -------------------------------------------------------

def _parity(v: int) -> int:
    return bin(v).count("1") & 1


class _DJSums:
    """Integer numerators of S(x, y) = 2^-n sum_w (-1)^(phi(w) + x.w + w.y).

    Bitstrings are encoded as binary numbers with variable 1 as the top bit,
    matching the truth-table index.
    """

    def __init__(self, phi: Formula, max_vars: int):
        if phi.n_vars > max_vars:
            raise EnumerationGuardError(
                f"{phi.n_vars} variables exceeds enumeration guard {max_vars}")
        self.n = phi.n_vars
        self.signs = [-1 if ch == "1" else 1 for ch in truth_table(phi, max_vars)]
        self._cache: dict[tuple[int, int], int] = {}

    def num(self, x: int, y: int) -> int:
        key = (x, y)
        if key not in self._cache:
            total = 0
            for w, sign in enumerate(self.signs):
                total += -sign if _parity(x & w) ^ _parity(w & y) else sign
            self._cache[key] = total
        return self._cache[key]

    def key(self, v: int, offset: int = 0) -> int:
        """Turn an encoded bitstring into wire bits offset..offset+n-1."""
        return bits_to_key(format(v, f"0{self.n}b")) << offset


def _encode(bits: str) -> int:
    return int(bits, 2) if bits else 0


def predicted_dj_state(phi: Formula, x: str, max_vars: int = DEFAULT_MAX_VARS) -> SparseState:
    """sum_z S(x, z) |z> on the n data wires."""
    sums = _DJSums(phi, max_vars)
    n = sums.n
    if len(x) != n:
        raise ValueError(f"input {x!r} needs {n} bits")
    xi = _encode(x)
    entries = {}
    for z in range(2 ** n):
        num = sums.num(xi, z)
        if num:
            entries[sums.key(z)] = dyadic(num, n)
    return SparseState(n, entries)


def _apply_g(kind: str, x: str) -> str:
    bits = [int(ch) for ch in x]
    if kind == "CX":
        bits[1] ^= bits[0]
    else:
        bits[2] ^= bits[0] & bits[1]
    return "".join(map(str, bits))


def predicted_gadget_state(phi: Formula, kind: str, x: str,
                           max_vars: int = DEFAULT_MAX_VARS) -> SparseState:
    """|psi>|x> + beta |psi'> G|x> on register wires 0..n-1 then G's wires.

    |psi>  = sum_{z != 1^n} S(1^n, z) sum_w S(z, w) |w>
    |psi'> = sum_w S(1^n, w) |w>,   beta = S(1^n, 1^n)
    """
    g = _gadget_wire_count(kind)
    if len(x) != g or set(x) - {"0", "1"}:
        raise ValueError(f"G input {x!r} needs {g} bits")
    sums = _DJSums(phi, max_vars)
    n = sums.n
    ones = 2 ** n - 1
    x_key = bits_to_key(x) << n
    gx_key = bits_to_key(_apply_g(kind, x)) << n
    # numerators over 4^n
    acc: dict[int, int] = {}
    for z in range(2 ** n):
        if z == ones:
            continue
        a = sums.num(ones, z)
        if not a:
            continue
        for w in range(2 ** n):
            key = sums.key(w) | x_key
            acc[key] = acc.get(key, 0) + a * sums.num(z, w)
    beta = sums.num(ones, ones)
    if beta:
        for w in range(2 ** n):
            key = sums.key(w) | gx_key
            acc[key] = acc.get(key, 0) + beta * sums.num(ones, w)
    return SparseState(n + g, {k: dyadic(v, 2 * n) for k, v in acc.items() if v})
