"""Semantic checks on circuits, all exact.

Identity comes in two flavours: ``check_identity_full`` quantifies over every
basis input, ``check_identity_initialized`` only over inputs whose helper
wires hold their declared values (ANC0 = 0, ANC1 = 1).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .circuit import (
    ENTANGLEMENT, NON_CLIFFORD, SUPERPOSITION, Circuit, Gate, S, X,
    inverse_circuit,
)
from .exactsim import (
    DEFAULT_MAX_FULL_QUBITS, GuardError, SparseState, apply_gates, key_to_bits,
    run_circuit, unitary_columns,
)
from .formula import SatSummary, count_sat
from .ring import ONE, RingAmplitude
from .synth import synth_reduction

DEFAULT_MAX_FREE_WIRES = 20
DEFAULT_MAX_CLIFFORD_QUBITS = 10
DEFAULT_MAX_REDUCTION_VARS = 5

NON_IDENTITY = "non_identity"
ZERO_BUDGET_CLASSES = (NON_IDENTITY, NON_CLIFFORD, SUPERPOSITION, ENTANGLEMENT)


class UnsupportedClassError(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: dict | None = None
    global_phase: RingAmplitude | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        out: dict = {"holds": self.holds}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.global_phase is not None:
            out["global_phase"] = self.global_phase.render()
        return out


def _free_inputs(c: Circuit, max_free: int) -> Iterable[str]:
    f = len(c.layout.free_wires)
    if f > max_free:
        raise GuardError(f"{f} free wires exceeds guard {max_free}")
    return ("".join(bits) for bits in itertools.product("01", repeat=f))


def _first(state: SparseState, limit: int = 4) -> list[str]:
    return sorted(key_to_bits(k, state.m) for k in state)[:limit]


def _run_all(c: Circuit, max_free: int, max_support: int | None = None) -> list[tuple[str, SparseState]]:
    return [(v, run_circuit(c, v, max_support)) for v in _free_inputs(c, max_free)]


def check_identity_initialized(c: Circuit, max_free: int = DEFAULT_MAX_FREE_WIRES) -> Verdict:
    return _identity_initialized(c, _run_all(c, max_free))


def _identity_initialized(c: Circuit, outputs) -> Verdict:
    phase = None
    for v, out in outputs:
        init = c.layout.initial_key(v)
        amp = out[init]
        if len(out) != 1 or amp.is_zero():
            return Verdict(False, {"input": v, "reason": "output is not the input basis state",
                                   "support": _first(out)})
        if amp.unit_power() is None:
            return Verdict(False, {"input": v, "reason": "amplitude is not a unit",
                                   "amplitude": amp.render()})
        if phase is None:
            phase = amp
        elif amp != phase:
            return Verdict(False, {"input": v, "reason": "global phase differs",
                                   "phase": amp.render(), "expected": phase.render()})
    return Verdict(True, None, phase if phase is not None else ONE)


def check_identity_full(c: Circuit, max_qubits: int = DEFAULT_MAX_FULL_QUBITS) -> Verdict:
    phase = None
    for x, col in unitary_columns(c, max_qubits):
        amp = col[x]
        column = key_to_bits(x, c.m)
        if len(col) != 1 or amp.is_zero():
            return Verdict(False, {"column": column, "reason": "column is not the input basis state",
                                   "support": _first(col), "state": col.render()})
        if amp.unit_power() is None:
            return Verdict(False, {"column": column, "reason": "amplitude is not a unit"})
        if phase is None:
            phase = amp
        elif amp != phase:
            return Verdict(False, {"column": column, "reason": "global phase differs",
                                   "phase": amp.render(), "expected": phase.render()})
    return Verdict(True, None, phase if phase is not None else ONE)


def detect_superposition(c: Circuit, max_free: int = DEFAULT_MAX_FREE_WIRES) -> Verdict:
    return _superposition(_run_all(c, max_free))


def _superposition(outputs) -> Verdict:
    for v, out in outputs:
        if len(out) >= 2:
            return Verdict(True, {"input": v, "basis_states": _first(out, 2)})
    return Verdict(False)


def gf2_rank(vectors: Iterable[int]) -> int:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def is_affine_closed(points: Iterable[str]) -> Verdict:
    """True iff the set of equal-length bitstrings is a coset of a GF(2) subspace."""
    pts = sorted(set(points))
    if not pts:
        raise ValueError("is_affine_closed needs a nonempty set")
    width = len(pts[0])
    if any(len(p) != width for p in pts):
        raise ValueError("bitstrings must have equal length")
    ints = [int(p, 2) if p else 0 for p in pts]
    members = set(ints)
    s0 = ints[0]
    r = gf2_rank(v ^ s0 for v in ints)
    if len(ints) == 2 ** r:
        return Verdict(True)
    # S is affine iff s0 ^ x ^ y stays in S for all x, y
    for x, y in itertools.combinations(ints, 2):
        z = s0 ^ x ^ y
        if z not in members:
            fmt = lambda v: format(v, f"0{width}b") if width else ""
            return Verdict(False, {"triple": [fmt(s0), fmt(x), fmt(y)], "xor": fmt(z),
                                   "size": len(ints), "rank": r})
    raise AssertionError("rank test and closure test disagree")


def relation_set(c: Circuit, restrict: Sequence[int] | None = None,
                 max_free: int = DEFAULT_MAX_FREE_WIRES) -> set[str]:
    """Observed input/output pairs.

    Without ``restrict`` each element is the free-input string followed by a
    full output basis string; with ``restrict`` it is the output bits on
    those wires only.
    """
    return _relation(c, _run_all(c, max_free), restrict)


def _relation(c: Circuit, outputs, restrict: Sequence[int] | None) -> set[str]:
    rel: set[str] = set()
    for v, out in outputs:
        if restrict is None:
            rel.update(v + key_to_bits(k, c.m) for k in out)
        else:
            rel.update(out.support_on(restrict))
    return rel


def detect_non_affine(c: Circuit, restrict: Sequence[int] | None = None,
                      max_free: int = DEFAULT_MAX_FREE_WIRES) -> Verdict:
    return _non_affine(_relation(c, _run_all(c, max_free), restrict), restrict)


def _non_affine(rel: set[str], restrict: Sequence[int] | None) -> Verdict:
    closed = is_affine_closed(rel)
    if closed.holds:
        return Verdict(False)
    witness = dict(closed.witness)
    witness["wires"] = list(restrict) if restrict is not None else "inputs+all"
    return Verdict(True, witness)


def is_basis_preserving(c: Circuit, max_qubits: int = DEFAULT_MAX_FULL_QUBITS) -> Verdict:
    for x, col in unitary_columns(c, max_qubits):
        if len(col) != 1:
            return Verdict(False, {"column": key_to_bits(x, c.m), "basis_states": _first(col, 2)})
    return Verdict(True)


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


def _pauli_pattern(columns: Sequence[SparseState]) -> str | None:
    """None if M|x> = lam (-1)^(s.x) |x ^ d> for all x, else the reason."""
    d = lam = None
    s = 0
    m = columns[0].m
    signs = []
    for x, col in enumerate(columns):
        if len(col) != 1:
            return f"column {key_to_bits(x, m)} is a superposition"
        (y, amp), = col.items()
        if d is None:
            d, lam = x ^ y, amp
            if amp.unit_power() is None:
                return "phase is not a unit"
        if x ^ y != d:
            return f"column {key_to_bits(x, m)} is not shifted by a fixed pattern"
        if amp == lam:
            signs.append(0)
        elif amp == -lam:
            signs.append(1)
        else:
            return f"column {key_to_bits(x, m)} has a non-sign relative phase"
    for q in range(m):
        if signs[1 << q]:
            s |= 1 << q
    for x, sign in enumerate(signs):
        if sign != _parity(s & x):
            return f"column {key_to_bits(x, m)} breaks the linear sign pattern"
    return None


def check_clifford(c: Circuit, max_qubits: int = DEFAULT_MAX_CLIFFORD_QUBITS) -> Verdict:
    """Conjugate every X_i and Z_i by the circuit and test for a signed Pauli."""
    if c.m > max_qubits:
        raise GuardError(f"{c.m} qubits exceeds Clifford guard {max_qubits}")
    undo = inverse_circuit(c).gates
    generators: list[tuple[str, tuple[Gate, ...]]] = []
    for q in range(c.m):
        generators.append((f"X{q}", (X(q),)))
        generators.append((f"Z{q}", (S(q), S(q))))
    for name, pauli in generators:
        seq = undo + pauli + c.gates
        columns = [apply_gates(SparseState.basis(c.m, x), seq) for x in range(2 ** c.m)]
        reason = _pauli_pattern(columns)
        if reason is not None:
            return Verdict(False, {"generator": name, "reason": reason})
    return Verdict(True)


def decide_zero_budget(c: Circuit, cls: str, max_full_qubits: int = DEFAULT_MAX_FULL_QUBITS,
                       max_clifford_qubits: int = DEFAULT_MAX_CLIFFORD_QUBITS) -> Verdict:
    """Does c admit an implementation with no gates of the class?"""
    if cls == NON_IDENTITY:
        return check_identity_full(c, max_full_qubits)
    if cls == NON_CLIFFORD:
        return check_clifford(c, max_clifford_qubits)
    if cls == SUPERPOSITION:
        return is_basis_preserving(c, max_full_qubits)
    if cls == ENTANGLEMENT:
        raise UnsupportedClassError("zero-budget entanglement decision is not supported")
    raise UnsupportedClassError(f"unknown class {cls!r}")


@dataclass(frozen=True)
class ReductionReport:
    formula: str
    sat: SatSummary
    balanced: bool
    identity_initialized: Verdict
    identity_full: Verdict | None
    superposition: Verdict
    non_affine: Verdict
    non_affine_abt: Verdict
    qubits: int
    gates: int
    promise_respected: bool = field(init=False)
    biconditional_holds: bool = field(init=False)

    def __post_init__(self):
        ident = self.identity_initialized.holds
        object.__setattr__(self, "promise_respected",
                           ident or (self.superposition.holds and self.non_affine.holds))
        object.__setattr__(self, "biconditional_holds", self.balanced == ident)

    def to_dict(self) -> dict:
        return {
            "formula": self.formula,
            "n_vars": self.sat.n_vars,
            "count_sat": self.sat.count_sat,
            "beta": str(self.sat.beta),
            "balanced": self.balanced,
            "qubits": self.qubits,
            "gates": self.gates,
            "identity_initialized": self.identity_initialized.to_dict(),
            "identity_full": None if self.identity_full is None else self.identity_full.to_dict(),
            "superposition": self.superposition.to_dict(),
            "non_affine": self.non_affine.to_dict(),
            "non_affine_abt": self.non_affine_abt.to_dict(),
            "promise_respected": self.promise_respected,
            "biconditional_holds": self.biconditional_holds,
        }

    def render(self) -> str:
        def yn(v):
            if v is None:
                return "skipped (guard)"
            return "yes" if v else "no"

        full = None if self.identity_full is None else self.identity_full.holds
        rows = [
            ("formula", self.formula),
            ("#SAT", str(self.sat.count_sat)),
            ("beta", str(self.sat.beta)),
            ("balanced", yn(self.balanced)),
            ("circuit", f"{self.qubits} qubits, {self.gates} gates"),
            ("identity (initialized)", yn(self.identity_initialized.holds)),
            ("identity (full unitary)", yn(full)),
            ("superposition", yn(self.superposition.holds)),
            ("non-affine (all wires)", yn(self.non_affine.holds)),
            ("non-affine (a,b,t)", yn(self.non_affine_abt.holds)),
            ("promise respected", yn(self.promise_respected)),
            ("biconditional holds", yn(self.biconditional_holds)),
        ]
        width = max(len(k) for k, _ in rows)
        return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def verify_reduction(phi, max_vars: int = DEFAULT_MAX_REDUCTION_VARS,
                     max_full_qubits: int = DEFAULT_MAX_FULL_QUBITS,
                     max_free: int = DEFAULT_MAX_FREE_WIRES,
                     max_support: int | None = None) -> ReductionReport:
    """Build the reduction circuit for phi and report every check on it.

    ``max_support`` bounds the simulator's support size on each run and
    raises SimulationError when exceeded.
    """
    if phi.n_vars > max_vars:
        raise GuardError(f"{phi.n_vars} variables exceeds reduction guard {max_vars}")
    circuit, layout = synth_reduction(phi)
    sat = count_sat(phi)
    outputs = _run_all(circuit, max_free, max_support)
    full = check_identity_full(circuit, max_full_qubits) if circuit.m <= max_full_qubits else None
    return ReductionReport(
        formula=str(phi),
        sat=sat,
        balanced=sat.balanced,
        identity_initialized=_identity_initialized(circuit, outputs),
        identity_full=full,
        superposition=_superposition(outputs),
        non_affine=_non_affine(_relation(circuit, outputs, None), None),
        non_affine_abt=_non_affine(_relation(circuit, outputs, layout.abt), layout.abt),
        qubits=circuit.m,
        gates=len(circuit.gates),
    )
