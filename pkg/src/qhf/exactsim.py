"""Exact sparse state-vector simulation over Z[omega]/sqrt2^k.

Basis states are Python ints with bit ``q`` holding wire ``q``.  Bitstrings
shown to users put wire 0 first.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Sequence

from .circuit import Circuit, CircuitError, Gate, GateKind
from .ring import ONE, ZERO, RingAmplitude

DEFAULT_MAX_FULL_QUBITS = 14


class SimulationError(RuntimeError):
    pass


class GuardError(ValueError):
    pass


def key_to_bits(key: int, m: int) -> str:
    return "".join("1" if (key >> q) & 1 else "0" for q in range(m))


def bits_to_key(bits: str) -> int:
    key = 0
    for q, ch in enumerate(bits):
        if ch == "1":
            key |= 1 << q
        elif ch != "0":
            raise ValueError(f"{bits!r} is not a bitstring")
    return key


class SparseState:
    """Immutable map from basis index to nonzero amplitude on ``m`` wires."""

    __slots__ = ("m", "_entries")

    def __init__(self, m: int, entries: Mapping[int, RingAmplitude] | None = None):
        self.m = m
        self._entries = {k: v for k, v in (entries or {}).items() if not v.is_zero()}

    @classmethod
    def basis(cls, m: int, key: int | str) -> SparseState:
        if isinstance(key, str):
            if len(key) != m:
                raise ValueError(f"basis label {key!r} needs {m} bits")
            key = bits_to_key(key)
        return cls(m, {key: ONE})

    @classmethod
    def from_bits(cls, m: int, entries: Mapping[str, RingAmplitude]) -> SparseState:
        return cls(m, {bits_to_key(b): a for b, a in entries.items()})

    def __getitem__(self, key: int | str) -> RingAmplitude:
        if isinstance(key, str):
            key = bits_to_key(key)
        return self._entries.get(key, ZERO)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self._entries)

    def items(self):
        return self._entries.items()

    def support(self) -> list[int]:
        return list(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseState):
            return NotImplemented
        return self.m == other.m and self._entries == other._entries

    def __hash__(self):
        return hash((self.m, frozenset(self._entries.items())))

    def norm_sqr(self) -> RingAmplitude:
        total = ZERO
        for amp in self._entries.values():
            total = total + amp.norm_sqr()
        return total

    def scaled(self, factor: RingAmplitude) -> SparseState:
        return SparseState(self.m, {k: v * factor for k, v in self._entries.items()})

    def restrict(self, wires: Sequence[int], fixed: Mapping[int, int] | None = None) -> SparseState:
        """Re-index onto ``wires`` (new wire i = old ``wires[i]``).

        The dropped wires must sit in one basis value across the support,
        and must match ``fixed`` ({wire: bit}) where given; a projection that
        would merge amplitudes raises SimulationError.
        """
        fixed = fixed or {}
        out: dict[int, RingAmplitude] = {}
        for key, amp in self._entries.items():
            for w, b in fixed.items():
                if (key >> w) & 1 != b:
                    raise SimulationError(
                        f"wire {w} is not {b} in basis state {key_to_bits(key, self.m)}")
            new = 0
            for i, w in enumerate(wires):
                if (key >> w) & 1:
                    new |= 1 << i
            if new in out:
                raise SimulationError("dropped wires are entangled with the kept ones")
            out[new] = amp
        return SparseState(len(wires), out)

    def support_on(self, wires: Sequence[int]) -> set[str]:
        """Distinct bit patterns seen on ``wires`` (in the given order)."""
        return {"".join("1" if (k >> w) & 1 else "0" for w in wires) for k in self._entries}

    def to_complex_dict(self) -> dict[int, complex]:
        return {k: complex(v) for k, v in self._entries.items()}

    def render(self) -> str:
        rows = sorted((key_to_bits(k, self.m), v) for k, v in self._entries.items())
        return "".join(f"{bits} {amp.render()}\n" for bits, amp in rows)

    def __repr__(self) -> str:
        body = ", ".join(f"{key_to_bits(k, self.m)}: {v!r}"
                         for k, v in sorted(self._entries.items()))
        return f"SparseState({self.m}, {{{body}}})"


def _phase(entries: dict[int, RingAmplitude], q: int, omega_power: int) -> dict[int, RingAmplitude]:
    bit = 1 << q
    return {k: (v.times_omega(omega_power) if k & bit else v) for k, v in entries.items()}


def _permute(entries: dict[int, RingAmplitude], controls: Sequence[int], target: int) -> dict[int, RingAmplitude]:
    mask = 0
    for c in controls:
        mask |= 1 << c
    flip = 1 << target
    return {(k ^ flip if k & mask == mask else k): v for k, v in entries.items()}


def _hadamard(entries: dict[int, RingAmplitude], q: int) -> dict[int, RingAmplitude]:
    bit = 1 << q
    out: dict[int, RingAmplitude] = {}
    done = set()
    for key in entries:
        base = key & ~bit
        if base in done:
            continue
        done.add(base)
        p = entries.get(base)
        r = entries.get(base | bit)
        if p is None:
            new0, new1 = r, -r
        elif r is None:
            new0, new1 = p, p
        else:
            new0, new1 = p + r, p - r
        new0 = new0.div_sqrt2()
        new1 = new1.div_sqrt2()
        if not new0.is_zero():
            out[base] = new0
        if not new1.is_zero():
            out[base | bit] = new1
    return out


def _apply(entries: dict[int, RingAmplitude], g: Gate) -> dict[int, RingAmplitude]:
    kind = g.kind
    if kind is GateKind.H:
        return _hadamard(entries, g.target)
    if kind in (GateKind.X, GateKind.CX, GateKind.TOF, GateKind.MCX):
        return _permute(entries, g.controls, g.target)
    if kind is GateKind.S:
        return _phase(entries, g.target, 2)
    if kind is GateKind.SDG:
        return _phase(entries, g.target, 6)
    if kind is GateKind.T:
        return _phase(entries, g.target, 1)
    if kind is GateKind.TDG:
        return _phase(entries, g.target, 7)
    raise CircuitError(f"unknown gate kind {kind}")


def apply_gate(s: SparseState, g: Gate) -> SparseState:
    if max(g.wires) >= s.m:
        raise CircuitError(f"gate {g} out of range for {s.m} qubits")
    out = SparseState(s.m)
    out._entries = _apply(dict(s._entries), g)
    return out


def apply_gates(s: SparseState, gates: Iterable[Gate], max_support: int | None = None) -> SparseState:
    entries = dict(s._entries)
    for g in gates:
        if max(g.wires) >= s.m:
            raise CircuitError(f"gate {g} out of range for {s.m} qubits")
        entries = _apply(entries, g)
        if max_support is not None and len(entries) > max_support:
            raise SimulationError(
                f"support {len(entries)} exceeds bound {max_support} after gate {g}")
    out = SparseState(s.m)
    out._entries = entries
    return out


def run_circuit(c: Circuit, free_assignment: str = "", max_support: int | None = None) -> SparseState:
    """Run from the initialized input: ANC0 -> 0, ANC1 -> 1, free wires as given."""
    key = c.layout.initial_key(free_assignment)
    return apply_gates(SparseState.basis(c.m, key), c.gates, max_support)


def initial_state(c: Circuit, free_assignment: str = "") -> SparseState:
    return SparseState.basis(c.m, c.layout.initial_key(free_assignment))


def check_full_guard(m: int, max_qubits: int = DEFAULT_MAX_FULL_QUBITS):
    if m > max_qubits:
        raise GuardError(f"{m} qubits exceeds full-space guard {max_qubits}")


def unitary_column(c: Circuit, x: int | str, max_qubits: int = DEFAULT_MAX_FULL_QUBITS) -> SparseState:
    """``c|x>`` for an arbitrary basis state, ignoring wire roles."""
    check_full_guard(c.m, max_qubits)
    return apply_gates(SparseState.basis(c.m, x), c.gates)


def unitary_columns(c: Circuit, max_qubits: int = DEFAULT_MAX_FULL_QUBITS) -> Iterator[tuple[int, SparseState]]:
    check_full_guard(c.m, max_qubits)
    for x in range(2 ** c.m):
        yield x, apply_gates(SparseState.basis(c.m, x), c.gates)
