"""Circuit IR: gates, register layout, gate classes, resources, serialization."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence


class CircuitError(ValueError):
    pass


class CircuitSyntaxError(CircuitError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class GateKind(str, Enum):
    H = "h"
    X = "x"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    CX = "cx"
    TOF = "ccx"
    MCX = "mcx"


_ARITY = {
    GateKind.H: 1, GateKind.X: 1, GateKind.S: 1, GateKind.SDG: 1,
    GateKind.T: 1, GateKind.TDG: 1, GateKind.CX: 2, GateKind.TOF: 3,
}


@dataclass(frozen=True)
class Gate:
    """A gate; for controlled kinds the last wire is the target."""

    kind: GateKind
    wires: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        if self.kind is GateKind.MCX:
            if len(self.wires) < 4:
                raise CircuitError("mcx needs at least 3 controls")
        elif len(self.wires) != _ARITY[self.kind]:
            raise CircuitError(f"{self.kind.value} takes {_ARITY[self.kind]} wires")
        if len(set(self.wires)) != len(self.wires):
            raise CircuitError(f"repeated wire in {self.kind.value} {self.wires}")
        if any(w < 0 for w in self.wires):
            raise CircuitError("negative wire index")

    @property
    def controls(self) -> tuple[int, ...]:
        return self.wires[:-1] if self.kind in _CONTROLLED else ()

    @property
    def target(self) -> int:
        return self.wires[-1]

    def __str__(self) -> str:
        if self.kind is GateKind.MCX:
            return f"mcx {','.join(map(str, self.controls))} {self.target}"
        return f"{self.kind.value} {' '.join(map(str, self.wires))}"


_CONTROLLED = {GateKind.CX, GateKind.TOF, GateKind.MCX}


def H(q: int) -> Gate:
    return Gate(GateKind.H, (q,))


def X(q: int) -> Gate:
    return Gate(GateKind.X, (q,))


def S(q: int) -> Gate:
    return Gate(GateKind.S, (q,))


def Sdg(q: int) -> Gate:
    return Gate(GateKind.SDG, (q,))


def T(q: int) -> Gate:
    return Gate(GateKind.T, (q,))


def Tdg(q: int) -> Gate:
    return Gate(GateKind.TDG, (q,))


def CX(c: int, t: int) -> Gate:
    return Gate(GateKind.CX, (c, t))


def TOF(c1: int, c2: int, t: int) -> Gate:
    return Gate(GateKind.TOF, (c1, c2, t))


def MCX(controls: Sequence[int], t: int) -> Gate:
    return Gate(GateKind.MCX, (*controls, t))


def controlled_x(controls: Sequence[int], target: int) -> Gate:
    """X with any number of controls, using the smallest gate kind."""
    controls = tuple(controls)
    if not controls:
        return X(target)
    if len(controls) == 1:
        return CX(controls[0], target)
    if len(controls) == 2:
        return TOF(controls[0], controls[1], target)
    return MCX(controls, target)


class Role(str, Enum):
    FREE = "free"
    ANC0 = "anc0"
    ANC1 = "anc1"


@dataclass(frozen=True)
class RegisterLayout:
    """Per-wire roles plus named inclusive spans ``name -> (lo, hi)``."""

    roles: tuple[Role, ...]
    spans: Mapping[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "roles", tuple(Role(r) for r in self.roles))
        spans = {str(k): (int(lo), int(hi)) for k, (lo, hi) in self.spans.items()}
        object.__setattr__(self, "spans", spans)
        taken: set[int] = set()
        for name, (lo, hi) in spans.items():
            if not 0 <= lo <= hi < self.m:
                raise CircuitError(f"register {name} span {lo}..{hi} outside 0..{self.m - 1}")
            wires = set(range(lo, hi + 1))
            if wires & taken:
                raise CircuitError(f"register {name} overlaps another register")
            taken |= wires

    @classmethod
    def all_free(cls, m: int) -> RegisterLayout:
        return cls((Role.FREE,) * m)

    @property
    def m(self) -> int:
        return len(self.roles)

    @property
    def free_wires(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r is Role.FREE]

    def span(self, name: str) -> list[int]:
        lo, hi = self.spans[name]
        return list(range(lo, hi + 1))

    def initial_key(self, free_assignment: str) -> int:
        """Basis index (bit q = wire q) of the initialized input."""
        free = self.free_wires
        if len(free_assignment) != len(free) or set(free_assignment) - {"0", "1"}:
            raise CircuitError(
                f"free assignment {free_assignment!r} must be {len(free)} bits")
        key = 0
        for q, r in enumerate(self.roles):
            if r is Role.ANC1:
                key |= 1 << q
        for q, ch in zip(free, free_assignment):
            if ch == "1":
                key |= 1 << q
        return key

    def extended(self, roles: Iterable[Role], spans: Mapping[str, tuple[int, int]] = {}) -> RegisterLayout:
        return RegisterLayout(self.roles + tuple(roles), {**self.spans, **spans})

    def __hash__(self):
        return hash((self.roles, tuple(sorted(self.spans.items()))))


@dataclass(frozen=True)
class Circuit:
    layout: RegisterLayout
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.wires) >= self.m:
                raise CircuitError(f"gate {g} uses a wire outside 0..{self.m - 1}")

    @classmethod
    def on_wires(cls, m: int, gates: Iterable[Gate] = ()) -> Circuit:
        return cls(RegisterLayout.all_free(m), tuple(gates))

    @property
    def m(self) -> int:
        return self.layout.m

    def __len__(self) -> int:
        return len(self.gates)

    def with_gates(self, gates: Iterable[Gate]) -> Circuit:
        return Circuit(self.layout, tuple(gates))


def compose(first: Circuit, second: Circuit) -> Circuit:
    """Run ``first`` then ``second`` on the same layout."""
    if first.layout != second.layout:
        raise CircuitError("cannot compose circuits with different layouts")
    return first.with_gates(first.gates + second.gates)


_INVERSE_KIND = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S,
                 GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T}


def inverse_gate(g: Gate) -> Gate:
    kind = _INVERSE_KIND.get(g.kind)
    return g if kind is None else Gate(kind, g.wires)


def inverse_circuit(c: Circuit) -> Circuit:
    return c.with_gates(inverse_gate(g) for g in reversed(c.gates))


# -- gate classes and resources ---------------------------------------------

CLIFFORD = "clifford"
NON_CLIFFORD = "non_clifford"
SUPERPOSITION = "superposition"
ENTANGLEMENT = "entanglement"
GATE_CLASSES = (CLIFFORD, NON_CLIFFORD, SUPERPOSITION, ENTANGLEMENT)

_CLASSES = {
    GateKind.H: frozenset({CLIFFORD, SUPERPOSITION}),
    GateKind.X: frozenset({CLIFFORD}),
    GateKind.S: frozenset({CLIFFORD}),
    GateKind.SDG: frozenset({CLIFFORD}),
    GateKind.CX: frozenset({CLIFFORD, ENTANGLEMENT}),
    GateKind.T: frozenset({NON_CLIFFORD}),
    GateKind.TDG: frozenset({NON_CLIFFORD}),
    GateKind.TOF: frozenset({NON_CLIFFORD, ENTANGLEMENT}),
    GateKind.MCX: frozenset({NON_CLIFFORD, ENTANGLEMENT}),
}

# report buckets; adjoints count with their base gate
_COUNT_BUCKET = {
    GateKind.H: "h", GateKind.X: "x", GateKind.S: "s", GateKind.SDG: "s",
    GateKind.T: "t", GateKind.TDG: "t", GateKind.CX: "cx", GateKind.TOF: "tof",
    GateKind.MCX: "mcx",
}
COUNT_KEYS = ("h", "x", "s", "t", "cx", "tof", "mcx")


def classify_gate(g: Gate) -> frozenset[str]:
    return _CLASSES[g.kind]


@dataclass(frozen=True)
class ResourceReport:
    counts: dict[str, int]
    class_counts: dict[str, int]
    class_depths: dict[str, int]
    total: int
    depth: int

    def to_dict(self) -> dict:
        return {
            "counts": dict(self.counts),
            "class_counts": dict(self.class_counts),
            "class_depths": dict(self.class_depths),
            "total": self.total,
            "depth": self.depth,
        }


def asap_layers(c: Circuit) -> list[int]:
    """1-based ASAP layer of each gate; gates sharing a wire never share a layer."""
    front = [0] * c.m
    layers = []
    for g in c.gates:
        layer = 1 + max(front[w] for w in g.wires)
        for w in g.wires:
            front[w] = layer
        layers.append(layer)
    return layers


def count_resources(c: Circuit) -> ResourceReport:
    counts = dict.fromkeys(COUNT_KEYS, 0)
    class_counts = dict.fromkeys(GATE_CLASSES, 0)
    class_layers: dict[str, set[int]] = {cls: set() for cls in GATE_CLASSES}
    layers = asap_layers(c)
    for g, layer in zip(c.gates, layers):
        counts[_COUNT_BUCKET[g.kind]] += 1
        for cls in classify_gate(g):
            class_counts[cls] += 1
            class_layers[cls].add(layer)
    return ResourceReport(
        counts=counts,
        class_counts=class_counts,
        class_depths={cls: len(v) for cls, v in class_layers.items()},
        total=len(c.gates),
        depth=max(layers, default=0),
    )


# -- lowering ---------------------------------------------------------------

def lower_strict_h_tof(c: Circuit) -> Circuit:
    """Rewrite an H/X/CX/TOF/MCX circuit over H and TOF only.

    X and CX use constant-1 controls on up to two appended ANC1 wires; MCX
    uses the clean-ancilla ladder on appended ANC0 scratch wires.
    """
    from .synth import lower_mcx

    kinds = {g.kind for g in c.gates}
    bad = kinds - {GateKind.H, GateKind.X, GateKind.CX, GateKind.TOF, GateKind.MCX}
    if bad:
        names = ", ".join(sorted(k.value for k in bad))
        raise CircuitError(f"cannot lower {names} into H+TOF")
    new_roles: list[Role] = []
    m = c.m
    u1 = u2 = None
    if GateKind.X in kinds or GateKind.CX in kinds:
        u1 = m + len(new_roles)
        new_roles.append(Role.ANC1)
    if GateKind.X in kinds:
        u2 = m + len(new_roles)
        new_roles.append(Role.ANC1)
    need = max((len(g.controls) - 2 for g in c.gates if g.kind is GateKind.MCX), default=0)
    scratch = [m + len(new_roles) + i for i in range(need)]
    new_roles.extend([Role.ANC0] * need)

    out: list[Gate] = []
    for g in c.gates:
        if g.kind is GateKind.X:
            out.append(TOF(u1, u2, g.target))
        elif g.kind is GateKind.CX:
            out.append(TOF(g.wires[0], u1, g.target))
        elif g.kind is GateKind.MCX:
            out.extend(lower_mcx(g.controls, g.target, scratch))
        else:
            out.append(g)
    return Circuit(c.layout.extended(new_roles), tuple(out))


# -- serialization ----------------------------------------------------------

FORMATS = ("native", "qasm2", "json")


def serialize(c: Circuit, fmt: str = "native") -> str:
    if fmt == "native":
        return _to_native(c)
    if fmt == "qasm2":
        return _to_qasm2(c)
    if fmt == "json":
        return _to_json(c)
    raise CircuitError(f"unknown format {fmt!r}")


def deserialize(text: str, fmt: str = "native") -> Circuit:
    if fmt == "native":
        return _from_native(text)
    if fmt == "qasm2":
        return _from_qasm2(text)
    if fmt == "json":
        return _from_json(text)
    raise CircuitError(f"unknown format {fmt!r}")


def _to_native(c: Circuit) -> str:
    lines = [f"qubits {c.m}"]
    lines += [f"role {i} {r.value}" for i, r in enumerate(c.layout.roles)]
    lines += [f"reg {name} {lo} {hi}" for name, (lo, hi) in c.layout.spans.items()]
    lines += [str(g) for g in c.gates]
    return "\n".join(lines) + "\n"


def _int(tok: str, lineno: int) -> int:
    if not tok.isdigit():
        raise CircuitSyntaxError(f"expected a wire index, found {tok!r}", lineno)
    return int(tok)


def _from_native(text: str) -> Circuit:
    m = None
    roles: list[Role] = []
    spans: dict[str, tuple[int, int]] = {}
    gates: list[tuple[Gate, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op = parts[0]
        if op == "qubits":
            if m is not None or len(parts) != 2:
                raise CircuitSyntaxError("bad or repeated 'qubits' header", lineno)
            m = _int(parts[1], lineno)
            roles = [Role.FREE] * m
            continue
        if m is None:
            raise CircuitSyntaxError("'qubits M' header must come first", lineno)
        if op == "role":
            if len(parts) != 3 or parts[2] not in ("free", "anc0", "anc1"):
                raise CircuitSyntaxError(f"bad role line {line!r}", lineno)
            q = _int(parts[1], lineno)
            if q >= m:
                raise CircuitSyntaxError(f"wire {q} out of range for {m} qubits", lineno)
            roles[q] = Role(parts[2])
        elif op == "reg":
            if len(parts) != 4:
                raise CircuitSyntaxError(f"bad reg line {line!r}", lineno)
            spans[parts[1]] = (_int(parts[2], lineno), _int(parts[3], lineno))
        elif op == "mcx":
            if len(parts) != 3:
                raise CircuitSyntaxError("mcx takes 'C1,...,Ck T'", lineno)
            controls = [_int(t, lineno) for t in parts[1].split(",")]
            gates.append((_gate(GateKind.MCX, controls + [_int(parts[2], lineno)], lineno), lineno))
        else:
            try:
                kind = GateKind(op)
            except ValueError:
                raise CircuitSyntaxError(f"unknown instruction {op!r}", lineno) from None
            gates.append((_gate(kind, [_int(t, lineno) for t in parts[1:]], lineno), lineno))
    if m is None:
        raise CircuitSyntaxError("missing 'qubits M' header", 1)
    for g, lineno in gates:
        if max(g.wires) >= m:
            raise CircuitSyntaxError(f"wire {max(g.wires)} out of range for {m} qubits", lineno)
    try:
        layout = RegisterLayout(tuple(roles), spans)
    except CircuitError as exc:
        raise CircuitSyntaxError(str(exc), 1) from None
    return Circuit(layout, tuple(g for g, _ in gates))


def _gate(kind: GateKind, wires: list[int], lineno: int) -> Gate:
    try:
        return Gate(kind, tuple(wires))
    except CircuitError as exc:
        raise CircuitSyntaxError(str(exc), lineno) from None


def _to_qasm2(c: Circuit) -> str:
    if any(g.kind is GateKind.MCX for g in c.gates):
        raise CircuitError("qasm2 output cannot contain mcx; lower the circuit first")
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    lines += [f"// role {i} {r.value}" for i, r in enumerate(c.layout.roles)]
    lines += [f"// reg {name} {lo} {hi}" for name, (lo, hi) in c.layout.spans.items()]
    lines.append(f"qreg q[{c.m}];")
    for g in c.gates:
        args = ",".join(f"q[{w}]" for w in g.wires)
        lines.append(f"{g.kind.value} {args};")
    return "\n".join(lines) + "\n"


_QASM_GATE = re.compile(r"^([a-z]+)\s+(q\[\d+\](?:\s*,\s*q\[\d+\])*)\s*;$")
_QASM_ROLE = re.compile(r"^//\s*role\s+(\d+)\s+(free|anc0|anc1)\s*$")
_QASM_REG = re.compile(r"^//\s*reg\s+(\S+)\s+(\d+)\s+(\d+)\s*$")


def _from_qasm2(text: str) -> Circuit:
    m = None
    role_lines: list[tuple[int, str, int]] = []
    spans: dict[str, tuple[int, int]] = {}
    gates: list[tuple[Gate, int]] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("//"):
            if mt := _QASM_ROLE.match(line):
                role_lines.append((int(mt.group(1)), mt.group(2), lineno))
            elif mt := _QASM_REG.match(line):
                spans[mt.group(1)] = (int(mt.group(2)), int(mt.group(3)))
            continue
        line = line.split("//", 1)[0].strip()
        if line == "OPENQASM 2.0;":
            seen_header = True
            continue
        if line == 'include "qelib1.inc";':
            continue
        if mt := re.match(r"^qreg\s+q\[(\d+)\]\s*;$", line):
            if m is not None:
                raise CircuitSyntaxError("only a single register q is supported", lineno)
            m = int(mt.group(1))
            continue
        mt = _QASM_GATE.match(line)
        if mt is None:
            raise CircuitSyntaxError(f"unsupported qasm2 construct {line!r}", lineno)
        if m is None:
            raise CircuitSyntaxError("gate before 'qreg q[M];'", lineno)
        name = mt.group(1)
        try:
            kind = GateKind(name)
        except ValueError:
            kind = None
        if kind is None or kind is GateKind.MCX:
            raise CircuitSyntaxError(f"unsupported qasm2 gate {name!r}", lineno)
        wires = [int(w) for w in re.findall(r"q\[(\d+)\]", mt.group(2))]
        if max(wires) >= m:
            raise CircuitSyntaxError(f"wire {max(wires)} out of range for {m} qubits", lineno)
        gates.append((_gate(kind, wires, lineno), lineno))
    if not seen_header:
        raise CircuitSyntaxError("missing 'OPENQASM 2.0;' header", 1)
    if m is None:
        raise CircuitSyntaxError("missing 'qreg q[M];' declaration", 1)
    roles = [Role.FREE] * m
    for q, role, lineno in role_lines:
        if q >= m:
            raise CircuitSyntaxError(f"role for wire {q} out of range", lineno)
        roles[q] = Role(role)
    try:
        layout = RegisterLayout(tuple(roles), spans)
    except CircuitError as exc:
        raise CircuitSyntaxError(str(exc), 1) from None
    return Circuit(layout, tuple(g for g, _ in gates))


def _to_json(c: Circuit) -> str:
    doc = {
        "qubits": c.m,
        "roles": [r.value for r in c.layout.roles],
        "registers": {name: [lo, hi] for name, (lo, hi) in c.layout.spans.items()},
        "gates": [{"op": g.kind.value, "wires": list(g.wires)} for g in c.gates],
    }
    return json.dumps(doc, indent=2) + "\n"


def _from_json(text: str) -> Circuit:
    try:
        doc = json.loads(text)
        m = int(doc["qubits"])
        roles = doc.get("roles", ["free"] * m)
        if len(roles) != m:
            raise CircuitError(f"expected {m} roles, found {len(roles)}")
        spans = {k: tuple(v) for k, v in doc.get("registers", {}).items()}
        gates = []
        for i, entry in enumerate(doc.get("gates", [])):
            g = Gate(GateKind(entry["op"]), tuple(entry["wires"]))
            if max(g.wires) >= m:
                raise CircuitError(f"gate {i}: wire {max(g.wires)} out of range for {m} qubits")
            gates.append(g)
        return Circuit(RegisterLayout(tuple(roles), spans), tuple(gates))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CircuitError):
            raise
        raise CircuitError(f"malformed circuit json: {exc}") from None
