"""Acceptance criteria 1-10, one PASS/FAIL line each, all checks exact.

Run with ``pytest tests/test_acceptance.py -v`` to see the lines next to the
test names; they are written straight to the terminal, bypassing capture.
"""
import itertools
import random

import pytest

from qhf.circuit import (
    CLIFFORD, CX, ENTANGLEMENT, NON_CLIFFORD, SUPERPOSITION, TOF, Circuit, GateKind, H, Role, S,
    T, X, classify_gate, compose, deserialize, lower_strict_h_tof, serialize,
)
from qhf.exactsim import SparseState, apply_gates, bits_to_key, run_circuit, unitary_columns
from qhf.formula import all_formulas, evaluate, from_truth_table, parse_formula
from qhf.ring import ONE, dyadic
from qhf.synth import (
    lower_mcx, predicted_dj_state, predicted_gadget_state, synth_dj, synth_phase_oracle,
    synth_q_gadget, synth_reduction,
)
from qhf.verify import (
    check_clifford, check_identity_full, check_identity_initialized, detect_non_affine,
    detect_superposition, verify_reduction,
)

from conftest import random_circuit, random_formula, random_roles


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail
    return emit


def tables(n):
    size = 2 ** n
    return [format(t, f"0{size}b") for t in range(2 ** size)]


def sat(phi):
    return sum(evaluate(phi, "".join(b)) for b in itertools.product("01", repeat=phi.n_vars))


def helper_values(c: Circuit, keep: int) -> dict[int, int]:
    return {w: int(r is Role.ANC1) for w, r in enumerate(c.layout.roles) if w >= keep}


def test_criterion_1_balanced_reductions_are_identity(report):
    checked, bad = 0, []
    for n in (1, 2, 3):
        for t in tables(n):
            if t.count("1") != 2 ** (n - 1):
                continue
            c, _ = synth_reduction(from_truth_table(t))
            # support guard: raises if any intermediate state outgrows 4 * 2^n
            for ab in ("00", "01", "10", "11"):
                run_circuit(c, ab, max_support=4 * 2 ** n)
            v = check_identity_initialized(c)
            checked += 1
            if not (v.holds and v.global_phase == ONE):
                bad.append(t)
    report(1, checked == 2 + 6 + 70 and not bad,
           f"{checked} balanced functions (n=1..3) give identity with phase +1; failures {bad}")


def test_criterion_2_unbalanced_reductions_meet_promise(report):
    checked, bad = 0, []
    for n in (1, 2, 3):
        for t in tables(n):
            if t.count("1") == 2 ** (n - 1):
                continue
            rep = verify_reduction(from_truth_table(t), max_support=16 * 4 ** n)
            checked += 1
            if rep.identity_initialized.holds or not rep.superposition.holds or not rep.non_affine.holds:
                bad.append(t)
    report(2, checked == 2 + 10 + 186 and not bad,
           f"{checked} unbalanced functions: identity fails, superposition and non-affine hold; "
           f"failures {bad}")


def test_criterion_3_beta_amplitude(report):
    n = 3
    ones = "1" * n
    key = bits_to_key(ones)
    bad = []
    for t in tables(n):
        phi = from_truth_table(t)
        want = dyadic(2 ** n - 2 * sat(phi), n)
        analytic = predicted_dj_state(phi, ones)
        c = synth_dj(phi)
        simulated = run_circuit(c, ones).restrict(range(n), helper_values(c, n))
        if not (analytic[key] == simulated[key] == want and analytic == simulated):
            bad.append(t)
    report(3, not bad, f"<1^n|DJ|1^n> = (2^n - 2 #SAT)/2^n for all 256 tables at n=3; failures {bad}")


def test_criterion_4_gadget_state_formula(report):
    checked, bad = 0, []
    for n in (1, 2):
        for phi in all_formulas(n):
            for kind, g in (("CX", 2), ("TOF", 3)):
                c = synth_q_gadget(phi, kind)
                for x in itertools.product("01", repeat=g):
                    x = "".join(x)
                    got = run_circuit(c, x).restrict(range(n + g), helper_values(c, n + g))
                    checked += 1
                    if got != predicted_gadget_state(phi, kind, x):
                        bad.append((str(phi), kind, x))
    report(4, checked == (4 + 16) * (4 + 8) and not bad,
           f"{checked} gadget runs match the analytic state; failures {bad[:5]}")


def test_criterion_5_dj_involution(report):
    rng = random.Random(5)
    bad, widths = [], []
    for _ in range(20):
        phi = random_formula(rng, rng.randint(1, 3), 6)
        dj = synth_dj(phi)
        widths.append(dj.m)
        v = check_identity_full(compose(dj, dj))
        if not v.holds:
            bad.append(str(phi))
    report(5, not bad, f"DJ o DJ is the full identity for 20 seeded formulas "
                       f"(up to {max(widths)} qubits); failures {bad}")


def test_criterion_6_subspace_vs_full(report):
    phi = parse_formula("(x1 & !x2) | (!x1 & x2)")
    q = synth_q_gadget(phi, "CX")
    init = check_identity_initialized(q)
    full = check_identity_full(q)
    column = full.witness["column"] if full.witness else None
    report(6, init.holds and not full.holds,
           f"Q(CX, x1 xor x2) on {q.m} qubits: initialized identity {init.holds}, full identity "
           f"{full.holds}, failing column {column}")


def test_criterion_7_synthesis_oracles(report):
    problems = []
    for k in (3, 4, 5):
        m = 2 * k - 1
        gates = lower_mcx(range(k), k, range(k + 1, m))
        for x in range(2 ** (k + 1)):
            fire = all(x >> q & 1 for q in range(k))
            if apply_gates(SparseState.basis(m, x), gates) != SparseState.basis(m, x ^ (fire << k)):
                problems.append(f"mcx k={k} x={x}")
    oracles = 0
    for n in (1, 2, 3):
        for phi in all_formulas(n):
            c = synth_phase_oracle(phi).circuit
            for x in itertools.product("01", repeat=n):
                x = "".join(x)
                sign = -ONE if evaluate(phi, x) else ONE
                oracles += 1
                if run_circuit(c, x) != SparseState(c.m, {c.layout.initial_key(x): sign}):
                    problems.append(f"oracle {phi} x={x}")
    lowered = 0
    for phi in all_formulas(2):
        c, _ = synth_reduction(phi)
        low = lower_strict_h_tof(c)
        if {g.kind for g in low.gates} - {GateKind.H, GateKind.TOF}:
            problems.append(f"lowering left other gates for {phi}")
        for ab in ("00", "01", "10", "11"):
            lowered += 1
            if run_circuit(low, ab).restrict(range(c.m), helper_values(low, c.m)) != run_circuit(c, ab):
                problems.append(f"lowering {phi} ab={ab}")
    report(7, not problems,
           f"lower_mcx k=3..5 exhaustive, {oracles} oracle inputs clean with correct phase, "
           f"{lowered} lowered reduction runs unchanged; problems {problems[:5]}")


def test_criterion_8_detector_soundness(report):
    rng = random.Random(8)
    affine_hits = superposition_hits = 0
    for _ in range(100):
        m = rng.randint(1, 6)
        kinds = ["h", "s", "x", "cx"] if m >= 2 else ["h", "s", "x"]
        c = random_circuit(rng, m, rng.randint(0, 30), kinds)
        affine_hits += detect_non_affine(Circuit(random_roles(rng, m), c.gates)).holds
    for _ in range(100):
        m = rng.randint(3, 6)
        c = random_circuit(rng, m, rng.randint(0, 30), ["x", "cx", "ccx"])
        superposition_hits += detect_superposition(Circuit(random_roles(rng, m), c.gates)).holds
    report(8, affine_hits == 0 and superposition_hits == 0,
           f"non-affine fired on {affine_hits}/100 Clifford circuits, "
           f"superposition fired on {superposition_hits}/100 permutation circuits")


def test_criterion_9_gate_taxonomy(report):
    table = {
        "H": (H(0), {SUPERPOSITION, CLIFFORD}),
        "CX": (CX(0, 1), {CLIFFORD, ENTANGLEMENT}),
        "T": (T(0), {NON_CLIFFORD}),
        "TOF": (TOF(0, 1, 2), {NON_CLIFFORD, ENTANGLEMENT}),
    }
    taxonomy_ok = all(classify_gate(g) == want for g, want in table.values())
    rng = random.Random(9)
    accepted = 0
    for _ in range(50):
        m = rng.randint(1, 5)
        kinds = ["h", "s", "sdg", "x", "cx"] if m >= 2 else ["h", "s", "sdg", "x"]
        accepted += check_clifford(random_circuit(rng, m, rng.randint(0, 30), kinds)).holds
    rejected = {"T": 0, "TOF": 0}
    for name in rejected:
        for _ in range(20):
            m = rng.randint(3, 5)
            gates = list(random_circuit(rng, m, rng.randint(0, 20), ["h", "s", "x", "cx"]).gates)
            a, b, t = rng.sample(range(m), 3)
            gates.insert(rng.randint(0, len(gates)), T(t) if name == "T" else TOF(a, b, t))
            rejected[name] += not check_clifford(Circuit.on_wires(m, gates)).holds
    report(9, taxonomy_ok and accepted == 50 and rejected == {"T": 20, "TOF": 20},
           f"taxonomy {'matches' if taxonomy_ok else 'differs'}, {accepted}/50 Clifford accepted, "
           f"{rejected['T']}/20 one-T and {rejected['TOF']}/20 one-TOF rejected")


def test_criterion_10_serialization(report):
    rng = random.Random(10)
    bad = []
    for i in range(20):
        m = rng.randint(1, 8)
        kinds = ["h", "x", "s", "sdg", "t", "tdg"] + (["cx"] if m >= 2 else []) + (["ccx"] if m >= 3 else [])
        c = Circuit(random_roles(rng, m), random_circuit(rng, m, rng.randint(0, 40), kinds).gates)
        want = list(unitary_columns(c))
        for fmt in ("native", "qasm2"):
            back = deserialize(serialize(c, fmt), fmt)
            if back.layout.roles != c.layout.roles or list(unitary_columns(back)) != want:
                bad.append((i, fmt))
    report(10, not bad, f"native and qasm2 round-trips exact on 20 seeded circuits; failures {bad}")
