import itertools
import random
from fractions import Fraction

import pytest

from qhf.circuit import CircuitError, GateKind, Role, lower_strict_h_tof
from qhf.exactsim import SparseState, apply_gates, bits_to_key, run_circuit
from qhf.formula import (
    all_formulas, constant_false, constant_true, count_sat, evaluate, parse_formula,
)
from qhf.ring import ONE, dyadic
from qhf.synth import (
    lower_mcx, oracle_scratch_size, predicted_dj_state, predicted_gadget_state, synth_dj,
    synth_phase_oracle, synth_q_gadget, synth_reduction,
)

from conftest import random_formula


def test_oracle_scratch_counts_internal_nodes():
    assert oracle_scratch_size(parse_formula("x1")) == 0
    assert oracle_scratch_size(parse_formula("!(x1 & x2) | x3")) == 3


@pytest.mark.parametrize("n", [1, 2])
def test_phase_oracle_all_functions(n):
    for phi in all_formulas(n):
        frag = synth_phase_oracle(phi)
        c = frag.circuit
        for x in itertools.product("01", repeat=n):
            x = "".join(x)
            out = run_circuit(c, x)
            sign = -ONE if evaluate(phi, x) else ONE
            assert out == SparseState(c.m, {c.layout.initial_key(x): sign})


def test_oracle_fragment_spans():
    frag = synth_phase_oracle(parse_formula("x1 & !x2"))
    assert frag.data_wires == [0, 1]
    assert frag.kickback_wire == 2
    assert frag.scratch_wires == [3, 4]
    assert frag.circuit.layout.roles[2] is Role.ANC1
    assert synth_phase_oracle(parse_formula("x1")).scratch_wires == []


def test_oracle_handles_repeated_operands():
    for text in ("x1 & x1", "x1 | x1", "!x1 | !x1 & x2"):
        phi = parse_formula(text)
        c = synth_phase_oracle(phi).circuit
        for x in ("00", "01", "10", "11")[: 2 ** phi.n_vars]:
            x = x[: phi.n_vars]
            amp = run_circuit(c, x)[c.layout.initial_key(x)]
            assert amp == (-ONE if evaluate(phi, x) else ONE)


@pytest.mark.parametrize("k", [3, 4, 5])
def test_lower_mcx_brute_force(k):
    controls = list(range(k))
    target = k
    scratch = list(range(k + 1, 2 * k - 1))
    gates = lower_mcx(controls, target, scratch)
    assert len(gates) == 2 * (k - 2) + 1
    assert all(g.kind is GateKind.TOF for g in gates)
    m = 2 * k - 1
    for x in range(2 ** (k + 1)):
        out = apply_gates(SparseState.basis(m, x), gates)
        fire = all(x >> q & 1 for q in controls)
        assert out == SparseState.basis(m, x ^ (fire << target))


def test_lower_mcx_errors():
    with pytest.raises(CircuitError):
        lower_mcx([0, 1, 2, 3], 4, [5])
    with pytest.raises(CircuitError):
        lower_mcx([0, 1], 2, [])


def test_dj_examples():
    c = synth_dj(parse_formula("x1 & x2"))
    out = run_circuit(c, "11")
    data = out.restrict([0, 1], fixed={2: 1, 3: 0})
    assert data == predicted_dj_state(parse_formula("x1 & x2"), "11")
    half = dyadic(1, 1)
    assert {k: v for k, v in data.items()} == {0: -half, 1: half, 2: half, 3: half}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_predicted_dj_beta(n):
    ones = "1" * n
    key = bits_to_key(ones)
    for phi in all_formulas(n):
        s = predicted_dj_state(phi, ones)
        assert s.norm_sqr() == ONE
        sat = count_sat(phi)
        assert Fraction(complex(s[key]).real).limit_denominator(2 ** n) == sat.beta


def test_predicted_dj_constant_false():
    s = predicted_dj_state(constant_false(2), "10")
    assert s == SparseState.basis(2, "10")


def test_predicted_dj_bad_input():
    with pytest.raises(ValueError):
        predicted_dj_state(parse_formula("x1 & x2"), "1")


def _gadget_restricted(phi, kind, x, lower):
    c = synth_q_gadget(phi, kind, lower)
    n, g = phi.n_vars, len(x)
    keep = list(range(n + g))
    fixed = {w: int(r is Role.ANC1) for w, r in enumerate(c.layout.roles) if w >= n + g}
    return run_circuit(c, x).restrict(keep, fixed)


@pytest.mark.parametrize("text", ["x1", "x1 & x2", "x1 | !x1", "(x1 & !x2) | (!x1 & x2)"])
@pytest.mark.parametrize("kind", ["CX", "TOF"])
def test_gadget_matches_analytic_state(text, kind):
    phi = parse_formula(text)
    g = 2 if kind == "CX" else 3
    for x in itertools.product("01", repeat=g):
        x = "".join(x)
        want = predicted_gadget_state(phi, kind, x)
        for lower in (True, False):
            assert _gadget_restricted(phi, kind, x, lower) == want


def test_gadget_balanced_is_identity_on_register():
    phi = parse_formula("vars 2 x2")
    c = synth_q_gadget(phi, "TOF")
    for x in ("110", "111", "010"):
        assert run_circuit(c, x) == SparseState.basis(c.m, c.layout.initial_key(x))


def test_gadget_constant_true_applies_g():
    # beta = -1: only the G-branch survives; the two DJ signs cancel
    phi = constant_true(1)
    state = predicted_gadget_state(phi, "CX", "10")
    assert state == SparseState(3, {bits_to_key("111"): ONE})
    assert _gadget_restricted(phi, "CX", "10", True) == state


def test_gadget_rejects_unknown_gate():
    with pytest.raises(ValueError):
        synth_q_gadget(parse_formula("x1"), "SWAP")


def test_reduction_layout_shape():
    phi = parse_formula("x1 & x2")
    c, lay = synth_reduction(phi)
    n = 2
    assert lay.r1 == (0, 1) and lay.w_h == 2 and lay.w_t1 == 3
    assert lay.r2 == (4, 5) and lay.abt == (6, 7, 8) and lay.kick == 9
    assert len(lay.scratch) == oracle_scratch_size(phi) and len(lay.mcx_scratch) == n
    assert c.layout.free_wires == [6, 7]
    assert c.m == 10 + len(lay.scratch) + n
    assert not any(g.kind is GateKind.MCX for g in c.gates)
    unlowered, lay2 = synth_reduction(phi, lower=False)
    assert any(g.kind is GateKind.MCX for g in unlowered.gates) and lay2.mcx_scratch == ()


def test_reduction_balanced_is_exact_identity():
    c, _ = synth_reduction(parse_formula("x1"))
    for ab in ("00", "01", "10", "11"):
        key = c.layout.initial_key(ab)
        assert run_circuit(c, ab) == SparseState(c.m, {key: ONE})


def test_reduction_unbalanced_leaves_basis():
    c, lay = synth_reduction(parse_formula("x1 & x2"))
    out = run_circuit(c, "11")
    assert len(out) > 1
    assert out.norm_sqr() == ONE
    for key in out:
        for w, v in lay.clean_wires.items():
            assert key >> w & 1 == v


@pytest.mark.parametrize("seed", range(6))
def test_synthesized_circuits_lower_cleanly(seed):
    rng = random.Random(seed)
    phi = random_formula(rng, rng.randint(1, 2), 3)
    for c in (synth_phase_oracle(phi).circuit, synth_dj(phi), synth_q_gadget(phi, "TOF"),
              synth_q_gadget(phi, "CX", lower=False)):
        low = lower_strict_h_tof(c)
        assert {g.kind for g in low.gates} <= {GateKind.H, GateKind.TOF}
        assert low.layout.roles[: c.m] == c.layout.roles
        for x in itertools.product("01", repeat=len(c.layout.free_wires)):
            x = "".join(x)
            got = run_circuit(low, x)
            fixed = {w: int(r is Role.ANC1) for w, r in enumerate(low.layout.roles) if w >= c.m}
            assert got.restrict(range(c.m), fixed) == run_circuit(c, x)
