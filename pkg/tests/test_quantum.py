"""Named-register statevectors, measurements, and distance measures."""

from __future__ import annotations

import numpy as np
import pytest

from cdslab.boolfn import named_fn
from cdslab.errors import BudgetError, ValidationError
from cdslab.quantum import (DensityOp, H, I2, PAULI_EIGENSTATES, PureState,
                            U_BELL, X, Y, Z, build_vf, choi, decoupling_gap,
                            epr_pairs, fidelity, pad_average, pauli_string,
                            phased_pad, random_qubit, sqrtm_psd,
                            state_jsonable, trace_distance, trace_norm)

RNG = np.random.default_rng(20260813)


def _rand_state(regs, rng=RNG):
    n = sum(k for _, k in regs)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return PureState(tuple(regs), v / np.linalg.norm(v))


def _embed(U, axes, n):
    """Independent embedding of a k-qubit operator into n qubits.

    Built entry by entry from basis-state bit surgery; qubit q holds bit
    n-1-q of the index (first register = most significant bits).
    """
    k = len(axes)
    F = np.zeros((1 << n, 1 << n), dtype=complex)
    for i in range(1 << n):
        in_bits = [(i >> (n - 1 - q)) & 1 for q in range(n)]
        col_sub = 0
        for a in axes:
            col_sub = (col_sub << 1) | in_bits[a]
        for sub_out in range(1 << k):
            out_bits = list(in_bits)
            for t, a in enumerate(axes):
                out_bits[a] = (sub_out >> (k - 1 - t)) & 1
            j = 0
            for b in out_bits:
                j = (j << 1) | b
            F[j, i] += U[sub_out, col_sub]
    return F


def test_apply_single_qubit_matches_embedding_oracle():
    regs = (("a", 1), ("b", 2), ("c", 1))
    state = _rand_state(regs)
    for target, axis in [("a", 0), (("b", 0), 1), (("b", 1), 2), ("c", 3)]:
        got = state.apply(H, [target]).vec
        want = _embed(H, [axis], 4) @ state.vec
        assert np.allclose(got, want, atol=1e-12)


def test_apply_two_qubit_nonadjacent():
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                    dtype=complex)
    state = _rand_state((("a", 1), ("b", 1), ("c", 1)))
    got = state.apply(cnot, ["a", "c"]).vec
    want = _embed(cnot, [0, 2], 3) @ state.vec
    assert np.allclose(got, want, atol=1e-12)
    # reversed target order must transpose the embedding
    got_rev = state.apply(cnot, ["c", "a"]).vec
    want_rev = _embed(cnot, [2, 0], 3) @ state.vec
    assert np.allclose(got_rev, want_rev, atol=1e-12)


def test_apply_preserves_norm_and_validates():
    state = _rand_state((("a", 2),))
    assert abs(np.linalg.norm(state.apply(U_BELL, ["a"]).vec) - 1) < 1e-12
    with pytest.raises(ValidationError):
        state.apply(H, ["a"])  # shape mismatch
    with pytest.raises(ValidationError):
        state.apply(U_BELL, [("a", 0), ("a", 0)])  # repeated qubit


def test_computational_and_tensor():
    s = PureState.computational((("u", 2), ("v", 1)), {"u": 2, "v": 1})
    assert s.vec[0b101] == 1.0 and np.count_nonzero(s.vec) == 1
    t = PureState.from_qubit("w", [1, 1])
    joint = s.tensor(t)
    assert joint.regs == (("u", 2), ("v", 1), ("w", 1))
    assert abs(np.linalg.norm(joint.vec) - 1) < 1e-12


def test_measure_born_rule():
    state = PureState.from_qubit("q", [3, 4j])  # normalizes to (0.6, 0.8i)
    out = state.measure(["q"])
    assert [(o, round(p, 12)) for (o, p, _) in out] == [(0, 0.36), (1, 0.64)]
    for _, _, post in out:
        assert post.regs == ()


def test_measure_partial_entangled():
    state = epr_pairs([("l", "r")])
    out = state.measure(["l"])
    assert len(out) == 2
    for outcome, p, post in out:
        assert abs(p - 0.5) < 1e-12
        assert post.regs == (("r", 1),)
        want = np.zeros(2); want[outcome] = 1
        assert np.allclose(post.vec, want)
    assert abs(sum(p for _, p, _ in out) - 1) < 1e-12


def test_measure_total_probability_random_states():
    for _ in range(5):
        state = _rand_state((("a", 2), ("b", 1)))
        out = state.measure(["b", "a"])
        assert abs(sum(p for _, p, _ in out) - 1) < 1e-10
        for _, _, post in out:
            assert abs(np.linalg.norm(post.vec) - 1) < 1e-10


def test_teleport_correction_convention():
    # measuring (message, EPR-left) leaves X^a Z^b |psi> on the far end
    psi = random_qubit(7).rename({"q": "Q"})
    state = psi.tensor(epr_pairs([("A", "B")]))
    branches = state.bell_measure("Q", "A")
    assert len(branches) == 4
    for (a, b), p, post in branches:
        assert abs(p - 0.25) < 1e-12
        want = np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) @ psi.vec
        overlap = abs(np.vdot(want, post.vec))
        assert abs(overlap - 1) < 1e-12, (a, b)


def test_bell_measure_agrees_with_rotated_computational_measure():
    # second route: undo U_BELL, then measure in the computational basis
    state = _rand_state((("p", 1), ("q", 1), ("rest", 1)))
    direct = {o: p for (o, p, _) in state.bell_measure("p", "q")}
    rotated = state.apply(U_BELL.conj().T, ["p", "q"])
    alt = {divmod(o, 2): p for (o, p, _) in rotated.measure(["p", "q"])}
    for key in set(direct) | set(alt):
        assert abs(direct.get(key, 0) - alt.get(key, 0)) < 1e-12


def test_phased_pads_are_the_pauli_group_representatives():
    assert np.array_equal(phased_pad(0, 0), I2)
    assert np.array_equal(phased_pad(1, 0), X)
    assert np.array_equal(phased_pad(0, 1), Z)
    assert np.allclose(phased_pad(1, 1), Y)


def test_u_bell_columns():
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    for s1, s2 in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        col = U_BELL[:, 2 * s1 + s2]
        want = np.kron(I2, phased_pad(s1, s2)) @ phi
        assert np.allclose(col, want, atol=1e-12)
    assert np.allclose(U_BELL @ U_BELL.conj().T, np.eye(4), atol=1e-12)
    assert np.allclose(U_BELL[:, 3], np.array([0, 1j, -1j, 0]) / np.sqrt(2))


def test_pauli_string():
    assert np.allclose(pauli_string("XZ"), np.kron(X, Z))
    with pytest.raises(ValidationError):
        pauli_string("Q")


def test_pad_average_is_depolarizing():
    for seed in range(5):
        psi = random_qubit(seed).vec
        rho = np.outer(psi, psi.conj())
        assert np.max(np.abs(pad_average(rho) - I2 / 2)) < 1e-12
    herm = np.array([[0.3, 0.1 + 0.2j], [0.1 - 0.2j, 0.7]])
    assert np.max(np.abs(pad_average(herm) - I2 / 2)) < 1e-12


def test_fidelity_and_trace_distance_known_values():
    zero = np.array([[1, 0], [0, 0]], dtype=complex)
    one = np.array([[0, 0], [0, 1]], dtype=complex)
    plus = np.full((2, 2), 0.5, dtype=complex)
    assert abs(fidelity(zero, one)) < 1e-12
    assert abs(trace_distance(zero, one) - 1) < 1e-12
    assert abs(fidelity(zero, plus) - 1 / np.sqrt(2)) < 1e-12
    assert abs(trace_distance(zero, plus) - 1 / np.sqrt(2)) < 1e-12
    assert abs(fidelity(plus, plus) - 1) < 1e-12
    mixed = I2 / 2
    assert abs(fidelity(zero, mixed) - 1 / np.sqrt(2)) < 1e-12


def _rand_density(rng):
    # full-rank by construction; Wishart-style
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def test_fidelity_distance_inequalities():
    # 1 - F <= D <= sqrt(1 - F^2) on mixed pairs
    rng = np.random.default_rng(99)
    for _ in range(30):
        rho, sigma = _rand_density(rng), _rand_density(rng)
        F = fidelity(rho, sigma)
        D = trace_distance(rho, sigma)
        assert 1 - F <= D + 1e-9
        assert D <= np.sqrt(max(0.0, 1 - F * F)) + 1e-9


def test_sqrtm_psd():
    rng = np.random.default_rng(5)
    rho = _rand_density(rng)
    root = sqrtm_psd(rho)
    assert np.allclose(root @ root, rho, atol=1e-12)
    assert np.allclose(root, root.conj().T, atol=1e-12)


def test_ptrace_two_routes_agree():
    # PureState.ptrace and DensityOp.ptrace are separate implementations
    state = _rand_state((("a", 1), ("b", 2), ("c", 1)))
    for keep in (["a"], ["b"], ["a", "c"], ["c", "b"]):
        direct = state.ptrace(keep)
        via_density = state.density().ptrace(keep)
        assert direct.regs == via_density.regs
        assert np.allclose(direct.mat, via_density.mat, atol=1e-12)
        assert abs(np.trace(direct.mat) - 1) < 1e-12


def test_ptrace_epr_marginal():
    half = epr_pairs([("l", "r")]).ptrace(["l"])
    assert np.allclose(half.mat, I2 / 2, atol=1e-12)


def test_build_vf_isometry():
    f = named_fn("and", n=1)
    V = build_vf(f)
    assert np.allclose(V.conj().T @ V, np.eye(4), atol=1e-12)
    state = PureState.computational((("in", 2),), {"in": 0b11})
    out = state.apply_isometry(V, ["in"], ("f", 1))
    assert out.regs == (("in", 2), ("f", 1))
    branches = out.measure(["f"])
    assert [(o, round(p, 12)) for (o, p, _) in branches] == [(1, 1.0)]


def test_choi_identity_channel():
    J = choi(lambda E: E, 2)
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    assert np.allclose(J, np.outer(phi, phi.conj()), atol=1e-12)
    assert abs(decoupling_gap(J, 2, 2) - 0.75) < 1e-12


def test_choi_depolarizing_channel_decouples():
    J = choi(lambda E: np.trace(E) * I2 / 2, 2)
    assert np.allclose(J, np.eye(4) / 4, atol=1e-12)
    assert decoupling_gap(J, 2, 2) < 1e-12


def test_trace_norm():
    assert abs(trace_norm(Z) - 2) < 1e-12
    assert abs(trace_norm(np.zeros((2, 2)))) < 1e-12


def test_qubit_budget():
    with pytest.raises(BudgetError):
        epr_pairs([(f"l{i}", f"r{i}") for i in range(8)])  # 16 qubits
    state = _rand_state((("a", 7), ("b", 7)))
    V = np.zeros((4, 2), dtype=complex)
    V[0, 0] = V[1, 1] = 1.0
    with pytest.raises(BudgetError):
        state.apply_isometry(V, [("a", 0)], ("extra", 1))


def test_register_name_rules():
    with pytest.raises(ValidationError):
        PureState((("a", 1), ("a", 1)), np.array([1, 0, 0, 0], dtype=complex))
    with pytest.raises(Exception):
        PureState.computational((("a", 1),), {"a": 2})
    renamed = epr_pairs([("l", "r")]).rename({"l": "left"})
    assert renamed.regs == (("left", 1), ("r", 1))


def test_pauli_eigenstates_are_eigenstates():
    ops = {"z": Z, "x": X, "y": Y}
    for name, vec in PAULI_EIGENSTATES:
        sign = 1 if name[1] == "+" else -1
        assert np.allclose(ops[name[0]] @ vec, sign * vec, atol=1e-12)


def test_state_jsonable_deterministic():
    state = PureState.from_qubit("q", [1, -1])
    a = state_jsonable(state)
    b = state_jsonable(PureState.from_qubit("q", [1, -1]))
    assert a == b
    flat = [v for amp in a["amplitudes"] for v in amp]
    assert all(not (v == 0 and str(v)[0] == "-") for v in flat)  # no -0.0


def test_random_qubit_seeded():
    assert np.allclose(random_qubit(3).vec, random_qubit(3).vec)
    assert not np.allclose(random_qubit(3).vec, random_qubit(4).vec)
