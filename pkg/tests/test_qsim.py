import json

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from faircut.errors import BudgetError, ParameterError
from faircut.graphs import Graph, build_named, complete_graph, cycle_graph, path_graph, petersen_graph, subgraph
from faircut.qsim import (
    MULTI,
    STANDARD,
    apply_x_rotation,
    build_dqaoa_spec,
    build_spec,
    closed_form_k1_kn,
    closed_form_k1_kn_opt,
    closed_form_k1_triangle_free_regular,
    closed_form_k1_triangle_free_regular_opt,
    edge_probabilities,
    gradient_reverse,
    gradient_reverse_batch,
    marginal_probabilities,
    mixer_matrix,
    plus_state,
    qubit_budget,
    run_circuit,
    sample_bitstrings,
    zz_expectations,
)

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def op_on(n, ops):
    """Dense operator with ``ops[u]`` on qubit ``u``; qubit 0 is the least significant bit."""
    out = np.ones((1, 1), dtype=complex)
    for u in reversed(range(n)):
        out = np.kron(out, ops.get(u, I2))
    return out


def dense_circuit(spec, params):
    """Oracle: explicit matrix exponentials of the layer Hamiltonians."""
    n = spec.n_qubits
    dim = 1 << n
    psi = np.full(dim, dim**-0.5, dtype=complex)
    for l in range(spec.k):
        H = np.zeros((dim, dim), dtype=complex)
        for (u, v, w), s in zip(spec.augmented.edges, spec.gamma_slots(l)):
            H += params[s] * w * (np.eye(dim) - op_on(n, {u: Z, v: Z})) / 2
        psi = sla.expm(-1j * H) @ psi
        M = np.zeros((dim, dim), dtype=complex)
        for u, s in enumerate(spec.beta_slots(l)):
            M += params[s] * op_on(n, {u: X})
        psi = sla.expm(-1j * M) @ psi
    return psi


def dense_zz(psi, n, edges):
    return np.array([np.real(np.vdot(psi, op_on(n, {u: Z, v: Z}) @ psi)) for u, v in edges])


def test_dqaoa_rules():
    p5 = build_dqaoa_spec(path_graph(5), 1)
    assert p5.ancillas == (5,)
    hub_edges = [e for e in p5.augmented.edge_pairs if 5 in e]
    assert len(hub_edges) == 1 and path_graph(5).degrees[hub_edges[0][0]] == 2
    two_k2 = Graph(4, ((0, 1), (2, 3)))
    s = build_dqaoa_spec(two_k2, 1)
    assert s.ancillas == (4, 5)
    assert set(s.augmented.edge_pairs) == {(0, 1), (2, 3), (0, 4), (2, 4), (4, 5)}
    assert s.augmented.is_connected()
    k4 = build_dqaoa_spec(complete_graph(4), 2)
    assert k4.ancillas == () and k4.mode == MULTI and k4.augmented.edge_pairs == complete_graph(4).edge_pairs
    # cycles on 4+ vertices are augmented, the triangle is not
    assert build_dqaoa_spec(cycle_graph(4), 1).ancillas == (4,)
    assert build_dqaoa_spec(cycle_graph(3), 1).ancillas == ()
    with pytest.raises(ParameterError):
        build_dqaoa_spec(complete_graph(4), 0)


def test_slot_layout():
    g = petersen_graph()
    assert build_spec(g, 3).n_params == 6
    s = build_dqaoa_spec(path_graph(5), 2)
    assert s.n_params == 2 * (s.augmented.n_edges + s.augmented.n)
    # objective edges exclude the ancilla edge
    assert s.base.n_edges == 4 and s.n_terms == 5
    json.dumps(s.to_dict())
    with pytest.raises(ParameterError):
        run_circuit(s, np.zeros(3))


def test_identity_circuit():
    spec = build_spec(petersen_graph(), 2, MULTI)
    psi = run_circuit(spec, np.zeros(spec.n_params))
    np.testing.assert_allclose(psi, plus_state(10), atol=1e-15)
    np.testing.assert_allclose(zz_expectations(psi, petersen_graph()), 0.0, atol=1e-14)


def test_k2_full_cut():
    # phase exp(-i gamma cut(x)): the edge is fully cut at gamma = pi/2, beta = pi/8
    spec = build_spec(complete_graph(2), 1)
    psi = run_circuit(spec, [np.pi / 2, np.pi / 8])
    assert zz_expectations(psi, complete_graph(2))[0] == pytest.approx(-1.0, abs=1e-12)
    np.testing.assert_allclose(psi, dense_circuit(spec, [np.pi / 2, np.pi / 8]), atol=1e-12)


@pytest.mark.parametrize("g,k,mode", [(complete_graph(3), 2, STANDARD), (cycle_graph(4), 2, MULTI),
                                      (Graph(4, ((0, 1), (2, 3, 2.0))), 2, MULTI), (path_graph(5), 1, MULTI)])
def test_matches_dense_oracle(g, k, mode, rng):
    for spec in (build_spec(g, k, mode), build_dqaoa_spec(g, k, mode)):
        th = rng.uniform(-np.pi, np.pi, spec.n_params)
        ref = dense_circuit(spec, th)
        psi = run_circuit(spec, th)
        np.testing.assert_allclose(psi, ref, atol=1e-10)
        np.testing.assert_allclose(zz_expectations(psi, g), dense_zz(ref, spec.n_qubits, g.edge_pairs), atol=1e-10)


def test_zz_basis_states():
    psi = np.zeros(16, dtype=complex)
    psi[0b0011] = 1.0
    k4 = complete_graph(4)
    zz = dict(zip(k4.edge_pairs, zz_expectations(psi, k4)))
    assert zz[(1, 2)] == -1.0 and zz[(0, 1)] == 1.0


def test_kn_depth_one_closed_form(rng):
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 11))
        gamma, beta = rng.uniform(-np.pi, np.pi, 2)
        zz = zz_expectations(run_circuit(build_spec(complete_graph(n), 1), [gamma, beta]), complete_graph(n))
        worst = max(worst, np.abs(zz - closed_form_k1_kn(n, gamma, beta)).max())
    assert worst <= 1e-9


@pytest.mark.parametrize("g,delta", [(petersen_graph(), 3), (cycle_graph(5), 2), (build_named("clebsch"), 5)])
def test_triangle_free_closed_form(g, delta, rng):
    for _ in range(20):
        gamma, beta = rng.uniform(-np.pi, np.pi, 2)
        p = edge_probabilities(build_spec(g, 1), [gamma, beta])
        np.testing.assert_allclose(p, closed_form_k1_triangle_free_regular(delta, gamma, beta), atol=1e-9)


def test_triangle_free_optimum():
    assert closed_form_k1_triangle_free_regular_opt(1)[0] == pytest.approx(1.0)
    assert closed_form_k1_triangle_free_regular(3, 0.0, 0.3) == 0.5
    value, gamma, beta = closed_form_k1_triangle_free_regular_opt(3)
    # brute grid on the closed form agrees with the stationary point
    gs = np.linspace(0, np.pi, 20001)
    grid = 0.5 + 0.5 * np.max(np.sin(gs) * np.cos(gs) ** 2)
    assert value == pytest.approx(grid, abs=1e-8)
    # and the simulator reaches it on Petersen
    p = edge_probabilities(build_spec(petersen_graph(), 1), [gamma, beta])
    assert p.min() == pytest.approx(value, abs=1e-12)
    assert value == pytest.approx(0.6925, abs=1e-4)


def test_kn_closed_form_optimum():
    assert closed_form_k1_kn(5, 0.0, 0.0) == 0.0
    q3 = closed_form_k1_kn_opt(3)[0]
    assert q3 == pytest.approx(2 / 3, abs=1e-9)
    q4, gamma, beta = closed_form_k1_kn_opt(4)
    assert q4 == pytest.approx(0.6162526832, abs=1e-9)
    assert q4 > np.arccos(-1 / 3) / np.pi
    # value reached by the simulator at the reported angles
    p = edge_probabilities(build_spec(complete_graph(4), 1), [gamma, beta])
    assert p.min() == pytest.approx(q4, abs=1e-9)
    # independent oracle: brute 2-d grid on the closed form
    G, B = np.meshgrid(np.linspace(0, np.pi, 1201), np.linspace(0, np.pi / 2, 601), indexing="ij")
    assert (1 - closed_form_k1_kn(4, G, B)).max() / 2 <= q4 + 1e-9
    assert (1 - closed_form_k1_kn(4, G, B)).max() / 2 >= q4 - 1e-4


def test_sampling_examples():
    psi = np.zeros(16, dtype=complex)
    psi[0b0101] = 1.0
    assert sample_bitstrings(psi, 10, seed=0).tolist() == [0b0101] * 10
    plus = plus_state(2)
    shots = sample_bitstrings(plus, 40_000, seed=1)
    canon = np.where(shots & 1, shots ^ 0b11, shots)
    freq = np.mean(canon == 0)
    assert abs(freq - 0.5) <= 3 * np.sqrt(0.25 / 40_000)
    bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    assert set(sample_bitstrings(bell, 500, seed=2).tolist()) <= {0b00, 0b11}
    with pytest.raises(ParameterError):
        sample_bitstrings(bell, 0, seed=0)


def test_sampling_drops_ancillas(rng):
    spec = build_dqaoa_spec(path_graph(5), 2)
    psi = run_circuit(spec, rng.uniform(0, 2 * np.pi, spec.n_params))
    shots = sample_bitstrings(psi, 2000, seed=3, n_keep=5)
    assert shots.max() < 32
    marg = marginal_probabilities(psi, 5)
    assert marg.sum() == pytest.approx(1.0)


def test_gradient_matches_central_differences(rng):
    cases = [(complete_graph(2), 1, STANDARD), (complete_graph(4), 2, STANDARD), (petersen_graph(), 2, STANDARD),
             (cycle_graph(5), 2, MULTI), (path_graph(5), 2, "dqaoa"), (Graph(4, ((0, 1), (2, 3))), 2, "dqaoa")]
    worst = 0.0
    for i in range(50):
        g, k, mode = cases[i % len(cases)]
        spec = build_dqaoa_spec(g, k) if mode == "dqaoa" else build_spec(g, k, mode)
        th = rng.uniform(-np.pi, np.pi, spec.n_params)
        w = rng.normal(size=g.n_edges)
        grad = gradient_reverse(spec, th, w)
        h = 1e-5
        fd = np.empty_like(grad)
        for j in range(th.size):
            e = np.zeros_like(th)
            e[j] = h
            fp = w @ zz_expectations(run_circuit(spec, th + e), g)
            fm = w @ zz_expectations(run_circuit(spec, th - e), g)
            fd[j] = (fp - fm) / (2 * h)
        worst = max(worst, np.abs(grad - fd).max() / max(np.abs(fd).max(), 1e-8))
    assert worst <= 1e-5


def test_gradient_examples():
    g = complete_graph(2)
    spec = build_spec(g, 1)
    grad = gradient_reverse(spec, [np.pi / 8, np.pi / 8], [1.0])
    h = 1e-6
    f = lambda ga: zz_expectations(run_circuit(spec, [ga, np.pi / 8]), g)[0]
    assert grad[0] == pytest.approx((f(np.pi / 8 + h) - f(np.pi / 8 - h)) / (2 * h), abs=1e-6)
    pet = build_spec(petersen_graph(), 2, MULTI)
    g0 = gradient_reverse(pet, np.zeros(pet.n_params), np.ones(15))
    betas = np.concatenate([pet.beta_slots(l) for l in range(2)])
    np.testing.assert_allclose(g0[betas], 0.0, atol=1e-14)
    np.testing.assert_array_equal(gradient_reverse(pet, np.ones(pet.n_params), np.zeros(15)), 0.0)


def test_batch_gradient_rows(rng):
    spec = build_dqaoa_spec(path_graph(5), 3)
    th = rng.uniform(0, 2 * np.pi, spec.n_params)
    W = rng.normal(size=(4, 4))
    batch = gradient_reverse_batch(spec, th, W)
    for row, w in zip(batch, W):
        np.testing.assert_allclose(row, gradient_reverse(spec, th, w), atol=1e-12)


@given(st.integers(0, 10**6), st.sampled_from(["std", "multi", "dqaoa"]))
def test_z2_symmetry_and_norm(seed, mode):
    rng = np.random.default_rng(seed)
    graphs = [complete_graph(4), cycle_graph(5), path_graph(4), Graph(4, ((0, 1), (2, 3))), petersen_graph()]
    g = graphs[seed % len(graphs)]
    k = int(rng.integers(1, 4))
    spec = build_dqaoa_spec(g, k) if mode == "dqaoa" else build_spec(g, k, mode)
    psi = run_circuit(spec, rng.uniform(-np.pi, np.pi, spec.n_params))
    assert abs(np.linalg.norm(psi) - 1.0) <= 1e-10
    probs = np.abs(psi) ** 2
    full = (1 << spec.n_qubits) - 1
    np.testing.assert_allclose(probs, probs[np.arange(probs.size) ^ full], atol=1e-10)


def test_partial_trace_monotonicity(rng):
    g = petersen_graph()
    for _ in range(10):
        spec = build_spec(g, 2, MULTI)
        psi = run_circuit(spec, rng.uniform(0, 2 * np.pi, spec.n_params))
        keep = sorted(rng.choice(10, size=6, replace=False).tolist())
        h, index = subgraph(g, keep_vertices=keep)
        if h.n_edges == 0:
            continue
        # reduced distribution on the kept qubits, relabelled to 0..5
        probs = np.abs(psi) ** 2
        idx = np.arange(probs.size)
        sub_idx = sum(((idx >> v) & 1) << index[v] for v in keep)
        reduced = np.bincount(sub_idx, weights=probs, minlength=1 << h.n)
        ph = (1 - zz_expectations(np.sqrt(reduced), h)) / 2
        pg = (1 - zz_expectations(psi, g)) / 2
        assert pg.min() <= ph.min() + 1e-12


def test_mixer_paths_agree(rng):
    betas = rng.uniform(-np.pi, np.pi, 5)
    psi = rng.normal(size=32) + 1j * rng.normal(size=32)
    loop = psi.copy()
    for u in range(5):
        apply_x_rotation(loop, 5, u, betas[u])
    np.testing.assert_allclose(mixer_matrix(betas) @ psi, loop, atol=1e-12)


def test_budget_env(monkeypatch):
    assert qubit_budget() == 22
    monkeypatch.setenv("FAIRCUT_BUDGET_QUBITS", "8")
    assert qubit_budget() == 8
    with pytest.raises(BudgetError):
        build_spec(petersen_graph(), 1)
    with pytest.raises(BudgetError):
        build_dqaoa_spec(path_graph(8), 1)


def test_pad_preserves_state(rng):
    spec = build_spec(petersen_graph(), 1)
    th = rng.uniform(0, 2 * np.pi, 2)
    deeper = spec.with_layers(3)
    np.testing.assert_allclose(run_circuit(deeper, spec.pad(th, 3)), run_circuit(spec, th), atol=1e-13)
    with pytest.raises(ParameterError):
        deeper.pad(np.zeros(6), 1)
