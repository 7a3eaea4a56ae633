import json
import math

import numpy as np
import pytest
from scipy.linalg import expm

import graphdiff as gd


def two_cliques(size=5):
    edges = np.zeros((2 * size, 2 * size))
    for base in (0, size):
        for i in range(size):
            for j in range(i + 1, size):
                edges[base + i, base + j] = edges[base + j, base + i] = 1.0
    edges[size - 1, size] = edges[size, size - 1] = 1.0
    return gd.WeightedGraph(edges)


def test_sbm_cliques_and_laplacian():
    g = gd.generate_sbm([5, 5], p_intra=1.0, p_inter=0.0, seed=4)
    assert g.n_nodes == 10
    assert g.edge_count() == 20
    lap = gd.laplacian(g, weighted=False)
    assert np.all(lap.sum(axis=1) == 0.0)
    assert np.all(np.diag(lap) == 4.0)


def test_parse_edge_list_mean():
    g, records = gd.parse_edge_list("0 1 0.2\n1 0 0.6\n", symmetrize="mean")
    assert records == 2
    assert g.weights[0, 1] == pytest.approx(0.4)
    with pytest.raises(gd.GraphdiffError, match="line 2"):
        gd.parse_edge_list("0 1\n0 x\n")


def test_diffusion_matches_scipy_expm():
    rng = np.random.default_rng(3)
    g = gd.generate_sbm([6, 7], p_intra=0.8, p_inter=0.1, seed=11)
    part = gd.CommunityPartition.from_sizes([6, 7])
    u0 = rng.random(g.n_nodes)
    p = gd.DiffusionProblem(g, part, u0=u0, T=0.7)
    y = rng.uniform(-1, 1, size=p.dimension)
    c = gd.assemble_c(p, y)
    m = gd.assemble_m(c, g.weights)
    expected = expm(0.7 * m) @ u0
    for path in ("eigen", "rk4"):
        u = gd.solve_diffusion(p, y, path=path)
        assert np.linalg.norm(u - expected) <= 1e-8 * np.linalg.norm(expected)
        assert abs(u.sum() - u0.sum()) <= 1e-10 * np.abs(u0).sum()


def test_two_node_closed_form():
    g = gd.WeightedGraph(np.array([[0.0, 1.0], [1.0, 0.0]]))
    part = gd.CommunityPartition([0, 0], 1)
    p = gd.DiffusionProblem(g, part, u0=np.array([1.0, 0.0]), T=1.0)
    u = gd.solve_diffusion(p, np.array([1.0]))
    e = math.exp(-2.0)
    assert u == pytest.approx([(1 + e) / 2, (1 - e) / 2], abs=1e-14)


def test_index_sets_and_orthonormality():
    assert len(gd.total_degree_set(3, 8)) == 165
    assert gd.total_degree_cardinality(10, 5) == 3003
    assert len(gd.hyperbolic_cross_set(6, 42)) == 3119
    s = gd.total_degree_set(2, 6)
    assert s.is_lower()
    x, w = np.polynomial.legendre.leggauss(10)
    w = w / 2.0
    pts = np.array([[a, b] for a in x for b in x])
    wts = np.array([wa * wb for wa in w for wb in w])
    a = gd.eval_basis("legendre", s, pts)
    gram = a.T @ (wts[:, None] * a)
    assert np.max(np.abs(gram - np.eye(len(s)))) < 1e-12


def test_qcbp_matches_cvxpy():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(0)
    psi = rng.standard_normal((12, 30)) / math.sqrt(12)
    c = np.zeros(30)
    c[[2, 17, 25]] = [1.0, -0.5, 0.8]
    b = psi @ c
    eta = 0.05
    w = rng.uniform(0.5, 2.0, 30)
    rep = gd.solve_qcbp(psi, b, eta, weights=w, max_iter=20000, tol=1e-10)
    z = cp.Variable(30)
    prob = cp.Problem(cp.Minimize(cp.norm1(cp.multiply(w, z))), [cp.norm(psi @ z - b, 2) <= eta])
    prob.solve()
    assert rep["objective"] == pytest.approx(prob.value, rel=1e-4)
    assert rep["residual_norm"] <= eta * (1 + 1e-6) + 1e-8


def test_least_squares_refuses_underdetermined():
    psi = np.ones((2, 3))
    with pytest.raises(gd.GraphdiffError):
        gd.solve_least_squares(psi, np.ones(2))


def test_fit_and_roundtrip():
    g = gd.generate_sbm([4, 4], p_intra=1.0, p_inter=0.2, seed=2)
    p = gd.DiffusionProblem(g, gd.CommunityPartition.from_sizes([4, 4]))
    s = gd.total_degree_set(3, 4)
    model = gd.fit_surrogate(p, 1, "legendre", s, 80, "ls", seed=9)
    pts = gd.sample_measure("legendre", 3, 50, 5)
    truth = gd.solution_values(p, 1, pts)
    assert gd.rmse(model.evaluate(pts), truth) < 1e-2
    again = gd.SurrogateModel.from_json(model.to_json())
    assert np.array_equal(again.evaluate(pts), model.evaluate(pts))


def test_fluid_and_geometric_stats():
    g = two_cliques()
    part = gd.fluid_communities(g, 2, seed=5)
    a = part.assignment
    assert len(set(a[:5])) == 1 and len(set(a[5:])) == 1 and a[0] != a[5]
    mean, std = gd.geometric_stats([1e-2, 1e-4])
    assert mean == pytest.approx(1e-3)
    assert std == pytest.approx(10.0)


def test_run_experiment_tiny():
    cfg = {
        "experiment_id": "py_smoke",
        "graph": {"sbm": {"community_sizes": [3, 3], "p_intra": 1.0, "p_inter": 0.3}},
        "index_set": {"family": "td", "order": 3},
        "methods": ["ls", "qcbp"],
        "m_values": [10, 40],
        "repeats": 2,
        "test_size": 50,
    }
    rows = gd.run_experiment(json.dumps(cfg))
    assert len(rows) == 4
    by = {(r["method"], r["m"]): r for r in rows}
    assert by[("ls", 10)]["status"] == "skipped"
    assert by[("qcbp", 40)]["status"] == "ok"
    assert by[("ls", 40)]["rmse_geomean"] > 0
