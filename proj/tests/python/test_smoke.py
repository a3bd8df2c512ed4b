"""Smoke tests for the python module against numpy references."""

import json
import math

import numpy as np
import pytest

import lowrank_lab as lab


def random_tensor(shape, seed):
    return np.random.default_rng(seed).standard_normal(shape)


def test_unfold_matches_numpy_reshape():
    u = random_tensor((2, 3, 4), 0)
    # t = {1}: rows indexed by mode 1, columns by modes 2,3 in row-major order
    m = lab.unfold(u, [1])
    assert m.shape == (2, 12)
    assert np.allclose(m, u.reshape(2, 12))
    # t = {2}: mode 2 to the rows
    m2 = lab.unfold(u, [2])
    assert np.allclose(m2, np.transpose(u, (1, 0, 2)).reshape(3, 8))


def test_singular_values_parseval_and_rank():
    u = random_tensor((3, 4, 2), 1)
    sigma = np.asarray(lab.singular_values(u, [1, 3]))
    assert sigma.shape == (4,)  # D = min(3*2, 4)
    assert np.all(np.diff(sigma) <= 1e-14)
    assert math.isclose(np.sum(sigma**2), np.sum(u**2), rel_tol=1e-10)

    x, y = np.arange(1.0, 5.0), np.ones(3)
    assert lab.t_rank(np.outer(x, y), [1]) == 1
    assert lab.t_rank(np.zeros((2, 2)), [1]) == 0


def test_tail_error_and_truncate():
    u = random_tensor((4, 4), 2)
    sigma = np.asarray(lab.singular_values(u, [1]))
    tau2 = lab.tail_error(u, [1], 2)
    assert math.isclose(tau2, math.sqrt(np.sum(sigma[2:] ** 2)), rel_tol=1e-12)
    trunc = lab.truncate(u, [1], 2)
    assert math.isclose(np.linalg.norm(u - trunc), tau2, rel_tol=1e-10)


def test_entropy_and_overlap():
    u = np.zeros((2, 2))
    u[0, 0] = u[1, 1] = 1.0 / math.sqrt(2.0)
    paper, conventional = lab.von_neumann_entropy(u, [1])
    assert math.isclose(conventional, math.log(2.0), rel_tol=1e-12)
    assert math.isclose(paper, -conventional, rel_tol=1e-12)
    assert math.isclose(lab.overlap_theta(u, [1]), 1.0 / math.sqrt(2.0), rel_tol=1e-12)


def test_bounds():
    assert lab.contraction_rate(3.0) == 0.5
    assert math.isclose(lab.tail_bound_algebraic(9, 0.5, 3.0, 1.0, 1.0), 0.5, rel_tol=1e-12)
    assert math.isclose(lab.tail_bound_full(9, 0.5, 3.0, 1.0, 1.0), 0.25, rel_tol=1e-12)
    assert lab.commuting_rank_bound(2, 1, 1) == 5
    assert lab.overlap_bound_exponent(0.3, 3.0) == 1
    assert math.isclose(lab.overlap_lower_bound(0.3, 3.0) ** 2, 1.0 / 6.0, rel_tol=1e-15)
    with pytest.raises(ValueError):
        lab.contraction_rate(0.5)


def test_operator_and_solve():
    a = np.diag([1.0, 2.0, 3.0, 4.0])
    op = lab.build_model("lyapunov", [4, 4], A=a)
    assert op.dims == [4, 4]
    assert op.n_terms == 2
    assert op.t_rank([1]) == 2
    gamma, big_gamma = op.spectral_interval()
    assert math.isclose(gamma, 2.0, rel_tol=1e-12)
    assert math.isclose(big_gamma, 8.0, rel_tol=1e-12)

    b = random_tensor((4, 4), 3)
    u = lab.dense_solve(op, b)
    assert np.allclose(op.apply(u), b)
    # diagonal A: entrywise division oracle
    expected = b / (np.arange(1.0, 5.0)[:, None] + np.arange(1.0, 5.0)[None, :])
    assert np.allclose(u, expected)


def test_richardson_run_contracts():
    a = np.diag([1.0, 2.0, 3.0, 4.0])
    op = lab.build_model("lyapunov", [4, 4], A=a)
    rng = np.random.default_rng(4)
    b = np.outer(rng.standard_normal(4), rng.standard_normal(4))
    b /= np.linalg.norm(b)
    run = lab.richardson_run(op, b, np.zeros((4, 4)), 10, [[1]])
    assert math.isclose(run["q"], 0.6, rel_tol=1e-12)
    errors = run["errors"]
    for n in range(1, len(errors)):
        if errors[n - 1] > 1e-13:
            assert errors[n] <= (run["q"] + 1e-10) * errors[n - 1]
    for n, ranks in enumerate(run["ranks"]):
        assert ranks[0] <= run["rank_bounds"][n][0]


def test_eigen_run_and_probe():
    op = lab.build_model(
        "laplace_plus_nn",
        [3, 3],
        A_factors=[np.diag([1.0, 2.7, 3.0]), np.diag([1.05, 2.75, 3.0])],
        Gamma_B=0.2,
        Gamma_C=0.2,
        seed=2311,
    )
    lambda1, lambda2, top, u_star = lab.smallest_pair(op)
    assert lambda1 < lambda2 <= top
    u0 = lab.rank_one_start(u_star, lab.truncate(u_star, [1], 1), [1])
    run = lab.shifted_richardson_run(op, u0, 8, [[1]])
    overlap = run["overlap"]
    assert max(abs(o - overlap[0]) for o in overlap) <= 1e-10
    via_theta, naive, constructive = lab.pi1_upper_bounds(u_star, [1])
    assert constructive <= via_theta <= naive + 1e-12


def test_run_experiment_roundtrip(tmp_path):
    config = {
        "name": "smoke_lyapunov",
        "mode": "linear",
        "seed": 11,
        "n_steps": 8,
        "splittings": [[1]],
        "operator": {"kind": "lyapunov", "dims": [4, 4], "A": {"diag": [1.0, 2.0, 3.0, 4.0]}},
        "rhs": {"rank_one_seeded": True, "normalize": True},
    }
    report = lab.run_experiment(config, out_dir=str(tmp_path))
    assert report["pass"] is True
    assert (tmp_path / "smoke_lyapunov.json").exists()
    assert (tmp_path / "smoke_lyapunov_trace.csv").exists()
    on_disk = json.loads((tmp_path / "smoke_lyapunov.json").read_text())
    assert on_disk["pass"] is True
    with pytest.raises(ValueError):
        lab.run_experiment({"mode": "linear"})  # operator missing
