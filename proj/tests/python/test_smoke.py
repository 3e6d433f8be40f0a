import itertools
import json
import math
import random

import pytest

import aptsp


def euclid(points, p, depot=None):
    m = [[math.dist(a, b) for b in points] for a in points]
    return aptsp.Instance(m, p, depot)


def brute_expected(inst, order):
    total = 0.0
    for mask in range(1 << inst.n):
        pr = 1.0
        for v in range(inst.n):
            pr *= inst.p[v] if mask >> v & 1 else 1 - inst.p[v]
        act = [v for v in order if mask >> v & 1]
        if len(act) >= 2:
            total += pr * sum(inst.dist(act[i], act[(i + 1) % len(act)]) for i in range(len(act)))
    return total


def random_instance(rng, n, depot=True):
    pts = [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n)]
    p = [rng.uniform(0.05, 0.95) for _ in range(n)]
    if depot:
        p[0] = 1.0
    return euclid(pts, p, 0 if depot else None)


def test_expected_cost_matches_python_enumeration():
    rng = random.Random(5)
    for n in range(2, 9):
        inst = random_instance(rng, n, depot=n % 2 == 0)
        order = list(range(n))
        rng.shuffle(order)
        ref = brute_expected(inst, order)
        assert aptsp.expected_cost(inst, order) == pytest.approx(ref, abs=1e-9)
        assert aptsp.expected_cost_bruteforce(inst, order) == pytest.approx(ref, abs=1e-9)


def test_monte_carlo_and_errors():
    inst = random_instance(random.Random(6), 7)
    order = list(range(7))
    value, err = aptsp.expected_cost_mc(inst, order, samples=200000, seed=1)
    assert abs(value - aptsp.expected_cost(inst, order)) <= 4 * err
    with pytest.raises(ValueError):
        aptsp.expected_cost(inst, [0, 1, 2])
    with pytest.raises(aptsp.InvalidInput):
        aptsp.Instance([[0, 1]], [1.0])
    assert aptsp.Instance([[0, 1], [1, 0]], [1.0, 2.0]).violations()


def test_solve_and_optimum():
    inst = random_instance(random.Random(7), 7)
    opt = aptsp.optimal_apriori_cost(inst)
    r = aptsp.solve(inst, algo="derand", tsp="christofides")
    assert sorted(r["tour"]) == list(range(7))
    assert r["expected_cost"] <= 6.5 * opt
    assert all(b <= a * (1 + 1e-9) for a, b in zip(r["estimator"], r["estimator"][1:]))
    low = aptsp.Instance([[0, 1, 1], [1, 0, 1], [1, 1, 0]], [0.1, 0.1, 0.1])
    assert aptsp.solve(low)["branch"] == "low-activity"


def test_tsp_against_permutations():
    inst = random_instance(random.Random(8), 7)
    best = min(
        sum(inst.dist(t[i], t[(i + 1) % 7]) for i in range(7))
        for t in ((0,) + q for q in itertools.permutations(range(1, 7)))
    )
    order, cost = aptsp.tsp(inst, list(range(7)))
    assert cost == pytest.approx(best)
    assert aptsp.tsp(inst, list(range(7)), "christofides")[1] <= 1.5 * best + 1e-9


def test_bounds_and_certificates(tmp_path):
    s = aptsp.sampling_bound(beta=0.2, N=20)
    assert abs(s["primal_value"] - s["dual_value"]) <= 1e-7
    assert s["ratio_bound"] == pytest.approx(1 / s["primal_value"])
    m = aptsp.mrr_bound(beta=0.2, N=20, a=3)
    assert m["ratio_bound"] > 1
    cert = tmp_path / "c.json"
    code, out = aptsp.cli_json("bound", "--family", "mrr", "--beta", "0.2", "--N", "20", "--a", "3",
                               "--cert-out", cert)
    assert code == 0
    bound = aptsp.verify_certificate(cert.read_text())
    assert out["ratio_bound"] <= bound < out["ratio_bound"] + 1e-3
    bad = json.loads(cert.read_text())
    bad["v"] = []
    with pytest.raises(ValueError):
        aptsp.verify_certificate(json.dumps(bad))
    with pytest.raises(aptsp.BudgetExceeded):
        aptsp.sampling_bound(N=10000)


def test_lower_bound_constants():
    for alpha, gamma, sigma, ratio in [(1.0, 1.623, 0.623, 2.655), (4 / 3, 1.383, 0.651, 2.914),
                                       (1.4999, 1.291, 0.663, 3.049)]:
        g, s, r = aptsp.lb_row(alpha)
        assert abs(g - gamma) <= 2e-3 and abs(s - sigma) <= 2e-3 and r > ratio
    assert 2.5414 < aptsp.mrr_lb_ratio(10**6, 10**6) < 2.5416


def test_cli_exit_codes():
    assert aptsp.cli_json("lb", "--alpha", "1", "--gamma", "3")[0] == 1
    assert aptsp.cli_json("bound", "--family", "mrr", "--a", "4", "--solve")[0] == 1
    code, doc = aptsp.cli_json("gen", "--family", "mrr-lb", "--n", "2", "--m", "2")
    assert code == 0
    inst = aptsp.Instance.from_json(json.dumps(doc))
    assert inst.n == 5 and inst.depot == 0 and not inst.violations()
