import json

import numpy as np
import pytest

from plapnet import (
    SchemaError,
    UnknownVertex,
    ValidationError,
    boundary_boundary_edges,
    degree,
    load_network,
)

from conftest import path_doc, random_problem_doc


def test_load_minimal_path():
    net = load_network(path_doc())
    assert len(net.interior) == 1
    assert len(net.boundary) == 2
    assert net.n == 3


def test_load_accepts_json_text():
    net = load_network(json.dumps(path_doc()))
    assert net.n == 3


def test_asymmetric_weights_rejected():
    doc = path_doc()
    doc["edges"].append({"a": "z1", "b": "x", "w": 2.0})
    with pytest.raises(ValidationError, match="symmetr"):
        load_network(doc)


def test_duplicate_edge_same_weight_ok():
    doc = path_doc()
    doc["edges"].append({"a": "z1", "b": "x", "w": 1.0})
    net = load_network(doc)
    assert len(net.edge_w) == 2


def test_pure_interior_rejected():
    doc = {
        "vertices": [{"name": f"x{i}", "role": "interior"} for i in range(4)],
        "edges": [
            {"a": "x0", "b": "x1", "w": 1.0},
            {"a": "x1", "b": "x2", "w": 1.0},
            {"a": "x2", "b": "x3", "w": 1.0},
            {"a": "x3", "b": "x0", "w": 1.0},
        ],
    }
    with pytest.raises(ValidationError, match="boundary"):
        load_network(doc)


def test_empty_interior_rejected():
    doc = {
        "vertices": [
            {"name": "z1", "role": "boundary", "mu": 1.0, "sigma": 0.0},
            {"name": "z2", "role": "boundary", "mu": 1.0, "sigma": 0.0},
        ],
        "edges": [{"a": "z1", "b": "z2", "w": 1.0}],
    }
    with pytest.raises(ValidationError, match="interior"):
        load_network(doc)


def test_loop_rejected():
    doc = path_doc()
    doc["edges"].append({"a": "x", "b": "x", "w": 1.0})
    with pytest.raises(ValidationError, match="loop"):
        load_network(doc)


def test_nonpositive_weight_rejected():
    for w in (0.0, -1.0):
        doc = path_doc(w1=w)
        with pytest.raises(ValidationError, match="positive"):
            load_network(doc)


def test_unknown_edge_vertex_is_schema_error():
    doc = path_doc()
    doc["edges"].append({"a": "x", "b": "nope", "w": 1.0})
    with pytest.raises(SchemaError):
        load_network(doc)


def test_missing_mu_sigma_is_schema_error():
    doc = path_doc()
    del doc["vertices"][1]["mu"]
    with pytest.raises(SchemaError):
        load_network(doc)


def test_mu_on_interior_is_schema_error():
    doc = path_doc()
    doc["vertices"][0]["mu"] = 1.0
    with pytest.raises(SchemaError):
        load_network(doc)


def test_bad_mu_sigma_values_rejected():
    with pytest.raises(ValidationError, match="nonnegative"):
        load_network(path_doc(mu1=-1.0, sigma1=1.0))
    with pytest.raises(ValidationError, match="positive"):
        load_network(path_doc(mu1=0.0, sigma1=0.0))


def test_boundary_without_interior_neighbor_rejected():
    doc = {
        "vertices": [
            {"name": "x", "role": "interior"},
            {"name": "z1", "role": "boundary", "mu": 1.0, "sigma": 0.0},
            {"name": "z2", "role": "boundary", "mu": 1.0, "sigma": 0.0},
        ],
        "edges": [{"a": "x", "b": "z1", "w": 1.0}, {"a": "z1", "b": "z2", "w": 1.0}],
    }
    with pytest.raises(ValidationError, match="interior neighbor"):
        load_network(doc)


def test_disconnected_rejected():
    doc = {
        "vertices": [
            {"name": "x1", "role": "interior"},
            {"name": "x2", "role": "interior"},
            {"name": "z1", "role": "boundary", "mu": 1.0, "sigma": 0.0},
            {"name": "z2", "role": "boundary", "mu": 1.0, "sigma": 0.0},
        ],
        "edges": [{"a": "x1", "b": "z1", "w": 1.0}, {"a": "x2", "b": "z2", "w": 1.0}],
    }
    with pytest.raises(ValidationError, match="connected"):
        load_network(doc)


def test_degree_path_and_star():
    net = load_network(path_doc())
    assert degree(net, net.index("x")) == 2.0
    assert degree(net, net.index("z1")) == 1.0

    star = {
        "vertices": [
            {"name": "c", "role": "interior"},
            {"name": "z1", "role": "boundary", "mu": 1.0, "sigma": 0.0},
            {"name": "z2", "role": "boundary", "mu": 1.0, "sigma": 0.0},
            {"name": "z3", "role": "boundary", "mu": 1.0, "sigma": 0.0},
        ],
        "edges": [{"a": "c", "b": f"z{k}", "w": 0.5} for k in (1, 2, 3)],
    }
    snet = load_network(star)
    assert degree(snet, snet.index("c")) == 1.5


def test_degree_unknown_vertex():
    net = load_network(path_doc())
    with pytest.raises(UnknownVertex):
        degree(net, 99)
    with pytest.raises(UnknownVertex):
        net.index("ghost")


def test_degree_matches_bruteforce_exactly():
    rng = np.random.default_rng(7)
    for _ in range(30):
        net = load_network(random_problem_doc(rng, allow_bb=True))
        w_full = np.zeros((net.n, net.n))
        for i, j, w in zip(net.edge_i, net.edge_j, net.edge_w):
            w_full[i, j] = w_full[j, i] = w
        for x in range(net.n):
            # Same nonzero terms in the same (ascending-id) order, so the
            # float sums agree bitwise.
            assert degree(net, x) == float(sum(w_full[x]))


def test_boundary_boundary_edges():
    assert boundary_boundary_edges(load_network(path_doc())) == []

    tri = {
        "vertices": [
            {"name": "x", "role": "interior"},
            {"name": "z1", "role": "boundary", "mu": 1.0, "sigma": 0.0},
            {"name": "z2", "role": "boundary", "mu": 1.0, "sigma": 0.0},
        ],
        "edges": [
            {"a": "x", "b": "z1", "w": 1.0},
            {"a": "x", "b": "z2", "w": 1.0},
            {"a": "z1", "b": "z2", "w": 1.0},
        ],
    }
    net = load_network(tri)
    edges = boundary_boundary_edges(net)
    assert edges == [(net.index("z1"), net.index("z2"))]

    rng = np.random.default_rng(3)
    for _ in range(10):
        net = load_network(random_problem_doc(rng, allow_bb=False))
        assert boundary_boundary_edges(net) == []


def test_roundtrip_bit_exact():
    rng = np.random.default_rng(11)
    for _ in range(20):
        net = load_network(random_problem_doc(rng, allow_bb=True))
        # Through JSON text and back: weights must survive bit for bit.
        reloaded = load_network(json.dumps(net.to_document()))
        assert reloaded.names == net.names
        assert np.array_equal(reloaded.edge_w, net.edge_w)
        assert np.array_equal(reloaded.edge_i, net.edge_i)
        assert np.array_equal(reloaded.edge_j, net.edge_j)
        assert np.array_equal(reloaded.mu, net.mu)
        assert np.array_equal(reloaded.sigma, net.sigma)
