"""Shared builders for test graphs and randomized problem instances."""

from __future__ import annotations

import numpy as np

from plapnet import BoundaryCondition, load_network


def path_doc(mu1=0.0, sigma1=1.0, mu2=None, sigma2=None, w1=1.0, w2=1.0):
    """Three-vertex path z1 - x - z2 with one interior vertex."""
    if mu2 is None:
        mu2 = mu1
    if sigma2 is None:
        sigma2 = sigma1
    return {
        "vertices": [
            {"name": "x", "role": "interior"},
            {"name": "z1", "role": "boundary", "mu": mu1, "sigma": sigma1},
            {"name": "z2", "role": "boundary", "mu": mu2, "sigma": sigma2},
        ],
        "edges": [
            {"a": "x", "b": "z1", "w": w1},
            {"a": "x", "b": "z2", "w": w2},
        ],
    }


def two_interior_path_doc(mu=0.0, sigma=1.0):
    """Four-vertex path z1 - x1 - x2 - z2 with two interior vertices."""
    return {
        "vertices": [
            {"name": "x1", "role": "interior"},
            {"name": "x2", "role": "interior"},
            {"name": "z1", "role": "boundary", "mu": mu, "sigma": sigma},
            {"name": "z2", "role": "boundary", "mu": mu, "sigma": sigma},
        ],
        "edges": [
            {"a": "z1", "b": "x1", "w": 1.0},
            {"a": "x1", "b": "x2", "w": 1.0},
            {"a": "x2", "b": "z2", "w": 1.0},
        ],
    }


def load_problem(doc):
    net = load_network(doc)
    return net, BoundaryCondition.from_network(net)


def random_problem_doc(
    rng,
    n_interior=(1, 8),
    n_boundary=(1, 4),
    bc_mode="mixed",
    allow_bb=False,
    extra_edge_prob=0.3,
    weight_range=(0.2, 2.0),
):
    """Random connected problem: interior tree core, boundary attachments.

    The interior subgraph is a random tree plus optional extra edges, so it
    is always connected; every boundary vertex attaches to at least one
    interior vertex.  Boundary-boundary edges appear only with
    ``allow_bb=True``.  bc_mode: dirichlet | neumann | robin | mixed.
    """
    ni = int(rng.integers(n_interior[0], n_interior[1] + 1))
    nb = int(rng.integers(n_boundary[0], n_boundary[1] + 1))
    wlo, whi = weight_range

    def w():
        return float(rng.uniform(wlo, whi))

    vertices = [{"name": f"x{i}", "role": "interior"} for i in range(ni)]
    edges = []
    for k in range(1, ni):
        edges.append({"a": f"x{int(rng.integers(0, k))}", "b": f"x{k}", "w": w()})
    for i in range(ni):
        for j in range(i + 1, ni):
            if not any({e["a"], e["b"]} == {f"x{i}", f"x{j}"} for e in edges):
                if rng.random() < extra_edge_prob / max(ni, 1):
                    edges.append({"a": f"x{i}", "b": f"x{j}", "w": w()})

    def coeffs():
        mode = bc_mode
        if mode == "mixed":
            mode = rng.choice(["dirichlet", "neumann", "robin"])
        if mode == "dirichlet":
            return 0.0, float(rng.uniform(0.5, 2.0))
        if mode == "neumann":
            return float(rng.uniform(0.5, 2.0)), 0.0
        return float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 2.0))

    for k in range(nb):
        mu, sigma = coeffs()
        vertices.append({"name": f"z{k}", "role": "boundary", "mu": mu, "sigma": sigma})
        targets = rng.choice(ni, size=int(rng.integers(1, min(3, ni) + 1)), replace=False)
        for t in np.atleast_1d(targets):
            edges.append({"a": f"z{k}", "b": f"x{int(t)}", "w": w()})
    if allow_bb and nb >= 2:
        for i in range(nb):
            for j in range(i + 1, nb):
                if rng.random() < 0.3:
                    edges.append({"a": f"z{i}", "b": f"z{j}", "w": w()})

    return {"vertices": vertices, "edges": edges}


def random_state(rng, net, lo=-2.0, hi=2.0):
    return rng.uniform(lo, hi, size=net.n)


def random_admissible(rng, net, bc, lo=0.1, hi=2.0):
    """Random nonnegative admissible state (zero on the pinned part)."""
    u = rng.uniform(lo, hi, size=net.n)
    u[bc.dirichlet_set] = 0.0
    return u
