"""Weighted-network data model: interior/boundary split, symmetric weights.

Graph documents are human-writable JSON::

    {"vertices": [{"name": "x",  "role": "interior"},
                  {"name": "z1", "role": "boundary", "mu": 1.0, "sigma": 0.0}],
     "edges":    [{"a": "x", "b": "z1", "w": 1.0}]}

Vertex names are free-form strings; the loader assigns dense integer ids in
file order and keeps the name table for reports.  Boundary vertices carry the
mixed-condition coefficients mu and sigma (both >= 0, mu + sigma > 0).  Edge
weights are kept once per unordered pair, so symmetry is structural rather
than checked after the fact.  A loaded network is immutable and safe to share
across concurrent tasks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import SchemaError, UnknownVertex, ValidationError

__all__ = [
    "Network",
    "load_network",
    "load_network_file",
    "degree",
    "boundary_boundary_edges",
]


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable weighted graph with an interior/boundary vertex split.

    Vertices are dense integer ids ``0 .. n-1``.  ``interior`` and
    ``boundary`` are sorted, disjoint id arrays covering all vertices.
    Edges are unordered pairs ``edge_i[k] < edge_j[k]`` with weight
    ``edge_w[k] > 0``.  ``mu``/``sigma`` hold the boundary coefficients per
    vertex (zero-filled on interior vertices).
    """

    names: tuple[str, ...]
    interior: np.ndarray
    boundary: np.ndarray
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_w: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray

    @property
    def n(self) -> int:
        return len(self.names)

    @cached_property
    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[self.interior] = True
        return mask

    @cached_property
    def adjacency(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        """Per-vertex ``(neighbor ids, weights)``, neighbors sorted by id."""
        nbrs: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for i, j, w in zip(self.edge_i, self.edge_j, self.edge_w):
            nbrs[i].append((int(j), float(w)))
            nbrs[j].append((int(i), float(w)))
        out = []
        for lst in nbrs:
            lst.sort()
            ids = np.array([a for a, _ in lst], dtype=np.intp)
            ws = np.array([w for _, w in lst], dtype=np.float64)
            out.append((ids, ws))
        return tuple(out)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Per-vertex weighted degree, summed in ascending neighbor order."""
        return np.array([float(ws.sum()) for _, ws in self.adjacency])

    @property
    def omega0(self) -> float:
        """Maximum weighted degree over interior vertices."""
        return float(self.degrees[self.interior].max())

    @property
    def max_degree(self) -> float:
        """Maximum weighted degree over all vertices."""
        return float(self.degrees.max())

    def check_vertex(self, x: int) -> int:
        x = int(x)
        if not 0 <= x < self.n:
            raise UnknownVertex(f"vertex id {x} not in 0..{self.n - 1}")
        return x

    def index(self, name: str) -> int:
        try:
            return self._name_index[name]
        except KeyError:
            raise UnknownVertex(f"unknown vertex name {name!r}") from None

    @cached_property
    def _name_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def interior_neighbors(self, z: int) -> tuple[np.ndarray, np.ndarray]:
        """Interior neighbors of a vertex and the connecting weights."""
        ids, ws = self.adjacency[self.check_vertex(z)]
        keep = self.interior_mask[ids]
        return ids[keep], ws[keep]

    def to_document(self) -> dict:
        """Serialize back to the JSON document schema (round-trip exact)."""
        vertices = []
        for i, name in enumerate(self.names):
            if self.interior_mask[i]:
                vertices.append({"name": name, "role": "interior"})
            else:
                vertices.append(
                    {
                        "name": name,
                        "role": "boundary",
                        "mu": float(self.mu[i]),
                        "sigma": float(self.sigma[i]),
                    }
                )
        edges = [
            {"a": self.names[i], "b": self.names[j], "w": float(w)}
            for i, j, w in zip(self.edge_i, self.edge_j, self.edge_w)
        ]
        return {"vertices": vertices, "edges": edges}


def degree(net: Network, x: int) -> float:
    """Weighted degree of ``x``: the sum of weights to all its neighbors."""
    return float(net.degrees[net.check_vertex(x)])


def boundary_boundary_edges(net: Network) -> list[tuple[int, int]]:
    """Edges with both endpoints on the boundary.

    An empty list means the summation-by-parts bookkeeping that pairs the
    operator with the boundary flux is exact; callers that rely on it check
    this flag first.
    """
    mask = net.interior_mask
    return [
        (int(i), int(j))
        for i, j in zip(net.edge_i, net.edge_j)
        if not mask[i] and not mask[j]
    ]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def load_network(document) -> Network:
    """Parse and validate a graph document (dict or JSON text).

    Rejects malformed documents with :class:`SchemaError` and invariant
    violations (asymmetric weights, loops, nonpositive weights, empty
    interior or boundary, boundary vertices without an interior neighbor,
    disconnected graphs, bad mu/sigma) with :class:`ValidationError`.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise SchemaError("document root must be a JSON object")
    for key in ("vertices", "edges"):
        if key not in document or not isinstance(document[key], list):
            raise SchemaError(f"document must contain a {key!r} list")

    names: list[str] = []
    roles: list[str] = []
    mu_raw: list[float] = []
    sigma_raw: list[float] = []
    for entry in document["vertices"]:
        if not isinstance(entry, dict) or "name" not in entry or "role" not in entry:
            raise SchemaError("each vertex needs 'name' and 'role'")
        name = entry["name"]
        role = entry["role"]
        if not isinstance(name, str):
            raise SchemaError("vertex names must be strings")
        if role not in ("interior", "boundary"):
            raise SchemaError(f"vertex {name!r}: role must be interior|boundary")
        if name in names:
            raise SchemaError(f"duplicate vertex name {name!r}")
        if role == "boundary":
            if "mu" not in entry or "sigma" not in entry:
                raise SchemaError(f"boundary vertex {name!r} needs mu and sigma")
            try:
                m, s = float(entry["mu"]), float(entry["sigma"])
            except (TypeError, ValueError):
                raise SchemaError(f"vertex {name!r}: mu/sigma must be numbers") from None
        else:
            if "mu" in entry or "sigma" in entry:
                raise SchemaError(f"interior vertex {name!r} must not carry mu/sigma")
            m = s = 0.0
        names.append(name)
        roles.append(role)
        mu_raw.append(m)
        sigma_raw.append(s)

    n = len(names)
    _require(n > 0, "empty vertex list")
    index = {name: i for i, name in enumerate(names)}

    weights: dict[tuple[int, int], float] = {}
    for entry in document["edges"]:
        if not isinstance(entry, dict) or not {"a", "b", "w"} <= set(entry):
            raise SchemaError("each edge needs 'a', 'b' and 'w'")
        for end in ("a", "b"):
            if entry[end] not in index:
                raise SchemaError(f"edge references unknown vertex {entry[end]!r}")
        a, b = index[entry["a"]], index[entry["b"]]
        try:
            w = float(entry["w"])
        except (TypeError, ValueError):
            raise SchemaError("edge weights must be numbers") from None
        _require(a != b, f"loop edge at vertex {names[a]!r} (weights vanish on the diagonal)")
        _require(w > 0, f"edge {names[a]!r}-{names[b]!r}: weight must be positive")
        key = (min(a, b), max(a, b))
        if key in weights:
            # Two directed declarations of one pair must agree (symmetry).
            _require(
                weights[key] == w,
                f"edge {names[key[0]]!r}-{names[key[1]]!r}: asymmetric weights "
                f"{weights[key]} vs {w} (symmetry)",
            )
        else:
            weights[key] = w

    interior = np.array([i for i, r in enumerate(roles) if r == "interior"], dtype=np.intp)
    boundary = np.array([i for i, r in enumerate(roles) if r == "boundary"], dtype=np.intp)
    _require(len(interior) > 0, "empty interior: at least one interior vertex required")
    _require(len(boundary) > 0, "empty boundary: the boundary condition needs some boundary vertex")

    for z in boundary:
        m, s = mu_raw[z], sigma_raw[z]
        _require(m >= 0 and s >= 0, f"vertex {names[z]!r}: mu and sigma must be nonnegative")
        _require(m + s > 0, f"vertex {names[z]!r}: mu + sigma must be positive")

    pairs = sorted(weights)
    edge_i = np.array([a for a, _ in pairs], dtype=np.intp)
    edge_j = np.array([b for _, b in pairs], dtype=np.intp)
    edge_w = np.array([weights[k] for k in pairs], dtype=np.float64)

    net = Network(
        names=tuple(names),
        interior=interior,
        boundary=boundary,
        edge_i=edge_i,
        edge_j=edge_j,
        edge_w=edge_w,
        mu=np.array(mu_raw, dtype=np.float64),
        sigma=np.array(sigma_raw, dtype=np.float64),
    )

    for z in boundary:
        ids, _ = net.adjacency[z]
        _require(
            bool(net.interior_mask[ids].any()),
            f"boundary vertex {names[z]!r} has no interior neighbor",
        )

    # Connectivity of the whole graph (interior + boundary).
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for u in net.adjacency[v][0]:
            if not seen[u]:
                seen[u] = True
                stack.append(int(u))
    _require(bool(seen.all()), "graph is not connected")

    return net


def load_network_file(path) -> Network:
    """Load a graph document from a JSON file."""
    return load_network(Path(path).read_text())
