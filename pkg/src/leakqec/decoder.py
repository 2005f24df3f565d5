"""Minimum-weight perfect matching decoding and error-suppression fits.

Detection events live on (measure qubit, round) nodes plus two boundary
classes: spatial (chain ends) and temporal (first/last row).  Edges carry
the log-likelihood weight w = -ln(p / (1 - p)) of the pair process with
probability p and a correction label (the set of data qubits the process
flips).  Decoding pairs up flagged nodes (odd counts absorb into the
boundary) by exact minimum-weight perfect matching; node pairs without a
direct edge are connected through shortest paths.

The per-shot matching first drops every candidate pair whose path is at
least as expensive as routing both nodes to the boundary (this never
changes the optimal weight), decomposes the rest into connected clusters,
and runs exact blossom matching per cluster, which keeps desk-scale
decoding in the millisecond range.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, TextIO

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import shortest_path

from .code_sim import ChainLayout, NoiseParams, SyndromeDataset
from .correlation import DetectionMatrix, PijMatrix, pij_matrix

__all__ = [
    "MatchingGraph",
    "DecodeOutcome",
    "LogicalErrorResult",
    "LambdaFit",
    "build_graph",
    "build_graph_analytic",
    "build_graph_from_pij",
    "mwpm",
    "decode_dataset",
    "logical_error_rate",
    "eps_from_p_logical",
    "p_logical_from_eps",
    "subsample",
    "enumerate_placements",
    "lambda_fit",
    "export_decode_report_json",
    "export_lambda_scan_csv",
]

DEFAULT_P_MIN = 1e-4
_P_CLAMP = (1e-6, 0.5 - 1e-6)


def _weight(p: float) -> float:
    p = min(max(p, _P_CLAMP[0]), _P_CLAMP[1])
    return -math.log(p / (1.0 - p))


def _ensure_boundary_reachable(
    n_nodes: int,
    edges: dict[tuple[int, int], tuple[float, frozenset[int]]],
    boundary: dict[int, tuple[float, frozenset[int]]],
) -> None:
    """Attach maximum-weight boundary edges to nodes that cannot reach the
    boundary, so every detection node stays decodable (label-free, hence a
    conservative no-correction escape)."""
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen = set(boundary)
    stack = list(boundary)
    while stack:
        v = stack.pop()
        for u in adj.get(v, ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    w_max = _weight(_P_CLAMP[0])
    for v in range(n_nodes):
        if v not in seen:
            boundary[v] = (w_max, frozenset())


def _combine(*probs: float) -> float:
    """Probability of an odd number of independent flips."""
    total = 0.0
    for p in probs:
        total = total + p - 2.0 * total * p
    return total


@dataclass
class MatchingGraph:
    """Weighted error graph over detection nodes plus a boundary.

    Node (m, r) has flat index (r - 1) * n_measure + m with rounds 1..rows;
    when ``has_terminal`` the last row is the terminal syndrome from the
    final data readout.  Labels are frozensets of data-qubit order indices
    (0 .. n_data - 1 within this graph's chain).
    """

    layout: ChainLayout
    n_rounds: int
    has_terminal: bool
    edges: dict[tuple[int, int], tuple[float, frozenset[int]]]
    boundary_edges: dict[int, tuple[float, frozenset[int]]]
    _dist: np.ndarray = field(init=False, repr=False)
    _pred: np.ndarray = field(init=False, repr=False)
    _labels: dict[tuple[int, int], frozenset[int]] = field(init=False, repr=False)
    _path_cache: dict[tuple[int, int], frozenset[int]] = field(
        init=False, repr=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        if not self.edges and not self.boundary_edges:
            raise ValueError("empty matching graph: all entries were omitted")
        n = self.n_nodes
        w = np.full((n + 1, n + 1), np.inf)
        labels: dict[tuple[int, int], frozenset[int]] = {}
        for (a, b), (wt, lab) in self.edges.items():
            if wt < w[a, b]:
                w[a, b] = w[b, a] = wt
                labels[(a, b)] = labels[(b, a)] = lab
        for a, (wt, lab) in self.boundary_edges.items():
            if wt < w[a, n]:
                w[a, n] = w[n, a] = wt
                labels[(a, n)] = labels[(n, a)] = lab
        self._labels = labels
        dist, pred = shortest_path(
            w, method="auto", directed=False, return_predecessors=True
        )
        self._dist = dist
        self._pred = pred

    @property
    def rows(self) -> int:
        return self.n_rounds + (1 if self.has_terminal else 0)

    @property
    def n_nodes(self) -> int:
        return self.rows * self.layout.n_measure

    @property
    def boundary_index(self) -> int:
        return self.n_nodes

    def node_index(self, node: tuple[int, int]) -> int:
        m, r = node
        return (r - 1) * self.layout.n_measure + m

    def index_node(self, idx: int) -> tuple[int, int]:
        return idx % self.layout.n_measure, idx // self.layout.n_measure + 1

    def distance(self, a: int, b: int) -> float:
        return float(self._dist[a, b])

    def path_label(self, a: int, b: int) -> frozenset[int]:
        """XOR of edge labels along the shortest path from a to b (cached)."""
        key = (a, b) if a <= b else (b, a)
        cached = self._path_cache.get(key)
        if cached is not None:
            return cached
        label: frozenset[int] = frozenset()
        cur = b
        while cur != a:
            prev = int(self._pred[a, cur])
            if prev < 0:
                raise ValueError(f"node {cur} unreachable from {a}")
            label ^= self._labels[(prev, cur)]
            cur = prev
        self._path_cache[key] = label
        return label


def build_graph_analytic(
    layout: ChainLayout,
    n_rounds: int,
    noise: NoiseParams,
    include_terminal: bool = True,
    p_min: float = DEFAULT_P_MIN,
) -> MatchingGraph:
    """Error graph from the independent-process noise model.

    Data-qubit flips produce same-round neighbour pairs, flips between the
    two CZ layers produce the staggered (left measure, r)-(right measure,
    r + 1) pairs, measurement errors produce time-like pairs, and chain-end
    data flips produce spatial boundary edges.  Leakage channels are not
    part of the analytic graph; data-driven weights capture them.
    """
    n_m = layout.n_measure
    rows = n_rounds + (1 if include_terminal else 0)
    p0, p1 = noise.binary_flip_probs()
    p_meas = 0.5 * (p0 + p1)
    p_same = _combine(noise.p_flip_idle, 0.5 * noise.p_relax, noise.p_flip_gate)
    p_stag = noise.p_flip_gate
    # terminal pairs: final-readout confusion plus last-round gate flips,
    # which land after the last parity extraction but before the readout
    p_final = _combine(p_meas, noise.p_flip_gate)

    def idx(m: int, r: int) -> int:
        return (r - 1) * n_m + m

    edges: dict[tuple[int, int], tuple[float, frozenset[int]]] = {}
    boundary: dict[int, tuple[float, frozenset[int]]] = {}

    def add(a: int, b: int, p: float, label: frozenset[int]) -> None:
        if p > p_min:
            edges[(min(a, b), max(a, b))] = (_weight(p), label)

    def add_boundary(a: int, p: float, label: frozenset[int]) -> None:
        if p > p_min:
            boundary[a] = (_weight(p), label)

    for r in range(1, rows + 1):
        round_like = r <= n_rounds
        p_pair = p_same if round_like else p_final
        for m in range(n_m):
            if r < rows:
                add(idx(m, r), idx(m, r + 1), p_meas, frozenset())
            if m + 1 < n_m:
                add(idx(m, r), idx(m + 1, r), p_pair, frozenset({m + 1}))
                if round_like and r + 1 <= rows:
                    add(idx(m, r), idx(m + 1, r + 1), p_stag, frozenset({m + 1}))
        add_boundary(idx(0, r), p_pair, frozenset({0}))
        add_boundary(idx(n_m - 1, r), p_pair, frozenset({layout.n_data - 1}))
        if r == 1 or r == rows:
            # temporal boundary: first and last row absorb single events
            for m in range(n_m):
                cur = boundary.get(idx(m, r))
                if p_meas > p_min and (cur is None or _weight(p_meas) < cur[0]):
                    add_boundary(idx(m, r), p_meas, frozenset())
    if not edges and not boundary:
        raise ValueError("empty matching graph: all entries were omitted")
    rows_total = n_rounds + (1 if include_terminal else 0)
    _ensure_boundary_reachable(rows_total * layout.n_measure, edges, boundary)
    return MatchingGraph(
        layout=layout,
        n_rounds=n_rounds,
        has_terminal=include_terminal,
        edges=edges,
        boundary_edges=boundary,
    )


def _span_label(layout: ChainLayout, m_a: int, m_b: int) -> frozenset[int]:
    """Data qubits strictly between measure qubits m_a < m_b."""
    return frozenset(range(m_a + 1, m_b + 1))


def _nearest_end_label(layout: ChainLayout, m: int) -> frozenset[int]:
    left = frozenset(range(0, m + 1))
    right = frozenset(range(m + 1, layout.n_data))
    return left if len(left) <= len(right) else right


def build_graph_from_pij(
    matrix: PijMatrix,
    event_rates: Mapping[tuple[int, int], float],
    layout: ChainLayout,
    n_rounds: int,
    include_terminal: bool = True,
    p_min: float = DEFAULT_P_MIN,
    p_threshold: np.ndarray | None = None,
) -> MatchingGraph:
    """Error graph with weights estimated from data.

    Pair edges use the p_ij entries above ``p_min`` (and above the optional
    per-pair ``p_threshold``, used to reject sampling noise at finite shot
    counts); undefined entries are omitted.  Boundary edges absorb each
    node's marginal event rate not explained by its retained pair
    processes: 1 - 2 p_bnd = (1 - 2 <x_i>) / prod_j (1 - 2 p_ij).
    Same-qubit pairs flip no data; cross-qubit pairs are labelled with the
    data qubits between the two measure qubits, and boundary edges with the
    path to the nearest chain end.
    """
    nodes = matrix.nodes
    n_nodes = len(nodes)
    edges: dict[tuple[int, int], tuple[float, frozenset[int]]] = {}
    boundary: dict[int, tuple[float, frozenset[int]]] = {}
    n_m = layout.n_measure

    def flat(node: tuple[int, int]) -> int:
        m, r = node
        return (r - 1) * n_m + m

    vals = matrix.values
    cut = np.full((n_nodes, n_nodes), p_min)
    if p_threshold is not None:
        cut = np.maximum(cut, p_threshold)
    residual = np.ones(n_nodes)
    for i in range(n_nodes):
        row = vals[i]
        for j in range(i + 1, n_nodes):
            p = row[j]
            if matrix.undefined[i, j] or not np.isfinite(p):
                continue
            if p <= cut[i, j] or p >= 0.5:
                continue
            residual[i] *= 1.0 - 2.0 * p
            residual[j] *= 1.0 - 2.0 * p
            m_a, m_b = nodes[i][0], nodes[j][0]
            label = (
                frozenset()
                if m_a == m_b
                else _span_label(layout, min(m_a, m_b), max(m_a, m_b))
            )
            a, b = flat(nodes[i]), flat(nodes[j])
            edges[(min(a, b), max(a, b))] = (_weight(p), label)

    # Single-node processes exist at the spatial boundary (chain-end
    # measure qubits, any row) and the temporal boundary (first and last
    # row, any qubit); only those nodes receive boundary edges, weighted by
    # the marginal event rate not explained by the retained pairs.
    rows = n_rounds + (1 if include_terminal else 0)
    for i, node in enumerate(nodes):
        m, r = node
        spatial = m == 0 or m == n_m - 1
        temporal = r == 1 or r == rows
        if not (spatial or temporal):
            continue
        rate = event_rates.get(node, 0.0)
        if residual[i] <= 0:
            p_bnd = 0.5 - _P_CLAMP[0]
        else:
            p_bnd = 0.5 * (1.0 - (1.0 - 2.0 * rate) / residual[i])
        if p_bnd > p_min:
            label = (
                _nearest_end_label(layout, m) if spatial else frozenset()
            )
            boundary[flat(node)] = (_weight(p_bnd), label)

    if not edges and not boundary:
        raise ValueError("empty matching graph: all entries were omitted")
    rows_total = n_rounds + (1 if include_terminal else 0)
    _ensure_boundary_reachable(rows_total * layout.n_measure, edges, boundary)
    return MatchingGraph(
        layout=layout,
        n_rounds=n_rounds,
        has_terminal=include_terminal,
        edges=edges,
        boundary_edges=boundary,
    )


def build_graph(
    source,
    layout: ChainLayout,
    n_rounds: int,
    include_terminal: bool = True,
    p_min: float = DEFAULT_P_MIN,
    significance: float = 5.0,
) -> MatchingGraph:
    """Build the matching graph from a noise model or from data.

    ``source`` is a :class:`NoiseParams` (analytic weights) or a
    :class:`DetectionMatrix` (p_ij weights over all of its nodes).  For the
    data-driven graph, pairs must exceed both ``p_min`` and ``significance``
    standard errors of the p_ij estimate; otherwise finite-shot noise floods
    the graph with spurious weak edges.
    """
    if isinstance(source, NoiseParams):
        return build_graph_analytic(
            layout, n_rounds, source, include_terminal, p_min
        )
    if isinstance(source, DetectionMatrix):
        if include_terminal != source.has_terminal:
            raise ValueError("terminal-row flags of detections and graph differ")
        matrix = pij_matrix(source, source.nodes)
        n = source.n_shots
        flat_events = source.events.reshape(n, -1)
        counts = flat_events.sum(axis=0, dtype=np.int64)
        mean = counts / n
        rates = {node: mean[k] for k, node in enumerate(source.nodes)}
        pooled = _pool_pij_classes(matrix, source, n_rounds, significance, p_min)
        return build_graph_from_pij(
            pooled, rates, layout, n_rounds, include_terminal, p_min
        )
    raise TypeError(f"cannot build a graph from {type(source).__name__}")


def _pool_pij_classes(
    matrix: PijMatrix,
    detections: DetectionMatrix,
    n_rounds: int,
    significance: float,
    p_min: float,
) -> PijMatrix:
    """Regularize a data-derived p_ij matrix by round-translation pooling.

    Stationary noise makes the pair probability a function of the edge
    class (measure-qubit pair, round separation, terminal-row flags) rather
    than the absolute round, so class members share statistics.  Each class
    must pass a significance test against its pooled standard error;
    members of retained classes all carry the pooled probability, which
    removes both spurious sampling-noise edges and random dropout of true
    edges in a single rule.  First-row nodes keep their own class (the
    initialization reference makes round 1 non-stationary).
    """
    n = detections.n_shots
    nodes = matrix.nodes
    k = len(nodes)
    ms = np.array([nd[0] for nd in nodes])
    rs = np.array([nd[1] for nd in nodes])
    flat = detections.events.reshape(n, -1)
    from .correlation import _moment_counts

    singles, pairs = _moment_counts(flat)
    mean = singles / n
    e_ij = pairs / n
    m_i = mean[:, None]
    m_j = mean[None, :]
    var_p = (
        e_ij * (1.0 - e_ij)
        + m_i**2 * m_j * (1.0 - m_j)
        + m_j**2 * m_i * (1.0 - m_i)
    ) / n
    den = np.maximum(
        np.abs(1.0 - 2.0 * m_i - 2.0 * m_j + 4.0 * e_ij), 1e-6
    )
    var_p = var_p / den**2

    terminal_row = n_rounds + 1 if detections.has_terminal else None

    def row_tag(r: int) -> int:
        if r == 1:
            return 1
        if terminal_row is not None and r == terminal_row:
            return 2
        return 0

    classes: dict[tuple, list[tuple[int, int]]] = {}
    for i in range(k):
        for j in range(i + 1, k):
            if matrix.undefined[i, j] or not np.isfinite(matrix.values[i, j]):
                continue
            key = (
                min(ms[i], ms[j]),
                max(ms[i], ms[j]),
                int(rs[j] - rs[i]) if ms[i] <= ms[j] else int(rs[i] - rs[j]),
                row_tag(int(rs[i])),
                row_tag(int(rs[j])),
            )
            classes.setdefault(key, []).append((i, j))

    values = np.full((k, k), np.nan)
    undefined = matrix.undefined.copy()
    for members in classes.values():
        idx = np.array(members)
        p_vals = matrix.values[idx[:, 0], idx[:, 1]]
        variances = var_p[idx[:, 0], idx[:, 1]]
        p_bar = float(p_vals.mean())
        se = math.sqrt(max(float(variances.mean()), 1e-300) / len(members))
        if p_bar <= p_min or (significance > 0 and p_bar < significance * se):
            continue
        values[idx[:, 0], idx[:, 1]] = p_bar
        values[idx[:, 1], idx[:, 0]] = p_bar
    np.fill_diagonal(values, 0.0)
    return PijMatrix(
        values=values,
        nodes=nodes,
        undefined=undefined,
        clamp_count=matrix.clamp_count,
    )


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of matching one shot's detection events."""

    matched_pairs: tuple[tuple[int, int | None], ...]
    data_flips: frozenset[int]
    weight: float
    logical_bit: int | None = None
    is_logical_error: bool | None = None


def _blossom_match(members: list[int], dmat: np.ndarray, d_bnd: np.ndarray):
    """Exact blossom matching of one cluster against the boundary.

    Works on the folded formulation: every node pair carries weight
    min(direct path, both exiting to the boundary), and an odd cluster gets
    one virtual boundary node.  A perfect matching of this graph maps 1:1
    onto a minimum-weight assignment of nodes to partners or the boundary.
    """
    g = nx.Graph()
    via_b = d_bnd[:, None] + d_bnd[None, :]
    folded = np.minimum(dmat, via_b)
    for ai, ii in enumerate(members):
        for jj in members[ai + 1 :]:
            g.add_edge(ii, jj, weight=float(folded[ii, jj]))
    if len(members) % 2 == 1:
        for ii in members:
            g.add_edge(ii, "B", weight=float(d_bnd[ii]))
    matching = nx.min_weight_matching(g)
    pairs: list[tuple[int, int | None]] = []
    total = 0.0
    for a, b in matching:
        if b == "B" or a == "B":
            v = a if b == "B" else b
            pairs.append((v, None))
            total += float(d_bnd[v])
        elif dmat[a, b] <= via_b[a, b]:
            pairs.append((a, b))
            total += float(dmat[a, b])
        else:
            pairs.append((a, None))
            pairs.append((b, None))
            total += float(via_b[a, b])
    return pairs, total


def _match_flagged(graph: MatchingGraph, flagged: np.ndarray):
    """Exact minimum-weight matching of flagged nodes against the boundary.

    Pair candidates at least as expensive as routing both nodes to the
    boundary can never improve a matching, so they are dropped first; the
    remainder decomposes into connected clusters solved independently by
    exact blossom matching on the folded (pair-or-boundary) weights.
    """
    B = graph.boundary_index
    f = len(flagged)
    if f == 0:
        return [], 0.0
    d_bnd = graph._dist[flagged, B]
    if np.any(np.isinf(d_bnd)):
        bad = flagged[np.isinf(d_bnd)][0]
        raise ValueError(f"flagged node {int(bad)} is disconnected from the boundary")
    dmat = graph._dist[np.ix_(flagged, flagged)]
    keep = dmat < (d_bnd[:, None] + d_bnd[None, :]) - 1e-12
    np.fill_diagonal(keep, False)

    comp = -np.ones(f, dtype=int)
    n_comp = 0
    for s in range(f):
        if comp[s] >= 0:
            continue
        stack = [s]
        comp[s] = n_comp
        while stack:
            v = stack.pop()
            for u in np.nonzero(keep[v])[0]:
                if comp[u] < 0:
                    comp[u] = n_comp
                    stack.append(int(u))
        n_comp += 1

    pairs: list[tuple[int, int | None]] = []
    total = 0.0
    for c in range(n_comp):
        members = [int(v) for v in np.nonzero(comp == c)[0]]
        if len(members) == 1:
            i = members[0]
            pairs.append((int(flagged[i]), None))
            total += float(d_bnd[i])
            continue
        if len(members) == 2:
            i, j = members
            pairs.append((int(flagged[i]), int(flagged[j])))
            total += float(dmat[i, j])
            continue
        local_pairs, w = _blossom_match(members, dmat, d_bnd)
        total += w
        for a, b in local_pairs:
            pairs.append(
                (int(flagged[a]), None if b is None else int(flagged[b]))
            )
    return pairs, total


def mwpm(
    shot_events: np.ndarray,
    graph: MatchingGraph,
    final_data_bit: int | None = None,
    initial_bit: int | None = None,
) -> DecodeOutcome:
    """Decode one shot's detection events.

    ``shot_events`` is the flat boolean node vector (lexicographic (round,
    measure) order, terminal row included when the graph has one).  When
    the observable data qubit's final and initial bits are supplied the
    corrected logical bit and error flag are filled in.
    """
    ev = np.asarray(shot_events).reshape(-1).astype(bool)
    if ev.size != graph.n_nodes:
        raise ValueError(
            f"expected {graph.n_nodes} node events, got {ev.size}"
        )
    flagged = np.nonzero(ev)[0]
    pairs, weight = _match_flagged(graph, flagged)
    flips: frozenset[int] = frozenset()
    B = graph.boundary_index
    for a, b in pairs:
        flips ^= graph.path_label(a, B if b is None else b)
    logical_bit = None
    is_err = None
    if final_data_bit is not None and initial_bit is not None:
        logical_bit = int(final_data_bit) ^ (0 in flips)
        is_err = logical_bit != int(initial_bit)
    return DecodeOutcome(
        matched_pairs=tuple(pairs),
        data_flips=flips,
        weight=weight,
        logical_bit=logical_bit,
        is_logical_error=is_err,
    )


@dataclass
class LogicalErrorResult:
    """Logical failure statistics of a decoded dataset."""

    p_logical: float
    eps: float
    n_rounds: int
    n_shots: int
    per_shot_errors: np.ndarray
    eps_defined: bool = True


def eps_from_p_logical(p_logical: float, k: int) -> float:
    """Per-round logical error rate; NaN when P_L > 1/2 (out of domain)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 <= p_logical <= 1.0:
        raise ValueError("p_logical must lie in [0, 1]")
    if p_logical > 0.5:
        return math.nan
    return 0.5 * (1.0 - (1.0 - 2.0 * p_logical) ** (1.0 / k))


def p_logical_from_eps(eps: float, k: int) -> float:
    """Inverse of :func:`eps_from_p_logical`."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 0.5 * (1.0 - (1.0 - 2.0 * eps) ** k)


def decode_dataset(dataset: SyndromeDataset, graph: MatchingGraph,
                   detections: DetectionMatrix | None = None) -> LogicalErrorResult:
    """Decode every shot of a dataset and collect logical failure stats.

    The logical observable is the first data qubit of the (sub-)chain; the
    matching keeps the corrected state syndrome-consistent, so any single
    data qubit represents the logical parity.
    """
    from .correlation import detection_events

    if detections is None:
        detections = detection_events(dataset, include_terminal=graph.has_terminal)
    flat = detections.events.reshape(dataset.n_shots, -1)
    errors = np.zeros(dataset.n_shots, dtype=bool)
    for s in range(dataset.n_shots):
        out = mwpm(
            flat[s],
            graph,
            final_data_bit=int(dataset.final_data[s, 0]),
            initial_bit=int(dataset.initial_bits[s, 0]),
        )
        errors[s] = bool(out.is_logical_error)
    p_l = float(errors.mean())
    eps = eps_from_p_logical(p_l, dataset.n_rounds)
    return LogicalErrorResult(
        p_logical=p_l,
        eps=eps,
        n_rounds=dataset.n_rounds,
        n_shots=dataset.n_shots,
        per_shot_errors=errors,
        eps_defined=not math.isnan(eps),
    )


def logical_error_rate(
    dataset: SyndromeDataset, graph: MatchingGraph
) -> tuple[float, float]:
    """(P_L, eps) of a decoded dataset; eps is NaN when P_L > 1/2."""
    res = decode_dataset(dataset, graph)
    return res.p_logical, res.eps


def enumerate_placements(n_qubits: int, size: int) -> list[int]:
    """Start qubits of all standard sub-chain placements of a given size."""
    if size % 4 != 1 or size < 5 or size > n_qubits:
        raise ValueError("size must be 5, 9, 13, ... and fit in the chain")
    return list(range(0, n_qubits - size + 1, 4))


def subsample(dataset: SyndromeDataset, start_qubit: int, size: int) -> SyndromeDataset:
    """Restrict a dataset to a sub-chain, re-deriving the logical observable.

    The sub-chain must start on a data qubit; outcomes of its measure
    qubits and the initial/final bits of its data qubits are sliced out
    unchanged (detection events are local to each measure qubit).
    """
    layout = dataset.layout
    if size % 4 != 1 or size < 5:
        raise ValueError("size must be 5, 9, 13, ...")
    if start_qubit % 2 != 0 or start_qubit < 0 or start_qubit + size > layout.n_qubits:
        raise ValueError("sub-chain must start on a data qubit and fit the chain")
    m_lo = start_qubit // 2
    n_m_sub = (size - 1) // 2
    d_lo = start_qubit // 2
    n_d_sub = (size + 1) // 2
    sub_layout = ChainLayout(
        n_qubits=size,
        data_below=tuple(
            dataset.layout.data_below[start_qubit : start_qubit + size - 1]
        ),
    )
    return SyndromeDataset(
        layout=sub_layout,
        noise=dataset.noise,
        schedule=dataset.schedule,
        master_seed=dataset.master_seed,
        outcomes=dataset.outcomes[:, :, m_lo : m_lo + n_m_sub],
        initial_bits=dataset.initial_bits[:, d_lo : d_lo + n_d_sub],
        final_data=dataset.final_data[:, d_lo : d_lo + n_d_sub],
        final_levels=None,
    )


@dataclass
class LambdaFit:
    """Exponential error-suppression fit: eps proportional to lambda^-(n+1)."""

    lam: float
    eps_by_size: dict[int, float]
    residuals: dict[int, float]
    excluded_sizes: tuple[int, ...]
    r_squared: float
    intercept: float


def lambda_fit(eps_by_size: Mapping[int, float], min_size: int = 9) -> LambdaFit:
    """Least-squares fit of ln(eps) against n + 1 with n = (qubits - 1) / 4.

    Sizes below ``min_size`` (boundary-dominated) and entries with eps <= 0
    are excluded from the fit but reported.
    """
    usable = {
        s: e
        for s, e in eps_by_size.items()
        if s >= min_size and e > 0 and math.isfinite(e)
    }
    excluded = tuple(sorted(set(eps_by_size) - set(usable)))
    if len(usable) < 2:
        raise ValueError("need at least two usable sizes (>= 9 qubits, eps > 0)")
    sizes = sorted(usable)
    x = np.array([(s - 1) / 4 + 1 for s in sizes])
    y = np.log([usable[s] for s in sizes])
    slope, intercept = np.polyfit(x, y, 1)
    fit_y = slope * x + intercept
    ss_res = float(np.sum((y - fit_y) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return LambdaFit(
        lam=float(np.exp(-slope)),
        eps_by_size=dict(eps_by_size),
        residuals={s: float(y[i] - fit_y[i]) for i, s in enumerate(sizes)},
        excluded_sizes=excluded,
        r_squared=r2,
        intercept=float(intercept),
    )


def export_decode_report_json(report: dict, fh: TextIO) -> None:
    """Write a decode report (per-size stats plus the lambda fit) as JSON."""
    json.dump(report, fh, indent=2, sort_keys=True)


def export_lambda_scan_csv(
    eps_rows: Sequence[tuple[int, float, float]],
    lambda_rows: Sequence[tuple[int, bool, float]],
    fh: TextIO,
) -> None:
    """Long-format CSV with both scan axes: size vs eps and rounds vs lambda."""
    fh.write("metric,size,rounds,reset,value\n")
    for size, rounds, eps in eps_rows:
        fh.write(f"eps_vs_size,{size},{rounds},,{eps:.6e}\n")
    for rounds, reset, lam in lambda_rows:
        fh.write(f"lambda_vs_rounds,,{rounds},{int(reset)},{lam:.6e}\n")
