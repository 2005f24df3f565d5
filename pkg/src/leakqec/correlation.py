"""Detection events and pairwise error-process probabilities.

A detection event marks a stabilizer measurement that differs from its
expected value: the previous round's outcome, or for round 1 the parity of
the initial bitstring (the per-round X gates flip both data neighbours of
every measure qubit, so pair parities are frame-invariant).  When the
terminal data readout is present it contributes one extra syndrome row.

Modelling detection events as independent processes that flip pairs of
measurements, the probability p_ij of the process flipping measurements i
and j follows from the observed correlations:

    p_ij = 1/2 - 1/2 sqrt(1 - 4 (<x_i x_j> - <x_i><x_j>)
                              / (1 - 2<x_i> - 2<x_j> + 4<x_i x_j>))

Entries can be negative (anticorrelation).  All moments are accumulated as
exact integer counts, so results are bit-identical under any permutation
of the shots.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np

from .code_sim import SyndromeDataset

__all__ = [
    "DetectionMatrix",
    "PijMatrix",
    "detection_events",
    "event_fraction",
    "pij",
    "pij_matrix",
    "autocorrelation_nodes",
    "cross_correlation_nodes",
    "checkerboard_statistic",
    "export_pij_csv",
    "export_pij_json",
]

# Denominators of the pair-probability formula closer to zero than this are
# reported as undefined rather than silently zeroed.
DEGENERATE_DENOMINATOR = 1e-12

Node = tuple[int, int]  # (measure qubit index, round); terminal row = k + 1


@dataclass
class DetectionMatrix:
    """Per-shot detection events on the (measure qubit, round) node grid.

    ``events`` has shape (shots, rows, measure qubits) with rows ordered by
    round; when ``has_terminal`` the last row is the syndrome derived from
    the final data readout.  Flattening rows-major gives the lexicographic
    (round, measure) node order.
    """

    events: np.ndarray
    n_rounds: int
    has_terminal: bool

    @property
    def n_shots(self) -> int:
        return self.events.shape[0]

    @property
    def n_measure(self) -> int:
        return self.events.shape[2]

    @property
    def nodes(self) -> list[Node]:
        rows = self.events.shape[1]
        return [(m, r) for r in range(1, rows + 1) for m in range(self.n_measure)]

    def column(self, node: Node) -> np.ndarray:
        m, r = node
        if not (0 <= m < self.n_measure and 1 <= r <= self.events.shape[1]):
            raise ValueError(f"node {node} outside the event grid")
        return self.events[:, r - 1, m]


def detection_events(
    dataset: SyndromeDataset, include_terminal: bool = True
) -> DetectionMatrix:
    """Extract detection events from a syndrome dataset."""
    out = dataset.outcomes
    if out.shape[1] < 1:
        raise ValueError("dataset must contain at least one round")
    init_parity = dataset.initial_bits[:, :-1] ^ dataset.initial_bits[:, 1:]
    rows = [out[:, 0, :] ^ init_parity]
    if out.shape[1] > 1:
        rows.append(out[:, 1:, :] ^ out[:, :-1, :])
    events = np.concatenate(
        [rows[0][:, None, :]] + rows[1:], axis=1
    )
    if include_terminal:
        final_parity = dataset.final_data[:, :-1] ^ dataset.final_data[:, 1:]
        terminal = (out[:, -1, :] ^ final_parity)[:, None, :]
        events = np.concatenate([events, terminal], axis=1)
    return DetectionMatrix(
        events=events.astype(np.uint8),
        n_rounds=dataset.n_rounds,
        has_terminal=include_terminal,
    )


def event_fraction(detections: DetectionMatrix) -> np.ndarray:
    """Mean detection-event fraction per node, shape (rows, measure qubits)."""
    if detections.n_shots < 1:
        raise ValueError("need at least one shot")
    counts = detections.events.sum(axis=0, dtype=np.int64)
    return counts / detections.n_shots


@dataclass
class PijMatrix:
    """Symmetric pair-process probability matrix over a node subset.

    ``values[i, j]`` is p for nodes[i], nodes[j]; the diagonal is set to 0
    and degenerate entries are NaN with ``undefined`` True.  ``clamp_count``
    reports how many square-root arguments were clamped up to zero.
    """

    values: np.ndarray
    nodes: list[Node]
    undefined: np.ndarray
    clamp_count: int = 0
    node_index: dict[Node, int] = field(init=False)

    def __post_init__(self) -> None:
        self.node_index = {node: i for i, node in enumerate(self.nodes)}

    def entry(self, a: Node, b: Node) -> float:
        return float(self.values[self.node_index[a], self.node_index[b]])


def _moment_counts(x: np.ndarray, chunk: int = 65536) -> tuple[np.ndarray, np.ndarray]:
    """Exact single and pairwise 1-counts of a 0/1 matrix (shots x nodes).

    Accumulated in float64, which is exact for counts below 2**53, so the
    result does not depend on shot order or chunking.
    """
    n, k = x.shape
    singles = np.zeros(k)
    pairs = np.zeros((k, k))
    for lo in range(0, n, chunk):
        block = x[lo : lo + chunk].astype(np.float64)
        singles += block.sum(axis=0)
        pairs += block.T @ block
    return singles, pairs


def _pij_from_moments(
    mean_i: np.ndarray, mean_j: np.ndarray, mean_ij: np.ndarray
) -> tuple[np.ndarray, np.ndarray, int]:
    cov = mean_ij - mean_i * mean_j
    den = 1.0 - 2.0 * mean_i - 2.0 * mean_j + 4.0 * mean_ij
    undefined = np.abs(den) < DEGENERATE_DENOMINATOR
    safe_den = np.where(undefined, 1.0, den)
    arg = 1.0 - 4.0 * cov / safe_den
    clamped = (arg < 0.0) & ~undefined
    arg = np.maximum(arg, 0.0)
    values = 0.5 - 0.5 * np.sqrt(arg)
    values = np.where(undefined, np.nan, values)
    return values, undefined, int(np.count_nonzero(clamped))


def pij(detections: DetectionMatrix, i: Node, j: Node) -> float:
    """Pair-process probability for two nodes; NaN marks a degenerate
    denominator (both marginals jointly near 1/2)."""
    if i == j:
        raise ValueError("nodes must differ")
    if detections.n_shots < 2:
        raise ValueError("need at least two shots")
    xi = detections.column(i)
    xj = detections.column(j)
    n = detections.n_shots
    ci = int(xi.sum(dtype=np.int64))
    cj = int(xj.sum(dtype=np.int64))
    cij = int((xi & xj).sum(dtype=np.int64))
    values, undefined, _ = _pij_from_moments(
        np.asarray(ci / n), np.asarray(cj / n), np.asarray(cij / n)
    )
    return math.nan if bool(undefined) else float(values)


def pij_matrix(detections: DetectionMatrix, nodes: Sequence[Node]) -> PijMatrix:
    """All pairwise p_ij over a node subset (autocorrelation when every node
    sits on one measure qubit, cross-correlation for a two-qubit subset)."""
    nodes = list(nodes)
    if len(nodes) < 2:
        raise ValueError("need at least two nodes")
    cols = np.stack([detections.column(nd) for nd in nodes], axis=1)
    n = detections.n_shots
    singles, pairs = _moment_counts(cols)
    mean = singles / n
    mean_ij = pairs / n
    values, undefined, clamps = _pij_from_moments(
        mean[:, None], mean[None, :], mean_ij
    )
    np.fill_diagonal(values, 0.0)
    np.fill_diagonal(undefined, False)
    return PijMatrix(
        values=values, nodes=nodes, undefined=undefined, clamp_count=clamps
    )


def _default_rounds(detections: DetectionMatrix, include_boundary: bool) -> range:
    if include_boundary:
        return range(1, detections.events.shape[1] + 1)
    # drop round 1 (initialization reference) and the last rows (data readout)
    return range(2, detections.n_rounds)


def autocorrelation_nodes(
    detections: DetectionMatrix,
    measure_index: int,
    include_boundary_rounds: bool = False,
) -> list[Node]:
    """Nodes of one measure qubit across rounds (interior rounds by default)."""
    return [
        (measure_index, r)
        for r in _default_rounds(detections, include_boundary_rounds)
    ]


def cross_correlation_nodes(
    detections: DetectionMatrix,
    measure_a: int,
    measure_b: int,
    include_boundary_rounds: bool = False,
) -> list[Node]:
    """Union of two qubits' round nodes, for cross-correlation matrices."""
    rounds = _default_rounds(detections, include_boundary_rounds)
    return [(measure_a, r) for r in rounds] + [(measure_b, r) for r in rounds]


def checkerboard_statistic(
    matrix: PijMatrix, max_separation: int | None = None
) -> tuple[float, float]:
    """Mean p_ij at odd vs even round separations >= 2 on one measure qubit.

    Adjacent-round pairs (|dr| = 1) are the expected local correlations and
    are excluded; undefined entries are ignored.
    """
    qubits = {m for m, _ in matrix.nodes}
    if len(qubits) != 1:
        raise ValueError("checkerboard statistic needs an autocorrelation matrix")
    rounds = np.array([r for _, r in matrix.nodes])
    if rounds.max() - rounds.min() < 5:
        raise ValueError("need at least 6 rounds of nodes")
    sep = np.abs(rounds[:, None] - rounds[None, :])
    valid = (sep >= 2) & ~matrix.undefined & ~np.isnan(matrix.values)
    if max_separation is not None:
        valid &= sep <= max_separation
    odd = valid & (sep % 2 == 1)
    even = valid & (sep % 2 == 0)
    odd_mean = float(matrix.values[odd].mean()) if odd.any() else 0.0
    even_mean = float(matrix.values[even].mean()) if even.any() else 0.0
    return odd_mean, even_mean


def _node_label(node: Node) -> str:
    return f"(m{node[0]},r{node[1]})"


def export_pij_csv(matrix: PijMatrix, fh: TextIO) -> None:
    """Matrix CSV with quoted node labels; undefined entries are left empty."""
    head = ",".join(f'"{_node_label(n)}"' for n in matrix.nodes)
    fh.write("node," + head + "\n")
    for i, node in enumerate(matrix.nodes):
        cells = [
            "" if matrix.undefined[i, j] else f"{matrix.values[i, j]:.6e}"
            for j in range(len(matrix.nodes))
        ]
        fh.write(f'"{_node_label(node)}",' + ",".join(cells) + "\n")


def export_pij_json(matrix: PijMatrix, fh: TextIO) -> None:
    """JSON export including the clamp diagnostic and undefined pairs."""
    payload = {
        "nodes": [_node_label(n) for n in matrix.nodes],
        "values": [
            [None if matrix.undefined[i, j] else matrix.values[i, j]
             for j in range(len(matrix.nodes))]
            for i in range(len(matrix.nodes))
        ],
        "clamp_count": matrix.clamp_count,
        "undefined_pairs": [
            [_node_label(matrix.nodes[i]), _node_label(matrix.nodes[j])]
            for i, j in zip(*np.nonzero(matrix.undefined))
            if i < j
        ],
    }
    json.dump(payload, fh, indent=2)
