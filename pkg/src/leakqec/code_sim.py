"""Stochastic simulation of the bit-flip stabilizer code with leakage levels.

A linear chain alternates data qubits (even indices) and measure qubits
(odd indices).  Each round applies the X-gate frame to the data qubits,
Hadamards on the measure qubits (bookkeeping only in this classical
model), two staggered CZ layers (left-neighbour pairs, then
right-neighbour pairs), and a measurement of every measure qubit,
optionally followed by reset.

Each qubit carries an excitation level in {0, 1, 2, 3}.  Levels 0/1 are
the computational bit; levels 2/3 are leaked.  A leaked measure qubit
reports a uniformly random outcome; a leaked data qubit contributes an
independent uniformly random bit to each adjacent parity check, resampled
every round.  Level transitions happen only through the enumerated
channels (idle decay, data relaxation, readout- and CZ-induced leakage,
CZ transport of |2> into |3> on the higher-frequency neighbour, injection,
and reset), which keeps the dynamics auditable.

Shots are vectorized: one batch simulates all repetitions of a bitstring
group with a single RNG stream derived from (master_seed, group_index).
Groups are independent, so experiments can run them concurrently and
concatenate; a single shot is just a batch of one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

__all__ = [
    "ChainLayout",
    "NoiseParams",
    "Schedule",
    "SyndromeDataset",
    "run_shot",
    "run_experiment",
    "derive_group_seed",
    "sweep_leakage_growth",
    "leakage_population_curve",
    "export_population_csv",
    "save_dataset",
    "load_dataset",
    "STAGE_TRANSITIONS",
]

DATASET_SCHEMA = "leakqec.dataset/v1"

# Allowed per-qubit level transitions for each instrumented stage, used by
# the channel-log audit.  "*" marks transitions allowed on any qubit;
# otherwise the key restricts the role ("data"/"measure").
STAGE_TRANSITIONS = {
    "x_frame": {"data": {(0, 1), (1, 0)}},
    "idle_decay": {"*": {(2, 1), (3, 2)}},
    "idle_flip": {"data": {(0, 1), (1, 0)}},
    "relax": {"data": {(1, 0)}},
    "inject": {"*": {(1, 2), (2, 1), (0, 2)}},
    "cz_a_up": {"*": {(0, 2), (1, 2)}},
    "cz_a_transport": {"*": {(2, 0), (0, 3), (1, 3)}},
    "gate_flip_a": {"data": {(0, 1), (1, 0)}},
    "cz_b_up": {"*": {(0, 2), (1, 2)}},
    "cz_b_transport": {"*": {(2, 0), (0, 3), (1, 3)}},
    "gate_flip_b": {"data": {(0, 1), (1, 0)}},
    "measure": {"measure": {(0, 1), (1, 0)}},
    "readout_leak": {"measure": {(0, 2), (1, 2)}},
    "reset": {"measure": {(1, 0), (2, 0), (3, 0)}},
}


@dataclass(frozen=True)
class ChainLayout:
    """Geometry of the qubit chain.

    Data qubits sit at even indices, measure qubits at odd indices.
    ``data_below`` holds one flag per adjacent qubit pair (chain edge):
    True when the data qubit of that pair is the lower-frequency one,
    which is the direction that lets CZ transport move a data |2> into a
    measure |3>.
    """

    n_qubits: int = 21
    data_below: tuple[bool, ...] | None = None

    def __post_init__(self) -> None:
        if self.n_qubits < 5 or self.n_qubits % 4 != 1:
            raise ValueError("n_qubits must be 5, 9, 13, 17, 21, ...")
        if self.data_below is None:
            object.__setattr__(self, "data_below", (True,) * (self.n_qubits - 1))
        elif len(self.data_below) != self.n_qubits - 1:
            raise ValueError("data_below needs one flag per adjacent pair")

    @property
    def n_measure(self) -> int:
        return (self.n_qubits - 1) // 2

    @property
    def n_data(self) -> int:
        return (self.n_qubits + 1) // 2

    @property
    def code_order(self) -> int:
        return (self.n_qubits - 1) // 4

    @property
    def data_indices(self) -> np.ndarray:
        return np.arange(0, self.n_qubits, 2)

    @property
    def measure_indices(self) -> np.ndarray:
        return np.arange(1, self.n_qubits, 2)


def _identity_confusion() -> tuple[tuple[float, ...], ...]:
    return ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


@dataclass(frozen=True)
class NoiseParams:
    """Per-channel Monte-Carlo probabilities (all per round or per gate).

    ``gamma_up_readout`` fires at each measurement on a measure qubit in a
    computational state; ``gamma_up_gate`` fires per CZ on each computational
    participant.  Both send the qubit to level 2 regardless of its bit value,
    so the observed growth rate equals the input rate.  ``gamma_down_idle``
    steps leaked qubits down one level per round (3 -> 2 -> 1).
    ``p_cz_transport`` converts a |2> on the lower-frequency qubit of a CZ
    pair into a |3> on the (computational) higher-frequency one.
    ``reset_removal`` maps level -> probability that reset returns it to the
    ground state.  ``readout_confusion`` rows are true states {0, 1, 2+};
    columns are reported outcomes {0, 1, 2}; rows must sum to 1.
    """

    p_flip_idle: float = 0.0
    p_flip_gate: float = 0.0
    p_relax: float = 0.0
    gamma_up_readout: float = 0.0
    gamma_up_gate: float = 0.0
    gamma_down_idle: float = 0.0
    p_cz_transport: float = 0.0
    reset_removal: tuple[float, float, float] = (1.0, 1.0, 1.0)
    readout_confusion: tuple[tuple[float, ...], ...] = field(
        default_factory=_identity_confusion
    )

    def __post_init__(self) -> None:
        for name in (
            "p_flip_idle", "p_flip_gate", "p_relax", "gamma_up_readout",
            "gamma_up_gate", "gamma_down_idle", "p_cz_transport",
        ):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if len(self.reset_removal) != 3 or any(
            not 0.0 <= v <= 1.0 for v in self.reset_removal
        ):
            raise ValueError("reset_removal needs 3 probabilities in [0, 1]")
        conf = np.asarray(self.readout_confusion, dtype=float)
        if conf.shape != (3, 3) or np.any(conf < 0):
            raise ValueError("readout_confusion must be a nonnegative 3x3 matrix")
        if np.any(np.abs(conf.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError("readout_confusion rows must sum to 1")

    def binary_flip_probs(self) -> tuple[float, float]:
        """Mid-round readout flip probabilities for true bits 0 and 1
        (confusion restricted and renormalized to the computational block)."""
        conf = np.asarray(self.readout_confusion, dtype=float)
        p0 = conf[0, 1] / (conf[0, 0] + conf[0, 1])
        p1 = conf[1, 0] / (conf[1, 0] + conf[1, 1])
        return float(p0), float(p1)


@dataclass(frozen=True)
class Schedule:
    """What a single run does: rounds, reset, optional leakage injection.

    ``injection`` is ``(qubit_index, round)``; the injected full |1> <-> |2>
    rotation is placed after the round's first Hadamards.  ``initial_bitstring``
    is "random" (drawn once per bitstring group) or an explicit bit tuple.
    """

    n_rounds: int
    reset_enabled: bool = False
    injection: tuple[int, int] | None = None
    final_leakage_readout: bool = False
    initial_bitstring: Literal["random"] | tuple[int, ...] = "random"

    def __post_init__(self) -> None:
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be >= 1")
        if self.injection is not None:
            qubit, rnd = self.injection
            if not 1 <= rnd <= self.n_rounds:
                raise ValueError("injection round must lie in [1, n_rounds]")
            if qubit < 0:
                raise ValueError("injection qubit must be >= 0")

    def validate_for(self, layout: ChainLayout) -> None:
        if self.injection is not None and self.injection[0] >= layout.n_qubits:
            raise ValueError("injection qubit outside the chain")
        if self.initial_bitstring != "random" and len(
            self.initial_bitstring
        ) != layout.n_data:
            raise ValueError("initial_bitstring length must equal n_data")


@dataclass
class SyndromeDataset:
    """Outcomes of a batch of runs plus everything needed to reproduce it.

    ``outcomes`` has shape (shots, rounds, measure qubits) with values in
    {0, 1}.  ``final_data`` holds the terminal data-qubit readout in the
    initial bit frame (the per-round X gates are undone).  ``final_levels``
    is the optional terminal three-outcome readout of all qubits (reported
    values {0, 1, 2}).
    """

    layout: ChainLayout
    noise: NoiseParams
    schedule: Schedule
    master_seed: tuple[int, ...]
    outcomes: np.ndarray
    initial_bits: np.ndarray
    final_data: np.ndarray
    final_levels: np.ndarray | None = None

    @property
    def n_shots(self) -> int:
        return self.outcomes.shape[0]

    @property
    def n_rounds(self) -> int:
        return self.outcomes.shape[1]

    @property
    def n_measure(self) -> int:
        return self.outcomes.shape[2]


def _seed_tuple(seed) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(s) for s in seed)


def derive_group_seed(master_seed, group_index: int) -> tuple[int, ...]:
    """Seed of the RNG stream for one bitstring group of an experiment."""
    return _seed_tuple(master_seed) + (int(group_index),)


def _simulate_batch(
    layout: ChainLayout,
    noise: NoiseParams,
    schedule: Schedule,
    rng: np.random.Generator,
    n_shots: int,
    channel_log: list | None = None,
) -> SyndromeDataset:
    """Vectorized simulation of ``n_shots`` repetitions of one bitstring.

    The RNG consumption order and shapes are fixed per round, so a batch of
    one shot consumes the stream exactly like any batch prefix.
    """
    n_q, n_m, n_d = layout.n_qubits, layout.n_measure, layout.n_data
    rounds = schedule.n_rounds
    data_cols = layout.data_indices
    meas_cols = layout.measure_indices

    if schedule.initial_bitstring == "random":
        bits0 = rng.integers(0, 2, size=n_d, dtype=np.uint8)
    else:
        bits0 = np.asarray(schedule.initial_bitstring, dtype=np.uint8)
    initial_bits = np.broadcast_to(bits0, (n_shots, n_d)).copy()

    levels = np.zeros((n_shots, n_q), dtype=np.uint8)
    levels[:, data_cols] = initial_bits

    # layer A pairs: (data 2i, measure 2i+1); layer B: (measure 2i+1, data 2i+2)
    a_data = data_cols[:n_m]
    b_data = data_cols[1:]
    a_data_below = np.array([layout.data_below[2 * i] for i in range(n_m)])
    b_data_below = np.array([layout.data_below[2 * i + 1] for i in range(n_m)])

    p_conf0, p_conf1 = noise.binary_flip_probs()
    removal = np.array((1.0,) + tuple(noise.reset_removal))
    conf_cdf = np.cumsum(np.asarray(noise.readout_confusion, dtype=float), axis=1)

    inj_qubit, inj_round = schedule.injection or (-1, -1)
    outcomes = np.empty((n_shots, rounds, n_m), dtype=np.uint8)

    def log(stage: str, rnd: int) -> None:
        if channel_log is not None:
            channel_log.append((rnd, stage, levels.copy()))

    def comp(cols) -> np.ndarray:
        return levels[:, cols] <= 1

    if channel_log is not None:
        channel_log.append((0, "initial", levels.copy()))

    for r in range(1, rounds + 1):
        # X frame on data qubits (leaked qubits are untouched)
        mask = comp(data_cols)
        levels[:, data_cols] ^= mask
        log("x_frame", r)

        # one leakage-decay step per round, all qubits
        u = rng.random((n_shots, n_q))
        step = (levels >= 2) & (u < noise.gamma_down_idle)
        levels[step] -= 1
        log("idle_decay", r)

        u = rng.random((n_shots, n_d))
        flip = comp(data_cols) & (u < noise.p_flip_idle)
        levels[:, data_cols] ^= flip
        log("idle_flip", r)

        u = rng.random((n_shots, n_d))
        relax = (levels[:, data_cols] == 1) & (u < noise.p_relax)
        levels[:, data_cols] = np.where(relax, 0, levels[:, data_cols])
        log("relax", r)

        # first Hadamards (bookkeeping), then the optional injection
        scrambled = np.zeros(n_shots, dtype=bool)
        if r == inj_round:
            lv = levels[:, inj_qubit].copy()
            m1, m2 = lv == 1, lv == 2
            if inj_qubit % 2 == 0:
                # data qubit holds a definite bit: full 1 <-> 2 rotation
                lv[m1] = 2
                lv[m2] = 1
            else:
                # measure qubit is in superposition after H: the rotation
                # scrambles this round's readout and leaks with prob 1/2
                coin = rng.random(n_shots)
                compm = lv <= 1
                scrambled = compm.copy()
                lv[compm & (coin < 0.5)] = 2
                lv[m2] = 1
            levels[:, inj_qubit] = lv
            log("inject", r)

        contrib = np.empty((2, n_shots, n_m), dtype=np.uint8)
        for layer, (dcols, dbelow, tag) in enumerate(
            ((a_data, a_data_below, "a"), (b_data, b_data_below, "b"))
        ):
            dl = levels[:, dcols]
            leaked = dl >= 2
            rand_bits = (rng.random((n_shots, n_m)) < 0.5).astype(np.uint8)
            contrib[layer] = np.where(leaked, rand_bits, dl.astype(np.uint8))

            # CZ-induced leakage on both participants
            u = rng.random((n_shots, n_m))
            up = (levels[:, dcols] <= 1) & (u < noise.gamma_up_gate)
            levels[:, dcols] = np.where(up, 2, levels[:, dcols])
            u = rng.random((n_shots, n_m))
            up = (levels[:, meas_cols] <= 1) & (u < noise.gamma_up_gate)
            levels[:, meas_cols] = np.where(up, 2, levels[:, meas_cols])
            log(f"cz_{tag}_up", r)

            # |2> transport: lower-frequency |2> converts to |3> on the
            # computational higher-frequency partner
            u = rng.random((n_shots, n_m))
            d_lv = levels[:, dcols]
            m_lv = levels[:, meas_cols]
            fire_dm = dbelow & (d_lv == 2) & (m_lv <= 1) & (u < noise.p_cz_transport)
            fire_md = (~dbelow) & (m_lv == 2) & (d_lv <= 1) & (u < noise.p_cz_transport)
            levels[:, dcols] = np.where(fire_dm, 0, np.where(fire_md, 3, d_lv))
            levels[:, meas_cols] = np.where(fire_md, 0, np.where(fire_dm, 3, m_lv))
            log(f"cz_{tag}_transport", r)

            u = rng.random((n_shots, n_m))
            flip = (levels[:, dcols] <= 1) & (u < noise.p_flip_gate)
            levels[:, dcols] ^= flip
            log(f"gate_flip_{tag}", r)

        # measurement: parity of the two recorded contributions
        parity = contrib[0] ^ contrib[1]
        u_out = rng.random((n_shots, n_m))
        u_conf = rng.random((n_shots, n_m))
        leaked_m = levels[:, meas_cols] >= 2
        random_out = leaked_m | scrambled[:, None]
        out = np.where(random_out, (u_out < 0.5).astype(np.uint8), parity)
        p_flip = np.where(out == 0, p_conf0, p_conf1)
        reported = np.where(
            random_out, out, out ^ (u_conf < p_flip).astype(np.uint8)
        )
        outcomes[:, r - 1, :] = reported
        # post-measurement collapse of computational measure qubits
        compm = levels[:, meas_cols] <= 1
        levels[:, meas_cols] = np.where(compm, parity, levels[:, meas_cols])
        log("measure", r)

        u = rng.random((n_shots, n_m))
        up = (levels[:, meas_cols] <= 1) & (u < noise.gamma_up_readout)
        levels[:, meas_cols] = np.where(up, 2, levels[:, meas_cols])
        log("readout_leak", r)

        if schedule.reset_enabled:
            u = rng.random((n_shots, n_m))
            m_lv = levels[:, meas_cols]
            cleared = (m_lv > 0) & (u < removal[m_lv])
            levels[:, meas_cols] = np.where(cleared, 0, m_lv)
            log("reset", r)

    final_levels = None
    if schedule.final_leakage_readout:
        u = rng.random((n_shots, n_q))
        state = np.minimum(levels, 2).astype(np.intp)
        thresholds = conf_cdf[state]  # (n_shots, n_q, 3)
        final_levels = (u[..., None] >= thresholds).sum(axis=2).astype(np.uint8)

    # terminal data readout, undone X frame; leaked data read out randomly
    u_rand = rng.random((n_shots, n_d))
    u_conf = rng.random((n_shots, n_d))
    dl = levels[:, data_cols]
    bits = np.where(dl >= 2, (u_rand < 0.5).astype(np.uint8), dl.astype(np.uint8))
    p_flip = np.where(bits == 0, p_conf0, p_conf1)
    bits = bits ^ (u_conf < p_flip).astype(np.uint8)
    final_data = bits ^ (rounds & 1)

    return SyndromeDataset(
        layout=layout,
        noise=noise,
        schedule=schedule,
        master_seed=(),
        outcomes=outcomes,
        initial_bits=initial_bits,
        final_data=final_data.astype(np.uint8),
        final_levels=final_levels,
    )


def run_shot(
    layout: ChainLayout,
    noise: NoiseParams,
    schedule: Schedule,
    seed,
    channel_log: list | None = None,
) -> SyndromeDataset:
    """Simulate a single shot with its own RNG stream."""
    schedule.validate_for(layout)
    rng = np.random.default_rng(_seed_tuple(seed))
    ds = _simulate_batch(layout, noise, schedule, rng, 1, channel_log)
    ds.master_seed = _seed_tuple(seed)
    return ds


def run_experiment(
    layout: ChainLayout,
    noise: NoiseParams,
    schedule: Schedule,
    n_bitstrings: int,
    shots_per_bitstring: int,
    master_seed,
) -> SyndromeDataset:
    """Run ``n_bitstrings`` independent bitstring groups of
    ``shots_per_bitstring`` shots each.

    Every group has its own RNG stream seeded by (master_seed, group); with
    ``initial_bitstring="random"`` the group's bitstring is the stream's
    first draw, so a 1 x 1 experiment reproduces
    ``run_shot(..., derive_group_seed(master_seed, 0))`` exactly.
    """
    if n_bitstrings < 1 or shots_per_bitstring < 1:
        raise ValueError("counts must be >= 1")
    schedule.validate_for(layout)
    parts = []
    for g in range(n_bitstrings):
        rng = np.random.default_rng(derive_group_seed(master_seed, g))
        parts.append(
            _simulate_batch(layout, noise, schedule, rng, shots_per_bitstring)
        )
    ds = SyndromeDataset(
        layout=layout,
        noise=noise,
        schedule=schedule,
        master_seed=_seed_tuple(master_seed),
        outcomes=np.concatenate([p.outcomes for p in parts]),
        initial_bits=np.concatenate([p.initial_bits for p in parts]),
        final_data=np.concatenate([p.final_data for p in parts]),
        final_levels=(
            np.concatenate([p.final_levels for p in parts])
            if parts[0].final_levels is not None
            else None
        ),
    )
    return ds


def sweep_leakage_growth(
    layout: ChainLayout,
    noise: NoiseParams,
    schedule: Schedule,
    k_max: int,
    n_bitstrings: int,
    shots_per_bitstring: int,
    master_seed,
    k_values: Sequence[int] | None = None,
) -> list[SyndromeDataset]:
    """Run a family of experiments terminating at rounds 1..k_max (or the
    given k values), each ending in the leakage-sensitive readout."""
    ks = list(k_values) if k_values is not None else list(range(1, k_max + 1))
    out = []
    for k in ks:
        sched_k = Schedule(
            n_rounds=k,
            reset_enabled=schedule.reset_enabled,
            injection=schedule.injection,
            final_leakage_readout=True,
            initial_bitstring=schedule.initial_bitstring,
        )
        out.append(
            run_experiment(
                layout, noise, sched_k, n_bitstrings, shots_per_bitstring,
                _seed_tuple(master_seed) + (k,),
            )
        )
    return out


def leakage_population_curve(
    datasets: Sequence[SyndromeDataset], role: Literal["data", "measure"]
) -> tuple[np.ndarray, np.ndarray]:
    """Mean reported-|2> population per termination round for one qubit role.

    ``datasets`` must come from a termination-round sweep with the
    leakage-sensitive readout enabled.
    """
    if role not in ("data", "measure"):
        raise ValueError("role must be 'data' or 'measure'")
    rounds, pops = [], []
    for ds in sorted(datasets, key=lambda d: d.n_rounds):
        if ds.final_levels is None:
            raise ValueError("dataset lacks the final leakage-sensitive readout")
        cols = (
            ds.layout.data_indices if role == "data" else ds.layout.measure_indices
        )
        rounds.append(ds.n_rounds)
        pops.append(float(np.mean(ds.final_levels[:, cols] == 2)))
    return np.asarray(rounds), np.asarray(pops)


def export_population_csv(rows, fh) -> None:
    """Write population-curve rows (reset, role, round, population) as CSV."""
    fh.write("reset,role,round,population\n")
    for reset, role, rnd, pop in rows:
        fh.write(f"{int(reset)},{role},{rnd},{pop:.6e}\n")


def _layout_dict(layout: ChainLayout) -> dict:
    return {"n_qubits": layout.n_qubits, "data_below": list(layout.data_below)}


def _schedule_dict(schedule: Schedule) -> dict:
    d = asdict(schedule)
    if schedule.initial_bitstring != "random":
        d["initial_bitstring"] = list(schedule.initial_bitstring)
    if schedule.injection is not None:
        d["injection"] = list(schedule.injection)
    return d


def _noise_dict(noise: NoiseParams) -> dict:
    return {
        "p_flip_idle": noise.p_flip_idle,
        "p_flip_gate": noise.p_flip_gate,
        "p_relax": noise.p_relax,
        "gamma_up_readout": noise.gamma_up_readout,
        "gamma_up_gate": noise.gamma_up_gate,
        "gamma_down_idle": noise.gamma_down_idle,
        "p_cz_transport": noise.p_cz_transport,
        "reset_removal": list(noise.reset_removal),
        "readout_confusion": [list(r) for r in noise.readout_confusion],
    }


def layout_from_dict(d: dict) -> ChainLayout:
    return ChainLayout(
        n_qubits=d["n_qubits"], data_below=tuple(bool(b) for b in d["data_below"])
    )


def noise_from_dict(d: dict) -> NoiseParams:
    return NoiseParams(
        p_flip_idle=d["p_flip_idle"],
        p_flip_gate=d["p_flip_gate"],
        p_relax=d["p_relax"],
        gamma_up_readout=d["gamma_up_readout"],
        gamma_up_gate=d["gamma_up_gate"],
        gamma_down_idle=d["gamma_down_idle"],
        p_cz_transport=d["p_cz_transport"],
        reset_removal=tuple(d["reset_removal"]),
        readout_confusion=tuple(tuple(r) for r in d["readout_confusion"]),
    )


def schedule_from_dict(d: dict) -> Schedule:
    init = d["initial_bitstring"]
    return Schedule(
        n_rounds=d["n_rounds"],
        reset_enabled=d["reset_enabled"],
        injection=tuple(d["injection"]) if d.get("injection") else None,
        final_leakage_readout=d["final_leakage_readout"],
        initial_bitstring="random" if init == "random" else tuple(init),
    )


def save_dataset(ds: SyndromeDataset, directory: str | Path) -> Path:
    """Serialize a dataset: JSON manifest plus packed binary outcome files.

    The outcome file is row-major shot x round x measure-qubit bytes.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = {
        "outcomes": "outcomes.bin",
        "initial_bits": "initial_bits.bin",
        "final_data": "final_data.bin",
    }
    (directory / files["outcomes"]).write_bytes(
        np.ascontiguousarray(ds.outcomes).tobytes()
    )
    (directory / files["initial_bits"]).write_bytes(
        np.ascontiguousarray(ds.initial_bits).tobytes()
    )
    (directory / files["final_data"]).write_bytes(
        np.ascontiguousarray(ds.final_data).tobytes()
    )
    if ds.final_levels is not None:
        files["final_levels"] = "final_levels.bin"
        (directory / files["final_levels"]).write_bytes(
            np.ascontiguousarray(ds.final_levels).tobytes()
        )
    manifest = {
        "schema": DATASET_SCHEMA,
        "layout": _layout_dict(ds.layout),
        "noise": _noise_dict(ds.noise),
        "schedule": _schedule_dict(ds.schedule),
        "master_seed": list(ds.master_seed),
        "n_shots": ds.n_shots,
        "files": files,
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return directory / "manifest.json"


def load_dataset(directory: str | Path) -> SyndromeDataset:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    if manifest["schema"] != DATASET_SCHEMA:
        raise ValueError(f"unsupported dataset schema {manifest['schema']!r}")
    layout = layout_from_dict(manifest["layout"])
    noise = noise_from_dict(manifest["noise"])
    schedule = schedule_from_dict(manifest["schedule"])
    n = manifest["n_shots"]
    files = manifest["files"]

    def read(name: str, shape: tuple[int, ...]) -> np.ndarray:
        raw = (directory / files[name]).read_bytes()
        return np.frombuffer(raw, dtype=np.uint8).reshape(shape).copy()

    outcomes = read("outcomes", (n, schedule.n_rounds, layout.n_measure))
    initial_bits = read("initial_bits", (n, layout.n_data))
    final_data = read("final_data", (n, layout.n_data))
    final_levels = (
        read("final_levels", (n, layout.n_qubits))
        if "final_levels" in files
        else None
    )
    return SyndromeDataset(
        layout=layout,
        noise=noise,
        schedule=schedule,
        master_seed=tuple(manifest["master_seed"]),
        outcomes=outcomes,
        initial_bits=initial_bits,
        final_data=final_data,
        final_levels=final_levels,
    )
