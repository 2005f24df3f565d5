"""Experiment configuration: schema, validation, hashing.

Configs are plain JSON documents with a versioned schema id.  Every run
records the canonical hash of its config so outputs are traceable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .code_sim import ChainLayout, NoiseParams, Schedule, layout_from_dict, noise_from_dict
from . import defaults

CONFIG_SCHEMA = "leakqec.config/v1"

EXPERIMENT_KINDS = (
    "reset-sweep",
    "leakage-growth",
    "injection",
    "pij",
    "decode",
    "lambda-scan",
    "postselect",
)


class ConfigError(ValueError):
    """Raised when an experiment config fails validation."""


@dataclass
class ExperimentConfig:
    """Validated experiment description.

    ``raw`` keeps the canonical JSON document (used for hashing); typed
    accessors build the simulation objects on demand.
    """

    kind: str
    seed: int
    shots: tuple[int, int]
    raw: dict[str, Any] = field(repr=False)

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        schema = doc.get("schema", CONFIG_SCHEMA)
        if schema != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {schema!r}")
        kind = doc.get("kind")
        if kind not in EXPERIMENT_KINDS:
            raise ConfigError(
                f"kind must be one of {', '.join(EXPERIMENT_KINDS)}; got {kind!r}"
            )
        seed = doc.get("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        shots_doc = doc.get("shots", {})
        bitstrings = shots_doc.get("bitstrings", 40)
        repeats = shots_doc.get("repeats", 1000)
        if (
            not isinstance(bitstrings, int)
            or not isinstance(repeats, int)
            or bitstrings < 1
            or repeats < 1
        ):
            raise ConfigError("shots.bitstrings and shots.repeats must be >= 1")
        cfg = cls(kind=kind, seed=seed, shots=(bitstrings, repeats), raw=dict(doc))
        # construct the typed objects once to surface range errors early
        try:
            cfg.layout()
            cfg.noise()
            if kind not in ("reset-sweep", "postselect"):
                cfg.schedule().validate_for(cfg.layout())
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc
        return cfg

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def layout(self) -> ChainLayout:
        doc = self.raw.get("layout", {})
        if "data_below" in doc:
            return layout_from_dict(doc)
        return ChainLayout(n_qubits=doc.get("n_qubits", 21))

    def noise(self) -> NoiseParams:
        doc = self.raw.get("noise", {})
        preset = doc.get("preset", "calibrated-v1" if len(doc) <= 1 else None)
        if preset is None:
            return noise_from_dict(doc)
        base = defaults.calibrated_noise(preset)
        overrides = {k: v for k, v in doc.items() if k != "preset"}
        if not overrides:
            return base
        from .code_sim import _noise_dict

        merged = _noise_dict(base)
        for key, value in overrides.items():
            if key not in merged:
                raise ConfigError(f"unknown noise field {key!r}")
            merged[key] = value
        return noise_from_dict(merged)

    def schedule(self) -> Schedule:
        doc = self.raw.get("schedule", {})
        injection = doc.get("injection")
        init = doc.get("initial_bitstring", "random")
        return Schedule(
            n_rounds=doc.get("rounds", 30),
            reset_enabled=doc.get("reset", False),
            injection=tuple(injection) if injection else None,
            final_leakage_readout=doc.get("final_leakage_readout", False),
            initial_bitstring="random" if init == "random" else tuple(init),
        )

    def param(self, key: str, default=None):
        return self.raw.get(key, default)

    def canonical_json(self) -> str:
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def default_config(kind: str, seed: int = 0, **extra) -> ExperimentConfig:
    """Built-in config for a pipeline kind, overridable field by field."""
    doc: dict[str, Any] = {
        "schema": CONFIG_SCHEMA,
        "kind": kind,
        "seed": seed,
        "layout": {"n_qubits": 21},
        "noise": {"preset": "calibrated-v1"},
        "schedule": {"rounds": 30, "reset": False},
        "shots": {"bitstrings": 40, "repeats": 1000},
    }
    if kind == "leakage-growth":
        doc["schedule"]["final_leakage_readout"] = True
        doc["shots"] = {"bitstrings": 20, "repeats": 250}
        doc["k_values"] = list(range(1, 31))
    elif kind == "injection":
        doc["schedule"]["injection"] = [9, 10]
        doc["shots"] = {"bitstrings": 40, "repeats": 1000}
    elif kind == "pij":
        doc["pij"] = {"qubit": 5, "pair": [4, 5]}
    elif kind == "lambda-scan":
        doc["sizes"] = [5, 9, 13, 17, 21]
        doc["rounds_scan"] = [10, 20, 30]
    elif kind == "reset-sweep":
        doc["swap_grid"] = [float(t) for t in range(10, 62, 2)]
        doc["hold_grid"] = [float(t) for t in range(0, 525, 25)]
        doc["initial_level"] = 1
    elif kind == "postselect":
        doc["postselect"] = {"window": 30, "threshold": 0.25, "removal_span": 1000}
    doc.update(extra)
    return ExperimentConfig.from_dict(doc)
