"""Versioned default parameter sets.

The noise preset below is a SIMULATOR CALIBRATION, not measured device
data: the bit-flip and readout rates were tuned so that the no-reset
simulation lands near an error-suppression factor of 2 at 30 rounds, with
leakage rates taken at the per-round scale of the reference hardware
(readout-induced leakage dominating on measure qubits, CZ-induced leakage
on data qubits, per-round leakage decay of about 8%).  The split of the
leakage source between readout and CZ contributions is a modelling choice;
only their sums are constrained.
"""

from __future__ import annotations

from .code_sim import NoiseParams
from .reset_model import ResetPulseParams, paper_pulse_params, reset_error_budget

CALIBRATION_VERSION = "calibrated-v1"

# per-round / per-gate Monte-Carlo probabilities (see module docstring)
_CALIBRATED_V1 = dict(
    p_flip_idle=0.004,
    p_flip_gate=0.0015,
    p_relax=0.015,
    gamma_up_readout=0.0011,
    gamma_up_gate=0.00045,
    gamma_down_idle=0.081,
    p_cz_transport=0.065,
    reset_removal=(0.999, 0.998, 0.998),
    readout_confusion=(
        (0.99, 0.01, 0.0),
        (0.015, 0.985, 0.0),
        (0.01, 0.04, 0.95),
    ),
)


def calibrated_noise(version: str = CALIBRATION_VERSION) -> NoiseParams:
    """The versioned calibrated noise preset used by the default configs."""
    if version != CALIBRATION_VERSION:
        raise ValueError(f"unknown noise preset {version!r}")
    return NoiseParams(**_CALIBRATED_V1)


def reset_removal_from_pulse(params: ResetPulseParams | None = None):
    """Level -> ground-state probability map implied by the reset budget."""
    p = params or paper_pulse_params()
    return tuple(
        1.0 - reset_error_budget(p, level).p_total for level in (1, 2, 3)
    )
