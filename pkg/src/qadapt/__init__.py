"""Measurement-based adaptation of a quantum agent to an unknown state.

An agent state vector is steered toward an unknown environment state by
repeated register measurements, a multiplicative reward/punishment rule
on an exploration range, and partially random two-level rotations.  The
package provides the reduced state-vector simulator, environment-state
generators, brute-force verification oracles, a seeded ensemble harness,
and a command-line interface for named experiment reproductions.
"""

from ._version import __version__
from .envstates import EnvSpec, cat, coherent, haar_qubit, random_qudit, sample_environment, zero_n
from .harness import AggregateResult, ExperimentConfig, derive_trial_seed, run_ensemble, write_results
from .protocol import AgentState, IterationRecord, RewardParams, TrialResult, reward_update, run_trial, step
from .qstate import (
    apply_unitary,
    basis_state,
    born_probabilities,
    fidelity,
    sample_outcome,
    two_level_unitary,
    xor_gate_apply,
)
from .rng import RngStream, derive_seed

__all__ = [
    "AgentState",
    "AggregateResult",
    "EnvSpec",
    "ExperimentConfig",
    "IterationRecord",
    "RewardParams",
    "RngStream",
    "TrialResult",
    "apply_unitary",
    "basis_state",
    "born_probabilities",
    "cat",
    "coherent",
    "derive_seed",
    "derive_trial_seed",
    "fidelity",
    "haar_qubit",
    "random_qudit",
    "reward_update",
    "run_ensemble",
    "run_trial",
    "sample_environment",
    "sample_outcome",
    "step",
    "two_level_unitary",
    "write_results",
    "xor_gate_apply",
    "zero_n",
]
