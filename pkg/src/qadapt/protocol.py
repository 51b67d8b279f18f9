"""The measurement-driven adaptation loop.

One iteration: measure the register in the agent's current frame, shrink
the exploration range on the agent-aligned outcome (reward) or grow it on
any other outcome (punishment), and in the punished case rotate the agent
by random angles inside the span of its own direction and the measured
one.  The agent is always ``frame @ |0>``; the whole history lives in the
single accumulated ``frame`` unitary.

The exploration range Delta is tracked in log space.  The update rule is
purely multiplicative (one factor of epsilon or 1/epsilon per iteration,
then a clamp at delta_max), so log Delta moves by exactly +/- log epsilon
per step and never underflows even over thousands of rewarded iterations;
the linear Delta is recovered with exp() where an angle scale is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qstate import born_probabilities, sample_outcome, two_level_unitary
from .rng import RngStream

FULL_RANGE = 4.0 * math.pi


@dataclass(frozen=True)
class RewardParams:
    """Reward ratio epsilon (punishment ratio 1/epsilon) and Delta bounds."""

    epsilon: float
    delta_init: float = FULL_RANGE
    delta_max: float = FULL_RANGE
    log_epsilon: float = field(init=False, repr=False)
    log_delta_max: float = field(init=False, repr=False)

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0.0 < self.delta_init <= self.delta_max:
            raise ValueError(
                f"need 0 < delta_init <= delta_max, got {self.delta_init}, {self.delta_max}"
            )
        object.__setattr__(self, "log_epsilon", math.log(self.epsilon))
        object.__setattr__(self, "log_delta_max", math.log(self.delta_max))


@dataclass
class AgentState:
    """Accumulated frame (agent state = frame @ |0>), range, and counter."""

    frame: np.ndarray
    log_delta: float
    iteration: int = 0

    @property
    def delta(self) -> float:
        return math.exp(self.log_delta)

    @classmethod
    def fresh(cls, dim: int, params: RewardParams) -> "AgentState":
        return cls(frame=np.eye(dim, dtype=np.complex128), log_delta=math.log(params.delta_init))


@dataclass(slots=True)
class IterationRecord:
    """One iteration's evidence: outcome, angles, range, and fidelity."""

    iteration: int
    outcome: int
    alpha: float
    beta: float
    delta_after: float
    log_delta_after: float
    fidelity_after: float
    theta_equiv: float


@dataclass
class TrialResult:
    env_label: str
    dim: int
    seed: int
    records: list[IterationRecord]
    initial_fidelity: float


def _log_reward_update(log_delta: float, outcome: int, params: RewardParams) -> float:
    if outcome == 0:
        return log_delta + params.log_epsilon
    return min(log_delta - params.log_epsilon, params.log_delta_max)


def reward_update(delta: float, outcome: int, params: RewardParams) -> float:
    """Multiplicative range update: epsilon * delta on reward (outcome 0),
    min(delta / epsilon, delta_max) otherwise."""
    if not 0.0 < delta <= params.delta_max:
        raise ValueError(f"delta {delta} outside (0, {params.delta_max}]")
    return math.exp(_log_reward_update(math.log(delta), outcome, params))


def step(
    agent: AgentState, env: np.ndarray, params: RewardParams, rng: RngStream
) -> tuple[AgentState, IterationRecord]:
    """One protocol iteration against a fresh copy of the environment.

    Consumes one uniform draw for the measurement, plus two more (the
    alpha draw first, then beta) only when the outcome is punishing.
    Returns a new AgentState; inputs are not mutated.
    """
    frame = agent.frame
    d = frame.shape[0]
    if env.shape[0] != d:
        raise ValueError(f"dimension mismatch: agent {d} vs environment {env.shape[0]}")

    probs = born_probabilities(frame, env)
    outcome = sample_outcome(probs, rng)

    if outcome == 0:
        alpha = 0.0
        beta = 0.0
        new_frame = frame
        fidelity_after = float(probs[0])
    else:
        delta = math.exp(agent.log_delta)
        alpha = rng.uniform_symmetric() * delta
        beta = rng.uniform_symmetric() * delta
        rot = two_level_unitary(d, 0, outcome, alpha, beta)
        # frame @ rot touches only columns 0 and `outcome`; doing just those
        # keeps the step O(d) instead of O(d^2) without changing the result.
        col0 = frame[:, 0]
        colm = frame[:, outcome]
        new_frame = frame.copy()
        new_frame[:, 0] = rot[0, 0] * col0 + rot[outcome, 0] * colm
        new_frame[:, outcome] = rot[0, outcome] * col0 + rot[outcome, outcome] * colm
        fidelity_after = float(abs(np.vdot(new_frame[:, 0], env)) ** 2)

    log_delta_after = _log_reward_update(agent.log_delta, outcome, params)
    record = IterationRecord(
        iteration=agent.iteration + 1,
        outcome=outcome,
        alpha=alpha,
        beta=beta,
        delta_after=math.exp(log_delta_after),
        log_delta_after=log_delta_after,
        fidelity_after=fidelity_after,
        theta_equiv=2.0 * math.acos(math.sqrt(min(fidelity_after, 1.0))),
    )
    return AgentState(new_frame, log_delta_after, agent.iteration + 1), record


def run_trial(
    env: np.ndarray,
    params: RewardParams,
    n_iters: int,
    seed: int,
    env_label: str = "",
    copy_budget: int | None = None,
) -> TrialResult:
    """Run one trial: identical environment copies, n_iters iterations.

    Deterministic given (env, params, n_iters, seed).  ``copy_budget``
    caps the number of environment copies consumed (one per iteration);
    the trial truncates when the budget runs out.
    """
    if n_iters < 1:
        raise ValueError(f"n_iters must be >= 1, got {n_iters}")
    env = np.asarray(env, dtype=np.complex128)
    rng = RngStream(seed)
    agent = AgentState.fresh(env.shape[0], params)
    if copy_budget is not None:
        n_iters = min(n_iters, copy_budget)

    records: list[IterationRecord] = []
    initial_fidelity = float(abs(env[0]) ** 2)
    for _ in range(n_iters):
        agent, record = step(agent, env, params, rng)
        records.append(record)
    return TrialResult(
        env_label=env_label,
        dim=env.shape[0],
        seed=seed,
        records=records,
        initial_fidelity=initial_fidelity,
    )
