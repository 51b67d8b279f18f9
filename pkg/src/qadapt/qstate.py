"""Dense complex state vectors, unitaries, and Born-rule measurement.

States are plain ``complex128`` numpy arrays of shape ``(d,)`` and
unitaries are ``(d, d)`` arrays; both are treated as immutable values once
built.  The target scale is small (``d`` around 11, at most a few dozen),
so everything is dense and row-major with no sparsity tricks.

Global phase is never canonicalized: all comparisons the adaptation
protocol cares about go through :func:`fidelity`, which is phase-blind.
"""

from __future__ import annotations

import numpy as np

from .rng import RngStream

# Probability-vector drift policy: silently renormalize float noise,
# abort on anything large enough to indicate a bug upstream.
PROB_RENORM_ABOVE = 1e-12
PROB_ABORT_ABOVE = 1e-9

STATE_NORM_TOL = 1e-10
UNITARY_TOL = 1e-10


def basis_state(d: int, j: int) -> np.ndarray:
    """Computational basis vector |j> in dimension d."""
    if not 0 <= j < d:
        raise ValueError(f"basis index {j} out of range for dimension {d}")
    vec = np.zeros(d, dtype=np.complex128)
    vec[j] = 1.0
    return vec


def check_state(vec: np.ndarray) -> np.ndarray:
    """Validate a state vector: finite entries, d >= 2, unit norm."""
    arr = np.asarray(vec, dtype=np.complex128)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise ValueError(f"state must be a vector of dimension >= 2, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("state has non-finite amplitudes")
    norm = np.linalg.norm(arr)
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise ValueError(f"state norm {norm!r} deviates from 1 by more than {STATE_NORM_TOL}")
    return arr


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    gram = u.conj().T @ u
    return bool(np.max(np.abs(gram - np.eye(u.shape[0]))) < tol)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Overlap probability |<a|b>|^2 between two pure states.

    Symmetric in its arguments; this is both the protocol's figure of
    merit and, for the agent-aligned outcome, the measured probability.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)) ** 2)


def born_probabilities(frame: np.ndarray, env: np.ndarray) -> np.ndarray:
    """Outcome distribution p_j = |<j| frame^dag |env>|^2.

    This is the register-outcome law after the copy gate, measured in the
    frame carried by the agent: index 0 carries exactly the current
    agent-environment fidelity.
    """
    frame = np.asarray(frame)
    env = np.asarray(env)
    if frame.ndim != 2 or frame.shape[0] != frame.shape[1]:
        raise ValueError(f"frame must be square, got shape {frame.shape}")
    if frame.shape[0] != env.shape[0]:
        raise ValueError(f"dimension mismatch: frame {frame.shape[0]} vs state {env.shape[0]}")
    rotated = frame.conj().T @ env
    probs = rotated.real**2 + rotated.imag**2
    total = probs.sum()
    if abs(total - 1.0) > PROB_ABORT_ABOVE:
        raise ValueError(f"probabilities sum to {total!r}; frame is not unitary or state not normalized")
    if abs(total - 1.0) > PROB_RENORM_ABOVE:
        probs = probs / total
    return probs


def sample_outcome(probs: np.ndarray, rng: RngStream) -> int:
    """Draw one outcome by inverse CDF over a single uniform variate.

    The scan is left-to-right over indices, so the mapping from the
    uniform draw to the outcome is fixed and platform-independent.
    Consumes exactly one draw from ``rng``.
    """
    u = rng.uniform()
    acc = 0.0
    last = len(probs) - 1
    for j in range(last):
        acc += probs[j]
        if u < acc:
            return j
    return last


def two_level_unitary(d: int, i: int, j: int, alpha: float, beta: float) -> np.ndarray:
    """Rotation exp(-i Sz alpha) exp(-i Sx beta) on span{|i>, |j>}.

    Sz = (|i><i| - |j><j|)/2 and Sx = (|i><j| + |j><i|)/2, so on the
    two-dimensional span (rows/cols ordered i, j) the matrix is

        [ e^{-ia/2} cos(b/2)     -i e^{-ia/2} sin(b/2) ]
        [ -i e^{ia/2} sin(b/2)    e^{ia/2} cos(b/2)    ]

    and every other basis vector is left exactly fixed.
    """
    if not (0 <= i < d and 0 <= j < d):
        raise ValueError(f"indices ({i}, {j}) out of range for dimension {d}")
    if i == j:
        raise ValueError(f"two-level indices must differ, got i == j == {i}")
    half_a = 0.5 * alpha
    half_b = 0.5 * beta
    phase = complex(np.cos(half_a), -np.sin(half_a))  # e^{-i alpha/2}
    c = np.cos(half_b)
    s = np.sin(half_b)
    u = np.eye(d, dtype=np.complex128)
    u[i, i] = phase * c
    u[i, j] = -1j * phase * s
    u[j, i] = -1j * np.conj(phase) * s
    u[j, j] = np.conj(phase) * c
    return u


def xor_gate_apply(control: int, target: int, d: int) -> tuple[int, int]:
    """Basis action |j>|k> -> |j>|j - k mod d> of the d-level copy gate.

    For d = 2 this is the CNOT action.  The target is wiped to 0 exactly
    when control and target agree, which is what lets a fresh register
    copy the control index: (j, 0) -> (j, j).
    """
    if not (0 <= control < d and 0 <= target < d):
        raise ValueError(f"indices ({control}, {target}) out of range for dimension {d}")
    return control, (control - target) % d


def apply_unitary(u: np.ndarray, state: np.ndarray) -> np.ndarray:
    """Matrix-vector action u @ state with a dimension check."""
    u = np.asarray(u)
    state = np.asarray(state)
    if u.ndim != 2 or u.shape[1] != state.shape[0]:
        raise ValueError(f"dimension mismatch: {u.shape} vs {state.shape}")
    return u @ state
