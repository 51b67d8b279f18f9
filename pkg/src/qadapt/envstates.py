"""Generators for every environment-state family used in the experiments.

All generators are pure functions of their parameters and the supplied
stream, so ensembles parallelize trivially with independent child
streams.  Draw order is part of each generator's contract (documented
per function) because reproducibility depends on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

FAMILIES = ("haar_qubit", "random_qudit", "coherent", "cat", "zero_n")

DEFAULT_CUTOFF = 10

# Pre-renormalization truncation mass allowed for sampled coherent/cat
# states at the default cutoff; violations indicate a bad alpha range.
TAIL_GUARD = 0.01


@dataclass(frozen=True)
class EnvSpec:
    """Declarative description of an environment family.

    For ``coherent``/``cat``, ``alpha_re``/``alpha_im`` pin the coherent
    amplitude; when both are None, each trial samples alpha = a + ib with
    a, b uniform on [0, 1).  The same sampling convention is applied to
    cat states, whose ensemble distribution is otherwise unspecified.
    """

    family: str
    dim: int
    n: int | None = None
    cutoff: int | None = None
    alpha_re: float | None = None
    alpha_im: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.family == "haar_qubit" and self.dim != 2:
            raise ValueError("haar_qubit requires dim == 2")
        if self.family == "zero_n":
            if self.n is None or not 0 < self.n < self.dim:
                raise ValueError(f"zero_n requires 0 < n < dim, got n={self.n}, dim={self.dim}")
        if self.family in ("coherent", "cat"):
            cutoff = self.cutoff if self.cutoff is not None else DEFAULT_CUTOFF
            if self.dim != cutoff + 1:
                raise ValueError(
                    f"{self.family} requires dim == cutoff + 1, got dim={self.dim}, cutoff={cutoff}"
                )
        if (self.alpha_re is None) != (self.alpha_im is None):
            raise ValueError("alpha_re and alpha_im must be given together")
        if self.alpha_re is not None and self.family not in ("coherent", "cat"):
            raise ValueError(f"alpha applies only to coherent/cat, not {self.family}")

    @property
    def fixed_alpha(self) -> complex | None:
        if self.alpha_re is None:
            return None
        return complex(self.alpha_re, self.alpha_im)


def haar_qubit(rng: RngStream) -> np.ndarray:
    """Haar-uniform qubit: cos(theta) uniform on [-1, 1], phi on [0, 2pi).

    Consumes two draws, the cos(theta) draw first.  Returns
    cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
    """
    cos_theta = 2.0 * rng.uniform() - 1.0
    phi = 2.0 * math.pi * rng.uniform()
    half = 0.5 * math.acos(cos_theta)
    return np.array(
        [math.cos(half), complex(math.cos(phi), math.sin(phi)) * math.sin(half)],
        dtype=np.complex128,
    )


def random_qudit(d: int, rng: RngStream) -> np.ndarray:
    """Random superposition with c_k = a + ib, a, b uniform on [0, 1).

    Consumes 2d draws in the fixed order a_0, b_0, a_1, b_1, ...; the
    vector is then normalized.  An all-zero draw (probability ~2^-53 per
    component) is retried once, then aborts.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    for _ in range(2):
        draws = rng.uniforms(2 * d)
        vec = draws[0::2] + 1j * draws[1::2]
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            return vec / norm
    raise RuntimeError("random_qudit drew the zero vector twice; stream is broken")


def coherent(alpha: complex, cutoff: int) -> tuple[np.ndarray, float]:
    """Truncated coherent state and its pre-renormalization tail mass.

    Amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n = 0..cutoff,
    renormalized to a valid state in dimension cutoff + 1.  The returned
    tail is 1 - sum_n<=cutoff |<n|alpha>|^2, i.e. the probability mass cut
    off by the truncation before renormalization.
    """
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    alpha = complex(alpha)
    n = np.arange(cutoff + 1)
    # alpha^n / sqrt(n!) built by cumulative product for numerical sanity
    ratios = np.ones(cutoff + 1, dtype=np.complex128)
    ratios[1:] = alpha / np.sqrt(n[1:])
    amps = math.exp(-0.5 * abs(alpha) ** 2) * np.cumprod(ratios)
    kept = float(np.sum(amps.real**2 + amps.imag**2))
    tail = max(0.0, 1.0 - kept)
    if alpha == 0:
        return amps, tail  # exactly |0>, norm already 1
    return amps / math.sqrt(kept), tail


def cat(alpha: complex, cutoff: int) -> tuple[np.ndarray, float]:
    """Truncated even cat state (|alpha> + |-alpha>) / sqrt(N), with tail.

    Odd Fock components vanish identically and are set to exact zeros;
    the normalization uses the truncated vector itself, not the analytic
    2(1 + e^{-2|alpha|^2}).  The tail is the fraction of the analytic
    (un-truncated, un-normalized) mass lost to truncation.
    """
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    alpha = complex(alpha)
    if alpha == 0:
        raise ValueError("cat state requires |alpha| > 0")
    n = np.arange(cutoff + 1)
    ratios = np.ones(cutoff + 1, dtype=np.complex128)
    ratios[1:] = alpha / np.sqrt(n[1:])
    branch = math.exp(-0.5 * abs(alpha) ** 2) * np.cumprod(ratios)
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[0::2] = 2.0 * branch[0::2]  # alpha^n +(-alpha)^n = 2 alpha^n, n even
    kept = float(np.sum(amps.real**2 + amps.imag**2))
    full = 2.0 * (1.0 + math.exp(-2.0 * abs(alpha) ** 2))
    tail = max(0.0, 1.0 - kept / full)
    return amps / math.sqrt(kept), tail


def zero_n(n: int, d: int) -> np.ndarray:
    """Equal superposition (|0> + |n>) / sqrt(2) in dimension d."""
    if not 0 < n < d:
        raise ValueError(f"need 0 < n < d, got n={n}, d={d}")
    vec = np.zeros(d, dtype=np.complex128)
    vec[0] = vec[n] = math.sqrt(0.5)
    return vec


def _sample_alpha(spec: EnvSpec, rng: RngStream) -> complex:
    if spec.fixed_alpha is not None:
        return spec.fixed_alpha
    a = rng.uniform()
    b = rng.uniform()
    return complex(a, b)


def sample_environment(spec: EnvSpec, rng: RngStream) -> np.ndarray:
    """Draw one environment state according to ``spec``.

    Families with sampled parameters consume draws from ``rng`` in the
    order documented by the underlying generator; deterministic families
    (zero_n, fixed-alpha coherent/cat) consume none.
    """
    if spec.family == "haar_qubit":
        return haar_qubit(rng)
    if spec.family == "random_qudit":
        return random_qudit(spec.dim, rng)
    cutoff = spec.cutoff if spec.cutoff is not None else DEFAULT_CUTOFF
    if spec.family == "coherent":
        alpha = _sample_alpha(spec, rng)
        vec, tail = coherent(alpha, cutoff)
    elif spec.family == "cat":
        alpha = _sample_alpha(spec, rng)
        if alpha == 0:  # measure-zero draw; nudge off the invalid point
            alpha = complex(2.0**-53, 0.0)
        vec, tail = cat(alpha, cutoff)
    else:
        return zero_n(spec.n, spec.dim)
    if cutoff >= DEFAULT_CUTOFF and abs(alpha) <= math.sqrt(2.0) and tail > TAIL_GUARD:
        raise ValueError(f"truncation tail {tail:.4g} exceeds {TAIL_GUARD} for alpha={alpha}")
    return vec
