"""Haar-random unitaries and the random-defence entropy statistics.

Sampling uses the Ginibre + QR construction with the R-diagonal phase
correction that makes the distribution left- and right-invariant. Every
sample draws from its own sub-seeded generator keyed by (seed, index), so
serial and parallel runs produce identical streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import PureState, Register, subsystem_entropy


def sample_haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed unitary of the given dimension."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def subseed_rng(seed: int, index: int) -> np.random.Generator:
    """Independent per-index generator; the contract parallel runs rely on."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@dataclass(frozen=True)
class HaarSampleReport:
    samples: int
    seed: int
    mean: float
    std: float
    max: float
    pooled_mean: float
    per_sample: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.per_sample, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "per_sample", a)


def complementary_pairs(n_sites: int) -> list[tuple[int, ...]]:
    """Half-size subsystems, one per complementary pair (those holding site 1)."""
    k = n_sites // 2
    return [
        c for c in combinations(range(1, n_sites + 1), k) if 1 in c
    ]


def haar_entropy_statistics(
    samples: int,
    seed: int = 0,
    n_sites: int = 4,
    initial: PureState | None = None,
) -> HaarSampleReport:
    """Mean half-register entanglement entropy of Haar-random defences.

    Each sample applies one Haar unitary on the whole register (starting
    from |0...0> unless an initial state is given) and averages the
    entanglement entropy in bits over the complementary half-size
    bipartitions (three 2-site ones for N=4). The aggregate mean is
    reported both as the mean of per-sample means and pooled over all
    subsystem entropies; with complementary-pair averaging the two agree.
    """
    register = Register.qubits(n_sites)
    subsystems = complementary_pairs(n_sites)
    if initial is None:
        start = np.zeros(register.total_dim, dtype=complex)
        start[0] = 1.0
    else:
        if initial.register.dims != register.dims:
            raise ValueError("initial state has the wrong register")
        start = initial.amplitudes
    per_sample = np.empty(samples)
    pooled = 0.0
    for i in range(samples):
        u = sample_haar_unitary(register.total_dim, subseed_rng(seed, i))
        state = PureState(register, u @ start)
        entropies = [subsystem_entropy(state, sub) for sub in subsystems]
        per_sample[i] = float(np.mean(entropies))
        pooled += float(np.sum(entropies))
    return HaarSampleReport(
        samples=samples,
        seed=seed,
        mean=float(np.mean(per_sample)),
        std=float(np.std(per_sample)),
        max=float(np.max(per_sample)),
        pooled_mean=pooled / (samples * len(subsystems)),
        per_sample=per_sample,
    )
