"""Sequential two-player zero-sum energy game on a quantum register.

One player raises the register energy, the other lowers it; a move is one
unitary per block of a partition of the sites, every block within the
player's entangling capability. The second mover's exact best response is
computed from the spectra of the first mover's reduced states: with
unitaries a player can reorder a block's eigenvalues against the block's
energy levels but never change them, so the reachable extremes are the
passive (lowest) and anti-passive (highest) rearrangements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .core import (
    BlockUnitary,
    GuardError,
    MixedState,
    PureState,
    Register,
    SchmidtSpectrum,
    State,
    apply_block_unitary,
    clamp_spectrum,
    energy_expectation,
    partial_trace,
    product_plus_state,
)

PARTITION_GUARD = 10  # exact partition enumeration only up to this many sites
CLOSED_FORM_GUARD = 26  # 2^M weight vectors stay addressable below this

EIGENVALUE_SUM_ATOL = 1e-8


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GameConfig:
    """Register size, per-player entangling bounds, and move order."""

    n_sites: int
    n_a: int
    n_b: int
    order: str = "AB"  # "AB": A moves first; "BA": B moves first
    local_dim: int = 2

    def __post_init__(self):
        if not 1 <= self.n_b <= self.n_a <= self.n_sites:
            raise ValueError(
                f"need 1 <= N_B <= N_A <= N, got "
                f"N_B={self.n_b}, N_A={self.n_a}, N={self.n_sites}"
            )
        if self.order not in ("AB", "BA"):
            raise ValueError("order must be 'AB' or 'BA'")

    def capability(self, player: str) -> int:
        return self.n_a if player == "A" else self.n_b


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint blocks covering sites 1..N, each within a size bound.

    Stored canonically: sites ascending within a block, blocks ordered by
    their first site.
    """

    blocks: tuple[tuple[int, ...], ...]
    max_block: int

    def __post_init__(self):
        blocks = tuple(
            tuple(sorted(int(s) for s in b)) for b in self.blocks
        )
        blocks = tuple(sorted(blocks, key=lambda b: b[0]))
        all_sites = [s for b in blocks for s in b]
        n = len(all_sites)
        if sorted(all_sites) != list(range(1, n + 1)):
            raise ValueError(
                f"blocks must disjointly cover sites 1..N, got {blocks}"
            )
        if any(len(b) > self.max_block for b in blocks):
            raise ValueError(
                f"block size exceeds bound {self.max_block}: {blocks}"
            )
        object.__setattr__(self, "blocks", blocks)

    @property
    def n_sites(self) -> int:
        return sum(len(b) for b in self.blocks)


@dataclass(frozen=True)
class SpectrumTable:
    """Sorted energy levels of a block's local Hamiltonian, degeneracies expanded."""

    energies: np.ndarray  # nondecreasing, length = block dimension
    block_size: int

    def __post_init__(self):
        e = np.sort(np.asarray(self.energies, dtype=float))
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)


def spectrum_table(register: Register, sites: Sequence[int]) -> SpectrumTable:
    """Energy levels of a block: all sums of its sites' local spectra."""
    sites = sorted(register.check_sites(sites))
    spectra = [register.local_spectra[s - 1] for s in sites]
    energies = reduce(np.add.outer, spectra).reshape(-1)
    return SpectrumTable(energies=energies, block_size=len(sites))


def qubit_spectrum_table(n_qubits: int) -> SpectrumTable:
    """Sigma_z block table: energies n-2k with multiplicity C(n, k)."""
    if n_qubits > CLOSED_FORM_GUARD:
        raise GuardError(f"qubit table for n={n_qubits} exceeds guard")
    spectra = [np.array([1.0, -1.0])] * n_qubits
    return SpectrumTable(
        energies=reduce(np.add.outer, spectra).reshape(-1),
        block_size=n_qubits,
    )


@dataclass(frozen=True)
class GameOutcome:
    energy: float
    per_site_energy: float
    partition_chosen: BlockPartition | None = None
    responder_unitaries: tuple[BlockUnitary, ...] | None = None
    final_state: State | None = None


# ---------------------------------------------------------------------------
# Passive / anti-passive rearrangement energies
# ---------------------------------------------------------------------------


def _spectrum_values(spectrum) -> np.ndarray:
    if isinstance(spectrum, SchmidtSpectrum):
        lam = np.asarray(spectrum.eigenvalues, dtype=float)
    else:
        lam = clamp_spectrum(np.asarray(spectrum, dtype=float))
    if abs(lam.sum() - 1.0) > EIGENVALUE_SUM_ATOL:
        raise ValueError(f"eigenvalues sum to {lam.sum()}, expected 1")
    return np.sort(lam)[::-1]


def _paired_energy(spectrum, table: SpectrumTable, energies: np.ndarray) -> float:
    lam = _spectrum_values(spectrum)
    if len(lam) > len(energies):
        if np.any(lam[len(energies):] > 1e-12):
            raise ValueError(
                f"{np.sum(lam > 1e-12)} nonzero eigenvalues exceed the "
                f"{len(energies)}-level table"
            )
        lam = lam[: len(energies)]
    return float(np.dot(lam, energies[: len(lam)]))


def passive_energy(spectrum, table: SpectrumTable) -> float:
    """Minimum block energy reachable by unitaries: largest eigenvalues
    paired with the lowest energy levels."""
    return _paired_energy(spectrum, table, table.energies)


def antipassive_energy(spectrum, table: SpectrumTable) -> float:
    """Maximum block energy reachable by unitaries (both sorted decreasing)."""
    return _paired_energy(spectrum, table, table.energies[::-1])


# ---------------------------------------------------------------------------
# Partition enumeration
# ---------------------------------------------------------------------------


def enumerate_partitions(n_sites: int, max_block: int) -> list[BlockPartition]:
    """All set partitions of {1..N} with every block size <= max_block.

    Canonical order: blocks sorted by first element, sites ascending within
    a block; the list is ordered by recursive construction and free of
    duplicates.
    """
    if n_sites > PARTITION_GUARD:
        raise GuardError(
            f"partition enumeration capped at {PARTITION_GUARD} sites, "
            f"got {n_sites}"
        )
    if n_sites < 1 or max_block < 1:
        raise ValueError("need n_sites >= 1 and max_block >= 1")
    results: list[BlockPartition] = []
    blocks: list[list[int]] = []

    def extend(site: int):
        if site > n_sites:
            results.append(
                BlockPartition(
                    blocks=tuple(tuple(b) for b in blocks),
                    max_block=max_block,
                )
            )
            return
        for b in blocks:
            if len(b) < max_block:
                b.append(site)
                extend(site + 1)
                b.pop()
        blocks.append([site])
        extend(site + 1)
        blocks.pop()

    extend(1)
    return results


# ---------------------------------------------------------------------------
# Best response
# ---------------------------------------------------------------------------


def _block_key(sites: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(sites))


class _BlockCache:
    """Per-call memo of reduced spectra, tables, and rearrangement energies."""

    def __init__(self, state: State):
        self.state = state
        self._eigs: dict[tuple[int, ...], np.ndarray] = {}
        self._tables: dict[tuple[int, ...], SpectrumTable] = {}
        self._values: dict[tuple[tuple[int, ...], str], float] = {}

    def eigenvalues(self, block: tuple[int, ...]) -> np.ndarray:
        if block not in self._eigs:
            rho = partial_trace(self.state, block)
            self._eigs[block] = clamp_spectrum(
                np.linalg.eigvalsh(rho.matrix)
            )
        return self._eigs[block]

    def table(self, block: tuple[int, ...]) -> SpectrumTable:
        if block not in self._tables:
            self._tables[block] = spectrum_table(self.state.register, block)
        return self._tables[block]

    def value(self, block: tuple[int, ...], objective: str) -> float:
        key = (block, objective)
        if key not in self._values:
            fn = passive_energy if objective == "min" else antipassive_energy
            self._values[key] = fn(self.eigenvalues(block), self.table(block))
        return self._values[key]


def best_response_energy(
    state: State,
    max_block: int,
    objective: str = "min",
    partition: BlockPartition | None = None,
    include_unitaries: bool = False,
) -> GameOutcome:
    """Optimal block-unitary response for one player.

    Sums each block's passive (``objective="min"``) or anti-passive
    (``"max"``) energy and optimizes over all legal partitions unless a
    fixed one is given. Ties between partitions go to the canonically
    smallest one.
    """
    if objective not in ("min", "max"):
        raise ValueError("objective must be 'min' or 'max'")
    n = state.register.n_sites
    if not 1 <= max_block <= n:
        raise ValueError(f"max_block must be in 1..{n}")
    cache = _BlockCache(state)
    if partition is not None:
        candidates = [partition]
    else:
        candidates = enumerate_partitions(n, max_block)
    best: tuple[float, BlockPartition] | None = None
    for part in candidates:
        total = sum(cache.value(b, objective) for b in part.blocks)
        if best is None:
            best = (total, part)
            continue
        better = total < best[0] if objective == "min" else total > best[0]
        if better or (total == best[0] and part.blocks < best[1].blocks):
            best = (total, part)
    energy, chosen = best
    unitaries = None
    if include_unitaries:
        unitaries = tuple(
            _rearrangement_unitary(state, b, cache, objective)
            for b in chosen.blocks
        )
    return GameOutcome(
        energy=energy,
        per_site_energy=energy / n,
        partition_chosen=chosen,
        responder_unitaries=unitaries,
    )


def _rearrangement_unitary(
    state: State,
    block: tuple[int, ...],
    cache: _BlockCache,
    objective: str,
) -> BlockUnitary:
    """Unitary sending the block's eigenbasis onto energy eigenstates.

    Eigenvectors ordered by decreasing eigenvalue meet computational basis
    states ordered by increasing (min) or decreasing (max) energy; stable
    sorts fix the assignment among degeneracies.
    """
    rho = partial_trace(state, block)
    lam, vecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(-lam, kind="stable")
    vecs = vecs[:, order]
    energies = reduce(
        np.add.outer,
        [state.register.local_spectra[s - 1] for s in sorted(block)],
    ).reshape(-1)
    sign = 1.0 if objective == "min" else -1.0
    targets = np.argsort(sign * energies, kind="stable")
    u = np.zeros((len(energies), len(energies)), dtype=complex)
    u[targets, :] = vecs.conj().T
    return BlockUnitary(sites=tuple(sorted(block)), matrix=u)


# ---------------------------------------------------------------------------
# Closed-form minimum for a maximally spread block spectrum
# ---------------------------------------------------------------------------


def closed_form_min_energy(n_b: int, m: int) -> float:
    """Minimum total energy the N_B-block responder can reach when its
    reduced state is uniform over 2^M levels (M sites traced away from a
    maximally entangled preparation).

    Evaluated as the Iverson-bracket sum over basis levels grouped by
    spin-down count k (energy N_B - 2k, multiplicity C(N_B, k)), weighting
    the first 2^M levels 1/2^M each and negating; the symmetric qubit
    spectrum makes this equal to the passive energy of the uniform rank-2^M
    spectrum. Returns 0 once M >= N_B (fully mixed block).
    """
    if n_b < 1 or m < 0:
        raise ValueError("need N_B >= 1 and M >= 0")
    if m >= n_b:
        return 0.0
    if m > CLOSED_FORM_GUARD:
        raise GuardError(f"2^{m} weight vector exceeds guard")
    counts = [math.comb(n_b, k) for k in range(n_b + 1)]
    cumulative = np.cumsum(counts)
    i = np.arange(1, 2**m + 1)
    k_of_i = np.searchsorted(cumulative, i, side="left")
    levels = n_b - 2.0 * k_of_i
    return float(-np.sum(levels) / 2**m)


# ---------------------------------------------------------------------------
# Game orchestration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BestResponse:
    """Second-mover policy: exact best response, optionally on a fixed partition."""

    partition: BlockPartition | None = None


Strategy = Sequence[BlockUnitary] | BestResponse


class IllegalMoveError(ValueError):
    pass


def _validate_move(
    unitaries: Sequence[BlockUnitary], capability: int, n_sites: int, player: str
):
    used: set[int] = set()
    for bu in unitaries:
        if len(bu.sites) > capability:
            raise IllegalMoveError(
                f"player {player} may entangle at most {capability} sites, "
                f"move touches {len(bu.sites)}"
            )
        if any(not 1 <= s <= n_sites for s in bu.sites):
            raise IllegalMoveError(f"sites {bu.sites} out of range")
        if used & set(bu.sites):
            raise IllegalMoveError(
                f"player {player}'s blocks overlap at {used & set(bu.sites)}"
            )
        used |= set(bu.sites)


def play_sequential_game(
    config: GameConfig,
    strategy_a: Strategy,
    strategy_b: Strategy,
    initial_state: State | None = None,
) -> GameOutcome:
    """Run one round: first mover's unitaries, then the second mover's.

    The first mover's strategy must be an explicit list of block unitaries;
    the second mover may instead use :class:`BestResponse`, in which case
    the engine solves for the optimal partition response (A maximizes, B
    minimizes) and applies the synthesized unitaries. Energy is measured on
    the final state.
    """
    if initial_state is None:
        initial_state = product_plus_state(Register.qubits(config.n_sites))
    if initial_state.register.n_sites != config.n_sites:
        raise ValueError("initial state does not match the configured size")
    first, second = config.order[0], config.order[1]
    strategies = {"A": strategy_a, "B": strategy_b}
    if isinstance(strategies[first], BestResponse):
        raise IllegalMoveError(
            "the first mover needs explicit unitaries; best response is a "
            "second-mover policy"
        )

    state = initial_state
    partition = None
    responder = None
    for player in (first, second):
        strat = strategies[player]
        objective = "max" if player == "A" else "min"
        if isinstance(strat, BestResponse):
            solved = best_response_energy(
                state,
                config.capability(player),
                objective,
                partition=strat.partition,
                include_unitaries=True,
            )
            partition = solved.partition_chosen
            responder = solved.responder_unitaries
            moves: Sequence[BlockUnitary] = responder
        else:
            moves = tuple(strat)
            _validate_move(moves, config.capability(player), config.n_sites, player)
        for bu in moves:
            state = apply_block_unitary(state, bu)

    energy = energy_expectation(state)
    return GameOutcome(
        energy=energy,
        per_site_energy=energy / config.n_sites,
        partition_chosen=partition,
        responder_unitaries=responder,
        final_state=state,
    )


# ---------------------------------------------------------------------------
# Classical comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassicalOutcome:
    n_sites: int
    order: str
    second_player: str
    energy: float


def classical_baseline(n_sites: int, order: str = "AB") -> ClassicalOutcome:
    """Deterministic bit-flip game: the second mover always reaches its
    preferred extreme (+N for A, -N for B) whatever came before."""
    if order not in ("AB", "BA"):
        raise ValueError("order must be 'AB' or 'BA'")
    second = order[1]
    energy = float(-n_sites if second == "B" else n_sites)
    return ClassicalOutcome(
        n_sites=n_sites, order=order, second_player=second, energy=energy
    )


def classical_second_mover_check(n_sites: int) -> bool:
    """Exhaustively verify the second mover attains +-N from every initial
    register and every first-mover flip mask."""
    if n_sites > 16:
        raise GuardError("exhaustive classical check capped at 16 bits")
    size = 2**n_sites
    states = np.arange(size)
    ones = np.array([bin(s).count("1") for s in states])
    energies = n_sites - 2.0 * ones
    # first-mover result s1 = init ^ mask1 ranges over all states; the second
    # mover picks mask2, reaching s1 ^ mask2 which also ranges over all states
    reach = energies[states[:, None] ^ states[None, :]]
    mins = reach.min(axis=1)
    maxs = reach.max(axis=1)
    return bool(np.all(mins == -n_sites) and np.all(maxs == n_sites))
