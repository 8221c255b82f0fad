"""Variational search for states whose small marginals are as mixed as
possible.

The objective is the negated mean entanglement entropy over all
floor(N/2)-site subsystems; its floor is -k bits, attained exactly when
every such marginal is maximally mixed. The search runs multi-start
gradient descent over either a full complex parametrization of the
amplitudes or, for four qubits, a permutation-symmetric three-group ansatz
whose seven on/off amplitude patterns are each swept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from . import optimize
from .core import GuardError, PureState, Register, entropy_of_spectrum
from .engine import best_response_energy

LOSS_BOUND_SLACK = 1e-9  # stop restarting once this close to the -k floor
_LOG_FLOOR = 1e-18


# ---------------------------------------------------------------------------
# Mean-entropy loss
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyLossSpec:
    """Which subsystems the mean entropy runs over, and in which log base."""

    n_sites: int
    k: int
    subsystems: tuple[tuple[int, ...], ...]
    log_base: float = 2.0

    @classmethod
    def for_sites(
        cls, n_sites: int, log_base: float = 2.0, halve_even: bool = True
    ) -> "EntropyLossSpec":
        """All size-floor(N/2) subsystems; for even N only one per
        complementary pair (their entropies coincide on pure states)."""
        k = n_sites // 2
        subsets = [
            tuple(c) for c in combinations(range(1, n_sites + 1), k)
        ]
        if halve_even and n_sites % 2 == 0:
            subsets = [s for s in subsets if 1 in s]
        return cls(
            n_sites=n_sites,
            k=k,
            subsystems=tuple(subsets),
            log_base=log_base,
        )

    @property
    def subset_count(self) -> int:
        return len(self.subsystems)


class _LossWorkspace:
    """Precomputed axis permutations for fast subsystem reshapes."""

    def __init__(self, spec: EntropyLossSpec, dims: tuple[int, ...]):
        self.spec = spec
        self.dims = dims
        self.perms = []
        self.inv_perms = []
        self.block_dims = []
        for subset in spec.subsystems:
            keep = [s - 1 for s in subset]
            rest = [a for a in range(len(dims)) if a not in keep]
            perm = keep + rest
            inv = np.argsort(perm)
            self.perms.append(tuple(perm))
            self.inv_perms.append(tuple(inv))
            self.block_dims.append(math.prod(dims[a] for a in keep))

    def loss(self, psi: np.ndarray) -> float:
        t = psi.reshape(self.dims)
        log_b = math.log(self.spec.log_base)
        total = 0.0
        for perm, dk in zip(self.perms, self.block_dims):
            m = np.transpose(t, perm).reshape(dk, -1)
            s2 = np.linalg.svd(m, compute_uv=False) ** 2
            nz = s2[s2 > _LOG_FLOOR]
            total += -np.sum(nz * np.log(nz)) / log_b
        return float(-total / len(self.perms))

    def loss_and_gradient(self, psi: np.ndarray):
        """Loss plus its Wirtinger gradient d(loss)/d(psi*)."""
        t = psi.reshape(self.dims)
        log_b = math.log(self.spec.log_base)
        total = 0.0
        g = np.zeros_like(t)
        for perm, inv, dk in zip(self.perms, self.inv_perms, self.block_dims):
            m = np.transpose(t, perm).reshape(dk, -1)
            lam, u = np.linalg.eigh(m @ m.conj().T)
            lam = np.clip(lam, _LOG_FLOOR, None)
            total += -np.sum(lam * np.log(lam)) / log_b
            # dS/dA* = W A with W = -u diag(log_b lam + 1/ln b) u^dagger
            w = -(np.log(lam) + 1.0) / log_b
            wa = (u * w) @ (u.conj().T @ m)
            g += np.transpose(
                wa.reshape([self.dims[a] for a in perm]), inv
            )
        scale = -1.0 / len(self.perms)
        return scale * total, scale * g.reshape(-1)


def mean_entropy_loss(state: PureState, spec: EntropyLossSpec) -> float:
    """Negative mean subsystem entropy; -k iff every marginal is maximally
    mixed."""
    if state.register.n_sites != spec.n_sites:
        raise ValueError("state and loss spec disagree on the site count")
    ws = _LossWorkspace(spec, state.register.dims)
    return ws.loss(state.amplitudes)


# ---------------------------------------------------------------------------
# Ansatz parametrizations
# ---------------------------------------------------------------------------


class GenericStateAnsatz:
    """Every amplitude free: 2 d^N real parameters, normalized on use."""

    name = "generic"

    def __init__(self, n_sites: int, d: int = 2):
        self.dim = d**n_sites
        self.n_params = 2 * self.dim

    def random_params(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.n_params)

    def unnormalized(self, params: np.ndarray) -> np.ndarray:
        return params[: self.dim] + 1j * params[self.dim :]

    def chain_gradient(self, params, g_v: np.ndarray) -> np.ndarray:
        return np.concatenate([2.0 * g_v.real, 2.0 * g_v.imag])


# Amplitude groups of the permutation-symmetric 4-qubit ansatz: the two
# uniform-weight strings, the eight odd-weight strings, the six weight-2
# strings. Entries are (basis index, phase index).
_SYM4_GROUPS = (
    ((0, 0), (15, 1)),
    ((1, 2), (2, 3), (4, 4), (8, 5), (7, 6), (11, 7), (13, 8), (14, 9)),
    ((3, 10), (6, 11), (12, 12), (5, 13), (10, 14), (9, 15)),
)
SYM4_FLAG_COMBOS = tuple(
    (a0, a1, a2)
    for a0 in (0, 1)
    for a1 in (0, 1)
    for a2 in (0, 1)
    if (a0, a1, a2) != (0, 0, 0)
)


class SymmetricAnsatz4:
    """Three-group 4-qubit ansatz: one shared magnitude per enabled group
    plus 16 phases."""

    name = "symmetric4"
    n_phases = 16

    def __init__(self, flags: tuple[int, int, int]):
        if len(flags) != 3 or not any(flags):
            raise ValueError("flags must be 3 bits, not all zero")
        self.flags = tuple(int(f) for f in flags)
        self.groups = [
            g for g, f in zip(_SYM4_GROUPS, self.flags) if f
        ]
        self.n_params = len(self.groups) + self.n_phases

    def random_params(self, rng: np.random.Generator) -> np.ndarray:
        mags = 0.25 + np.abs(rng.standard_normal(len(self.groups)))
        phases = rng.uniform(0.0, 2.0 * np.pi, self.n_phases)
        return np.concatenate([mags, phases])

    def unnormalized(self, params: np.ndarray) -> np.ndarray:
        mags = params[: len(self.groups)]
        phases = params[len(self.groups) :]
        v = np.zeros(16, dtype=complex)
        for m, group in zip(mags, self.groups):
            for basis, phase_idx in group:
                v[basis] = m * np.exp(1j * phases[phase_idx])
        return v

    def chain_gradient(self, params, g_v: np.ndarray) -> np.ndarray:
        mags = params[: len(self.groups)]
        phases = params[len(self.groups) :]
        grad = np.zeros(self.n_params)
        for gi, group in enumerate(self.groups):
            for basis, phase_idx in group:
                ph = np.exp(1j * phases[phase_idx])
                grad[gi] += 2.0 * np.real(np.conj(g_v[basis]) * ph)
                v_j = mags[gi] * ph
                grad[len(self.groups) + phase_idx] += -2.0 * np.imag(
                    np.conj(g_v[basis]) * v_j
                )
        return grad


def _make_ansatz(kind: str, n_sites: int, flags=None):
    if kind == "generic":
        return GenericStateAnsatz(n_sites)
    if kind == "symmetric4":
        if n_sites != 4:
            raise ValueError("the symmetric ansatz is 4-qubit specific")
        return SymmetricAnsatz4(flags or (1, 1, 1))
    raise ValueError(f"unknown ansatz kind {kind!r}")


def default_ansatz(n_sites: int) -> str:
    return "symmetric4" if n_sites == 4 else "generic"


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    state: PureState
    mean_entropy: float
    loss: float
    n_sites: int
    ansatz: str
    seed: int
    restarts: int


def _normalized_loss_fns(ansatz, workspace):
    def loss(params):
        v = ansatz.unnormalized(params)
        n = np.linalg.norm(v)
        if n < 1e-9:
            return 0.0
        return workspace.loss(v / n)

    def grad(params):
        v = ansatz.unnormalized(params)
        n = np.linalg.norm(v)
        if n < 1e-9:
            return np.zeros(ansatz.n_params)
        psi = v / n
        _, g_psi = workspace.loss_and_gradient(psi)
        g_v = (g_psi - psi * float(np.real(np.vdot(psi, g_psi)))) / n
        return ansatz.chain_gradient(params, g_v)

    return loss, grad


def search_max_entropy_state(
    n_sites: int,
    ansatz: str | None = None,
    restarts: int = 32,
    seed: int = 0,
    gradient: str = "analytic",
    max_iter: int = 2000,
    log_base: float = 2.0,
) -> SearchResult:
    """Multi-start descent of the mean-entropy loss.

    Deterministic for a given (seed, restarts): every restart draws its
    start point from a sub-seed keyed by index, the best loss wins, and
    ties go to the earlier restart. Restarting stops early once the -k
    floor is reached to numerical slack, since no restart can improve on
    it. ``gradient`` selects analytic derivatives (default) or central
    finite differences; both feed the same line-search loop.
    """
    if n_sites > 8:
        raise GuardError("entropy search capped at 8 sites")
    if n_sites < 2:
        raise ValueError("entropy search needs at least 2 sites")
    kind = ansatz or default_ansatz(n_sites)
    spec = EntropyLossSpec.for_sites(n_sites, log_base=log_base)
    register = Register.qubits(n_sites)
    workspace = _LossWorkspace(spec, register.dims)
    floor = -float(spec.k)

    if kind == "symmetric4":
        variants = [_make_ansatz(kind, n_sites, flags) for flags in SYM4_FLAG_COMBOS]
    else:
        variants = [_make_ansatz(kind, n_sites)]

    best_loss = np.inf
    best_params = None
    best_variant = None
    done = False
    for vi, variant in enumerate(variants):
        loss_fn, grad_fn = _normalized_loss_fns(variant, workspace)
        use_grad = grad_fn if gradient == "analytic" else None
        for r in range(restarts):
            rng = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(vi, r))
            )
            res = optimize.minimize(
                loss_fn,
                variant.random_params(rng),
                grad=use_grad,
                max_iter=max_iter,
                gtol=1e-8,
                ftol=1e-13,
                target=floor + LOSS_BOUND_SLACK,
            )
            if res.value < best_loss:
                best_loss = res.value
                best_params = res.x
                best_variant = variant
            if best_loss <= floor + LOSS_BOUND_SLACK:
                done = True
                break
        if done:
            break

    v = best_variant.unnormalized(best_params)
    state = PureState(register, v / np.linalg.norm(v))
    # evaluate the reported loss from the final state, not the line search
    final_loss = workspace.loss(state.amplitudes)
    return SearchResult(
        state=state,
        mean_entropy=-final_loss,
        loss=final_loss,
        n_sites=n_sites,
        ansatz=kind,
        seed=seed,
        restarts=restarts,
    )


# ---------------------------------------------------------------------------
# On-disk cache of searched states
# ---------------------------------------------------------------------------
#
# Record layout (text): one header line
#     N <sites> ansatz <kind> seed <seed> entropy <mean entropy>
# followed by d^N lines of "re im" amplitude pairs in basis order.


def save_search_record(path: Path, result: SearchResult) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        f"N {result.n_sites} ansatz {result.ansatz} seed {result.seed} "
        f"entropy {float(result.mean_entropy)!r}"
    ]
    for a in result.state.amplitudes:
        lines.append(f"{float(a.real)!r} {float(a.imag)!r}")
    path.write_text("\n".join(lines) + "\n")


def load_search_record(path: Path) -> SearchResult:
    lines = Path(path).read_text().strip().splitlines()
    head = lines[0].split()
    n_sites = int(head[1])
    kind = head[3]
    seed = int(head[5])
    entropy = float(head[7])
    amps = np.array(
        [complex(float(p.split()[0]), float(p.split()[1])) for p in lines[1:]]
    )
    state = PureState(Register.qubits(n_sites), amps)
    return SearchResult(
        state=state,
        mean_entropy=entropy,
        loss=-entropy,
        n_sites=n_sites,
        ansatz=kind,
        seed=seed,
        restarts=0,
    )


def cached_search(
    cache_dir: Path | None,
    n_sites: int,
    ansatz: str | None = None,
    restarts: int = 32,
    seed: int = 0,
    **kwargs,
) -> SearchResult:
    """Search with a per-(N, ansatz, seed) text cache."""
    kind = ansatz or default_ansatz(n_sites)
    if cache_dir is None:
        return search_max_entropy_state(
            n_sites, kind, restarts=restarts, seed=seed, **kwargs
        )
    path = Path(cache_dir) / f"maxent_n{n_sites}_{kind}_seed{seed}.txt"
    if path.exists():
        record = load_search_record(path)
        if record.n_sites == n_sites and record.ansatz == kind:
            return record
    result = search_max_entropy_state(
        n_sites, kind, restarts=restarts, seed=seed, **kwargs
    )
    save_search_record(path, result)
    return result


# ---------------------------------------------------------------------------
# Minimum energies from searched states
# ---------------------------------------------------------------------------


def fig2bc_min_energies(
    n_values,
    nb_values=None,
    cache_dir: Path | None = None,
    restarts: int = 32,
    seed: int = 0,
    **search_kwargs,
):
    """Best minimizing response against the searched max-entropy states.

    For each register size N the defender's state is the searched optimum;
    for each responder bound N_B the partition-optimized minimum energy is
    solved exactly. Returns one row dict per (N, N_B).
    """
    rows = []
    for n in n_values:
        result = cached_search(
            cache_dir, n, restarts=restarts, seed=seed, **search_kwargs
        )
        bounds = nb_values if nb_values is not None else range(1, n + 1)
        for n_b in bounds:
            if not 1 <= n_b <= n:
                continue
            outcome = best_response_energy(result.state, n_b, "min")
            rows.append(
                {
                    "n": n,
                    "n_b": n_b,
                    "m": n - n_b,
                    "m_over_nb": (n - n_b) / n_b,
                    "energy": outcome.energy,
                    "energy_per_site": outcome.per_site_energy,
                    "mean_entropy": result.mean_entropy,
                }
            )
    return rows
