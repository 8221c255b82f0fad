"""Work extraction from mixed five-level pairs.

A diagonal single-site state with mirrored probabilities (p2, p1, p0, p1,
p2) has zero energy under the mirrored spectrum (E2, E1, 0, -E1, -E2), yet
is not thermal, so entangling unitaries on two copies extract strictly more
energy per site than the best single-site unitary. The authoritative bound
is the rearrangement oracle: sort the joint eigenvalues against the joint
energy levels. A published piecewise closed form for the two-site case is
evaluated verbatim for reconciliation only; it disagrees with the oracle on
part of the parameter range and is never used as ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from . import optimize
from .core import (
    BlockUnitary,
    GuardError,
    MixedState,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    PureState,
    Register,
    apply_block_unitary,
    energy_expectation,
    entropy_of_spectrum,
    psi_plus,
    spin_spectrum,
)
from .haar import sample_haar_unitary, subseed_rng

ORACLE_DIM_GUARD = 2**12


def qudit_energies(e1: float, e2: float) -> np.ndarray:
    return np.array([e2, e1, 0.0, -e1, -e2])


def qudit_probabilities(p0: float, p1: float, p2: float) -> np.ndarray:
    return np.array([p2, p1, p0, p1, p2])


@dataclass(frozen=True)
class QuditSpec:
    """Mirrored five-level site: probabilities (p2, p1, p0, p1, p2) on the
    energy ladder (E2, E1, 0, -E1, -E2).

    Requires p0 + 2 p1 + 2 p2 = 1 and 0 <= p2 <= p1 <= p0 with E2 > E1 > 0;
    boundary equalities (p2 = 0, p2 = p1, p1 = p0) are allowed and flagged
    by :attr:`is_boundary` since they make the rearrangement degenerate.
    """

    p0: float
    p1: float
    p2: float
    e1: float = 1.0
    e2: float = 4.0

    def __post_init__(self):
        total = self.p0 + 2.0 * self.p1 + 2.0 * self.p2
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        if not 0.0 <= self.p2 <= self.p1 <= self.p0:
            raise ValueError(
                "need 0 <= p2 <= p1 <= p0, got "
                f"({self.p0}, {self.p1}, {self.p2})"
            )
        if not self.e2 > self.e1 > 0.0:
            raise ValueError("need E2 > E1 > 0")

    @property
    def is_boundary(self) -> bool:
        return self.p2 == 0.0 or self.p2 == self.p1 or self.p1 == self.p0

    def probabilities(self) -> np.ndarray:
        return qudit_probabilities(self.p0, self.p1, self.p2)

    def energies(self) -> np.ndarray:
        return qudit_energies(self.e1, self.e2)

    def register(self, n_sites: int = 1) -> Register:
        return Register(
            dims=(5,) * n_sites, local_spectra=(self.energies(),) * n_sites
        )

    def density_matrix(self, n_sites: int = 1) -> MixedState:
        rho = reduce(np.kron, [np.diag(self.probabilities())] * n_sites)
        return MixedState(self.register(n_sites), rho.astype(complex))


def random_qudit_spec(rng: np.random.Generator, e1=1.0, e2=4.0) -> QuditSpec:
    """Random interior spec: strictly ordered probabilities, unit trace."""
    while True:
        p2 = rng.uniform(0.0, 0.15)
        p1 = rng.uniform(p2 + 1e-3, 0.3)
        p0 = 1.0 - 2.0 * p1 - 2.0 * p2
        if p0 > p1 + 1e-3:
            return QuditSpec(p0=p0, p1=p1, p2=p2, e1=e1, e2=e2)


# ---------------------------------------------------------------------------
# Maximum extractable energy
# ---------------------------------------------------------------------------


def single_site_max_energy(spec: QuditSpec) -> float:
    """Best single-site unitary energy: p0 E2 + p1 E1 - p2 (E1 + E2)."""
    return spec.p0 * spec.e2 + spec.p1 * spec.e1 - spec.p2 * (spec.e1 + spec.e2)


def max_energy_oracle(site_specs: Sequence[QuditSpec]) -> float:
    """Exact maximum total energy over joint unitaries on the given sites.

    Rearrangement bound: joint eigenvalues sorted nonincreasing paired with
    joint energy levels sorted nonincreasing. Ground truth for every
    max-energy claim in this module.
    """
    if not site_specs:
        raise ValueError("need at least one site")
    probs = [s.probabilities() for s in site_specs]
    energies = [s.energies() for s in site_specs]
    dim = 5 ** len(site_specs)
    if dim > ORACLE_DIM_GUARD:
        raise GuardError(f"joint dimension {dim} exceeds oracle guard")
    joint_p = reduce(np.multiply.outer, probs).reshape(-1)
    joint_e = reduce(np.add.outer, energies).reshape(-1)
    return float(np.dot(np.sort(joint_p)[::-1], np.sort(joint_e)[::-1]))


@dataclass(frozen=True)
class TwoSiteClosedForm:
    low_branch: float
    high_branch: float
    selected: float
    branch: str  # "low" when p0 p2 <= p1^2, else "high"


def two_site_closed_form(spec: QuditSpec) -> TwoSiteClosedForm:
    """Published piecewise per-site expression for the two-site maximum,
    evaluated verbatim on both branches.

    Reported for reconciliation against :func:`max_energy_oracle` only; the
    printed coefficients do not reproduce the oracle everywhere (one term
    carries no energy factor at all), so the discrepancy is surfaced rather
    than silently corrected.
    """
    p0, p1, p2, e1, e2 = spec.p0, spec.p1, spec.p2, spec.e1, spec.e2
    common = (
        e2 * p0**2
        + (e1 + 2.0 * e2) * p0 * p1
        - (e1 + 1.5 * e2) * p1 * p2
        - (e1 + 2.5) * p2**2
    )
    low = common + (e2 - e1) * p1**2 + 2.0 * e1 * p0 * p2
    high = common + 0.5 * e1 * p1**2 + (0.5 * e1 + e2) * p0 * p2
    branch = "low" if p0 * p2 <= p1**2 else "high"
    return TwoSiteClosedForm(
        low_branch=low,
        high_branch=high,
        selected=low if branch == "low" else high,
        branch=branch,
    )


@dataclass(frozen=True)
class SweepRow:
    p2: float
    single_site: float
    oracle_total: float
    oracle_per_site: float
    closed_form: float
    branch: str


def ergotropy_sweep(
    p0: float = 0.5,
    p2_values: Sequence[float] | None = None,
    e1: float = 1.0,
    e2: float = 4.0,
    grid_points: int = 25,
) -> list[SweepRow]:
    """Single-site vs two-site maximum energy along a p2 grid.

    p1 follows from the unit trace. The default grid spans [0, 0.12] where
    the closed form changes branch exactly once (at p0 p2 = p1^2).
    """
    if p2_values is None:
        p2_values = np.linspace(0.0, 0.12, grid_points)
    rows = []
    for p2 in p2_values:
        p1 = (1.0 - p0 - 2.0 * p2) / 2.0
        spec = QuditSpec(p0=p0, p1=p1, p2=float(p2), e1=e1, e2=e2)
        oracle = max_energy_oracle([spec, spec])
        form = two_site_closed_form(spec)
        rows.append(
            SweepRow(
                p2=float(p2),
                single_site=single_site_max_energy(spec),
                oracle_total=oracle,
                oracle_per_site=oracle / 2.0,
                closed_form=form.selected,
                branch=form.branch,
            )
        )
    return rows


def reconciliation_report(rows: Sequence[SweepRow]) -> str:
    """Text report of closed-form vs oracle deviations along a sweep."""
    lines = [
        "two-site maximum energy per site: rearrangement oracle vs printed "
        "closed form",
        f"{'p2':>10} {'oracle':>12} {'closed_form':>12} {'delta':>12} branch",
    ]
    worst = 0.0
    for r in rows:
        delta = r.closed_form - r.oracle_per_site
        worst = max(worst, abs(delta))
        lines.append(
            f"{r.p2:>10.6f} {r.oracle_per_site:>12.8f} "
            f"{r.closed_form:>12.8f} {delta:>12.3e} {r.branch}"
        )
    lines.append(
        f"max |closed_form - oracle| = {worst:.6e}; the oracle is the bound, "
        "the closed form is reported as printed"
    )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Symmetrized two-level ladder unitaries on a qudit pair
# ---------------------------------------------------------------------------

LADDER_LEVELS = ((1, 2), (2, 3), (3, 4), (4, 5), (3, 4), (2, 3), (1, 2))

_SIGMA = (np.eye(2, dtype=complex), PAULI_X, PAULI_Y, PAULI_Z)
# (i, j) pairs: the three matched terms, three symmetrized cross terms, and
# three identity-paired terms; (0, 0) would be a global phase and is omitted.
_GENERATOR_PAIRS = (
    (1, 1), (2, 2), (3, 3), (1, 2), (1, 3), (2, 3), (0, 1), (0, 2), (0, 3)
)
N_LADDER_COEFFS = len(_GENERATOR_PAIRS)


def _block_generators() -> list[np.ndarray]:
    gens = []
    for i, j in _GENERATOR_PAIRS:
        g = np.kron(_SIGMA[i], _SIGMA[j])
        if i != j:
            g = g + np.kron(_SIGMA[j], _SIGMA[i])
        gens.append(g)
    return gens


_BLOCK_GENERATORS = _block_generators()


@dataclass(frozen=True)
class LadderUnitaryParams:
    """9 generator coefficients for each of the 7 two-level layers."""

    coefficients: np.ndarray  # shape (len(LADDER_LEVELS), 9)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != (len(LADDER_LEVELS), N_LADDER_COEFFS):
            raise ValueError(
                f"coefficients must have shape "
                f"({len(LADDER_LEVELS)}, {N_LADDER_COEFFS}), got {c.shape}"
            )
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def zeros(cls) -> "LadderUnitaryParams":
        return cls(np.zeros((len(LADDER_LEVELS), N_LADDER_COEFFS)))


def _layer_indices(levels: tuple[int, int], dim: int = 5) -> np.ndarray:
    a, b = levels[0] - 1, levels[1] - 1
    return np.array([a * dim + a, a * dim + b, b * dim + a, b * dim + b])


def _layer_unitary(coeffs: np.ndarray, levels: tuple[int, int]) -> np.ndarray:
    """exp(-i sum_g alpha_g G_g) embedded as identity off the two levels."""
    h4 = sum(a * g for a, g in zip(coeffs, _BLOCK_GENERATORS))
    w, v = np.linalg.eigh(h4)
    u4 = (v * np.exp(-1j * w)) @ v.conj().T
    u = np.eye(25, dtype=complex)
    idx = _layer_indices(levels)
    u[np.ix_(idx, idx)] = u4
    return u


def ladder_unitary(params: LadderUnitaryParams) -> np.ndarray:
    """Product of the layer unitaries, first layer applied first."""
    u = np.eye(25, dtype=complex)
    for coeffs, levels in zip(params.coefficients, LADDER_LEVELS):
        u = _layer_unitary(coeffs, levels) @ u
    return u


def _site_marginal(rho25: np.ndarray) -> np.ndarray:
    return np.einsum("ijkj->ik", rho25.reshape(5, 5, 5, 5))


def ladder_entropy(spec: QuditSpec, params: LadderUnitaryParams) -> float:
    """Base-5 entropy of one site's marginal after the ladder acts on two
    copies of the spec's state."""
    rho0 = spec.density_matrix(2).matrix
    u = ladder_unitary(params)
    rho = u @ rho0 @ u.conj().T
    return entropy_of_spectrum(
        np.linalg.eigvalsh(_site_marginal(rho)), log_base=5.0
    )


@dataclass(frozen=True)
class AscentResult:
    entropy: float
    params: LadderUnitaryParams
    iterations: int
    trace: tuple[float, ...]


def entropy_ascent_two_qudits(
    spec: QuditSpec,
    init_params: LadderUnitaryParams | None = None,
    seed: int = 0,
    restarts: int = 4,
    layer_passes: int = 2,
    max_iter: int = 400,
    tol: float = 1e-6,
) -> AscentResult:
    """Maximize one site's base-5 marginal entropy over ladder coefficients.

    Runs multi-start ascent: start 0 uses ``init_params`` when given,
    further starts draw random coefficients from per-start sub-seeds.
    Restarting stops once a run gets within 1e-4 of the entropy ceiling 1,
    and the best run wins. Its entropy trace is nondecreasing since only
    improving steps are ever accepted.
    """
    best: AscentResult | None = None
    for r in range(max(1, restarts)):
        if init_params is not None and r == 0:
            x0 = np.array(init_params.coefficients, dtype=float).reshape(-1)
        else:
            rng = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(r,))
            )
            x0 = 0.2 * rng.standard_normal(
                len(LADDER_LEVELS) * N_LADDER_COEFFS
            )
        run = _single_ascent(spec, x0, layer_passes, max_iter, tol)
        if best is None or run.entropy > best.entropy:
            best = run
        if best.entropy >= 1.0 - 1e-4:
            break
    return best


def _single_ascent(
    spec: QuditSpec,
    x0: np.ndarray,
    layer_passes: int,
    max_iter: int,
    tol: float,
) -> AscentResult:
    """One ascent run: layer-by-layer sweeps, then joint refinement."""
    n_layers = len(LADDER_LEVELS)
    rho0 = spec.density_matrix(2).matrix
    x = np.array(x0, dtype=float)

    def entropy_of(xflat: np.ndarray) -> float:
        c = xflat.reshape(n_layers, N_LADDER_COEFFS)
        u = np.eye(25, dtype=complex)
        for coeffs, levels in zip(c, LADDER_LEVELS):
            u = _layer_unitary(coeffs, levels) @ u
        rho = u @ rho0 @ u.conj().T
        return entropy_of_spectrum(
            np.linalg.eigvalsh(_site_marginal(rho)), log_base=5.0
        )

    trace: list[float] = [entropy_of(x)]
    target = -(1.0 - 1e-9)
    iterations = 0

    # layer-by-layer passes: prefix/suffix products keep each move cheap
    for _ in range(layer_passes):
        if -trace[-1] <= target:
            break
        c = x.reshape(n_layers, N_LADDER_COEFFS)
        layer_us = [
            _layer_unitary(c[l], LADDER_LEVELS[l]) for l in range(n_layers)
        ]
        for l in range(n_layers):
            prefix = np.eye(25, dtype=complex)
            for m in range(l):
                prefix = layer_us[m] @ prefix
            suffix = np.eye(25, dtype=complex)
            for m in range(l + 1, n_layers):
                suffix = layer_us[m] @ suffix

            def layer_loss(coeffs):
                u = suffix @ _layer_unitary(coeffs, LADDER_LEVELS[l]) @ prefix
                rho = u @ rho0 @ u.conj().T
                return -entropy_of_spectrum(
                    np.linalg.eigvalsh(_site_marginal(rho)), log_base=5.0
                )

            res = optimize.minimize(
                layer_loss,
                c[l].copy(),
                max_iter=max_iter // 4,
                ftol=tol * 1e-2,
                gtol=1e-8,
                target=target,
            )
            c[l] = res.x
            layer_us[l] = _layer_unitary(c[l], LADDER_LEVELS[l])
            iterations += res.iterations
            trace.append(max(trace[-1], -res.value))
            if -res.value >= -target:
                break
        x = c.reshape(-1)

    # joint refinement over all coefficients
    if trace[-1] < -target:
        res = optimize.minimize(
            lambda p: -entropy_of(p),
            x,
            max_iter=max_iter,
            ftol=tol * 1e-3,
            gtol=1e-9,
            target=target,
            keep_trace=True,
        )
        x = res.x
        iterations += res.iterations
        trace.extend(-v for v in res.trace)

    final = entropy_of(x)
    trace.append(final)
    return AscentResult(
        entropy=final,
        params=LadderUnitaryParams(x.reshape(n_layers, N_LADDER_COEFFS)),
        iterations=iterations,
        trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# Perfect defence with a maximally entangled qudit pair
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DefenceReport:
    levels: int
    trials: int
    max_abs_change: float
    tolerance: float
    passed: bool


def perfect_defence_check(
    levels: int = 5,
    trials: int = 100,
    seed: int = 0,
    e1: float = 1.0,
    e2: float = 4.0,
    tolerance: float = 1e-9,
    state: PureState | None = None,
) -> DefenceReport:
    """Energy invariance of the maximally entangled pair under one-site
    unitaries.

    Samples Haar unitaries on site 1 and reports the largest energy change;
    a maximally mixed marginal makes every change vanish. Passing a
    different two-site ``state`` turns this into a counterexample probe.
    """
    if state is None:
        spectrum = (
            qudit_energies(e1, e2) if levels == 5 else spin_spectrum(levels)
        )
        state = psi_plus(levels, local_spectrum=spectrum)
    base = energy_expectation(state)
    worst = 0.0
    dim = state.register.dims[0]
    for i in range(trials):
        u = sample_haar_unitary(dim, subseed_rng(seed, i))
        moved = BlockUnitary(sites=(1,), matrix=u)
        changed = energy_expectation(apply_block_unitary(state, moved))
        worst = max(worst, abs(changed - base))
    return DefenceReport(
        levels=levels,
        trials=trials,
        max_abs_change=worst,
        tolerance=tolerance,
        passed=worst < tolerance,
    )
