"""Dense linear-algebra substrate for small quantum registers.

States live on a :class:`Register` of sites with arbitrary local dimension.
Site 1 is the leftmost tensor factor, i.e. the most significant digit of the
computational basis index; every embedding and partial trace in this package
follows that one convention.

All container types are immutable after construction (arrays are marked
read-only), so every operation here is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

DEFAULT_DIM_CAP = 2**12

ATOL_NORM = 1e-10
ATOL_UNITARY = 1e-10
ATOL_HERMITIAN = 1e-10
ATOL_TRACE = 1e-10
EIG_CLAMP = -1e-10  # negative eigenvalues above this are treated as 0
SCHMIDT_CUTOFF = 1e-12


class GuardError(ValueError):
    """A configured size or combinatorial guard was exceeded."""


# ---------------------------------------------------------------------------
# Gate and operator constants
# ---------------------------------------------------------------------------

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def swap_unitary(d: int) -> np.ndarray:
    """SWAP of two d-level sites as a d^2 x d^2 matrix."""
    S = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            S[i * d + j, j * d + i] = 1.0
    return S


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def spin_spectrum(dim: int) -> np.ndarray:
    """Evenly spaced symmetric local energies (dim-1, dim-3, ..., -(dim-1)).

    For qubits this is the diagonal of sigma_z.
    """
    return np.array([dim - 1 - 2 * k for k in range(dim)], dtype=float)


# ---------------------------------------------------------------------------
# Register and state types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Register:
    """Ordered list of site dimensions plus a local energy spectrum per site.

    The spectrum of site l is the diagonal of its local Hamiltonian in the
    computational basis; the register's total Hamiltonian is the sum of those
    local terms. If no spectra are given, each site gets
    :func:`spin_spectrum` of its dimension (sigma_z for qubits).
    """

    dims: tuple[int, ...]
    local_spectra: tuple[np.ndarray, ...] = field(default=())
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims:
            raise ValueError("register needs at least one site")
        if any(d < 2 for d in dims):
            raise ValueError(f"every site dimension must be >= 2, got {dims}")
        total = math.prod(dims)
        if total > self.dim_cap:
            raise GuardError(
                f"total dimension {total} exceeds cap {self.dim_cap}"
            )
        spectra = self.local_spectra
        if not spectra:
            spectra = tuple(spin_spectrum(d) for d in dims)
        else:
            spectra = tuple(
                np.asarray(s, dtype=float).reshape(-1) for s in spectra
            )
            if len(spectra) != len(dims):
                raise ValueError("need one local spectrum per site")
            for d, s in zip(dims, spectra):
                if len(s) != d:
                    raise ValueError(
                        f"local spectrum length {len(s)} != site dimension {d}"
                    )
        object.__setattr__(
            self, "local_spectra", tuple(_frozen(s.copy()) for s in spectra)
        )

    @classmethod
    def qubits(cls, n: int, dim_cap: int = DEFAULT_DIM_CAP) -> "Register":
        return cls(dims=(2,) * n, dim_cap=dim_cap)

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def is_qubit(self) -> bool:
        return all(d == 2 for d in self.dims)

    def energy_diagonal(self) -> np.ndarray:
        """Diagonal of the total Hamiltonian in the computational basis."""
        return reduce(np.add.outer, self.local_spectra).reshape(-1)

    def check_sites(self, sites: Iterable[int]) -> tuple[int, ...]:
        sites = tuple(int(s) for s in sites)
        if len(set(sites)) != len(sites):
            raise ValueError(f"site indices must be distinct, got {sites}")
        for s in sites:
            if not 1 <= s <= self.n_sites:
                raise ValueError(
                    f"site {s} out of range for {self.n_sites}-site register"
                )
        return sites

    def block_dim(self, sites: Sequence[int]) -> int:
        return math.prod(self.dims[s - 1] for s in sites)


@dataclass(frozen=True)
class PureState:
    """Normalized dense amplitude vector over a register."""

    register: Register
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if len(amps) != self.register.total_dim:
            raise ValueError(
                f"amplitude vector length {len(amps)} != register dimension "
                f"{self.register.total_dim}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL_NORM:
            raise ValueError(f"state norm {norm} is not 1 within {ATOL_NORM}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def n_sites(self) -> int:
        return self.register.n_sites

    def density_matrix(self) -> "MixedState":
        a = self.amplitudes
        return MixedState(self.register, np.outer(a, a.conj()))


@dataclass(frozen=True)
class MixedState:
    """Density matrix over a register.

    Hermiticity and unit trace are checked on construction; positivity is
    checked wherever the spectrum is actually computed (entropy, passive
    energies), which keeps construction cheap for large registers.
    """

    register: Register
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = self.register.total_dim
        if m.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {m.shape} != register dimension ({dim}, {dim})"
            )
        if np.max(np.abs(m - m.conj().T)) > ATOL_HERMITIAN:
            raise ValueError("density matrix is not Hermitian within 1e-10")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL_TRACE:
            raise ValueError(f"density matrix trace {tr} is not 1")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def n_sites(self) -> int:
        return self.register.n_sites

    def eigenvalues(self) -> np.ndarray:
        """Spectrum, clamped at -1e-10 and sorted nonincreasing."""
        return clamp_spectrum(np.linalg.eigvalsh(self.matrix))


State = PureState | MixedState


@dataclass(frozen=True)
class BlockUnitary:
    """Unitary acting on an ordered tuple of register sites.

    The matrix's tensor factor order follows the order of ``sites``; it is
    embedded as identity on every other site when applied.
    """

    sites: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        if not sites:
            raise ValueError("block unitary needs at least one site")
        if len(set(sites)) != len(sites):
            raise ValueError(f"block sites must be distinct, got {sites}")
        if any(s < 1 for s in sites):
            raise ValueError(f"site indices are 1-based, got {sites}")
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"unitary must be square, got shape {m.shape}")
        err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if err > ATOL_UNITARY:
            raise ValueError(f"matrix is not unitary (deviation {err:.3e})")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Reduced-density-matrix eigenvalues across a bipartition."""

    eigenvalues: np.ndarray  # nonincreasing, nonnegative
    rank: int
    cutoff: float = SCHMIDT_CUTOFF

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", _frozen(lam.copy()))


# ---------------------------------------------------------------------------
# State constructors
# ---------------------------------------------------------------------------


def product_plus_state(register: Register) -> PureState:
    """Uniform-superposition product state (|0>+|1>)/sqrt(2) on every qubit.

    Its energy under the sigma_z Hamiltonian is 0.
    """
    if not register.is_qubit:
        raise ValueError("product plus state is defined on qubit registers")
    amps = np.full(register.total_dim, register.total_dim ** -0.5, dtype=complex)
    return PureState(register, amps)


def basis_state(register: Register, occupations: Sequence[int]) -> PureState:
    """Computational basis state with the given per-site levels."""
    occ = tuple(int(o) for o in occupations)
    if len(occ) != register.n_sites:
        raise ValueError("need one occupation per site")
    idx = 0
    for o, d in zip(occ, register.dims):
        if not 0 <= o < d:
            raise ValueError(f"occupation {o} out of range for dimension {d}")
        idx = idx * d + o
    amps = np.zeros(register.total_dim, dtype=complex)
    amps[idx] = 1.0
    return PureState(register, amps)


def bell_state() -> PureState:
    """(|00> + |11>)/sqrt(2) on two qubits."""
    amps = np.zeros(4, dtype=complex)
    amps[0] = amps[3] = math.sqrt(0.5)
    return PureState(Register.qubits(2), amps)


def ghz_state(n_sites: int) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2) on n qubits."""
    if n_sites < 2:
        raise ValueError("GHZ state needs at least 2 qubits")
    reg = Register.qubits(n_sites)
    amps = np.zeros(reg.total_dim, dtype=complex)
    amps[0] = amps[-1] = math.sqrt(0.5)
    return PureState(reg, amps)


def psi_plus(levels: int, local_spectrum: np.ndarray | None = None) -> PureState:
    """Maximally entangled pair (1/sqrt(l)) sum_i |i>|i> of two l-level sites."""
    if levels < 2:
        raise ValueError("need at least 2 levels")
    spectra = None
    if local_spectrum is not None:
        s = np.asarray(local_spectrum, dtype=float)
        spectra = (s, s)
    reg = Register(dims=(levels, levels), local_spectra=spectra or ())
    amps = np.zeros(levels * levels, dtype=complex)
    amps[:: levels + 1] = levels**-0.5
    return PureState(reg, amps)


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Concatenate two states; sites of ``b`` follow the sites of ``a``."""
    reg = Register(
        dims=a.register.dims + b.register.dims,
        local_spectra=a.register.local_spectra + b.register.local_spectra,
        dim_cap=max(a.register.dim_cap, b.register.dim_cap),
    )
    return PureState(reg, np.kron(a.amplitudes, b.amplitudes))


def state_preparation_unitary(
    source: np.ndarray, target: np.ndarray
) -> np.ndarray:
    """A unitary U with U @ source = target (both unit vectors).

    Completes each vector to an orthonormal basis and maps one onto the
    other; which unitary is returned is otherwise unspecified.
    """

    def complete(v):
        dim = len(v)
        basis = np.zeros((dim, dim), dtype=complex)
        basis[:, 0] = v
        k = 1
        for e in np.eye(dim, dtype=complex).T:
            if k == dim:
                break
            w = e - basis[:, :k] @ (basis[:, :k].conj().T @ e)
            n = np.linalg.norm(w)
            if n > 1e-7:
                basis[:, k] = w / n
                k += 1
        if k != dim:
            raise ValueError("failed to complete orthonormal basis")
        return basis

    s = np.asarray(source, dtype=complex).reshape(-1)
    t = np.asarray(target, dtype=complex).reshape(-1)
    if s.shape != t.shape:
        raise ValueError("source and target dimensions differ")
    return complete(t) @ complete(s).conj().T


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def apply_block_unitary(state: State, block: BlockUnitary) -> State:
    """Apply a unitary on a block of sites, identity elsewhere."""
    reg = state.register
    sites = reg.check_sites(block.sites)
    if block.dim != reg.block_dim(sites):
        raise ValueError(
            f"unitary dimension {block.dim} does not match block {sites} "
            f"dimension {reg.block_dim(sites)}"
        )
    axes = [s - 1 for s in sites]
    if isinstance(state, PureState):
        psi = _apply_on_axes(
            state.amplitudes.reshape(reg.dims), block.matrix, axes
        )
        return PureState(reg, psi.reshape(-1))
    n = reg.n_sites
    t = state.matrix.reshape(reg.dims * 2)
    t = _apply_on_axes(t, block.matrix, axes)
    t = _apply_on_axes(t, block.matrix.conj(), [n + a for a in axes])
    return MixedState(reg, t.reshape(reg.total_dim, reg.total_dim))


def _apply_on_axes(tensor: np.ndarray, matrix: np.ndarray, axes: list[int]):
    """Contract ``matrix`` against the given tensor axes, in place of them."""
    k = len(axes)
    moved = np.moveaxis(tensor, axes, range(k))
    head = moved.shape[:k]
    tail = moved.shape[k:]
    flat = moved.reshape(math.prod(head), -1)
    flat = matrix @ flat
    return np.moveaxis(flat.reshape(head + tail), range(k), axes)


def partial_trace(state: State, keep_sites: Iterable[int]) -> MixedState:
    """Reduced density matrix on ``keep_sites`` (sorted ascending)."""
    reg = state.register
    keep = sorted(reg.check_sites(keep_sites))
    if not keep:
        raise ValueError("keep_sites must be nonempty")
    keep_axes = [s - 1 for s in keep]
    other_axes = [a for a in range(reg.n_sites) if a not in keep_axes]
    dk = math.prod(reg.dims[a] for a in keep_axes)
    sub = Register(
        dims=tuple(reg.dims[a] for a in keep_axes),
        local_spectra=tuple(reg.local_spectra[a] for a in keep_axes),
        dim_cap=reg.dim_cap,
    )
    if isinstance(state, PureState):
        m = _bipartition_matrix(state, keep)
        return MixedState(sub, m @ m.conj().T)
    n = reg.n_sites
    t = state.matrix.reshape(reg.dims * 2)
    order = (
        keep_axes
        + other_axes
        + [n + a for a in keep_axes]
        + [n + a for a in other_axes]
    )
    dt = reg.total_dim // dk
    t = np.transpose(t, order).reshape(dk, dt, dk, dt)
    return MixedState(sub, np.trace(t, axis1=1, axis2=3))


def _bipartition_matrix(state: PureState, keep: list[int]) -> np.ndarray:
    """Amplitudes reshaped to (dim of kept block, dim of the rest)."""
    reg = state.register
    keep_axes = [s - 1 for s in keep]
    psi = state.amplitudes.reshape(reg.dims)
    psi = np.moveaxis(psi, keep_axes, range(len(keep_axes)))
    dk = math.prod(reg.dims[a] for a in keep_axes)
    return psi.reshape(dk, -1)


def schmidt_spectrum(
    state: PureState, subsystem: Iterable[int], cutoff: float = SCHMIDT_CUTOFF
) -> SchmidtSpectrum:
    """Eigenvalues of the reduced state on ``subsystem``, nonincreasing.

    Computed from singular values of the bipartition matrix, padded with
    zeros up to the subsystem dimension.
    """
    reg = state.register
    keep = sorted(reg.check_sites(subsystem))
    m = _bipartition_matrix(state, keep)
    s = np.linalg.svd(m, compute_uv=False)
    lam = np.zeros(m.shape[0])
    lam[: len(s)] = s**2
    rank = int(np.sum(lam > cutoff))
    return SchmidtSpectrum(eigenvalues=lam, rank=rank, cutoff=cutoff)


def clamp_spectrum(eigs: np.ndarray, tol: float = EIG_CLAMP) -> np.ndarray:
    """Sort eigenvalues nonincreasing, zeroing tiny negatives.

    Raises if any eigenvalue is more negative than ``tol``.
    """
    lam = np.sort(np.asarray(eigs, dtype=float))[::-1]
    if lam[-1] < tol:
        raise ValueError(f"negative eigenvalue {lam[-1]} beyond tolerance")
    return np.where(lam > 0.0, lam, 0.0)


def entropy_of_spectrum(eigs: np.ndarray, log_base: float = 2.0) -> float:
    lam = clamp_spectrum(eigs)
    nz = lam[lam > SCHMIDT_CUTOFF]
    return float(-np.sum(nz * np.log(nz)) / math.log(log_base))


def von_neumann_entropy(state: MixedState, log_base: float = 2.0) -> float:
    """-tr(rho log_b rho), with 0 log 0 = 0."""
    if log_base < 2:
        raise ValueError("log base must be >= 2")
    return entropy_of_spectrum(np.linalg.eigvalsh(state.matrix), log_base)


def subsystem_entropy(
    state: PureState, subsystem: Iterable[int], log_base: float = 2.0
) -> float:
    """Entanglement entropy of a pure state across a bipartition."""
    return entropy_of_spectrum(
        schmidt_spectrum(state, subsystem).eigenvalues, log_base
    )


def energy_expectation(
    state: State, local_spectra: Sequence[np.ndarray] | None = None
) -> float:
    """Expectation of the sum of local diagonal Hamiltonians.

    Defaults to the register's own spectra (sigma_z per qubit).
    """
    reg = state.register
    if local_spectra is None:
        hdiag = reg.energy_diagonal()
    else:
        spectra = [np.asarray(s, dtype=float).reshape(-1) for s in local_spectra]
        if len(spectra) != reg.n_sites or any(
            len(s) != d for s, d in zip(spectra, reg.dims)
        ):
            raise ValueError("local spectra do not match the register")
        hdiag = reduce(np.add.outer, spectra).reshape(-1)
    if isinstance(state, PureState):
        weights = np.abs(state.amplitudes) ** 2
    else:
        weights = np.diag(state.matrix).real
    return float(np.dot(weights, hdiag))
