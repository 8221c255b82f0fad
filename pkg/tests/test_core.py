import math
from itertools import combinations

import numpy as np
import pytest

import qgame as qg
from qgame.core import (
    CZ,
    HADAMARD,
    GuardError,
    Register,
    spin_spectrum,
    swap_unitary,
)

from conftest import haar_block, random_pure_state


class TestRegister:
    def test_qubit_register(self):
        reg = Register.qubits(3)
        assert reg.dims == (2, 2, 2)
        assert reg.total_dim == 8
        assert np.array_equal(reg.local_spectra[0], [1.0, -1.0])

    def test_dimension_cap(self):
        with pytest.raises(GuardError):
            Register.qubits(13)  # 2^13 > default cap
        Register.qubits(13, dim_cap=2**13)  # explicit cap allows it

    def test_bad_dims(self):
        with pytest.raises(ValueError):
            Register(dims=(2, 1))

    def test_custom_spectra_validated(self):
        with pytest.raises(ValueError):
            Register(dims=(2, 2), local_spectra=(np.array([1.0, -1.0]),))
        reg = Register(dims=(5,), local_spectra=(np.array([4, 1, 0, -1, -4]),))
        assert reg.local_spectra[0][1] == 1.0

    def test_spin_spectrum(self):
        assert np.array_equal(spin_spectrum(2), [1.0, -1.0])
        assert np.array_equal(spin_spectrum(5), [4.0, 2.0, 0.0, -2.0, -4.0])


class TestConstructors:
    def test_product_plus_single_qubit(self):
        s = qg.product_plus_state(Register.qubits(1))
        assert np.allclose(s.amplitudes, [2**-0.5, 2**-0.5])

    def test_product_plus_two_qubits(self):
        s = qg.product_plus_state(Register.qubits(2))
        assert np.allclose(s.amplitudes, [0.5, 0.5, 0.5, 0.5])

    def test_product_plus_energy_zero(self):
        s = qg.product_plus_state(Register.qubits(3))
        assert abs(qg.energy_expectation(s)) < 1e-12

    def test_product_plus_rejects_qudits(self):
        with pytest.raises(ValueError):
            qg.product_plus_state(Register(dims=(3, 3)))

    def test_bell_marginal_maximally_mixed(self):
        rho = qg.partial_trace(qg.bell_state(), [1])
        assert np.allclose(rho.matrix, np.eye(2) / 2, atol=1e-12)

    def test_psi_plus_marginal(self):
        rho = qg.partial_trace(qg.psi_plus(5), [1])
        assert np.allclose(rho.matrix, np.eye(5) / 5, atol=1e-12)

    def test_ghz_single_site_marginal(self):
        rho = qg.partial_trace(qg.ghz_state(3), [2])
        assert np.allclose(rho.matrix, np.diag([0.5, 0.5]), atol=1e-12)

    def test_basis_state(self):
        s = qg.basis_state(Register.qubits(2), (1, 0))
        assert s.amplitudes[2] == 1.0  # site 1 is the most significant digit

    def test_norm_validation(self):
        with pytest.raises(ValueError):
            qg.PureState(Register.qubits(1), np.array([1.0, 1.0]))


class TestApplyBlockUnitary:
    def test_identity_leaves_state(self, rng):
        state = random_pure_state(Register.qubits(3), rng)
        out = qg.apply_block_unitary(
            state, qg.BlockUnitary(sites=(2,), matrix=np.eye(2))
        )
        assert np.allclose(out.amplitudes, state.amplitudes)

    def test_xx_fixes_bell(self):
        xx = np.kron(qg.core.PAULI_X, qg.core.PAULI_X)
        out = qg.apply_block_unitary(
            qg.bell_state(), qg.BlockUnitary(sites=(1, 2), matrix=xx)
        )
        overlap = abs(np.vdot(out.amplitudes, qg.bell_state().amplitudes))
        assert abs(overlap - 1.0) < 1e-12
        assert abs(qg.energy_expectation(out)) < 1e-12

    def test_hadamards_concentrate_plus_state(self):
        # oracle: direct dense product on the full register
        state = qg.product_plus_state(Register.qubits(2))
        hh = np.kron(HADAMARD, HADAMARD)
        expected = hh @ state.amplitudes
        out = qg.apply_block_unitary(
            state, qg.BlockUnitary(sites=(1, 2), matrix=hh)
        )
        assert np.allclose(out.amplitudes, expected, atol=1e-12)
        assert np.allclose(out.amplitudes, [1, 0, 0, 0], atol=1e-12)
        assert abs(qg.energy_expectation(out) - 2.0) < 1e-12

    def test_embedding_matches_full_kron(self, rng):
        # oracle: kron-built embedding on a 3-qubit register, middle site
        state = random_pure_state(Register.qubits(3), rng)
        u = haar_block(2, seed=7)
        embedded = np.kron(np.eye(2), np.kron(u, np.eye(2)))
        expected = embedded @ state.amplitudes
        out = qg.apply_block_unitary(
            state, qg.BlockUnitary(sites=(2,), matrix=u)
        )
        assert np.allclose(out.amplitudes, expected, atol=1e-12)

    def test_site_order_convention(self, rng):
        # acting on sites (2, 1) with U equals acting on (1, 2) with
        # SWAP U SWAP
        state = random_pure_state(Register.qubits(2), rng)
        u = haar_block(4, seed=3)
        s = swap_unitary(2)
        a = qg.apply_block_unitary(state, qg.BlockUnitary(sites=(2, 1), matrix=u))
        b = qg.apply_block_unitary(
            state, qg.BlockUnitary(sites=(1, 2), matrix=s @ u @ s)
        )
        assert np.allclose(a.amplitudes, b.amplitudes, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            qg.apply_block_unitary(
                qg.bell_state(), qg.BlockUnitary(sites=(1, 2), matrix=np.eye(2))
            )

    def test_norm_preserved_pure(self, rng):
        state = random_pure_state(Register.qubits(4), rng)
        u = haar_block(8, seed=11)
        out = qg.apply_block_unitary(
            state, qg.BlockUnitary(sites=(1, 3, 4), matrix=u)
        )
        assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-9

    def test_trace_and_spectrum_preserved_mixed(self, rng):
        state = random_pure_state(Register.qubits(3), rng)
        rho = qg.partial_trace(state, [1, 2])
        u = haar_block(4, seed=5)
        out = qg.apply_block_unitary(rho, qg.BlockUnitary(sites=(1, 2), matrix=u))
        assert abs(np.trace(out.matrix).real - 1.0) < 1e-9
        assert np.allclose(
            np.linalg.eigvalsh(out.matrix),
            np.linalg.eigvalsh(rho.matrix),
            atol=1e-9,
        )

    def test_disjoint_blocks_commute(self, rng):
        state = random_pure_state(Register.qubits(4), rng)
        bu1 = qg.BlockUnitary(sites=(1, 2), matrix=haar_block(4, seed=21))
        bu2 = qg.BlockUnitary(sites=(3, 4), matrix=haar_block(4, seed=22))
        ab = qg.apply_block_unitary(qg.apply_block_unitary(state, bu1), bu2)
        ba = qg.apply_block_unitary(qg.apply_block_unitary(state, bu2), bu1)
        assert np.max(np.abs(ab.amplitudes - ba.amplitudes)) < 1e-10

    def test_unitarity_checked(self):
        with pytest.raises(ValueError):
            qg.BlockUnitary(sites=(1,), matrix=np.array([[1, 0], [0, 2.0]]))


class TestPartialTrace:
    def test_ghz_two_site_marginal(self):
        rho = qg.partial_trace(qg.ghz_state(3), [1, 2])
        assert np.allclose(
            rho.matrix, np.diag([0.5, 0.0, 0.0, 0.5]), atol=1e-12
        )

    def test_product_state_marginals_are_products(self, rng):
        a = random_pure_state(Register.qubits(1), rng)
        b = random_pure_state(Register.qubits(2), rng)
        state = qg.tensor_product(a, b)
        rho_b = qg.partial_trace(state, [2, 3])
        expected = np.outer(b.amplitudes, b.amplitudes.conj())
        assert np.allclose(rho_b.matrix, expected, atol=1e-12)

    def test_mixed_input_matches_pure_path(self, rng):
        state = random_pure_state(Register.qubits(3), rng)
        via_pure = qg.partial_trace(state, [2])
        via_mixed = qg.partial_trace(state.density_matrix(), [2])
        assert np.allclose(via_pure.matrix, via_mixed.matrix, atol=1e-12)

    def test_empty_and_out_of_range(self):
        with pytest.raises(ValueError):
            qg.partial_trace(qg.bell_state(), [])
        with pytest.raises(ValueError):
            qg.partial_trace(qg.bell_state(), [3])


class TestSchmidt:
    def test_bell_spectrum(self):
        ss = qg.schmidt_spectrum(qg.bell_state(), [2])
        assert np.allclose(ss.eigenvalues, [0.5, 0.5], atol=1e-12)
        assert ss.rank == 2

    def test_product_rank_one(self, rng):
        a = random_pure_state(Register.qubits(2), rng)
        b = random_pure_state(Register.qubits(1), rng)
        state = qg.tensor_product(a, b)
        ss = qg.schmidt_spectrum(state, [3])
        assert ss.rank == 1
        assert abs(ss.eigenvalues[0] - 1.0) < 1e-12

    def test_ghz_two_site_spectrum(self):
        ss = qg.schmidt_spectrum(qg.ghz_state(3), [2, 3])
        assert np.allclose(ss.eigenvalues, [0.5, 0.5, 0.0, 0.0], atol=1e-12)
        assert ss.rank == 2

    def test_sum_and_rank_bound(self, rng):
        for n in (2, 3, 4, 5):
            state = random_pure_state(Register.qubits(n), rng)
            for k in range(1, n):
                sub = list(range(1, k + 1))
                ss = qg.schmidt_spectrum(state, sub)
                assert abs(ss.eigenvalues.sum() - 1.0) < 1e-9
                assert ss.rank <= min(2**k, 2 ** (n - k))


class TestEntropy:
    def test_maximally_mixed_qubit(self):
        rho = qg.partial_trace(qg.bell_state(), [1])
        assert abs(qg.von_neumann_entropy(rho) - 1.0) < 1e-12

    def test_pure_state_zero(self, rng):
        state = random_pure_state(Register.qubits(2), rng)
        assert qg.von_neumann_entropy(state.density_matrix()) < 1e-10

    def test_qudit_base_five(self):
        rho = qg.partial_trace(qg.psi_plus(5), [2])
        assert abs(qg.von_neumann_entropy(rho, log_base=5) - 1.0) < 1e-12

    def test_complementarity_exhaustive(self, rng):
        for n in (2, 3, 4, 5, 6):
            state = random_pure_state(Register.qubits(n), rng)
            sites = range(1, n + 1)
            for k in range(1, n):
                for keep in combinations(sites, k):
                    rest = [s for s in sites if s not in keep]
                    s1 = qg.von_neumann_entropy(qg.partial_trace(state, keep))
                    s2 = qg.von_neumann_entropy(qg.partial_trace(state, rest))
                    assert abs(s1 - s2) < 1e-8

    def test_negative_eigenvalue_rejected(self):
        reg = Register.qubits(1)
        bad = np.diag([1.2, -0.2]).astype(complex)
        state = object.__new__(qg.MixedState)
        object.__setattr__(state, "register", reg)
        object.__setattr__(state, "matrix", bad)
        with pytest.raises(ValueError):
            qg.von_neumann_entropy(state)

    def test_bad_log_base(self):
        rho = qg.partial_trace(qg.bell_state(), [1])
        with pytest.raises(ValueError):
            qg.von_neumann_entropy(rho, log_base=1.5)


class TestEnergy:
    def test_all_down(self):
        for n in (1, 3, 5):
            s = qg.basis_state(Register.qubits(n), (1,) * n)
            assert qg.energy_expectation(s) == -n

    def test_bell_zero(self):
        assert abs(qg.energy_expectation(qg.bell_state())) < 1e-12

    def test_linearity_oracle(self, rng):
        # energy equals the sum of single-site marginal energies
        reg = Register.qubits(4)
        state = random_pure_state(reg, rng)
        total = qg.energy_expectation(state)
        per_site = 0.0
        for site in range(1, 5):
            rho = qg.partial_trace(state, [site])
            per_site += float(
                np.dot(np.diag(rho.matrix).real, reg.local_spectra[site - 1])
            )
        assert abs(total - per_site) < 1e-9

    def test_register_mismatch(self):
        state = qg.bell_state()
        with pytest.raises(ValueError):
            qg.energy_expectation(state, [np.array([1.0, -1.0])])

    def test_qudit_energies(self):
        spectrum = np.array([4.0, 1.0, 0.0, -1.0, -4.0])
        reg = Register(dims=(5,), local_spectra=(spectrum,))
        s = qg.basis_state(reg, (0,))
        assert qg.energy_expectation(s) == 4.0

    def test_range_bound(self, rng):
        state = random_pure_state(Register.qubits(3), rng)
        assert -3.0 - 1e-9 <= qg.energy_expectation(state) <= 3.0 + 1e-9


class TestPreparationUnitary:
    def test_maps_source_to_target(self, rng):
        src = random_pure_state(Register.qubits(3), rng).amplitudes
        dst = random_pure_state(Register.qubits(3), rng).amplitudes
        u = qg.state_preparation_unitary(src, dst)
        qg.BlockUnitary(sites=(1, 2, 3), matrix=u)  # unitarity check
        assert np.allclose(u @ src, dst, atol=1e-10)

    def test_plus_to_bell_is_exact_via_cz(self):
        # (I x H) CZ maps |++> to the Bell state with exact entries
        u = np.kron(np.eye(2), HADAMARD) @ CZ
        psi0 = qg.product_plus_state(Register.qubits(2))
        out = qg.apply_block_unitary(
            psi0, qg.BlockUnitary(sites=(1, 2), matrix=u)
        )
        assert np.allclose(out.amplitudes, qg.bell_state().amplitudes)
