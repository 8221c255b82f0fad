import math
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qgame as qg
from qgame.core import GuardError, Register
from qgame.engine import (
    BestResponse,
    IllegalMoveError,
    classical_second_mover_check,
    qubit_spectrum_table,
)

from conftest import haar_block, random_pure_state


def brute_force_extremes(lam, energies):
    """Independent oracle: extremize over every eigenvalue-to-level pairing."""
    padded = np.zeros(len(energies))
    padded[: len(lam)] = lam
    vals = [float(np.dot(padded, perm)) for perm in permutations(energies)]
    return min(vals), max(vals)


def bell_pair_construction(n_b: int, m: int):
    """M Bell pairs spanning the cut, the other N_B - M block qubits in |0>."""
    reg = Register.qubits(n_b + m)
    state = qg.basis_state(reg, (0,) * (n_b + m))
    prep = np.kron(np.eye(2), qg.core.HADAMARD)  # |00> -> Bell on (ctl, tgt)
    bell_from_00 = qg.core.CNOT @ np.kron(qg.core.HADAMARD, np.eye(2))
    for i in range(1, m + 1):
        state = qg.apply_block_unitary(
            state, qg.BlockUnitary(sites=(i, n_b + i), matrix=bell_from_00)
        )
    return state


class TestSpectrumTable:
    def test_qubit_multiset(self):
        table = qubit_spectrum_table(3)
        assert np.array_equal(table.energies, [-3, -1, -1, -1, 1, 1, 1, 3])

    def test_register_block_table(self):
        reg = Register.qubits(4)
        table = qg.spectrum_table(reg, [2, 4])
        assert np.array_equal(table.energies, [-2, 0, 0, 2])

    def test_qudit_table(self):
        spectrum = np.array([4.0, 1.0, 0.0, -1.0, -4.0])
        reg = Register(dims=(5, 5), local_spectra=(spectrum, spectrum))
        table = qg.spectrum_table(reg, [1, 2])
        assert table.energies[0] == -8.0 and table.energies[-1] == 8.0
        assert len(table.energies) == 25


class TestPassiveEnergies:
    def test_half_half(self):
        table = qubit_spectrum_table(2)
        assert qg.passive_energy([0.5, 0.5], table) == -1.0
        assert qg.antipassive_energy([0.5, 0.5], table) == 1.0

    def test_pure_spectrum(self):
        for n in (1, 2, 3):
            table = qubit_spectrum_table(n)
            lam = [1.0] + [0.0] * (2**n - 1)
            assert qg.passive_energy(lam, table) == -n
            assert qg.antipassive_energy(lam, table) == n

    def test_uniform_spectrum(self):
        table = qubit_spectrum_table(3)
        lam = np.full(8, 1 / 8)
        assert abs(qg.passive_energy(lam, table)) < 1e-12
        assert abs(qg.antipassive_energy(lam, table)) < 1e-12

    def test_accepts_schmidt_spectrum(self):
        ss = qg.schmidt_spectrum(qg.bell_state(), [1])
        assert qg.passive_energy(ss, qubit_spectrum_table(1)) == -0.0

    def test_eigenvalue_sum_checked(self):
        with pytest.raises(ValueError):
            qg.passive_energy([0.7, 0.7], qubit_spectrum_table(1))

    def test_oversized_spectrum_rejected(self):
        with pytest.raises(ValueError):
            qg.passive_energy([0.5, 0.25, 0.25], qubit_spectrum_table(1))

    @given(
        st.lists(st.floats(0.01, 1.0), min_size=2, max_size=4),
        st.lists(st.floats(-3.0, 3.0), min_size=4, max_size=4),
    )
    @settings(max_examples=60, deadline=None)
    def test_matches_brute_force(self, raw_lam, raw_energies):
        lam = np.array(raw_lam) / np.sum(raw_lam)
        table = qg.SpectrumTable(
            energies=np.array(raw_energies), block_size=2
        )
        lo, hi = brute_force_extremes(
            np.sort(lam)[::-1], np.sort(raw_energies)
        )
        assert abs(qg.passive_energy(lam, table) - lo) < 1e-9
        assert abs(qg.antipassive_energy(lam, table) - hi) < 1e-9


class TestPartitions:
    def test_n2_single(self):
        parts = qg.enumerate_partitions(2, 1)
        assert [p.blocks for p in parts] == [((1,), (2,))]

    def test_n3_explicit(self):
        parts = {p.blocks for p in qg.enumerate_partitions(3, 2)}
        assert parts == {
            ((1, 2), (3,)),
            ((1, 3), (2,)),
            ((1,), (2, 3)),
            ((1,), (2,), (3,)),
        }

    def test_counts_match_growth_string_oracle(self):
        # independent oracle: restricted growth strings with a block cap
        def rgs_count(n, max_block):
            def rec(assignment, n_blocks):
                if len(assignment) == n:
                    return 1
                total = 0
                for b in range(n_blocks + 1):
                    if b < n_blocks:
                        if assignment.count(b) < max_block:
                            total += rec(assignment + [b], n_blocks)
                    else:
                        total += rec(assignment + [b], n_blocks + 1)
                return total
            return rec([0], 1)

        assert len(qg.enumerate_partitions(5, 2)) == 26
        for n, mb in [(3, 2), (5, 2), (6, 3), (4, 4), (7, 2)]:
            assert len(qg.enumerate_partitions(n, mb)) == rgs_count(n, mb)

    def test_deduplicated_and_canonical(self):
        parts = [p.blocks for p in qg.enumerate_partitions(6, 3)]
        assert len(parts) == len(set(parts))
        for blocks in parts:
            assert blocks == tuple(
                sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0])
            )

    def test_guard(self):
        with pytest.raises(GuardError):
            qg.enumerate_partitions(11, 2)

    def test_partition_validation(self):
        with pytest.raises(ValueError):
            qg.BlockPartition(blocks=((1, 2), (2, 3)), max_block=2)
        with pytest.raises(ValueError):
            qg.BlockPartition(blocks=((1, 2, 3), (4,)), max_block=2)


class TestBestResponse:
    def test_bell_defence(self):
        out = qg.best_response_energy(qg.bell_state(), 1, "min")
        assert abs(out.energy) < 1e-12

    def test_ghz_bell_scenario(self):
        state = qg.tensor_product(qg.ghz_state(3), qg.bell_state())
        out = qg.best_response_energy(state, 2, "min")
        assert abs(out.per_site_energy - (-3 / 5)) < 1e-10
        fixed = qg.BlockPartition(blocks=((3, 4), (2, 5), (1,)), max_block=2)
        pinned = qg.best_response_energy(state, 2, "min", partition=fixed)
        assert abs(pinned.energy) < 1e-10

    def test_full_block_max(self, rng):
        for n in (2, 3):
            state = random_pure_state(Register.qubits(n), rng)
            out = qg.best_response_energy(state, n, "max")
            assert abs(out.energy - n) < 1e-9

    def test_closed_form_equivalence(self):
        # fixed designated-block partition on the Bell-pair construction
        for n_b in range(1, 6):
            for m in range(0, n_b):
                state = bell_pair_construction(n_b, m)
                blocks = [tuple(range(1, n_b + 1))] + [
                    (n_b + i,) for i in range(1, m + 1)
                ]
                part = qg.BlockPartition(
                    blocks=tuple(blocks), max_block=n_b
                )
                out = qg.best_response_energy(
                    state, n_b, "min", partition=part
                )
                assert abs(out.energy - qg.closed_form_min_energy(n_b, m)) < 1e-9

    def test_partition_optimization_can_beat_fixed(self):
        # on a non-AME preparation the optimizer must do at least as well
        state = qg.tensor_product(qg.ghz_state(3), qg.bell_state())
        fixed = qg.BlockPartition(blocks=((1, 2), (3,), (4, 5)), max_block=2)
        pinned = qg.best_response_energy(state, 2, "min", partition=fixed)
        free = qg.best_response_energy(state, 2, "min")
        assert free.energy <= pinned.energy + 1e-12

    def test_zero_sum_symmetry(self, rng):
        # negating every local spectrum swaps min and max exactly
        reg = Register.qubits(4)
        neg = Register(
            dims=reg.dims,
            local_spectra=tuple(-s for s in reg.local_spectra),
        )
        state = random_pure_state(reg, rng)
        flipped = qg.PureState(neg, state.amplitudes)
        for mb in (1, 2, 3):
            lo = qg.best_response_energy(state, mb, "min")
            hi = qg.best_response_energy(flipped, mb, "max")
            assert lo.energy == -hi.energy

    def test_monotone_in_capability(self, rng):
        for n in (2, 3, 4, 5):
            state = random_pure_state(Register.qubits(n), rng)
            values = [
                qg.best_response_energy(state, mb, "min").energy
                for mb in range(1, n + 1)
            ]
            for a, b in zip(values, values[1:]):
                assert b <= a + 1e-12

    def test_passivity_certificate(self, rng):
        # no unitary beats the rearrangement bounds on a block
        state = random_pure_state(Register.qubits(3), rng)
        block = (1, 2)
        rho = qg.partial_trace(state, block)
        table = qg.spectrum_table(state.register, block)
        lam = rho.eigenvalues()
        lo = qg.passive_energy(lam, table)
        hi = qg.antipassive_energy(lam, table)
        for i in range(200):
            u = haar_block(4, seed=99, index=i)
            moved = qg.apply_block_unitary(
                rho, qg.BlockUnitary(sites=(1, 2), matrix=u)
            )
            energy = qg.energy_expectation(moved)
            assert lo - 1e-8 <= energy <= hi + 1e-8

    def test_responder_unitaries_attain_bound(self, rng):
        state = random_pure_state(Register.qubits(4), rng)
        out = qg.best_response_energy(state, 2, "min", include_unitaries=True)
        final = state
        for bu in out.responder_unitaries:
            final = qg.apply_block_unitary(final, bu)
        assert abs(qg.energy_expectation(final) - out.energy) < 1e-9

    def test_deterministic_tie_break(self):
        # the product-plus state gives every partition the same value
        state = qg.product_plus_state(Register.qubits(3))
        out = qg.best_response_energy(state, 2, "min")
        again = qg.best_response_energy(state, 2, "min")
        assert out.partition_chosen.blocks == again.partition_chosen.blocks


class TestClosedForm:
    def test_known_values(self):
        assert qg.closed_form_min_energy(2, 1) == -1.0
        assert qg.closed_form_min_energy(4, 2) == -2.5
        assert qg.closed_form_min_energy(3, 3) == 0.0
        assert qg.closed_form_min_energy(5, 7) == 0.0

    def test_minimal_advantage_scaling(self):
        for n in range(2, 9):
            per_site = qg.closed_form_min_energy(n - 1, 1) / n
            assert abs(per_site - (-1 + 2 / n)) < 1e-12

    def test_matches_uniform_spectrum_passive_energy(self):
        for n_b in range(1, 11):
            table = qubit_spectrum_table(n_b)
            for m in range(0, n_b):
                lam = np.full(2**m, 2.0**-m)
                expected = qg.passive_energy(lam, table)
                assert abs(qg.closed_form_min_energy(n_b, m) - expected) < 1e-9

    def test_bad_args(self):
        with pytest.raises(ValueError):
            qg.closed_form_min_energy(0, 0)


class TestPlay:
    def test_bell_defence_game(self):
        cfg = qg.GameConfig(n_sites=2, n_a=2, n_b=1)
        u = np.kron(np.eye(2), qg.core.HADAMARD) @ qg.core.CZ
        out = qg.play_sequential_game(
            cfg, [qg.BlockUnitary(sites=(1, 2), matrix=u)], BestResponse()
        )
        assert abs(out.energy) < 1e-12

    def test_second_mover_undo(self):
        cfg = qg.GameConfig(n_sites=2, n_a=2, n_b=1, order="BA")
        ub = qg.BlockUnitary(sites=(1,), matrix=haar_block(2, seed=17))
        out = qg.play_sequential_game(cfg, BestResponse(), [ub])
        assert abs(out.energy - 2.0) < 1e-9

    def test_appendix_lambda_law(self):
        cfg = qg.GameConfig(n_sites=3, n_a=3, n_b=2)
        psi0 = qg.product_plus_state(Register.qubits(3))
        for lam1 in np.linspace(0.5, 1.0, 6):
            target = np.zeros(8, dtype=complex)
            target[0] = math.sqrt(lam1)
            target[7] = math.sqrt(1 - lam1)
            prep = qg.BlockUnitary(
                sites=(1, 2, 3),
                matrix=qg.state_preparation_unitary(psi0.amplitudes, target),
            )
            out = qg.play_sequential_game(cfg, [prep], BestResponse())
            assert abs(out.energy - (-4 * lam1 + 1)) < 1e-9

    def test_capability_enforced(self):
        cfg = qg.GameConfig(n_sites=3, n_a=3, n_b=1)
        move = [qg.BlockUnitary(sites=(1, 2), matrix=haar_block(4, seed=2))]
        with pytest.raises(IllegalMoveError):
            qg.play_sequential_game(cfg, [], move)

    def test_first_mover_cannot_be_policy(self):
        cfg = qg.GameConfig(n_sites=2, n_a=2, n_b=1)
        with pytest.raises(IllegalMoveError):
            qg.play_sequential_game(cfg, BestResponse(), BestResponse())

    def test_overlapping_blocks_rejected(self):
        cfg = qg.GameConfig(n_sites=3, n_a=2, n_b=2)
        u = haar_block(4, seed=8)
        move = [
            qg.BlockUnitary(sites=(1, 2), matrix=u),
            qg.BlockUnitary(sites=(2, 3), matrix=u),
        ]
        with pytest.raises(IllegalMoveError):
            qg.play_sequential_game(cfg, move, BestResponse())

    def test_fixed_partition_response(self):
        state_prep = np.kron(np.eye(2), qg.core.HADAMARD) @ qg.core.CZ
        cfg = qg.GameConfig(n_sites=2, n_a=2, n_b=1)
        fixed = qg.BlockPartition(blocks=((1,), (2,)), max_block=1)
        out = qg.play_sequential_game(
            cfg,
            [qg.BlockUnitary(sites=(1, 2), matrix=state_prep)],
            BestResponse(partition=fixed),
        )
        assert abs(out.energy) < 1e-12
        assert out.partition_chosen.blocks == ((1,), (2,))


class TestClassical:
    def test_baseline_values(self):
        assert qg.classical_baseline(4, "AB").energy == -4.0
        assert qg.classical_baseline(1, "BA").energy == 1.0

    def test_exhaustive_second_mover(self):
        for n in range(1, 9):
            assert classical_second_mover_check(n)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            qg.classical_baseline(3, "AA")


class TestGameConfig:
    def test_capability_ordering(self):
        with pytest.raises(ValueError):
            qg.GameConfig(n_sites=3, n_a=2, n_b=3)
        with pytest.raises(ValueError):
            qg.GameConfig(n_sites=2, n_a=3, n_b=1)
