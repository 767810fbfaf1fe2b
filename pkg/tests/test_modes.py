"""Occupation-qubit mapping and mode-cut entropies."""

import numpy as np
import pytest

from slaterkit import linalg as la
from slaterkit import modes as mo
from slaterkit import states as st
from slaterkit.errors import BadPartitionError, NotAStateError, WrongKindError


def test_single_monomial_maps_to_bitstring():
    state = st.fermion_state(4, 2, {(0, 1): 1.0})
    occ = mo.fock_to_qubits(state)
    assert occ.bitstring_amplitudes() == {"1100": (1 + 0j)}
    assert occ.sectors_present() == (2,)


def test_pair_superposition_and_entropy():
    s = 1 / np.sqrt(2)
    state = st.fermion_state(4, 2, {(0, 1): s, (2, 3): s})
    occ = mo.fock_to_qubits(state)
    amps = occ.bitstring_amplitudes()
    assert set(amps) == {"1100", "0011"}
    assert abs(mo.mode_bipartition_entropy(occ, [0, 1]) - 1.0) < 1e-12


def test_mixed_particle_number_direct_sum():
    s1 = st.fermion_state(4, 1, {(0,): 1.0})
    s3 = st.fermion_state(4, 3, {(1, 2, 3): 1.0})
    occ = mo.fock_to_qubits([(1 / np.sqrt(2), s1), (1 / np.sqrt(2), s3)])
    assert occ.sectors_present() == (1, 3)
    assert set(occ.bitstring_amplitudes()) == {"1000", "0111"}


def test_isometry_on_fixed_sector():
    gen = np.random.default_rng(0)
    a = st.random_pure_state("fermion", 6, 3, gen)
    b = st.random_pure_state("fermion", 6, 3, gen)
    lhs = a.inner(b)
    rhs = np.vdot(mo.fock_to_qubits(a).amplitudes, mo.fock_to_qubits(b).amplitudes)
    assert abs(lhs - rhs) < 1e-12


def test_entropy_permutation_invariance_within_sides():
    gen = np.random.default_rng(1)
    state = st.random_pure_state("fermion", 6, 2, gen)
    occ = mo.fock_to_qubits(state)
    assert abs(mo.mode_bipartition_entropy(occ, [0, 3, 4])
               - mo.mode_bipartition_entropy(occ, [4, 0, 3])) < 1e-12


def test_aligned_determinant_has_zero_mode_entropy():
    state = st.fermion_state(4, 2, {(0, 1): 1.0})
    occ = mo.fock_to_qubits(state)
    assert mo.mode_bipartition_entropy(occ, [0, 1]) < 1e-12


def test_rotated_determinant_can_be_mode_entangled():
    det = st.fermion_state(4, 2, {(0, 1): 1.0})
    rotated = st.apply_single_particle(det, la.haar_unitary(4, np.random.default_rng(2)))
    occ = mo.fock_to_qubits(rotated)
    assert mo.mode_bipartition_entropy(occ, [0, 1]) > 0.1


def test_partition_validation():
    occ = mo.fock_to_qubits(st.fermion_state(4, 2, {(0, 1): 1.0}))
    with pytest.raises(BadPartitionError):
        mo.mode_bipartition_entropy(occ, [])
    with pytest.raises(BadPartitionError):
        mo.mode_bipartition_entropy(occ, [0, 1, 2, 3])
    with pytest.raises(BadPartitionError):
        mo.mode_bipartition_entropy(occ, [7])


def test_input_validation():
    with pytest.raises(WrongKindError):
        mo.fock_to_qubits(st.boson_state(2, 2, {(0, 0): 1.0}))
    s1 = st.fermion_state(4, 1, {(0,): 1.0})
    with pytest.raises(NotAStateError):
        mo.fock_to_qubits([(1.0, s1), (1.0, s1)])  # duplicate sector


def test_double_well_fixture_entropy():
    # two sites x two spins, modes ordered (site1 up, site1 down, site2 up, site2 down):
    # the doubly-occupied superposition across sites carries one ebit across the site cut
    s = 1 / np.sqrt(2)
    state = st.fermion_state(4, 2, {(0, 1): s, (2, 3): s})
    occ = mo.fock_to_qubits(state)
    assert abs(mo.mode_bipartition_entropy(occ, [0, 1]) - 1.0) < 1e-12
