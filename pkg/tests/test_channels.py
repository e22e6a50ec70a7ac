from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import channel_apply, jamiolkowski_loops, unit
from qsot.channels import (
    ChannelChain,
    QuantumChannel,
    apply,
    choi,
    compose,
    depolarizing_channel,
    haar_isometry,
    identity_channel,
    inverse_jamiolkowski,
    is_cptp,
    jamiolkowski,
    random_chain,
    random_channel,
    random_state,
    random_unitary,
    trace_preservation_defect,
    unitary_channel,
)
from qsot.linalg import Operator, basis_op, partial_trace, swap_operator

seeds = st.integers(0, 2**32 - 1)
dims = st.sampled_from([2, 3])


def test_identity_jamiolkowski_is_swap():
    for d in (2, 3):
        assert np.abs(jamiolkowski(identity_channel(d)).data - swap_operator(d).data).max() == 0


def test_depolarizing_jamiolkowski_is_identity_over_d():
    # J[rho -> Tr(rho) 1/d] = sum_ij E_ij (x) delta_ij 1/d = 1/d
    j = jamiolkowski(depolarizing_channel(2))
    assert np.abs(j.data - np.eye(4) / 2).max() < 1e-15


@given(seeds, dims, dims)
def test_jamiolkowski_matches_loops(seed, din, dout):
    e = random_channel(din, dout, seed=seed)
    assert np.abs(jamiolkowski(e).data - jamiolkowski_loops(e.kraus, din)).max() < 1e-12


@given(seeds, dims, dims)
def test_jamiolkowski_roundtrip(seed, din, dout):
    e = random_channel(din, dout, seed=seed)
    back = inverse_jamiolkowski(jamiolkowski(e), din, dout)
    rho = random_state(din, seed=seed + 1)
    assert np.abs(back(rho).data - channel_apply(e.kraus, rho.data)).max() < 1e-12
    assert np.abs(back.matrix - e.as_map().matrix).max() < 1e-12


@given(seeds, dims, dims)
def test_inverse_jamiolkowski_formula(seed, din, dout):
    # J^{-1}[M](rho) = Tr_A[(rho (x) 1) M] on an arbitrary operator M
    rng = np.random.default_rng(seed)
    d = din * dout
    m = Operator(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)), (din, dout))
    rho = random_state(din, seed=rng)
    want = partial_trace(Operator(np.kron(rho.data, np.eye(dout)) @ m.data, (din, dout)), [1]).data
    assert np.abs(inverse_jamiolkowski(m, din, dout)(rho).data - want).max() < 1e-12


@given(seeds, dims, dims)
def test_random_channel_is_cptp(seed, din, dout):
    e = random_channel(din, dout, seed=seed)
    rep = is_cptp(e)
    assert rep.ok
    assert len(e.kraus) == din * dout
    assert trace_preservation_defect(e) < 1e-12
    rho = apply(e, random_state(din, seed=seed))
    assert abs(rho.trace() - 1) < 1e-12 and rho.is_psd()


def test_choi_matches_definition():
    e = random_channel(2, 3, seed=4)
    want = sum(np.kron(unit(2, i, j), channel_apply(e.kraus, unit(2, i, j))) for i in range(2) for j in range(2))
    assert np.abs(choi(e).data - want).max() < 1e-12


def test_is_cptp_rejects_non_trace_preserving():
    assert not is_cptp(QuantumChannel([0.5 * np.eye(2)])).ok
    assert is_cptp(depolarizing_channel(3, 0.3)).ok


def test_channel_dims_validation():
    with pytest.raises(ValueError):
        QuantumChannel([np.eye(2), np.eye(3)])
    with pytest.raises(ValueError):
        apply(identity_channel(2), Operator(np.eye(3) / 3))


def test_haar_isometry_and_unitary():
    v = haar_isometry(6, 2, seed=0)
    assert np.abs(v.conj().T @ v - np.eye(2)).max() < 1e-12
    u = random_unitary(3, seed=0)
    assert np.abs(u @ u.conj().T - np.eye(3)).max() < 1e-12


def test_seeded_reproducibility():
    a = random_channel(2, 3, seed=7)
    b = random_channel(2, 3, seed=7)
    assert all(np.array_equal(x, y) for x, y in zip(a.kraus, b.kraus))
    assert np.array_equal(random_state(3, seed=7).data, random_state(3, seed=7).data)


def test_compose():
    e1, e2 = random_channel(2, 3, seed=1), random_channel(3, 2, seed=2)
    rho = random_state(2, seed=3)
    assert np.abs(apply(compose(e2, e1), rho).data - apply(e2, apply(e1, rho)).data).max() < 1e-12
    with pytest.raises(ValueError):
        compose(e1, e1)


def test_unitary_channel():
    u = random_unitary(2, seed=5)
    rho = random_state(2, seed=6)
    assert np.abs(apply(unitary_channel(u), rho).data - u @ rho.data @ u.conj().T).max() < 1e-12


def test_chain_structure():
    chain = random_chain([2, 3, 2, 3], seed=0)
    assert len(chain) == 3
    assert chain.dims == (2, 3, 2, 3)
    assert chain.lower().dims == (3, 2, 3)
    assert chain.upper().dims == (2, 3, 2)
    assert isinstance(chain[1:], ChannelChain)
    with pytest.raises(ValueError):
        ChannelChain([identity_channel(2), identity_channel(3)])


def test_basis_op():
    assert basis_op(3, 1, 2).data[1, 2] == 1
    assert np.count_nonzero(basis_op(3, 1, 2).data) == 1
