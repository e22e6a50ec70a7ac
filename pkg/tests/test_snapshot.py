from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import channel_apply, chain_star_loops, kron_all
from qsot.channels import identity_channel, random_channel, random_hermitian, random_state
from qsot.linalg import Operator
from qsot.snapshot import (
    ObservableChain,
    expectation_direct,
    expectation_factored,
    factorization_defect,
    random_instance,
    snapshot_map,
)
from qsot.star import StarProductError

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.sampled_from([2, 3]))
def test_snapshot_map_closed_forms(seed, d):
    o = random_hermitian(d, seed=seed)
    rho = random_state(d, seed=seed + 1)
    od, r = o.data, rho.data
    assert np.abs(snapshot_map("fp", o)(rho).data - 0.5 * (od @ r + r @ od)).max() < 1e-12
    assert np.abs(snapshot_map("left", o)(rho).data - od @ r).max() < 1e-12
    assert np.abs(snapshot_map("right", o)(rho).data - r @ od).max() < 1e-12


def test_snapshot_map_rejects_ls():
    with pytest.raises(StarProductError):
        snapshot_map("ls", Operator(np.eye(2)))


@given(seeds, st.sampled_from(["fp", "left", "right"]))
def test_direct_equals_factored(seed, kind):
    rng = np.random.default_rng(seed)
    chain, rho, obs = random_instance(rng)
    d = expectation_direct(kind, chain, rho, obs)
    f = expectation_factored(kind, chain, rho, obs)
    assert abs(d - f) < 1e-10


def test_direct_matches_loop_oracle():
    rng = np.random.default_rng(4)
    chain, rho, obs = random_instance(rng, max_steps=3)
    q = chain_star_loops("fp", [e.kraus for e in chain], list(chain.dims), rho.data)
    want = np.trace(kron_all(*[o.data for o in obs]) @ q)
    assert abs(expectation_direct("fp", chain, rho, obs) - want) < 1e-12


def test_two_time_fp_correlator_by_hand():
    # Tr[(A (x) B)(E *_FP rho)] = Re-symmetrized Tr[B E({A, rho}/2)]
    e = random_channel(2, 3, seed=1)
    rho = random_state(2, seed=2)
    a, b = random_hermitian(2, seed=3), random_hermitian(3, seed=4)
    want = np.trace(b.data @ channel_apply(e.kraus, 0.5 * (a.data @ rho.data + rho.data @ a.data)))
    assert abs(expectation_direct("fp", [e], rho, [a, b]) - want) < 1e-12


def test_fp_expectation_is_real():
    rng = np.random.default_rng(8)
    chain, rho, obs = random_instance(rng)
    assert abs(expectation_direct("fp", chain, rho, obs).imag) < 1e-12


def test_identity_observables_give_one():
    chain = [identity_channel(2)] * 2
    rho = random_state(2, seed=0)
    obs = [Operator(np.eye(2))] * 3
    assert abs(expectation_factored("left", chain, rho, obs) - 1) < 1e-12


def test_alignment_errors():
    rho = random_state(2, seed=0)
    with pytest.raises(ValueError):
        expectation_direct("fp", [identity_channel(2)], rho, [Operator(np.eye(2))])
    with pytest.raises(ValueError):
        expectation_direct("fp", [identity_channel(2)], rho, [Operator(np.eye(2)), Operator(np.eye(3))])
    with pytest.raises(ValueError):
        ObservableChain([Operator([[0, 1], [0, 0]])])


def test_factorization_defect_helper():
    assert factorization_defect("fp", seed=0, trials=10) < 1e-10
    assert factorization_defect("left", seed=0, trials=0) == 0.0
