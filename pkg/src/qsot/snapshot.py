"""Multi-time expectation values, directly and by snapshot factorization.

Direct: ``Tr[(O_0 (x) ... (x) O_n) (chain * rho)]``.
Factored: ``Tr[O_n (E_n o M_{O_{n-1}} o ... o E_1 o M_{O_0})(rho)]`` where the
snapshot map ``M_O(rho) = Theta_rho^dd(O)`` only ever touches one time step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import (
    ChannelChain,
    QuantumChannel,
    _as_chain,
    apply,
    random_chain,
    random_hermitian,
    random_state,
)
from .linalg import ATOL, Operator, OperatorMap, basis_op, tensor
from .star import StarKind, StarProductError, _rendering, double_dagger, star_nchain


@dataclass(frozen=True, eq=False)
class ObservableChain:
    observables: tuple[Operator, ...]

    def __init__(self, observables: Sequence, tol: float = ATOL):
        obs = tuple(o if isinstance(o, Operator) else Operator(o) for o in observables)
        for k, o in enumerate(obs):
            if not o.is_hermitian(tol):
                raise ValueError(f"observable {k} is not Hermitian")
        object.__setattr__(self, "observables", obs)

    def __len__(self) -> int:
        return len(self.observables)

    def __iter__(self):
        return iter(self.observables)

    def __getitem__(self, k) -> Operator:
        return self.observables[k]


def _obs_chain(obs) -> ObservableChain:
    return obs if isinstance(obs, ObservableChain) else ObservableChain(obs)


def _check_aligned(chain: ChannelChain, obs: ObservableChain) -> None:
    if len(obs) != len(chain) + 1:
        raise ValueError(f"need {len(chain) + 1} observables for a {len(chain)}-chain, got {len(obs)}")
    for k, (o, d) in enumerate(zip(obs, chain.dims)):
        if o.dim != d:
            raise ValueError(f"observable {k} has dimension {o.dim}, system {k} has {d}")


@dataclass(frozen=True, eq=False)
class SnapshotMap:
    kind: StarKind
    observable: Operator
    map: OperatorMap

    def __call__(self, rho: Operator) -> Operator:
        return self.map(rho)


def snapshot_map(kind: StarKind | str, observable: Operator) -> SnapshotMap:
    """Tabulate ``rho -> Theta_rho^dd(O)`` on matrix units.

    Closed forms this reproduces: fp ``{O, rho}/2``, left ``O rho``, right ``rho O``.
    """
    kind = StarKind.parse(kind)
    if not kind.state_linear:
        raise StarProductError("LS has no snapshot map (not state-linear)")
    d = observable.dim
    obs = observable.with_dims((d,))
    cols = [double_dagger(_rendering(kind, basis_op(d, i, j)))(obs).data.reshape(-1) for i in range(d) for j in range(d)]
    return SnapshotMap(kind, observable, OperatorMap(np.stack(cols, axis=1), d, d))


def expectation_direct(kind, chain, rho: Operator, obs) -> complex:
    chain = _as_chain(chain)
    obs = _obs_chain(obs)
    _check_aligned(chain, obs)
    q = star_nchain(kind, chain, rho)
    big = tensor(*obs.observables)
    return complex(np.sum(big.data.T * q.data))


def expectation_factored(kind, chain, rho: Operator, obs) -> complex:
    """Alternate snapshot maps and channels; peak object is a single-system operator."""
    chain = _as_chain(chain)
    obs = _obs_chain(obs)
    _check_aligned(chain, obs)
    if rho.dim != chain.dims[0]:
        raise ValueError("initial state does not match the chain")
    sigma = rho.with_dims((rho.dim,))
    for o, e in zip(obs.observables[:-1], chain):
        sigma = apply(e, snapshot_map(kind, o)(sigma))
    return complex(np.trace(obs[-1].data @ sigma.data))


def random_instance(rng: np.random.Generator, max_steps: int = 3, dims=(2, 3)):
    """Seeded ``(chain, rho, observables)`` with ``n`` in 1..max_steps and local dims from ``dims``."""
    n = int(rng.integers(1, max_steps + 1))
    ds = [int(rng.choice(dims)) for _ in range(n + 1)]
    chain = random_chain(ds, seed=rng)
    rho = random_state(ds[0], seed=rng)
    obs = ObservableChain([random_hermitian(d, seed=rng) for d in ds])
    return chain, rho, obs


def factorization_defect(kind: StarKind | str, seed: int = 0, trials: int = 50) -> float:
    """Max ``|direct - factored|`` over seeded random instances (0 for no trials)."""
    kind = StarKind.parse(kind)
    worst = 0.0
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        chain, rho, obs = random_instance(rng)
        worst = max(worst, abs(expectation_direct(kind, chain, rho, obs) - expectation_factored(kind, chain, rho, obs)))
    return worst
