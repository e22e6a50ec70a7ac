"""Spatiotemporal (star) products and their multipartite extensions.

Bipartite products for a channel ``E: A -> B`` with Jamiolkowski matrix ``J``:

* left   ``(rho (x) 1) J``
* right  ``J (rho (x) 1)``
* fp     ``1/2 {rho (x) 1, J}``
* ls     ``(sqrt(rho) (x) 1) J (sqrt(rho) (x) 1)``  (not linear in ``rho``)

The Markovian extension to n-chains applies the *bloom* of each channel,
the linear map ``X -> E (star) X``, to the newest tensor factor. The holistic
extensions instead average two fixed left/right patterns.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import (
    ChannelChain,
    QuantumChannel,
    _as_chain,
    _rng,
    apply,
    inverse_jamiolkowski,
    jamiolkowski,
    random_channel,
    random_state,
)
from .linalg import (
    ATOL,
    Operator,
    OperatorMap,
    apply_to_first,
    apply_to_last,
    identity,
    max_abs_diff,
    partial_trace,
    psd_sqrt,
    swap_factors,
    swap_operator,
    tensor,
)


class StarKind(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    FP = "fp"
    LS = "ls"

    @property
    def state_linear(self) -> bool:
        return self is not StarKind.LS

    @classmethod
    def parse(cls, value: str | StarKind) -> StarKind:
        if isinstance(value, StarKind):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown star kind {value!r}; choose from fp, left, right, ls") from None


class StarProductError(ValueError):
    """Raised for requests the product cannot honor (e.g. LS on n >= 2)."""


@dataclass(frozen=True)
class ExtensionPolicy:
    """Markovian when ``holistic`` is None, else a string over ``{L, R}``."""

    holistic: str | None = None

    def __post_init__(self):
        if self.holistic is not None:
            bits = self.holistic.upper()
            if not bits or set(bits) - {"L", "R"}:
                raise ValueError(f"holistic bits must be a non-empty string over L/R, got {self.holistic!r}")
            object.__setattr__(self, "holistic", bits)

    @property
    def markovian(self) -> bool:
        return self.holistic is None

    def truncate(self, start: int, stop: int | None = None) -> ExtensionPolicy:
        if self.holistic is None:
            return self
        return ExtensionPolicy(self.holistic[start:stop] or None)

    def to_json(self) -> dict:
        return {"markovian": True} if self.holistic is None else {"holistic": self.holistic}

    @classmethod
    def from_json(cls, obj) -> ExtensionPolicy:
        if obj is None or obj == "markovian":
            return cls()
        if isinstance(obj, str):
            return cls(obj)
        if obj.get("holistic"):
            return cls(obj["holistic"])
        return cls()


MARKOVIAN = ExtensionPolicy()


@dataclass(frozen=True, eq=False)
class QsotOperator:
    op: Operator
    kind: StarKind
    policy: ExtensionPolicy = MARKOVIAN

    @property
    def dims(self) -> tuple[int, ...]:
        return self.op.dims

    @property
    def data(self) -> np.ndarray:
        return self.op.data


# bipartite products


def _star_raw(kind: StarKind, j: Operator, x: Operator) -> Operator:
    """Bipartite product on an arbitrary operator ``x`` (linear kinds only)."""
    xb = tensor(x, identity(j.dims[1]))
    if kind is StarKind.LEFT:
        return xb @ j
    if kind is StarKind.RIGHT:
        return j @ xb
    if kind is StarKind.FP:
        return 0.5 * (xb @ j + j @ xb)
    raise StarProductError("LS product is not linear in the state")


def _check_state(rho: Operator, d: int, tol: float = ATOL) -> None:
    if rho.dim != d:
        raise ValueError(f"initial state has dimension {rho.dim}, chain expects {d}")


def star_1chain(kind: StarKind | str, e: QuantumChannel, rho: Operator) -> QsotOperator:
    kind = StarKind.parse(kind)
    _check_state(rho, e.in_dim)
    rho = rho.with_dims((e.in_dim,))
    j = jamiolkowski(e)
    if kind is StarKind.LS:
        if not rho.is_psd():
            raise StarProductError("LS product needs a positive semidefinite state")
        s = tensor(psd_sqrt(rho), identity(e.out_dim))
        return QsotOperator(s @ j @ s, kind)
    return QsotOperator(_star_raw(kind, j, rho), kind)


def bloom(kind: StarKind | str, e: QuantumChannel) -> OperatorMap:
    """Linear extension of ``sigma -> e (star) sigma`` as a map ``A -> AB``."""
    kind = StarKind.parse(kind)
    if not kind.state_linear:
        raise StarProductError("LS has no multipartite extension (no linear bloom)")
    j = jamiolkowski(e)
    return OperatorMap.from_function(lambda x: _star_raw(kind, j, x), e.in_dim, (e.in_dim, e.out_dim))


def _markovian(kind: StarKind, chain: ChannelChain, x: Operator) -> Operator:
    q = x.with_dims((chain.dims[0],))
    for e in chain:
        q = apply_to_last(bloom(kind, e), q)
    return q


def _patterned(bits: str, chain: ChannelChain, x: Operator) -> Operator:
    q = x.with_dims((chain.dims[0],))
    for b, e in zip(bits, chain):
        q = apply_to_last(bloom(StarKind.LEFT if b == "L" else StarKind.RIGHT, e), q)
    return q


def _complement(bits: str) -> str:
    return bits.translate(str.maketrans("LR", "RL"))


def _holistic(bits: str, chain: ChannelChain, x: Operator) -> Operator:
    return 0.5 * (_patterned(bits, chain, x) + _patterned(_complement(bits), chain, x))


def star_nchain(kind: StarKind | str, chain: ChannelChain | Sequence[QuantumChannel], rho: Operator) -> QsotOperator:
    """Markovian extension ``E_n * (... * (E_1 * rho))``."""
    kind = StarKind.parse(kind)
    chain = _as_chain(chain)
    if len(chain) == 0:
        raise ValueError("chain must be non-empty")
    if kind is StarKind.LS:
        if len(chain) == 1:
            return star_1chain(kind, chain[0], rho)
        raise StarProductError("LS has no multipartite extension")
    _check_state(rho, chain.dims[0])
    return QsotOperator(_markovian(kind, chain, rho), kind, MARKOVIAN)


def star_nchain_holistic(bits: str, chain: ChannelChain | Sequence[QuantumChannel], rho: Operator) -> QsotOperator:
    """``1/2 (chain *_C rho + chain *_C~ rho)`` for the bit string ``C`` and its complement."""
    chain = _as_chain(chain)
    policy = ExtensionPolicy(bits)
    if len(policy.holistic) != len(chain):
        raise ValueError(f"holistic bit string has length {len(policy.holistic)}, chain has {len(chain)}")
    _check_state(rho, chain.dims[0])
    return QsotOperator(_holistic(policy.holistic, chain, rho), StarKind.FP, policy)


def star(
    kind: StarKind | str,
    chain: ChannelChain | Sequence[QuantumChannel],
    rho: Operator,
    policy: ExtensionPolicy = MARKOVIAN,
) -> QsotOperator:
    """Dispatch on the extension policy."""
    if policy.markovian:
        return star_nchain(kind, chain, rho)
    if StarKind.parse(kind) is not StarKind.FP:
        raise StarProductError("holistic products are symmetrized FP extensions; use kind 'fp'")
    return star_nchain_holistic(policy.holistic, chain, rho)


# marginal consistency


@dataclass(frozen=True)
class MarginalReport:
    max_defect: float
    trace_defect: float
    checks: int
    ok: bool


def _marginal_defect(q: Operator, kind: StarKind, policy: ExtensionPolicy, chain: ChannelChain, rho: Operator) -> tuple[float, int]:
    n = len(chain)
    if n == 0:
        return max_abs_diff(q, rho.data), 1
    low = partial_trace(q, range(1, n + 1))
    high = partial_trace(q, range(n))
    e1_rho = apply(chain[0], rho)
    if n == 1:
        ref_low, ref_high = e1_rho, rho
    else:
        ref_low = star(kind, chain.lower(), e1_rho, policy.truncate(1)).op
        ref_high = star(kind, chain.upper(), rho, policy.truncate(0, -1)).op
    worst = max(max_abs_diff(low, ref_low), max_abs_diff(high, ref_high))
    checks = 2
    if n > 1:
        d1, c1 = _marginal_defect(low, kind, policy.truncate(1), chain.lower(), e1_rho)
        d2, c2 = _marginal_defect(high, kind, policy.truncate(0, -1), chain.upper(), rho)
        worst = max(worst, d1, d2)
        checks += c1 + c2
    return worst, checks


def marginal_check(
    q: QsotOperator,
    chain: ChannelChain | Sequence[QuantumChannel],
    rho: Operator,
    tol: float = ATOL,
) -> MarginalReport:
    """Recursive check of ``Tr_{A_0}[q] = E_lower * E_1(rho)`` and ``Tr_{A_n}[q] = E_upper * rho``."""
    chain = _as_chain(chain)
    if q.dims != chain.dims:
        raise ValueError(f"QSOT dims {q.dims} do not match chain dims {chain.dims}")
    worst, checks = _marginal_defect(q.op, q.kind, q.policy, chain, rho.with_dims((chain.dims[0],)))
    tr = abs(q.op.trace() - 1.0)
    return MarginalReport(max_defect=worst, trace_defect=tr, checks=checks, ok=worst <= tol and tr <= tol)


# conditionability machinery


@dataclass(frozen=True, eq=False)
class StateRenderingMap:
    kind: StarKind
    rho: Operator
    map: OperatorMap

    def __call__(self, x: Operator) -> Operator:
        return self.map(x)


def _rendering(kind: StarKind, x: Operator) -> OperatorMap:
    d = x.dim
    xd = x.data
    if kind is StarKind.LEFT:
        mat = np.kron(xd, np.eye(d))
    elif kind is StarKind.RIGHT:
        mat = np.kron(np.eye(d), xd.T)
    elif kind is StarKind.FP:
        mat = 0.5 * (np.kron(xd, np.eye(d)) + np.kron(np.eye(d), xd.T))
    else:
        raise StarProductError("LS has no linear state-rendering map")
    return OperatorMap(mat, d, d)


def state_rendering_map(kind: StarKind | str, rho: Operator) -> StateRenderingMap:
    """``Theta_rho``: left ``X -> rho X``, right ``X -> X rho``, fp ``X -> {rho, X}/2``."""
    kind = StarKind.parse(kind)
    return StateRenderingMap(kind, rho, _rendering(kind, rho))


def double_dagger(theta: OperatorMap) -> OperatorMap:
    """Unique map with ``(theta (x) id)(SWAP) = (id (x) theta_dd)(SWAP)``."""
    if theta.in_dims != theta.out_dims or len(theta.in_dims) != 1:
        raise ValueError("double_dagger needs a map from a single system to itself")
    d = theta.in_dim
    flipped = swap_factors(jamiolkowski(theta))
    return inverse_jamiolkowski(flipped, d, d)


def jamiolkowski_map(kind: StarKind | str, chain: ChannelChain | Sequence[QuantumChannel]) -> OperatorMap:
    """``Phi = J^{-1}[chain * 1]`` mapping ``A_0`` into ``A_1 ... A_n``."""
    kind = StarKind.parse(kind)
    if not kind.state_linear:
        raise StarProductError("Jamiolkowski maps are defined for state-linear products")
    chain = _as_chain(chain)
    q = _markovian(kind, chain, identity(chain.dims[0]))
    return inverse_jamiolkowski(q, chain.dims[0], chain.dims[1:])


def conditionability_defect(kind: StarKind | str, chain: ChannelChain | Sequence[QuantumChannel], rho: Operator) -> float:
    """``max |chain * rho - (Theta_rho (x) id)(chain * 1)|``."""
    kind = StarKind.parse(kind)
    chain = _as_chain(chain)
    lhs = star_nchain(kind, chain, rho).op
    unit = _markovian(kind, chain, identity(chain.dims[0]))
    rhs = apply_to_first(_rendering(kind, rho.with_dims((chain.dims[0],))), unit)
    return max_abs_diff(lhs, rhs)


def ls_linearity_gap(rho: Operator, sigma: Operator, e: QuantumChannel) -> float:
    mix = 0.5 * (rho + sigma)
    lhs = star_1chain(StarKind.LS, e, mix).op
    rhs = 0.5 * (star_1chain(StarKind.LS, e, rho).op + star_1chain(StarKind.LS, e, sigma).op)
    return max_abs_diff(lhs, rhs)


@dataclass(frozen=True)
class ProbeReport:
    kind: str
    trials: int
    broadcasting_defect: float
    conditionability_defect: float
    decomposability_defect: float
    decomposability_ok: bool
    hierarchy_ok: bool


def structural_probe(kind: StarKind | str, seed: int = 0, trials: int = 50, tol: float = ATOL) -> ProbeReport:
    """Broadcasting, conditionability and decomposability defects over seeded random (E, rho).

    For LS the (nonlinear) rendering ``X -> sqrt(rho) X sqrt(rho)`` is used,
    so LS passes all three while still failing state-linearity.
    """
    kind = StarKind.parse(kind)
    rng = _rng(seed)
    b_def = c_def = dec_def = 0.0
    hierarchy = True
    for _ in range(trials):
        da, db = (int(x) for x in rng.integers(2, 4, size=2))
        e = random_channel(da, db, seed=rng)
        rho = random_state(da, seed=rng)
        q = star_1chain(kind, e, rho).op
        broad = apply_to_last(e.as_map(), star_1chain(kind, _identity_channel(da), rho).op)
        if kind is StarKind.LS:
            s = psd_sqrt(rho).data
            theta = OperatorMap(np.kron(s, s.T), da, da)
            unit = jamiolkowski(e)
        else:
            theta = _rendering(kind, rho)
            unit = _star_raw(kind, jamiolkowski(e), identity(da))
        cond = apply_to_first(theta, unit)
        # decomposable form (Theta_rho (x) Phi^E)(SWAP), Phi^E = J^{-1}[E * 1]
        phi = inverse_jamiolkowski(unit, da, db)
        dec = apply_to_last(phi, apply_to_first(theta, swap_operator(da)))
        bd, cd, dd = max_abs_diff(q, broad), max_abs_diff(q, cond), max_abs_diff(q, dec)
        b_def, c_def, dec_def = max(b_def, bd), max(c_def, cd), max(dec_def, dd)
        if cd <= tol and not (dd <= tol and bd <= tol):
            hierarchy = False
        if dd <= tol and bd > tol:
            hierarchy = False
    return ProbeReport(
        kind=kind.value,
        trials=trials,
        broadcasting_defect=b_def,
        conditionability_defect=c_def,
        decomposability_defect=dec_def,
        decomposability_ok=dec_def <= tol,
        hierarchy_ok=hierarchy,
    )


def _identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel([np.eye(d)])
