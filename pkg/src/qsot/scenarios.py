"""Worked scenarios: three-time Leggett-Garg qubit test and a non-Markovian quasiprobability."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import identity_channel
from .linalg import Operator, identity, tensor
from .quasiprob import (
    ConditionalTable,
    MarkovReport,
    Povm,
    QuasiDistribution,
    conditional,
    from_qsot,
    markov_check,
    x_basis,
    z_basis,
)
from .star import StarKind, star_nchain

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

LG_VECTORS = (
    (1.0, 0.0, 0.0),
    (0.5, np.sqrt(3) / 2, 0.0),
    (-0.5, np.sqrt(3) / 2, 0.0),
)
PAIRS = ((1, 2), (2, 3), (1, 3))


def spin_observable(u) -> Operator:
    u = np.asarray(u, dtype=float)
    if u.shape != (3,) or abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError(f"Bloch vector must be a unit 3-vector, got {u}")
    return Operator(u[0] * PAULI_X + u[1] * PAULI_Y + u[2] * PAULI_Z)


def spin_projectors(u) -> dict[int, np.ndarray]:
    o = spin_observable(u).data
    return {+1: 0.5 * (np.eye(2) + o), -1: 0.5 * (np.eye(2) - o)}


def maximally_mixed(d: int = 2) -> Operator:
    return Operator(np.eye(d) / d)


def bloch_state(r) -> Operator:
    """Qubit state ``(1 + r . sigma) / 2`` for ``|r| <= 1``."""
    r = np.asarray(r, dtype=float)
    if np.linalg.norm(r) > 1 + 1e-12:
        raise ValueError("Bloch vector must have norm <= 1")
    return Operator(0.5 * (np.eye(2) + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z))


@dataclass(frozen=True)
class LeggettGargConfig:
    bloch_vectors: tuple = LG_VECTORS
    rho: Operator = field(default_factory=maximally_mixed)

    def __post_init__(self):
        vecs = tuple(tuple(float(x) for x in v) for v in self.bloch_vectors)
        if len(vecs) != 3:
            raise ValueError("need exactly three Bloch vectors")
        for v in vecs:
            if len(v) != 3 or abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"Bloch vector {v} is not a unit 3-vector")
        if self.rho.dim != 2:
            raise ValueError("the Leggett-Garg scenario is a qubit scenario")
        object.__setattr__(self, "bloch_vectors", vecs)

    def vector(self, i: int) -> tuple[float, float, float]:
        return self.bloch_vectors[i - 1]


def _check_pair(i: int, j: int) -> None:
    if not (1 <= i < j <= 3):
        raise ValueError(f"invalid measurement pair ({i}, {j}); need 1 <= i < j <= 3")


SIGNS = (+1, -1)


def collapse_pair_probs(rho: Operator, i: int, j: int, config: LeggettGargConfig | None = None) -> dict:
    """Lueders sequential probabilities ``P(s, t) = Tr[Pi_i^s rho Pi_i^s Pi_j^t]``."""
    _check_pair(i, j)
    config = config or LeggettGargConfig()
    pi, pj = spin_projectors(config.vector(i)), spin_projectors(config.vector(j))
    r = rho.data
    return {(s, t): float(np.trace(pi[s] @ r @ pi[s] @ pj[t]).real) for s in SIGNS for t in SIGNS}


def _weighted(table: dict) -> float:
    return float(sum(s * t * v for (s, t), v in table.items()))


def correlator_collapse(rho: Operator, i: int, j: int, config: LeggettGargConfig | None = None) -> float:
    return _weighted(collapse_pair_probs(rho, i, j, config))


def _three_time_qsot(rho: Operator):
    return star_nchain(StarKind.FP, [identity_channel(2), identity_channel(2)], rho)


def correlator_qsot(rho: Operator, i: int, j: int, config: LeggettGargConfig | None = None) -> float:
    """``Tr[id^2 * rho (..)]`` with ``O_i``, ``O_j`` in time slots ``i``, ``j`` and ``1`` in the third."""
    _check_pair(i, j)
    config = config or LeggettGargConfig()
    q = _three_time_qsot(rho)
    slots = [identity(2)] * 3
    slots[i - 1] = spin_observable(config.vector(i))
    slots[j - 1] = spin_observable(config.vector(j))
    val = np.sum(tensor(*slots).data.T * q.data)
    return float(val.real)


def qsot_pair_table(rho: Operator, i: int, j: int, config: LeggettGargConfig | None = None) -> dict:
    """Margenau-Hill pair table from the three-time QSOT (trivial POVM on the idle slot)."""
    _check_pair(i, j)
    config = config or LeggettGargConfig()
    q = _three_time_qsot(rho)
    povms = [Povm.trivial(2)] * 3
    for k in (i, j):
        p = spin_projectors(config.vector(k))
        povms[k - 1] = Povm([p[+1], p[-1]])
    vals = from_qsot(q, povms).values
    table = {}
    for a, s in enumerate(SIGNS):
        for b, t in enumerate(SIGNS):
            idx = [0, 0, 0]
            idx[i - 1], idx[j - 1] = a, b
            table[(s, t)] = float(vals[tuple(idx)].real)
    return table


@dataclass(frozen=True)
class LgReport:
    C12: float
    C23: float
    C13: float
    lg_sum: float
    violated: bool
    qsot_correlators: dict
    P: dict
    Q: dict
    tables_differ: bool
    weighted_sums_agree: bool


def lg_run(config: LeggettGargConfig | None = None, tol: float = 1e-12) -> LgReport:
    config = config or LeggettGargConfig()
    rho = config.rho
    c = {p: correlator_collapse(rho, *p, config) for p in PAIRS}
    cq = {p: correlator_qsot(rho, *p, config) for p in PAIRS}
    P = {p: collapse_pair_probs(rho, *p, config) for p in PAIRS}
    Q = {p: qsot_pair_table(rho, *p, config) for p in PAIRS}
    differ = any(abs(P[p][k] - Q[p][k]) > 1e-9 for p in PAIRS for k in P[p])
    agree = all(abs(_weighted(P[p]) - _weighted(Q[p])) <= 1e-10 for p in PAIRS)
    s = c[(1, 2)] + c[(2, 3)] - c[(1, 3)]
    return LgReport(
        C12=c[(1, 2)],
        C23=c[(2, 3)],
        C13=c[(1, 3)],
        lg_sum=s,
        violated=s > 1 + tol,
        qsot_correlators={f"C{a}{b}": v for (a, b), v in cq.items()},
        P={f"{a}{b}": _table_json(P[(a, b)]) for (a, b) in PAIRS},
        Q={f"{a}{b}": _table_json(Q[(a, b)]) for (a, b) in PAIRS},
        tables_differ=differ,
        weighted_sums_agree=agree,
    )


def _table_json(table: dict) -> dict:
    return {f"{'+' if s > 0 else '-'}{'+' if t > 0 else '-'}": v for (s, t), v in table.items()}


# non-Markovian quasiprobabilities from a Markovian QSOT


def basis_conditional_formula(a, b, c) -> np.ndarray:
    """``Re[<c_k|b_j><a_i|c_k> / <a_i|b_j>]`` indexed ``[i, j, k]``; NaN where ``<a_i|b_j> = 0``."""
    out = np.full((len(a), len(b), len(c)), np.nan)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            den = np.vdot(ai, bj)
            if abs(den) < 1e-12:
                continue
            for k, ck in enumerate(c):
                out[i, j, k] = (np.vdot(ck, bj) * np.vdot(ai, ck) / den).real
    return out


@dataclass(frozen=True, eq=False)
class NonMarkovReport:
    distribution: QuasiDistribution
    cond_given_ab: ConditionalTable
    cond_given_b: ConditionalTable
    formula: np.ndarray
    formula_defect: float
    markov: MarkovReport


def nonmarkov_demo() -> NonMarkovReport:
    """``id^2 * pi`` (FP, Markovian) measured in the Z, X, Z bases."""
    a, b, c = z_basis(), x_basis(), z_basis()
    q = _three_time_qsot(maximally_mixed(2))
    qd = from_qsot(q, [Povm.from_basis(a), Povm.from_basis(b), Povm.from_basis(c)])
    cab = conditional(qd, 2, [0, 1])
    cb = conditional(qd, 2, [1])
    formula = basis_conditional_formula(a, b, c)
    mask = ~np.isnan(formula)
    defect = float(np.abs(cab.values.real[mask] - formula[mask]).max())
    return NonMarkovReport(
        distribution=qd,
        cond_given_ab=cab,
        cond_given_b=cb,
        formula=formula,
        formula_defect=defect,
        markov=markov_check(qd),
    )
