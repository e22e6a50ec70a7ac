"""Quasiprobability distributions read off a QSOT with one POVM per time step.

``Q(x_0, ..., x_n) = Tr[q (M_{x_0} (x) ... (x) M_{x_n})]``. Left products give
Kirkwood-Dirac values, FP products their real parts (Margenau-Hill).
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .linalg import ATOL, Operator
from .star import QsotOperator

UNDEFINED_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class Povm:
    dim: int
    elements: tuple[np.ndarray, ...]

    def __init__(self, elements: Iterable, tol: float = ATOL):
        els = tuple(np.array(e.data if isinstance(e, Operator) else e, dtype=complex) for e in elements)
        if not els:
            raise ValueError("a POVM needs at least one element")
        d = els[0].shape[0]
        for e in els:
            if e.shape != (d, d):
                raise ValueError("POVM elements must share one square shape")
            if np.abs(e - e.conj().T).max() > tol or np.linalg.eigvalsh(0.5 * (e + e.conj().T)).min() < -tol:
                raise ValueError("POVM elements must be positive semidefinite")
            e.setflags(write=False)
        if np.abs(sum(els) - np.eye(d)).max() > tol:
            raise ValueError("POVM elements must sum to the identity")
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "elements", els)

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def from_basis(cls, vectors) -> Povm:
        """Rank-one projectors onto a list of orthonormal kets."""
        return cls(np.outer(v, np.conj(v)) for v in (np.asarray(v, dtype=complex) for v in vectors))

    @classmethod
    def computational(cls, d: int) -> Povm:
        return cls.from_basis(np.eye(d))

    @classmethod
    def trivial(cls, d: int) -> Povm:
        return cls([np.eye(d)])

    def stacked(self) -> np.ndarray:
        return np.stack(self.elements)


def z_basis() -> list[np.ndarray]:
    return [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)]


def x_basis() -> list[np.ndarray]:
    s = 1 / np.sqrt(2)
    return [np.array([s, s], dtype=complex), np.array([s, -s], dtype=complex)]


def y_basis() -> list[np.ndarray]:
    s = 1 / np.sqrt(2)
    return [np.array([s, 1j * s]), np.array([s, -1j * s])]


@dataclass(frozen=True, eq=False)
class QuasiDistribution:
    """Complex weights indexed by outcome tuples; ``values.shape`` lists outcomes per axis."""

    values: np.ndarray

    def __init__(self, values):
        v = np.array(values, dtype=complex)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def axes(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def naxes(self) -> int:
        return self.values.ndim

    def total(self) -> complex:
        return complex(self.values.sum())

    def __getitem__(self, idx) -> complex:
        return complex(self.values[idx])

    def items(self):
        for idx in itertools.product(*(range(n) for n in self.axes)):
            yield idx, complex(self.values[idx])

    @property
    def min_real(self) -> float:
        return float(self.values.real.min())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{k}" for k in range(self.naxes)] + ["re", "im"])
        for idx, val in self.items():
            w.writerow(list(idx) + [f"{val.real:.17g}", f"{val.imag:.17g}"])
        return buf.getvalue()


def from_qsot(q: QsotOperator | Operator, povms: Sequence[Povm]) -> QuasiDistribution:
    op = q.op if isinstance(q, QsotOperator) else q
    if len(povms) != op.nfactors:
        raise ValueError(f"need one POVM per tensor factor: {op.nfactors} factors, {len(povms)} POVMs")
    for k, (p, d) in enumerate(zip(povms, op.dims)):
        if p.dim != d:
            raise ValueError(f"POVM {k} acts on dimension {p.dim}, factor {k} has {d}")
    n = op.nfactors
    t = op.data.reshape(op.dims + op.dims)
    # Tr[q (x)_k M_k] = sum q[i.., j..] prod_k M_k[j_k, i_k]
    operands: list = [t, list(range(2 * n))]
    for k, p in enumerate(povms):
        operands += [p.stacked(), [2 * n + k, n + k, k]]
    return QuasiDistribution(np.einsum(*operands, [2 * n + k for k in range(n)]))


def marginal(qd: QuasiDistribution, keep: Iterable[int]) -> QuasiDistribution:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one axis")
    if keep[0] < 0 or keep[-1] >= qd.naxes:
        raise IndexError("axis out of range")
    drop = tuple(k for k in range(qd.naxes) if k not in keep)
    return QuasiDistribution(qd.values.sum(axis=drop)) if drop else qd


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """``Q(target | given)`` indexed as ``[*given (sorted), target]``; undefined entries are NaN."""

    given: tuple[int, ...]
    target: int
    values: np.ndarray
    defined: np.ndarray

    def __getitem__(self, idx) -> complex:
        return complex(self.values[idx])


def conditional(qd: QuasiDistribution, target: int, given: Iterable[int], eps: float = UNDEFINED_EPS) -> ConditionalTable:
    given = tuple(sorted(set(int(g) for g in given)))
    if target in given:
        raise ValueError("target axis cannot also be conditioned on")
    joint_axes = sorted(given + (target,))
    joint = marginal(qd, joint_axes).values
    # move target to the last position
    pos = joint_axes.index(target)
    joint = np.moveaxis(joint, pos, -1)
    if given:
        cond = marginal(qd, given).values
    else:
        cond = np.array(qd.total())
    defined = np.abs(cond) > eps
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(defined[..., None], joint / np.where(defined, cond, 1.0)[..., None], np.nan)
    return ConditionalTable(given, target, vals, np.broadcast_to(defined[..., None], vals.shape).copy())


@dataclass(frozen=True)
class MarkovReport:
    is_markov: bool
    max_defect: float
    witness: tuple[int, ...] | None


def markov_check(qd: QuasiDistribution, tol: float = ATOL, eps: float = UNDEFINED_EPS) -> MarkovReport:
    """Compare ``Q(x_i | x_{i-1}, ..., x_0)`` with ``Q(x_i | x_{i-1})`` for every ``i >= 2``.

    The witness is the outcome prefix ``(x_0, ..., x_i)`` with the largest defect.
    """
    if qd.naxes < 3:
        raise ValueError("the Markov condition needs at least three axes")
    worst, witness = 0.0, None
    for i in range(2, qd.naxes):
        full = conditional(qd, i, range(i), eps)
        short = conditional(qd, i, [i - 1], eps)
        # broadcast Q(x_i | x_{i-1}) over x_0..x_{i-2}
        shape = (1,) * (i - 1) + short.values.shape
        sv = short.values.reshape(shape)
        sd = short.defined.reshape(shape)
        ok = full.defined & sd
        diff = np.where(ok, np.abs(full.values - sv), 0.0)
        if diff.size and diff.max() > worst:
            worst = float(diff.max())
            witness = tuple(int(a) for a in np.unravel_index(int(np.argmax(diff)), diff.shape))
    return MarkovReport(is_markov=worst <= tol, max_defect=worst, witness=witness)


def negativity(qd: QuasiDistribution) -> float:
    """``sum |Q| - 1``; zero exactly for genuine probability distributions."""
    return float(np.abs(qd.values).sum() - 1.0)
