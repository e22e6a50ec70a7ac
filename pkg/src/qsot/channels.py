"""Quantum channels in Kraus form, with Jamiolkowski and Choi representations.

The channel-operator correspondence used everywhere is the swap-based
Jamiolkowski matrix ``J[E] = (id (x) E)(SWAP) = sum_ij E_ij (x) E(E_ji)``.
The Choi matrix differs from it by a partial transpose and is only used
to test complete positivity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .linalg import (
    ATOL,
    Operator,
    OperatorMap,
    apply_to_last,
    basis_op,
    partial_trace,
    swap_operator,
    system_dims,
    tensor,
)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map ``rho -> sum_k K_k rho K_k^dag``; validity is checked by :func:`is_cptp`."""

    in_dim: int
    out_dim: int
    kraus: tuple[np.ndarray, ...]

    def __init__(self, kraus: Iterable, in_dim: int | None = None, out_dim: int | None = None):
        ks = tuple(np.array(k, dtype=complex) for k in kraus)
        if not ks:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ks):
            raise ValueError("Kraus operators must be 2-D with a common shape")
        out_dim = shape[0] if out_dim is None else int(out_dim)
        in_dim = shape[1] if in_dim is None else int(in_dim)
        if shape != (out_dim, in_dim):
            raise ValueError(f"Kraus shape {shape} does not match out_dim x in_dim = {(out_dim, in_dim)}")
        for k in ks:
            k.setflags(write=False)
        object.__setattr__(self, "in_dim", in_dim)
        object.__setattr__(self, "out_dim", out_dim)
        object.__setattr__(self, "kraus", ks)

    def __call__(self, rho: Operator) -> Operator:
        return apply(self, rho)

    def as_map(self) -> OperatorMap:
        # vec(K X K^dag) = (K kron conj(K)) vec(X) in row-major order
        mat = sum(np.kron(k, k.conj()) for k in self.kraus)
        return OperatorMap(mat, self.in_dim, self.out_dim)

    def __repr__(self) -> str:
        return f"QuantumChannel(in_dim={self.in_dim}, out_dim={self.out_dim}, rank={len(self.kraus)})"


@dataclass(frozen=True, eq=False)
class ChannelChain:
    """Ordered composable channels ``A_0 -> A_1 -> ... -> A_n``."""

    channels: tuple[QuantumChannel, ...]

    def __init__(self, channels: Iterable[QuantumChannel]):
        chs = tuple(channels)
        for k in range(len(chs) - 1):
            if chs[k].out_dim != chs[k + 1].in_dim:
                raise ValueError(
                    f"channel {k} outputs dimension {chs[k].out_dim} but channel {k + 1} "
                    f"expects {chs[k + 1].in_dim}"
                )
        object.__setattr__(self, "channels", chs)

    def __len__(self) -> int:
        return len(self.channels)

    def __iter__(self):
        return iter(self.channels)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return ChannelChain(self.channels[k])
        return self.channels[k]

    @property
    def dims(self) -> tuple[int, ...]:
        """Local dimensions ``(d_0, ..., d_n)``; empty for the empty chain."""
        if not self.channels:
            return ()
        return (self.channels[0].in_dim,) + tuple(c.out_dim for c in self.channels)

    def lower(self) -> ChannelChain:
        """Drop the first channel."""
        return ChannelChain(self.channels[1:])

    def upper(self) -> ChannelChain:
        """Drop the last channel."""
        return ChannelChain(self.channels[:-1])


def _as_chain(chain: ChannelChain | Sequence[QuantumChannel]) -> ChannelChain:
    return chain if isinstance(chain, ChannelChain) else ChannelChain(chain)


def apply(e: QuantumChannel, rho: Operator) -> Operator:
    if rho.dim != e.in_dim:
        raise ValueError(f"channel expects dimension {e.in_dim}, got {rho.dim}")
    out = sum(k @ rho.data @ k.conj().T for k in e.kraus)
    return Operator(out)


def compose(e2: QuantumChannel, e1: QuantumChannel) -> QuantumChannel:
    """``e2 o e1``."""
    if e1.out_dim != e2.in_dim:
        raise ValueError(f"cannot compose: e1 outputs {e1.out_dim}, e2 expects {e2.in_dim}")
    return QuantumChannel([b @ a for b in e2.kraus for a in e1.kraus], e1.in_dim, e2.out_dim)


def jamiolkowski(e: QuantumChannel | OperatorMap) -> Operator:
    """``(id (x) E)(SWAP)``; works for any linear map, not only channels."""
    fmap = e.as_map() if isinstance(e, QuantumChannel) else e
    if len(fmap.in_dims) == 1:
        d = fmap.in_dim
        return apply_to_last(fmap, swap_operator(d))
    # multi-factor input: treat the input as a single block
    d = fmap.in_dim
    flat = OperatorMap(fmap.matrix, d, fmap.out_dims)
    return apply_to_last(flat, swap_operator(d))


def inverse_jamiolkowski(
    m: Operator,
    in_dim: int,
    out_dims: int | Iterable[int],
) -> OperatorMap:
    """Linear map ``rho -> Tr_A[(rho (x) 1) m]`` from ``A`` (dim ``in_dim``) to ``out_dims``."""
    out_dims = system_dims(out_dims)
    dout = int(np.prod(out_dims))
    if m.dim != in_dim * dout:
        raise ValueError(f"operator dimension {m.dim} != {in_dim} * {dout}")
    t = m.data.reshape(in_dim, dout, in_dim, dout)
    # Tr_A[(E_ij (x) 1) m] = m[j, :, i, :]
    mat = np.empty((dout * dout, in_dim * in_dim), dtype=complex)
    for i in range(in_dim):
        for j in range(in_dim):
            mat[:, i * in_dim + j] = t[j, :, i, :].reshape(-1)
    return OperatorMap(mat, in_dim, out_dims)


def choi(e: QuantumChannel) -> Operator:
    """``sum_ij E_ij (x) E(E_ij)``."""
    d = e.in_dim
    blocks = [tensor(basis_op(d, i, j), apply(e, basis_op(d, i, j))) for i in range(d) for j in range(d)]
    return Operator(sum(b.data for b in blocks), (d, e.out_dim))


@dataclass(frozen=True)
class CptpReport:
    tp_defect: float
    min_choi_eig: float
    ok: bool


def is_cptp(e: QuantumChannel, tol: float = ATOL) -> CptpReport:
    s = sum(k.conj().T @ k for k in e.kraus)
    tp = float(np.abs(s - np.eye(e.in_dim)).max())
    c = choi(e).data
    w = float(np.linalg.eigvalsh(0.5 * (c + c.conj().T)).min())
    return CptpReport(tp_defect=tp, min_choi_eig=w, ok=tp <= tol and w >= -tol)


# standard channels


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel([np.eye(d)])


def unitary_channel(u) -> QuantumChannel:
    return QuantumChannel([np.asarray(u, dtype=complex)])


def depolarizing_channel(d: int, p: float = 1.0) -> QuantumChannel:
    """``rho -> (1-p) rho + p Tr[rho] 1/d``; ``p = 1`` is fully depolarizing.

    Kraus set: ``sqrt(1-p) 1`` and ``sqrt(p/d) E_ij`` for all i, j.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    ks = [np.sqrt(1.0 - p) * np.eye(d)] if p < 1.0 else []
    for i in range(d):
        for j in range(d):
            ks.append(np.sqrt(p / d) * basis_op(d, i, j).data)
    return QuantumChannel(ks)


# seeded random objects; all randomness goes through numpy's PCG64 generator


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_isometry(rows: int, cols: int, seed=None) -> np.ndarray:
    """Haar-random isometry ``V`` (``V^dag V = 1``) of shape ``(rows, cols)``."""
    if rows < cols:
        raise ValueError("an isometry needs rows >= cols")
    q, r = np.linalg.qr(_ginibre(_rng(seed), rows, cols))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_unitary(d: int, seed=None) -> np.ndarray:
    return haar_isometry(d, d, seed)


def random_state(d: int, seed=None, rank: int | None = None) -> Operator:
    """Density operator ``G G^dag / Tr``; full rank Hilbert-Schmidt measure by default."""
    g = _ginibre(_rng(seed), d, d if rank is None else rank)
    rho = g @ g.conj().T
    return Operator(rho / np.trace(rho).real)


def random_pure_state(d: int, seed=None) -> Operator:
    v = _ginibre(_rng(seed), d, 1)[:, 0]
    v /= np.linalg.norm(v)
    return Operator(np.outer(v, v.conj()))


def random_hermitian(d: int, seed=None) -> Operator:
    g = _ginibre(_rng(seed), d, d)
    return Operator(0.5 * (g + g.conj().T))


def random_channel(in_dim: int, out_dim: int, env_dim: int | None = None, seed=None) -> QuantumChannel:
    """Stinespring channel ``Tr_env[V rho V^dag]`` with ``V`` a Haar isometry.

    ``env_dim`` defaults to ``in_dim * out_dim`` (full Kraus rank).
    """
    env = in_dim * out_dim if env_dim is None else int(env_dim)
    if env < 1:
        raise ValueError("env_dim must be >= 1")
    if out_dim * env < in_dim:
        raise ValueError("out_dim * env_dim must be >= in_dim")
    v = haar_isometry(out_dim * env, in_dim, seed)
    t = v.reshape(out_dim, env, in_dim)
    return QuantumChannel([t[:, e, :] for e in range(env)], in_dim, out_dim)


def random_chain(dims: Sequence[int], seed=None, env_dim: int | None = None) -> ChannelChain:
    rng = _rng(seed)
    return ChannelChain(random_channel(dims[k], dims[k + 1], env_dim, rng) for k in range(len(dims) - 1))


def trace_preservation_defect(e: QuantumChannel) -> float:
    """``max |Tr_B J[E] - 1_A|``."""
    j = jamiolkowski(e)
    return float(np.abs(partial_trace(j, [0]).data - np.eye(e.in_dim)).max())
