"""Brute-force reference implementations used as test oracles.

Everything here is written with explicit index loops so it shares no code
path with the library.
"""

from __future__ import annotations

import itertools

import numpy as np


def unit(d, i, j):
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1.0
    return m


def kron_loops(a, b):
    a, b = np.asarray(a), np.asarray(b)
    (p, q), (r, s) = a.shape, b.shape
    out = np.zeros((p * r, q * s), dtype=complex)
    for i in range(p):
        for j in range(q):
            for k in range(r):
                for l in range(s):
                    out[i * r + k, j * s + l] = a[i, j] * b[k, l]
    return out


def kron_all(*ms):
    out = np.eye(1, dtype=complex)
    for m in ms:
        out = kron_loops(out, m)
    return out


def ptrace_loops(m, dims, keep):
    """Partial trace by summing over every multi-index of the traced factors."""
    dims = list(dims)
    keep = sorted(keep)
    drop = [k for k in range(len(dims)) if k not in keep]
    kd = [dims[k] for k in keep]
    dk = int(np.prod(kd)) if kd else 1
    out = np.zeros((dk, dk), dtype=complex)

    def flat(idx):
        f = 0
        for k, i in enumerate(idx):
            f = f * dims[k] + i
        return f

    for r in itertools.product(*[range(dims[k]) for k in keep]):
        for c in itertools.product(*[range(dims[k]) for k in keep]):
            for t in itertools.product(*[range(dims[k]) for k in drop]):
                ri, ci = [0] * len(dims), [0] * len(dims)
                for pos, k in enumerate(keep):
                    ri[k], ci[k] = r[pos], c[pos]
                for pos, k in enumerate(drop):
                    ri[k] = ci[k] = t[pos]
                rr = int(np.ravel_multi_index(r, kd)) if kd else 0
                cc = int(np.ravel_multi_index(c, kd)) if kd else 0
                out[rr, cc] += m[flat(ri), flat(ci)]
    return out


def channel_apply(kraus, rho):
    return sum(k @ rho @ k.conj().T for k in kraus)


def jamiolkowski_loops(kraus, din):
    """``sum_ij E_ij (x) E(E_ji)``."""
    dout = kraus[0].shape[0]
    out = np.zeros((din * dout, din * dout), dtype=complex)
    for i in range(din):
        for j in range(din):
            out += kron_loops(unit(din, i, j), channel_apply(kraus, unit(din, j, i)))
    return out


def star_closed(kind, j, x):
    db = j.shape[0] // x.shape[0]
    xb = kron_loops(x, np.eye(db))
    if kind == "left":
        return xb @ j
    if kind == "right":
        return j @ xb
    if kind == "fp":
        return 0.5 * (xb @ j + j @ xb)
    raise ValueError(kind)


def id_tensor_map(fn, m, p, din):
    """``(id_p (x) fn)(m)`` assembled block by block from ``E_ab (x) fn(E_ij)``."""
    out = None
    for a in range(p):
        for b in range(p):
            for i in range(din):
                for j in range(din):
                    c = m[a * din + i, b * din + j]
                    if c == 0:
                        continue
                    term = c * kron_loops(unit(p, a, b), fn(unit(din, i, j)))
                    out = term if out is None else out + term
    if out is None:
        d = fn(unit(din, 0, 0)).shape[0]
        out = np.zeros((p * d, p * d), dtype=complex)
    return out


def chain_star_loops(kind, chains_kraus, dims, rho):
    """Markovian n-chain product by explicit bloom iteration."""
    q = np.asarray(rho, dtype=complex)
    p = 1
    for k, kraus in enumerate(chains_kraus):
        din = dims[k]
        j = jamiolkowski_loops(kraus, din)
        q = id_tensor_map(lambda x, j=j: star_closed(kind, j, x), q, p, din)
        p *= din
    return q


def quasi_loops(q, povms):
    """``Q(x) = Tr[(M_x0 (x) ... (x) M_xn) q]`` by enumeration."""
    shape = tuple(len(p) for p in povms)
    out = np.zeros(shape, dtype=complex)
    for idx in itertools.product(*[range(n) for n in shape]):
        big = kron_all(*[povms[k][i] for k, i in enumerate(idx)])
        out[idx] = np.trace(big @ q)
    return out


def born_sequence(kraus_list, rho):
    states = [np.asarray(rho, dtype=complex)]
    for kraus in kraus_list:
        states.append(channel_apply(kraus, states[-1]))
    return states
