"""Dense operator algebra over multipartite Hilbert spaces.

Basis kets ``|i_0 i_1 ... i_n>`` map to the flat index
``sum_k i_k * prod_{l>k} d_l`` (leftmost factor most significant), which is
numpy's row-major order. Every module in the package relies on this.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

ATOL = 1e-10
EIG_ATOL = 1e-9


def system_dims(dims: int | Iterable[int]) -> tuple[int, ...]:
    """Normalize ``dims`` to a validated tuple of positive ints."""
    if isinstance(dims, (int, np.integer)):
        dims = (int(dims),)
    out = tuple(int(d) for d in dims)
    if not out:
        raise ValueError("dims must be non-empty")
    if any(d < 1 for d in out):
        raise ValueError(f"local dimensions must be >= 1, got {out}")
    return out


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix on a tensor product of local spaces."""

    dims: tuple[int, ...]
    data: np.ndarray

    def __init__(self, data, dims: int | Iterable[int] | None = None):
        arr = np.array(data, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {arr.shape}")
        dims = system_dims(arr.shape[0] if dims is None else dims)
        if int(np.prod(dims)) != arr.shape[0]:
            raise ValueError(f"dims {dims} do not match matrix size {arr.shape[0]}")
        arr.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", arr)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def nfactors(self) -> int:
        return len(self.dims)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def dag(self) -> Operator:
        return Operator(self.data.conj().T, self.dims)

    def hermitian_defect(self) -> float:
        return float(np.abs(self.data - self.data.conj().T).max())

    def is_hermitian(self, tol: float = ATOL) -> bool:
        return self.hermitian_defect() <= tol

    def is_psd(self, tol: float = ATOL) -> bool:
        if not self.is_hermitian(tol):
            return False
        return float(np.linalg.eigvalsh(_herm(self.data)).min()) >= -tol

    def with_dims(self, dims: Iterable[int]) -> Operator:
        return Operator(self.data, dims)

    def __matmul__(self, other: Operator) -> Operator:
        _check_same_dims(self, other)
        return Operator(self.data @ other.data, self.dims)

    def __add__(self, other: Operator) -> Operator:
        _check_same_dims(self, other)
        return Operator(self.data + other.data, self.dims)

    def __sub__(self, other: Operator) -> Operator:
        _check_same_dims(self, other)
        return Operator(self.data - other.data, self.dims)

    def __mul__(self, scalar: complex) -> Operator:
        return Operator(self.data * scalar, self.dims)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> Operator:
        return Operator(self.data / scalar, self.dims)

    def __neg__(self) -> Operator:
        return Operator(-self.data, self.dims)

    def __repr__(self) -> str:
        return f"Operator(dims={self.dims})"


def _herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def _check_same_dims(a: Operator, b: Operator) -> None:
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")


def max_abs_diff(a: Operator | np.ndarray, b: Operator | np.ndarray) -> float:
    """Max-entry norm of ``a - b``."""
    a = a.data if isinstance(a, Operator) else np.asarray(a)
    b = b.data if isinstance(b, Operator) else np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(a - b).max()) if a.size else 0.0


def identity(dims: int | Iterable[int]) -> Operator:
    dims = system_dims(dims)
    return Operator(np.eye(int(np.prod(dims))), dims)


def basis_op(d: int, i: int, j: int) -> Operator:
    """Matrix unit ``E_ij = |i><j|`` on a ``d``-dimensional space."""
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1.0
    return Operator(m)


def ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def projector(vec: Sequence[complex]) -> Operator:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return Operator(np.outer(v, v.conj()))


def tensor(*ops: Operator) -> Operator:
    """Kronecker product, earlier arguments more significant."""
    if not ops:
        raise ValueError("tensor needs at least one operator")
    data = ops[0].data
    dims = ops[0].dims
    for op in ops[1:]:
        data = np.kron(data, op.data)
        dims = dims + op.dims
    return Operator(data, dims)


def partial_trace(m: Operator, keep: Iterable[int]) -> Operator:
    """Trace out every factor not in ``keep``; kept factors retain their order."""
    keep = sorted(set(int(k) for k in keep))
    n = m.nfactors
    for k in keep:
        if not 0 <= k < n:
            raise IndexError(f"subsystem index {k} out of range for {n} factors")
    if len(keep) == n:
        return m
    t = m.data.reshape(m.dims + m.dims)
    row = list(range(n))
    col = [n + k if k in keep else k for k in range(n)]
    out = [k for k in keep] + [n + k for k in keep]
    res = np.einsum(t, row + col, out)
    kept = tuple(m.dims[k] for k in keep)
    if not kept:
        return Operator(np.array([[res]]), (1,))
    d = int(np.prod(kept))
    return Operator(res.reshape(d, d), kept)


def trace_out(m: Operator, drop: Iterable[int]) -> Operator:
    drop = set(int(k) for k in drop)
    return partial_trace(m, [k for k in range(m.nfactors) if k not in drop])


def swap_operator(d: int) -> Operator:
    """``sum_ij E_ij (x) E_ji`` on two ``d``-dimensional factors."""
    if d < 1:
        raise ValueError("d must be >= 1")
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return Operator(s, (d, d))


def swap_factors(m: Operator) -> Operator:
    """Exchange the two tensor factors of a bipartite operator (AB -> BA)."""
    if m.nfactors != 2:
        raise ValueError("swap_factors expects a bipartite operator")
    a, b = m.dims
    t = m.data.reshape(a, b, a, b).transpose(1, 0, 3, 2)
    return Operator(t.reshape(a * b, a * b), (b, a))


def anticommutator(a: Operator, b: Operator) -> Operator:
    _check_same_dims(a, b)
    return Operator(a.data @ b.data + b.data @ a.data, a.dims)


def hermitian_spectrum(m: Operator, tol: float = ATOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian operator, descending."""
    if not m.is_hermitian(tol):
        raise ValueError(f"operator is not Hermitian (defect {m.hermitian_defect():.3g})")
    return np.linalg.eigvalsh(_herm(m.data))[::-1]


def psd_sqrt(m: Operator, tol: float = ATOL) -> Operator:
    """PSD square root; eigenvalues in ``[-tol, 0)`` are clamped to zero."""
    if not m.is_hermitian(tol):
        raise ValueError("psd_sqrt needs a Hermitian operator")
    w, v = np.linalg.eigh(_herm(m.data))
    if w.min() < -tol:
        raise ValueError(f"operator has negative eigenvalue {w.min():.3g}")
    w = np.sqrt(np.clip(w, 0.0, None))
    return Operator((v * w) @ v.conj().T, m.dims)


@dataclass(frozen=True, eq=False)
class OperatorMap:
    """Linear map on operators stored as a matrix on row-major vectorizations.

    Column ``i * d_in + j`` holds the image of ``E_ij`` flattened row-major.
    """

    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]
    matrix: np.ndarray

    def __init__(self, matrix, in_dims, out_dims):
        in_dims = system_dims(in_dims)
        out_dims = system_dims(out_dims)
        mat = np.array(matrix, dtype=complex)
        din, dout = int(np.prod(in_dims)), int(np.prod(out_dims))
        if mat.shape != (dout * dout, din * din):
            raise ValueError(f"map matrix has shape {mat.shape}, expected {(dout**2, din**2)}")
        mat.setflags(write=False)
        object.__setattr__(self, "in_dims", in_dims)
        object.__setattr__(self, "out_dims", out_dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def in_dim(self) -> int:
        return int(np.prod(self.in_dims))

    @property
    def out_dim(self) -> int:
        return int(np.prod(self.out_dims))

    @classmethod
    def from_function(
        cls,
        fn: Callable[[Operator], Operator],
        in_dims: int | Iterable[int],
        out_dims: int | Iterable[int],
    ) -> OperatorMap:
        """Tabulate a linear function by its action on the matrix units."""
        in_dims = system_dims(in_dims)
        out_dims = system_dims(out_dims)
        d = int(np.prod(in_dims))
        cols = []
        for i in range(d):
            for j in range(d):
                cols.append(fn(basis_op(d, i, j).with_dims(in_dims)).data.reshape(-1))
        return cls(np.stack(cols, axis=1), in_dims, out_dims)

    @classmethod
    def identity(cls, dims: int | Iterable[int]) -> OperatorMap:
        dims = system_dims(dims)
        d = int(np.prod(dims))
        return cls(np.eye(d * d), dims, dims)

    def __call__(self, x: Operator) -> Operator:
        if x.dim != self.in_dim:
            raise ValueError(f"map expects input dimension {self.in_dim}, got {x.dim}")
        out = self.matrix @ x.data.reshape(-1)
        return Operator(out.reshape(self.out_dim, self.out_dim), self.out_dims)

    def compose(self, first: OperatorMap) -> OperatorMap:
        """``self o first``."""
        if first.out_dim != self.in_dim:
            raise ValueError("maps are not composable")
        return OperatorMap(self.matrix @ first.matrix, first.in_dims, self.out_dims)

    def __add__(self, other: OperatorMap) -> OperatorMap:
        return OperatorMap(self.matrix + other.matrix, self.in_dims, self.out_dims)

    def __mul__(self, scalar: complex) -> OperatorMap:
        return OperatorMap(self.matrix * scalar, self.in_dims, self.out_dims)

    __rmul__ = __mul__

    def rank(self, tol: float = 1e-10) -> int:
        return int(np.linalg.matrix_rank(self.matrix, tol=tol))


def apply_to_last(fmap: OperatorMap, m: Operator) -> Operator:
    """Apply ``id (x) fmap`` where ``fmap`` acts on the trailing factor(s) of ``m``.

    The trailing factors consumed are those matching ``fmap.in_dims``; the
    result carries ``m``'s leading dims followed by ``fmap.out_dims``.
    """
    k = len(fmap.in_dims)
    if m.dims[-k:] != fmap.in_dims:
        raise ValueError(f"trailing dims {m.dims[-k:]} do not match map input {fmap.in_dims}")
    lead = m.dims[:-k]
    p = int(np.prod(lead)) if lead else 1
    di, do = fmap.in_dim, fmap.out_dim
    t = m.data.reshape(p, di, p, di)
    kern = fmap.matrix.reshape(do, do, di, di)
    res = np.einsum("xyij,aibj->axby", kern, t)
    return Operator(res.reshape(p * do, p * do), lead + fmap.out_dims)


def apply_to_first(fmap: OperatorMap, m: Operator) -> Operator:
    """Apply ``fmap (x) id`` where ``fmap`` acts on the leading factor(s) of ``m``."""
    k = len(fmap.in_dims)
    if m.dims[:k] != fmap.in_dims:
        raise ValueError(f"leading dims {m.dims[:k]} do not match map input {fmap.in_dims}")
    tail = m.dims[k:]
    p = int(np.prod(tail)) if tail else 1
    di, do = fmap.in_dim, fmap.out_dim
    t = m.data.reshape(di, p, di, p)
    kern = fmap.matrix.reshape(do, do, di, di)
    res = np.einsum("xyij,iajb->xayb", kern, t)
    return Operator(res.reshape(do * p, do * p), fmap.out_dims + tail)
