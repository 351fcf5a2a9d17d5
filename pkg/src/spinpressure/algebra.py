"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

Elements are stored blockwise as dense complex matrices.  The canonical
trace is the unnormalized matrix trace summed over blocks (value 1 on
minimal projections), so trace of the identity counts the rank of the
algebra.  All spectral work goes through full hermitian eigendecomposition;
the volumes handled here are small enough that exactness beats speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import DimensionMismatchError, NonHermitianError

HERMITIAN_TOL = 1e-13


@dataclass(frozen=True)
class FiniteDimAlgebra:
    """Direct sum of full matrix blocks M_{d_1} + ... + M_{d_m}."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.block_dims) < 1 or any(d < 1 for d in self.block_dims):
            raise ValueError("block dims must be a nonempty list of positive ints")
        object.__setattr__(self, "block_dims", tuple(int(d) for d in self.block_dims))

    @property
    def rank(self) -> int:
        """Trace of the identity: sum of block dimensions."""
        return sum(self.block_dims)

    @property
    def total_dim(self) -> int:
        """Complex vector-space dimension, sum of d_i^2."""
        return sum(d * d for d in self.block_dims)


def full_matrix_algebra(d: int) -> FiniteDimAlgebra:
    return FiniteDimAlgebra((d,))


@dataclass(frozen=True)
class AlgebraElement:
    parent: FiniteDimAlgebra
    blocks: tuple[np.ndarray, ...]
    hermitian: bool = field(init=False)

    def __post_init__(self):
        if len(self.blocks) != len(self.parent.block_dims):
            raise DimensionMismatchError("block count does not match algebra")
        blocks = []
        herm = True
        for b, d in zip(self.blocks, self.parent.block_dims):
            b = np.asarray(b, dtype=complex)
            if b.shape != (d, d):
                raise DimensionMismatchError(
                    f"block of shape {b.shape} in M_{d}")
            b.setflags(write=False)
            blocks.append(b)
            if herm and np.max(np.abs(b - b.conj().T), initial=0.0) > HERMITIAN_TOL:
                herm = False
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "hermitian", herm)

    # Arithmetic -----------------------------------------------------------

    def _binop(self, other, fn):
        if isinstance(other, AlgebraElement):
            if other.parent != self.parent:
                raise DimensionMismatchError("elements of different algebras")
            return AlgebraElement(self.parent,
                                  tuple(fn(a, b) for a, b in zip(self.blocks, other.blocks)))
        return AlgebraElement(self.parent, tuple(fn(a, other) for a in self.blocks))

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __mul__(self, scalar):
        return AlgebraElement(self.parent, tuple(scalar * b for b in self.blocks))

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __matmul__(self, other):
        return self._binop(other, lambda a, b: a @ b)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.parent, tuple(b.conj().T for b in self.blocks))


def identity(algebra: FiniteDimAlgebra) -> AlgebraElement:
    return AlgebraElement(algebra, tuple(np.eye(d, dtype=complex)
                                         for d in algebra.block_dims))


def zero(algebra: FiniteDimAlgebra) -> AlgebraElement:
    return AlgebraElement(algebra, tuple(np.zeros((d, d), dtype=complex)
                                         for d in algebra.block_dims))


def from_matrix(m: np.ndarray) -> AlgebraElement:
    """Wrap a single dense matrix as an element of the full matrix algebra."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError("expected a square matrix")
    return AlgebraElement(full_matrix_algebra(m.shape[0]), (m,))


# Core operations ----------------------------------------------------------

def canonical_trace(x: AlgebraElement) -> complex:
    """Unnormalized trace summed over blocks; value 1 on minimal projections."""
    t = sum(np.trace(b) for b in x.blocks)
    if x.hermitian:
        return complex(t.real)
    return complex(t)


def _require_hermitian(x: AlgebraElement):
    if not x.hermitian:
        raise NonHermitianError("operation requires a hermitian element")


def _is_diagonal(b: np.ndarray) -> bool:
    # large diagonal models (classical bridges) get a cheap fast path
    return np.count_nonzero(b - np.diag(np.diag(b))) == 0


def _block_eig(b: np.ndarray):
    if _is_diagonal(b):
        return np.diag(b).real, None
    w, u = np.linalg.eigh(b)
    return w, u


def _block_eigvals(b: np.ndarray) -> np.ndarray:
    if _is_diagonal(b):
        return np.sort(np.diag(b).real)
    return np.linalg.eigvalsh(b)


def herm_eig(x: AlgebraElement):
    """Blockwise spectral decomposition of a hermitian element.

    Returns (eigenvalues, diagonalizers): a flat sorted-per-block real array
    list and one unitary per block (None marks an already-diagonal block).
    """
    _require_hermitian(x)
    eigs, units = [], []
    for b in x.blocks:
        w, u = _block_eig(b)
        eigs.append(w)
        units.append(u)
    return eigs, units


def herm_exp(x: AlgebraElement, scale: float = 1.0) -> AlgebraElement:
    """e^{scale*x} for hermitian x via spectral decomposition."""
    _require_hermitian(x)
    out = []
    for b in x.blocks:
        w, u = _block_eig(b)
        e = np.exp(scale * w)
        if u is None:
            m = np.diag(e).astype(complex)
        else:
            m = (u * e) @ u.conj().T
            m = (m + m.conj().T) / 2
        out.append(m)
    return AlgebraElement(x.parent, tuple(out))


def log_trace_exp(x: AlgebraElement) -> float:
    """log Tr e^{-x} over all blocks, hermitian x.

    Shifted log-sum-exp over the full spectrum: the minimum of -w is
    subtracted before exponentiating so the sum never overflows.
    """
    _require_hermitian(x)
    neg = np.concatenate([-_block_eigvals(b) for b in x.blocks])
    top = np.max(neg)
    return float(top + np.log(np.sum(np.exp(neg - top))))


def op_norm(x: AlgebraElement) -> float:
    """Operator norm: max |eigenvalue| if hermitian, else largest singular value."""
    if x.hermitian:
        return max(float(np.max(np.abs(_block_eigvals(b)), initial=0.0))
                   for b in x.blocks)
    return max(float(np.linalg.norm(b, 2)) for b in x.blocks)


def commutator(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x @ y - y @ x


# Site embeddings ----------------------------------------------------------

@dataclass(frozen=True)
class SiteEmbedding:
    """Placement of a window operator on a chain, identity outside the window."""

    n_sites: int
    site_dim: int
    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi <= self.n_sites - 1):
            raise ValueError(f"window [{self.lo},{self.hi}] outside chain "
                             f"of {self.n_sites} sites")

    @property
    def window_len(self) -> int:
        return self.hi - self.lo + 1


def chain_algebra(site_dim: int, n_sites: int) -> FiniteDimAlgebra:
    return full_matrix_algebra(site_dim ** n_sites)


def embed(x: AlgebraElement, emb: SiteEmbedding) -> AlgebraElement:
    """Tensor identities left and right of the window around x."""
    d = emb.site_dim
    if x.parent.block_dims != (d ** emb.window_len,):
        raise DimensionMismatchError(
            f"element dim {x.parent.block_dims} does not match window of "
            f"{emb.window_len} sites at local dim {d}")
    left = d ** emb.lo
    right = d ** (emb.n_sites - 1 - emb.hi)
    mats = []
    if left > 1:
        mats.append(np.eye(left, dtype=complex))
    mats.append(x.blocks[0])
    if right > 1:
        mats.append(np.eye(right, dtype=complex))
    m = reduce(np.kron, mats)
    return AlgebraElement(chain_algebra(d, emb.n_sites), (m,))


def site_translation_permutation(site_dim: int, n_sites: int, shift: int) -> np.ndarray:
    """Basis permutation sending site i to site i+shift (mod n_sites).

    Returns the index array p with (T x)[j] = x[p[j]] for basis vectors
    labelled by base-d digit strings, leftmost digit = site 0.
    """
    dim = site_dim ** n_sites
    idx = np.arange(dim)
    digits = np.empty((n_sites, dim), dtype=np.int64)
    rem = idx
    for s in range(n_sites - 1, -1, -1):
        digits[s] = rem % site_dim
        rem = rem // site_dim
    rolled = np.roll(digits, shift, axis=0)
    out = np.zeros(dim, dtype=np.int64)
    for s in range(n_sites):
        out = out * site_dim + rolled[s]
    return out


def cyclic_embed(x: AlgebraElement, site_dim: int, n_sites: int,
                 offset: int, window_len: int) -> AlgebraElement:
    """Place a window operator at `offset` with wrap-around past the last site."""
    if offset + window_len <= n_sites:
        return embed(x, SiteEmbedding(n_sites, site_dim, offset, offset + window_len - 1))
    base = embed(x, SiteEmbedding(n_sites, site_dim, 0, window_len - 1)).blocks[0]
    p = site_translation_permutation(site_dim, n_sites, -offset)
    # conjugation by the translation permutation: rows and columns relabelled
    m = base[np.ix_(p, p)]
    return AlgebraElement(chain_algebra(site_dim, n_sites), (m,))
