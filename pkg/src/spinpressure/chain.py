"""Finite-range shift dynamics on a 1-d quantum spin chain.

Builds finite-volume Hamiltonians H_n = sum_j alpha^j(h), computes the
pressure sequence p_n = (1/n) log Tr e^{-beta H_n}, its extrapolation, the
gapped-block estimator, and the property suites (monotonicity, scalar
shift, Lipschitz, power-dilation, coboundary invariance, convexity, tensor
additivity).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import algebra
from .algebra import (AlgebraElement, SiteEmbedding, chain_algebra,
                      cyclic_embed, embed, from_matrix, log_trace_exp, op_norm)
from .errors import BudgetExceededError, NonHermitianError

DEFAULT_BUDGET_MIB = 4096


def max_rows(budget_mib: int | None = None) -> int:
    """Largest dense matrix order allowed by the memory budget.

    One complex128 matrix of that order fits in the budget; the default
    (4 GiB) caps chains at 16384 rows. Overridable per call or via the
    SPINPRESSURE_BUDGET_MIB environment variable.
    """
    if budget_mib is None:
        budget_mib = int(os.environ.get("SPINPRESSURE_BUDGET_MIB",
                                        DEFAULT_BUDGET_MIB))
    return int(np.sqrt(budget_mib * 2**20 / 16))


def _check_budget(dim: int, budget_mib: int | None):
    cap = max_rows(budget_mib)
    if dim > cap:
        raise BudgetExceededError(
            f"chain dimension {dim} exceeds budget cap of {cap} rows")


@dataclass(frozen=True)
class SpinChainModel:
    """Shift-invariant chain defined by one finite-range hermitian term.

    The local term `interaction` acts on `range_` consecutive sites of
    local dimension `site_dim`; the full dynamics is generated by its
    translates.  Translates at offsets >= range_ have disjoint supports,
    which is checked numerically on a short chain at construction.
    """

    site_dim: int
    range_: int
    interaction: np.ndarray
    beta: float = 1.0
    boundary: str = "open"

    def __post_init__(self):
        if self.site_dim < 2:
            raise ValueError("site_dim must be >= 2")
        if self.range_ < 1:
            raise ValueError("range must be >= 1")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        h = np.asarray(self.interaction, dtype=complex)
        dim = self.site_dim ** self.range_
        if h.shape != (dim, dim):
            raise ValueError(f"interaction must be {dim}x{dim} for "
                             f"d={self.site_dim}, r={self.range_}")
        if np.max(np.abs(h - h.conj().T), initial=0.0) > algebra.HERMITIAN_TOL:
            raise NonHermitianError("interaction term must be hermitian")
        h.setflags(write=False)
        object.__setattr__(self, "interaction", h)
        self._check_commutation_radius()

    def _check_commutation_radius(self):
        # translates at offset r must commute: verified on a 2r-site chain
        n = 2 * self.range_
        if self.site_dim ** n > 4096:
            return  # disjoint supports commute exactly; skip the large probe
        a = embed(self.term, SiteEmbedding(n, self.site_dim, 0, self.range_ - 1))
        b = embed(self.term, SiteEmbedding(n, self.site_dim,
                                           self.range_, 2 * self.range_ - 1))
        c = algebra.commutator(a, b)
        nrm = float(np.linalg.norm(c.blocks[0]))
        if nrm > 1e-10 * max(1.0, float(np.linalg.norm(self.interaction))) ** 2:
            raise ValueError("translates at offset r fail to commute")

    @property
    def term(self) -> AlgebraElement:
        return from_matrix(self.interaction)

    @property
    def term_norm(self) -> float:
        return op_norm(self.term)


@dataclass(frozen=True)
class FiniteVolumePoint:
    n: int
    log_Z: float
    p_n: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "p_n", self.log_Z / self.n)


@dataclass(frozen=True)
class GapSchedule:
    """Gapped block pattern: m blocks of length k, interaction gap p."""

    k: int
    p: int
    m: int

    def __post_init__(self):
        if not (self.k > self.p >= 1):
            raise ValueError("need block length k > gap p >= 1")
        if self.m < 1:
            raise ValueError("need at least one block")


def finite_volume_hamiltonian(model: SpinChainModel, n: int,
                              budget_mib: int | None = None) -> AlgebraElement:
    """H_n = sum of translates of the local term fitting in n sites.

    Open boundary keeps offsets 0..n-r; periodic adds the r-1 wrap-around
    placements.
    """
    d, r = model.site_dim, model.range_
    if n < r:
        raise ValueError(f"volume {n} below interaction range {r}")
    _check_budget(d ** n, budget_mib)
    dim = d ** n
    H = np.zeros((dim, dim), dtype=complex)
    term = model.term
    for j in range(n - r + 1):
        H += embed(term, SiteEmbedding(n, d, j, j + r - 1)).blocks[0]
    if model.boundary == "periodic" and r > 1:
        for j in range(n - r + 1, n):
            H += cyclic_embed(term, d, n, j, r).blocks[0]
    return AlgebraElement(chain_algebra(d, n), (H,))


DIAG_BUDGET = 10 ** 7


def _diagonal_energies(model: SpinChainModel, n: int,
                       budget_mib: int | None = None) -> np.ndarray | None:
    """Diagonal of H_n when the local term is diagonal, else None.

    Diagonal models are classical: the full energy table is assembled over
    digit strings without ever forming the d^n x d^n matrix.
    """
    h = model.interaction
    if np.count_nonzero(h - np.diag(np.diag(h))) != 0:
        return None
    d, r = model.site_dim, model.range_
    dim = d ** n
    cap = DIAG_BUDGET
    if budget_mib is not None:
        cap = min(cap, budget_mib * 2 ** 20 // 8)
    if dim > cap:
        raise BudgetExceededError(
            f"diagonal chain dimension {dim} exceeds {cap}")
    hd = np.diag(h).real
    idx = np.arange(dim)
    digits = np.empty((n, dim), dtype=np.int64)
    rem = idx
    for s in range(n - 1, -1, -1):
        digits[s] = rem % d
        rem = rem // d
    offsets = list(range(n - r + 1))
    if model.boundary == "periodic" and r > 1:
        offsets += list(range(n - r + 1, n))
    e = np.zeros(dim)
    for j in offsets:
        w = np.zeros(dim, dtype=np.int64)
        for t in range(r):
            w = w * d + digits[(j + t) % n]
        e += hd[w]
    return e


def log_partition(model: SpinChainModel, n: int,
                  budget_mib: int | None = None) -> float:
    """log Tr e^{-beta H_n}."""
    if n < model.range_:
        raise ValueError(f"volume {n} below interaction range {model.range_}")
    e = _diagonal_energies(model, n, budget_mib)
    if e is not None:
        neg = -model.beta * e
        top = neg.max()
        return float(top + np.log(np.sum(np.exp(neg - top))))
    H = finite_volume_hamiltonian(model, n, budget_mib)
    return log_trace_exp(model.beta * H)


def pressure_sequence(model: SpinChainModel, n_min: int, n_max: int,
                      budget_mib: int | None = None) -> list[FiniteVolumePoint]:
    if not (model.range_ <= n_min <= n_max):
        raise ValueError("need r <= n_min <= n_max")
    return [FiniteVolumePoint(n, log_partition(model, n, budget_mib))
            for n in range(n_min, n_max + 1)]


def pressure_estimate(model: SpinChainModel, n_max: int,
                      budget_mib: int | None = None) -> tuple[float, float]:
    """Extrapolated pressure and a heuristic error bar.

    Uses the log Z difference quotient log Z_n - log Z_{n-1}, which cancels
    the O(1/n) surface term of the plain sequence; the error bar is the
    distance to the last raw point.
    """
    if n_max < model.range_ + 2:
        raise ValueError("need n_max >= r + 2 for extrapolation")
    lz_prev = log_partition(model, n_max - 1, budget_mib)
    lz = log_partition(model, n_max, budget_mib)
    value = lz - lz_prev
    return value, abs(value - lz / n_max)


def gapped_pressure(model: SpinChainModel, sched: GapSchedule,
                    budget_mib: int | None = None) -> float:
    """Pressure of the block-gapped Hamiltonian sum over I = U_j [jk, jk+k-p].

    Blocks separated by the gap p = r commute exactly, so the trace over
    m*k sites factorizes into identical per-block traces; only one k-site
    block is ever built.
    """
    if sched.p != model.range_:
        raise ValueError("schedule gap must equal the interaction range")
    k, m = sched.k, sched.m
    d = model.site_dim
    _check_budget(d ** k, budget_mib)
    # one block: translates at offsets 0..k-p on k sites, i.e. the open
    # k-site Hamiltonian
    block = SpinChainModel(d, model.range_, model.interaction,
                           beta=model.beta, boundary="open")
    block_log_z = log_partition(block, k, budget_mib)
    return m * block_log_z / (k * m)


# Property suites ----------------------------------------------------------

@dataclass(frozen=True)
class PropertyRecord:
    check_id: str
    value: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class PropertyReport:
    records: tuple[PropertyRecord, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)


def _with_term(model: SpinChainModel, h: np.ndarray,
               range_: int | None = None) -> SpinChainModel:
    return SpinChainModel(model.site_dim, range_ or model.range_, h,
                          beta=model.beta, boundary=model.boundary)


def _extend_range(h: np.ndarray, d: int) -> np.ndarray:
    """Represent a range-r term as a range-(r+1) term acting trivially on
    the extra site."""
    return np.kron(h, np.eye(d, dtype=complex))


def check_pressure_properties(model_h: SpinChainModel, model_k: SpinChainModel,
                              c: float, k: int, n: int,
                              budget_mib: int | None = None) -> PropertyReport:
    """Finite-volume property suite for the pressure functional.

    Checks, at volume n: monotonicity under operator order, exact scalar
    shift, the Lipschitz bound in the local term, consistency of the
    k-step blocked system, and coboundary invariance.

    All quantities are evaluated on the wrapped (periodic) chain, where
    every volume carries exactly n translates: the scalar-shift and
    blocked identities then hold exactly instead of up to surface terms.
    """
    if (model_h.site_dim, model_h.range_) != (model_k.site_dim, model_k.range_):
        raise ValueError("models must share site_dim and range")
    if n < model_h.range_ * k:
        raise ValueError("volume too small for the blocked check")
    model_h = replace(model_h, boundary="periodic")
    model_k = replace(model_k, boundary="periodic")
    d, r, beta = model_h.site_dim, model_h.range_, model_h.beta
    records = []

    lz_h = log_partition(model_h, n, budget_mib)
    p_h = lz_h / n
    p_k = log_partition(model_k, n, budget_mib) / n

    # (i) monotone decreasing: if H <= K then p(H) >= p(K)
    gap = np.linalg.eigvalsh(model_k.interaction - model_h.interaction)[0]
    if gap >= -1e-12:
        mono = p_h - p_k
        records.append(PropertyRecord("monotone", mono, 0.0, mono >= -5e-13))

    # (ii) scalar shift: p(H + c1) = p(H) - beta*c
    dim = d ** r
    shifted = _with_term(model_h, model_h.interaction + c * np.eye(dim))
    p_sh = log_partition(shifted, n, budget_mib) / n
    dev = abs(p_sh - (p_h - beta * c))
    records.append(PropertyRecord("scalar_shift", dev, 1e-10, dev <= 1e-10))

    # (iv) Lipschitz: |p(H) - p(K)| <= beta * ||h - k||
    lip = op_norm(model_h.term - model_k.term)
    diff = abs(p_h - p_k)
    records.append(PropertyRecord("lipschitz", diff, beta * lip,
                                  diff <= beta * lip + 5e-13))

    # (v) blocked system: pressure of the k-step dynamics with the summed
    # term equals k * p_n up to boundary terms
    blocked = blocked_model(model_h, k)
    n_blocks = n // k
    p_blocked = log_partition(blocked, n_blocks, budget_mib) / n_blocks
    tol_v = 2 * beta * model_h.term_norm * k * r / n
    lz_ref = lz_h if n_blocks * k == n else log_partition(model_h,
                                                          n_blocks * k,
                                                          budget_mib)
    dev_v = abs(p_blocked - k * lz_ref / (n_blocks * k))
    records.append(PropertyRecord("blocked", dev_v, tol_v, dev_v <= tol_v))

    # (vi) coboundary: p(H + alpha(K) - K) = p(H) up to 2*beta*||K||/n.
    # Both sides are evaluated as range-(r+1) models so the translate sums
    # telescope exactly.
    h_ext = _extend_range(model_h.interaction, d)
    kk = model_k.interaction
    emb_lo = embed(from_matrix(kk), SiteEmbedding(r + 1, d, 0, r - 1)).blocks[0]
    emb_hi = embed(from_matrix(kk), SiteEmbedding(r + 1, d, 1, r)).blocks[0]
    base = _with_term(model_h, h_ext, range_=r + 1)
    cobo = _with_term(model_h, h_ext + emb_hi - emb_lo, range_=r + 1)
    p_base = log_partition(base, n, budget_mib) / n
    p_cobo = log_partition(cobo, n, budget_mib) / n
    tol_vi = 2 * beta * op_norm(model_k.term) / n
    dev_vi = abs(p_cobo - p_base)
    records.append(PropertyRecord("coboundary", dev_vi, tol_vi,
                                  dev_vi <= tol_vi + 5e-13))

    return PropertyReport(tuple(records))


def blocked_model(model: SpinChainModel, k: int) -> SpinChainModel:
    """The k-step dynamics: sites grouped in blocks of k, local term
    sum_{j<k} alpha^j(h) re-expressed over the blocked alphabet."""
    d, r = model.site_dim, model.range_
    span = k + r - 1                      # sites touched by the summed term
    r_blocked = max(2, -(-span // k))     # blocked range, ceil division
    n_phys = r_blocked * k
    dim = d ** n_phys
    H = np.zeros((dim, dim), dtype=complex)
    for j in range(k):
        H += embed(model.term,
                   SiteEmbedding(n_phys, d, j, j + r - 1)).blocks[0]
    return SpinChainModel(d ** k, r_blocked, H, beta=model.beta,
                          boundary=model.boundary)


def convexity_probe(model_1: SpinChainModel, model_2: SpinChainModel,
                    grid: list[float], n: int,
                    budget_mib: int | None = None) -> list[tuple[float, float]]:
    """Sample p_n along the segment between two local terms.

    Finite-volume log Z is log-trace-exp of an affine function of the term,
    hence exactly convex; midpoint convexity over the grid is the caller's
    assertion.
    """
    if (model_1.site_dim, model_1.range_) != (model_2.site_dim, model_2.range_):
        raise ValueError("models must share site_dim and range")
    out = []
    for lam in grid:
        h = lam * model_1.interaction + (1 - lam) * model_2.interaction
        out.append((lam, log_partition(_with_term(model_1, h), n, budget_mib) / n))
    return out


def midpoint_convexity_defects(samples: list[tuple[float, float]]) -> list[float]:
    """p((a+b)/2) - (p(a)+p(b))/2 over consecutive triples of an equispaced
    grid; all entries must be <= 0 up to roundoff for a convex function."""
    return [samples[i][1] - 0.5 * (samples[i - 1][1] + samples[i + 1][1])
            for i in range(1, len(samples) - 1)]


def tensor_additivity_check(model_1: SpinChainModel, model_2: SpinChainModel,
                            n: int, budget_mib: int | None = None) -> float:
    """|p_n(H1 x 1 + 1 x H2) - p_n(H1) - p_n(H2)| on the product chain.

    Zero at every finite volume: the trace factorizes across tensor factors.
    """
    if model_1.beta != model_2.beta or model_1.boundary != model_2.boundary:
        raise ValueError("models must share beta and boundary")
    r = max(model_1.range_, model_2.range_)
    d1, d2 = model_1.site_dim, model_2.site_dim

    def lift(m: SpinChainModel, left: bool) -> np.ndarray:
        h = m.interaction
        if m.range_ < r:                      # pad to the common range
            h = np.kron(h, np.eye(m.site_dim ** (r - m.range_)))
        # interleave: product chain site = (site of 1) x (site of 2)
        dim1, dim2 = d1 ** r, d2 ** r
        if left:
            big = np.kron(h, np.eye(dim2, dtype=complex))
        else:
            big = np.kron(np.eye(dim1, dtype=complex), h)
        return _interleave(big, d1, d2, r)

    h12 = lift(model_1, True) + lift(model_2, False)
    prod = SpinChainModel(d1 * d2, r, h12, beta=model_1.beta,
                          boundary=model_1.boundary)
    p12 = log_partition(prod, n, budget_mib) / n
    p1 = log_partition(model_1, n, budget_mib) / n
    p2 = log_partition(model_2, n, budget_mib) / n
    return abs(p12 - p1 - p2)


def _interleave(big: np.ndarray, d1: int, d2: int, r: int) -> np.ndarray:
    """Reorder a matrix on (sites of chain 1) x (sites of chain 2) into
    per-site (d1 x d2) factors."""
    if r == 1:
        return big
    dims = [d1] * r + [d2] * r
    perm = []
    for s in range(r):
        perm.extend([s, r + s])
    t = big.reshape(dims + dims)
    t = np.transpose(t, perm + [p + 2 * r for p in perm])
    dim = (d1 * d2) ** r
    return np.ascontiguousarray(t).reshape(dim, dim)
