"""Finite-volume Gibbs states, the variational identity, KMS verification,
and the local time-evolution series.

All imaginary-time manipulations are done in the eigenbasis of H_n with the
smallest eigenvalue shifted out, so no exponential ever overflows; the KMS
residual in particular pairs every e^{+beta*lambda} growth factor with the
matching Boltzmann weight before anything is summed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (AlgebraElement, SiteEmbedding, canonical_trace,
                      chain_algebra, commutator, embed)
from .chain import SpinChainModel, finite_volume_hamiltonian
from .errors import SeriesConvergenceError


@dataclass(frozen=True)
class LocalObservable:
    """An operator supported on the window [lo, hi] of the chain."""

    lo: int
    hi: int
    element: AlgebraElement

    def embedded(self, model: SpinChainModel, n: int) -> AlgebraElement:
        if self.hi >= n:
            raise ValueError(f"support [{self.lo},{self.hi}] exceeds volume {n}")
        return embed(self.element,
                     SiteEmbedding(n, model.site_dim, self.lo, self.hi))


@dataclass(frozen=True)
class GibbsState:
    """Density e^{-beta H_n}/Z together with the spectral data of H_n."""

    model: SpinChainModel
    n: int
    beta: float
    density: AlgebraElement
    log_Z: float
    eigenvalues: np.ndarray       # of H_n, ascending
    eigenvectors: np.ndarray      # columns match eigenvalues

    def expect(self, x: AlgebraElement) -> complex:
        return canonical_trace(self.density @ x)

    def expect_local(self, obs: LocalObservable) -> complex:
        return self.expect(obs.embedded(self.model, self.n))


def gibbs_state(model: SpinChainModel, n: int, beta: float | None = None,
                budget_mib: int | None = None) -> GibbsState:
    if beta is None:
        beta = model.beta
    H = finite_volume_hamiltonian(model, n, budget_mib)
    w, u = np.linalg.eigh(H.blocks[0])
    shifted = np.exp(-beta * (w - w[0]))
    z_shifted = shifted.sum()
    rho = (u * (shifted / z_shifted)) @ u.conj().T
    rho = (rho + rho.conj().T) / 2
    log_z = float(np.log(z_shifted) - beta * w[0])
    return GibbsState(model, n, beta, AlgebraElement(H.parent, (rho,)),
                      log_z, w, u)


def entropy(state: GibbsState) -> float:
    """Von Neumann entropy -Tr(rho log rho) from the Boltzmann weights."""
    w = state.eigenvalues
    p = np.exp(-state.beta * (w - w[0]))
    p /= p.sum()
    nz = p > 0
    return float(-np.sum(p[nz] * np.log(p[nz])))


def energy(state: GibbsState) -> float:
    """Tr(rho H_n)."""
    w = state.eigenvalues
    p = np.exp(-state.beta * (w - w[0]))
    p /= p.sum()
    return float(np.sum(p * w))


def variational_identity_check(state: GibbsState) -> float:
    """|p_n - (S/n - beta*E/n)|; the Gibbs state attains the finite-volume
    variational maximum exactly."""
    p_n = state.log_Z / state.n
    return abs(p_n - (entropy(state) / state.n
                      - state.beta * energy(state) / state.n))


def product_state_functional(model: SpinChainModel, n: int, beta: float,
                             site_density: np.ndarray,
                             budget_mib: int | None = None) -> float:
    """S/n - beta*E/n for a translation-invariant product state sigma^{x n}.

    Always <= p_n; used as the inequality side of the variational principle.
    """
    sigma = np.asarray(site_density, dtype=complex)
    w = np.linalg.eigvalsh(sigma)
    nz = w > 1e-300
    s_site = float(-np.sum(w[nz] * np.log(w[nz])))
    rho = sigma
    for _ in range(n - 1):
        rho = np.kron(rho, sigma)
    H = finite_volume_hamiltonian(model, n, budget_mib)
    e = float(np.trace(rho @ H.blocks[0]).real)
    return (n * s_site) / n - beta * e / n


def kms_residual(state: GibbsState, a: LocalObservable,
                 b: LocalObservable) -> float:
    """|phi(ab) - phi(b sigma_{i beta}(a))| for the finite-volume Gibbs state.

    The right-hand side is evaluated in the H_n eigenbasis with the
    e^{-beta(lambda_i - lambda_j)} conjugation factor paired against the
    Boltzmann weight of the same index, so every summand is bounded by
    |a||b| regardless of beta*||H_n||.
    """
    A = a.embedded(state.model, state.n).blocks[0]
    B = b.embedded(state.model, state.n).blocks[0]
    lhs = complex(np.trace(state.density.blocks[0] @ A @ B))

    w, u = state.eigenvalues, state.eigenvectors
    at = u.conj().T @ A @ u
    bt = u.conj().T @ B @ u
    shifted = np.exp(-state.beta * (w - w[0]))
    z = shifted.sum()
    # phi(b sigma_{i beta}(a)) = sum_ij e^{-beta lam_j}/Z * b_ij a_ji
    weights = shifted / z
    rhs = complex(np.sum((bt * at.T) * weights[np.newaxis, :]))
    return abs(lhs - rhs)


# Derivation and local time evolution --------------------------------------

def derivation(model: SpinChainModel, a: LocalObservable, window: range | list,
               n: int, budget_mib: int | None = None) -> AlgebraElement:
    """sum_{j in window} [alpha^j(h), a] on the n-site chain.

    Translates whose support misses supp(a) contribute nothing and are
    skipped; the rest are summed as dense commutators.
    """
    d, r = model.site_dim, model.range_
    x = a.embedded(model, n)
    out = np.zeros_like(x.blocks[0])
    for j in window:
        if j < 0 or j + r - 1 >= n:
            raise ValueError(f"translate at offset {j} does not fit in {n} sites")
        if j + r - 1 < a.lo or j > a.hi:
            continue
        hj = embed(model.term, SiteEmbedding(n, d, j, j + r - 1))
        out += commutator(hj, x).blocks[0]
    return AlgebraElement(chain_algebra(d, n), (out,))


def analyticity_budget(model: SpinChainModel) -> float:
    """Default |z| radius for the local evolution series."""
    r = model.range_
    nrm = max(model.term_norm, 1e-12)
    return 0.5 / (r * nrm * (2 * r + 1))


def evolve_series(model: SpinChainModel, a: LocalObservable, z: complex,
                  window: range | list, n: int, tol: float = 1e-10,
                  max_terms: int = 200,
                  budget_mib: int | None = None):
    """Partial sums of sum_m (iz)^m/m! delta^m(a), truncated when the bound
    on the remaining tail drops below tol.

    Returns (result, terms_used, tail_bound).  The tail bound uses the norm
    of the last computed term with the geometric ratio 2|z| ||H_I||/(m+1).
    """
    window = list(window)
    d, r = model.site_dim, model.range_
    # norm bound on the summed translates, for the tail ratio
    h_window_norm = len(window) * model.term_norm
    translates = {j: embed(model.term,
                           SiteEmbedding(n, d, j, j + r - 1)).blocks[0]
                  for j in window}

    cur = a.embedded(model, n).blocks[0].copy()
    total = cur.copy()
    lo, hi = a.lo, a.hi
    iz = 1j * z
    for m in range(1, max_terms + 1):
        nxt = np.zeros_like(cur)
        for j, hj in translates.items():
            if j + r - 1 < lo or j > hi:
                continue
            nxt += hj @ cur - cur @ hj
        lo = max(0, lo - (r - 1))
        hi = min(n - 1, hi + (r - 1))
        cur = (iz / m) * nxt
        total = total + cur
        t_norm = float(np.linalg.norm(cur, 2))
        ratio = 2 * abs(z) * h_window_norm / (m + 1)
        if ratio < 1:
            tail = t_norm * ratio / (1 - ratio)
            if tail < tol:
                return (AlgebraElement(chain_algebra(d, n), (total,)), m, tail)
    raise SeriesConvergenceError(
        f"series did not reach tol={tol} within {max_terms} terms; "
        "|z| exceeds the usable analyticity budget")


def conjugation_oracle(model: SpinChainModel, a: LocalObservable, z: complex,
                       window: range | list, n: int,
                       budget_mib: int | None = None) -> AlgebraElement:
    """e^{izH_I} a e^{-izH_I} by dense spectral calculus; the independent
    check for evolve_series."""
    d, r = model.site_dim, model.range_
    dim = d ** n
    H = np.zeros((dim, dim), dtype=complex)
    for j in window:
        H += embed(model.term, SiteEmbedding(n, d, j, j + r - 1)).blocks[0]
    w, u = np.linalg.eigh(H)
    phases_p = np.exp(1j * z * w)
    phases_m = np.exp(-1j * z * w)
    A = a.embedded(model, n).blocks[0]
    m = (u * phases_p) @ (u.conj().T @ A @ u) @ (u.conj().T * phases_m[:, None])
    return AlgebraElement(chain_algebra(d, n), (m,))
