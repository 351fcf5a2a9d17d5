"""Classical thermodynamic formalism for subshifts of finite type.

Weighted transfer matrices, Ruelle-Perron-Frobenius eigendata, Gibbs Markov
chains and Parry measures, direct variational optimization over Markov
measures, and the diagonal bridge identifying classical pressure with the
pressure of a diagonal quantum chain.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .chain import SpinChainModel, log_partition, pressure_estimate
from .errors import ReducibleMatrixError


def _is_irreducible(A: np.ndarray) -> bool:
    s = A.shape[0]
    reach = np.eye(s, dtype=bool) | (A > 0)
    for _ in range(s):
        reach = reach | (reach @ reach)
    return bool(reach.all())


@dataclass(frozen=True)
class SftModel:
    """Topological Markov chain with a cylinder potential.

    `transition` is the 0/1 matrix of allowed 2-letter words; `potential`
    assigns a real value to each allowed word of length `word_len`
    (default 2), stored as an array of shape (s,)*word_len.
    """

    transition: np.ndarray
    potential: np.ndarray
    word_len: int = 2
    irreducible: bool = field(init=False)

    def __post_init__(self):
        A = np.asarray(self.transition)
        s = A.shape[0]
        if A.shape != (s, s) or not np.isin(A, (0, 1)).all():
            raise ValueError("transition must be a square 0/1 matrix")
        if s < 2:
            raise ValueError("alphabet size must be >= 2")
        if (A.sum(axis=1) == 0).any() or (A.sum(axis=0) == 0).any():
            raise ValueError("transition matrix has a zero row or column")
        phi = np.asarray(self.potential, dtype=float)
        if self.word_len < 2:
            raise ValueError("potential word length must be >= 2")
        if phi.shape != (s,) * self.word_len:
            raise ValueError(f"potential must have shape {(s,) * self.word_len}")
        A = A.astype(np.int8)
        A.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "transition", A)
        object.__setattr__(self, "potential", phi)
        object.__setattr__(self, "irreducible", _is_irreducible(A))

    @property
    def alphabet_size(self) -> int:
        return self.transition.shape[0]

    def _require_irreducible(self):
        if not self.irreducible:
            raise ReducibleMatrixError(
                "transition matrix is reducible; invariant measures form a "
                "simplex and spectral data is not unique")


def full_shift(s: int, potential: np.ndarray | None = None) -> SftModel:
    if potential is None:
        potential = np.zeros((s, s))
    return SftModel(np.ones((s, s), dtype=int), potential)


def golden_mean_shift(potential: np.ndarray | None = None) -> SftModel:
    A = np.array([[1, 1], [1, 0]])
    if potential is None:
        potential = np.zeros((2, 2))
    return SftModel(A, potential)


def ising_sft(J: float) -> SftModel:
    """Two-letter full shift with the bond potential -J s_i s_j, s in {+1,-1}."""
    spins = np.array([1.0, -1.0])
    phi = -J * np.outer(spins, spins)
    return full_shift(2, phi)


# Transfer operator and RPF data -------------------------------------------

def transfer_matrix(sft: SftModel, beta: float) -> np.ndarray:
    """L_ij = A_ij exp(-beta * phi(ij))."""
    if sft.word_len != 2:
        raise ValueError("transfer matrix needs word_len == 2; recode first")
    return sft.transition * np.exp(-beta * sft.potential)


@dataclass(frozen=True)
class RpfData:
    """Leading eigenvalue with positive left/right eigenvectors, <u,v> = 1."""

    eigenvalue: float
    right: np.ndarray
    left: np.ndarray


def rpf_eigendata(L: np.ndarray, tol: float = 1e-14,
                  max_iter: int = 100_000) -> RpfData:
    """Perron eigendata by power iteration.

    Successive iterates are averaged so periodic (bipartite-like) matrices
    still converge; stops when the relative update falls below tol.
    """
    L = np.asarray(L, dtype=float)
    if (L < 0).any():
        raise ValueError("transfer matrix must be nonnegative")
    if not _is_irreducible((L > 0).astype(int)):
        raise ReducibleMatrixError("matrix is reducible")
    s = L.shape[0]
    v = np.ones(s)
    u = np.ones(s)
    lam = 1.0
    for _ in range(max_iter):
        v_new = L @ v
        v_new = (v_new / np.max(v_new) + v / np.max(v)) / 2
        u_new = u @ L
        u_new = (u_new / np.max(u_new) + u / np.max(u)) / 2
        lam_new = float(u_new @ L @ v_new) / float(u_new @ v_new)
        dv = np.max(np.abs(v_new / np.max(v_new) - v / np.max(v)))
        du = np.max(np.abs(u_new / np.max(u_new) - u / np.max(u)))
        v, u = v_new, u_new
        if max(dv, du) < tol and abs(lam_new - lam) <= tol * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    # one Rayleigh refinement on the converged pair
    lam = float(u @ L @ v) / float(u @ v)
    v = v / np.sum(v)
    u = u / float(u @ v)
    if (v <= 0).any() or (u <= 0).any():
        raise ReducibleMatrixError("eigenvectors not strictly positive")
    return RpfData(lam, v, u)


def classical_pressure(sft: SftModel, beta: float) -> float:
    """log of the spectral radius of the weighted transfer matrix."""
    sft._require_irreducible()
    model = sft if sft.word_len == 2 else higher_block_recode(sft)
    return float(np.log(rpf_eigendata(transfer_matrix(model, beta)).eigenvalue))


def cyclicity_index(A: np.ndarray) -> int:
    """gcd of cycle lengths through a fixed vertex (the period of the graph)."""
    A = np.asarray(A)
    if not _is_irreducible((A > 0).astype(int)):
        raise ReducibleMatrixError("cyclicity index needs an irreducible matrix")
    s = A.shape[0]
    dist = [-1] * s
    dist[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for j in range(s):
                if A[i, j] and dist[j] < 0:
                    dist[j] = dist[i] + 1
                    nxt.append(j)
        frontier = nxt
    g = 0
    for i in range(s):
        for j in range(s):
            if A[i, j]:
                g = math.gcd(g, dist[i] + 1 - dist[j])
    return g


# Markov measures ----------------------------------------------------------

@dataclass(frozen=True)
class MarkovMeasure:
    """Stationary Markov chain on the states of an SFT (or its block graph)."""

    kernel: np.ndarray
    stationary: np.ndarray
    order: int = 1

    def __post_init__(self):
        P = np.asarray(self.kernel, dtype=float)
        pi = np.asarray(self.stationary, dtype=float)
        if np.max(np.abs(P.sum(axis=1) - 1)) > 1e-10:
            raise ValueError("kernel rows must sum to 1")
        if (pi < -1e-12).any() or abs(pi.sum() - 1) > 1e-10:
            raise ValueError("stationary vector must be a distribution")
        if np.max(np.abs(pi @ P - pi)) > 1e-10:
            raise ValueError("vector is not stationary for the kernel")
        P.setflags(write=False)
        pi.setflags(write=False)
        object.__setattr__(self, "kernel", P)
        object.__setattr__(self, "stationary", pi)


def stationary_distribution(P: np.ndarray, tol: float = 1e-15,
                            max_iter: int = 200_000) -> np.ndarray:
    """Stationary row vector of a stochastic matrix by averaged power
    iteration."""
    s = P.shape[0]
    pi = np.full(s, 1.0 / s)
    for _ in range(max_iter):
        nxt = (pi @ P + pi) / 2
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt
        pi = nxt
    return pi


def gibbs_markov_measure(sft: SftModel, beta: float) -> MarkovMeasure:
    """The Gibbs chain P_ij = L_ij v_j/(lambda v_i), pi_i = u_i v_i.

    At zero potential this is the Parry measure of maximal entropy.
    """
    sft._require_irreducible()
    model = sft if sft.word_len == 2 else higher_block_recode(sft)
    L = transfer_matrix(model, beta)
    rpf = rpf_eigendata(L)
    v, u, lam = rpf.right, rpf.left, rpf.eigenvalue
    P = L * v[np.newaxis, :] / (lam * v[:, np.newaxis])
    P /= P.sum(axis=1, keepdims=True)    # remove residual 1e-15 drift
    pi = u * v
    pi /= pi.sum()
    return MarkovMeasure(P, pi)


def markov_entropy(mu: MarkovMeasure) -> float:
    """h = -sum_i pi_i P_ij log P_ij, with 0 log 0 = 0."""
    P, pi = mu.kernel, mu.stationary
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(P > 0, P * np.log(np.where(P > 0, P, 1.0)), 0.0)
    return float(-(pi @ plogp.sum(axis=1)))


def markov_energy(mu: MarkovMeasure, potential: np.ndarray) -> float:
    """e = sum_i pi_i P_ij phi(ij)."""
    P, pi = mu.kernel, mu.stationary
    return float(np.einsum("i,ij,ij->", pi, P, potential))


# Higher-block recoding ----------------------------------------------------

def allowed_words(sft: SftModel, length: int) -> list[tuple[int, ...]]:
    A = sft.transition
    words = [(i,) for i in range(sft.alphabet_size)]
    for _ in range(length - 1):
        words = [w + (j,) for w in words
                 for j in range(sft.alphabet_size) if A[w[-1], j]]
    return words


def higher_block_recode(sft: SftModel) -> SftModel:
    """Recode a word_len = r potential onto the alphabet of allowed
    (r-1)-blocks, yielding an equivalent word_len = 2 model."""
    r = sft.word_len
    if r < 3:
        return sft
    blocks = allowed_words(sft, r - 1)
    index = {w: i for i, w in enumerate(blocks)}
    m = len(blocks)
    A2 = np.zeros((m, m), dtype=int)
    phi2 = np.zeros((m, m))
    for w, i in index.items():
        for c in range(sft.alphabet_size):
            if not sft.transition[w[-1], c]:
                continue
            w2 = w[1:] + (c,)
            j = index.get(w2)
            if j is None:
                continue
            A2[i, j] = 1
            phi2[i, j] = sft.potential[w + (c,)]
    return SftModel(A2, phi2)


# Variational optimization -------------------------------------------------

@dataclass(frozen=True)
class OptimizeOptions:
    restarts: int = 8
    max_iter: int = 20_000
    patience: int = 50
    improve_tol: float = 1e-12
    step0: float = 0.5
    seed: int = 0
    gap_tol: float = 1e-6


@dataclass(frozen=True)
class OptimizeResult:
    measure: MarkovMeasure
    value: float
    converged: bool
    iterations: int


def _free_energy_and_grad(theta: np.ndarray, mask: np.ndarray,
                          phi: np.ndarray, beta: float):
    """Value and exact logit gradient of h(mu) - beta * e(mu) for the chain
    with row-softmax kernel exp(theta) restricted to allowed transitions.

    The stationary-distribution sensitivity enters through the fundamental
    matrix (I - P + 1 pi^T)^{-1}; softmax rows keep perturbations
    row-sum-free, which is what makes that inverse applicable.
    """
    s = mask.shape[0]
    logits = np.where(mask, theta, -np.inf)
    logits = logits - logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    P = w / w.sum(axis=1, keepdims=True)
    pi = stationary_distribution(P)
    with np.errstate(divide="ignore"):
        logP = np.where(P > 0, np.log(np.where(P > 0, P, 1.0)), 0.0)
    c = np.where(mask, -logP - beta * phi, 0.0)
    r = (P * c).sum(axis=1)
    value = float(pi @ r)

    y = np.linalg.solve(np.eye(s) - P + np.outer(np.ones(s), pi), r)
    grad_P = pi[:, np.newaxis] * (c - 1.0 + y[np.newaxis, :])
    # chain rule through the row softmax
    inner = (grad_P * P).sum(axis=1, keepdims=True)
    grad_theta = np.where(mask, P * (grad_P - inner), 0.0)
    return value, grad_theta, P, pi


def variational_optimize(sft: SftModel, beta: float, order: int = 1,
                         opts: OptimizeOptions | None = None) -> OptimizeResult:
    """Maximize h(mu) - beta*e(mu) over order-m Markov measures by
    projected gradient ascent on transition logits.

    The value can never exceed the classical pressure; the maximizer is the
    RPF Gibbs chain when order matches the potential range.
    """
    opts = opts or OptimizeOptions()
    sft._require_irreducible()
    if order < sft.word_len - 1:
        raise ValueError("order must be at least word_len - 1")
    model = sft if sft.word_len == 2 else higher_block_recode(sft)
    # recoding onto (r-1)-blocks already realizes order r-1
    for _ in range(order - max(1, sft.word_len - 1)):
        model = _block_graph_step(model)
    mask = model.transition.astype(bool)
    phi = model.potential
    rng = np.random.default_rng(opts.seed)

    best = None
    for restart in range(opts.restarts):
        theta = np.where(mask, rng.normal(scale=0.5, size=mask.shape), 0.0) \
            if restart else np.zeros(mask.shape)
        step = opts.step0
        value, grad, P, pi = _free_energy_and_grad(theta, mask, phi, beta)
        best_val, stall, it = value, 0, 0
        for it in range(1, opts.max_iter + 1):
            trial = theta + step * grad
            v2, g2, P2, pi2 = _free_energy_and_grad(trial, mask, phi, beta)
            if v2 >= value:
                theta, value, grad, P, pi = trial, v2, g2, P2, pi2
                step = min(step * 1.5, 50.0)
            else:
                step *= 0.5
                if step < 1e-18:
                    break
                continue
            if value > best_val + opts.improve_tol:
                best_val, stall = value, 0
            else:
                stall += 1
                if stall >= opts.patience:
                    break
        converged = stall >= opts.patience or np.max(np.abs(grad)) < 1e-12
        cand = OptimizeResult(MarkovMeasure(P, pi, order=order), value,
                              converged, it)
        if best is None or cand.value > best.value + 1e-15 or (
                abs(cand.value - best.value) <= 1e-15
                and tuple(cand.measure.kernel.ravel())
                < tuple(best.measure.kernel.ravel())):
            best = cand
    return best


def _block_graph_step(sft: SftModel) -> SftModel:
    """Lift a word_len-2 model to its edge graph, used to realize
    higher-order Markov measures as order-1 chains on blocks."""
    s = sft.alphabet_size
    edges = [(i, j) for i in range(s) for j in range(s) if sft.transition[i, j]]
    index = {e: k for k, e in enumerate(edges)}
    m = len(edges)
    A2 = np.zeros((m, m), dtype=int)
    phi2 = np.zeros((m, m))
    for (i, j), k in index.items():
        for j2 in range(s):
            if sft.transition[j, j2]:
                k2 = index[(j, j2)]
                A2[k, k2] = 1
                phi2[k, k2] = sft.potential[j, j2]
    return SftModel(A2, phi2)


# Quantum-classical bridge -------------------------------------------------

WORD_BUDGET = 10 ** 7


def word_log_sum(sft: SftModel, beta: float, n: int,
                 boundary: str = "open") -> float:
    """log sum over allowed n-words of e^{-beta S_n phi}, by direct
    enumeration (the independent classical side of the bridge)."""
    if sft.alphabet_size ** n > WORD_BUDGET:
        raise ValueError("word enumeration budget exceeded")
    if sft.word_len != 2:
        raise ValueError("word sums implemented for word_len == 2")
    A, phi = sft.transition, sft.potential
    total = []
    for w in itertools.product(range(sft.alphabet_size), repeat=n):
        bonds = list(zip(w[:-1], w[1:]))
        if boundary == "periodic":
            bonds.append((w[-1], w[0]))
        if any(not A[i, j] for i, j in bonds):
            continue
        total.append(-beta * sum(phi[i, j] for i, j in bonds))
    total = np.array(total)
    top = total.max()
    return float(top + np.log(np.sum(np.exp(total - top))))


def diagonal_chain_model(sft: SftModel, beta: float, n: int,
                         boundary: str = "open",
                         penalty: float | None = None) -> SpinChainModel:
    """Diagonal quantum chain whose pressure reproduces the classical one.

    Forbidden transitions get a large diagonal energy penalty instead of
    being deleted, keeping the site algebra a full matrix algebra.
    """
    if sft.word_len != 2:
        raise ValueError("bridge implemented for word_len == 2")
    s = sft.alphabet_size
    phi_norm = float(np.max(np.abs(sft.potential)))
    if penalty is None:
        penalty = (50.0 + n * np.log(s)) / beta + n * phi_norm
    h = np.diag((sft.potential + penalty * (1 - sft.transition)).ravel())
    return SpinChainModel(s, 2, h, beta=beta, boundary=boundary)


def diagonal_bridge(sft: SftModel, beta: float, n: int,
                    boundary: str = "open",
                    penalty: float | None = None) -> dict:
    """Compare the quantum pressure of the penalized diagonal chain with the
    classical word sum at volume n.

    Returns the pressure gap and the total-variation distance between the
    diagonal of the quantum Gibbs state and the classical Gibbs word
    distribution.
    """
    model = diagonal_chain_model(sft, beta, n, boundary, penalty)
    log_z_q = log_partition(model, n)
    log_z_c = word_log_sum(sft, beta, n, boundary)
    gap = abs(log_z_q - log_z_c) / n

    # Gibbs-weight comparison on the diagonal
    from .chain import finite_volume_hamiltonian
    H = finite_volume_hamiltonian(model, n)
    energies = np.diag(H.blocks[0]).real
    wq = np.exp(-beta * (energies - energies.min()))
    wq /= wq.sum()
    wc = np.zeros_like(wq)
    s = sft.alphabet_size
    for idx, w in enumerate(itertools.product(range(s), repeat=n)):
        bonds = list(zip(w[:-1], w[1:]))
        if boundary == "periodic":
            bonds.append((w[-1], w[0]))
        if any(not sft.transition[i, j] for i, j in bonds):
            continue
        wc[idx] = np.exp(-beta * sum(sft.potential[i, j] for i, j in bonds)
                         + beta * energies.min())
    wc /= wc.sum()
    tv = 0.5 * float(np.abs(wq - wc).sum())
    return {"pressure_gap": gap, "tv_distance": tv,
            "quantum_log_z": log_z_q, "classical_log_z": log_z_c}


def bridge_pressure_estimate(sft: SftModel, beta: float, n_max: int,
                             boundary: str = "periodic") -> tuple[float, float]:
    """Extrapolated quantum pressure of the penalized diagonal chain."""
    model = diagonal_chain_model(sft, beta, n_max, boundary)
    return pressure_estimate(model, n_max)
