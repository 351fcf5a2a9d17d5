"""Riesz-product measures with lacunary frequencies.

Stores a finite prefix of the frequency/amplitude sequences, computes
Fourier coefficients by the closed product formula over the (unique)
signed representation n = sum_k eps_k n_k, and cross-validates against
quadrature of the partial-product density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndecidablePrefixError


@dataclass(frozen=True)
class RieszSpec:
    """Finite prefix of a lacunary frequency sequence with amplitudes.

    The ratio bound q > 3 makes signed representations over {-1,0,1}
    unique, which is what the coefficient formula relies on.
    """

    frequencies: tuple[int, ...]
    amplitudes: tuple[float, ...]
    ratio_bound: float

    def __post_init__(self):
        n = tuple(int(f) for f in self.frequencies)
        a = tuple(float(x) for x in self.amplitudes)
        if len(n) != len(a):
            raise ValueError("frequencies and amplitudes must have equal length")
        if self.ratio_bound <= 3:
            raise ValueError("ratio bound must be strictly greater than 3")
        if any(f <= 0 for f in n):
            raise ValueError("frequencies must be positive")
        for f1, f2 in zip(n, n[1:]):
            if f2 / f1 < self.ratio_bound:
                raise ValueError(
                    f"frequency ratio {f2}/{f1} below the bound {self.ratio_bound}")
        if any(not (-1 < x < 1) for x in a):
            raise ValueError("amplitudes must lie in (-1, 1)")
        object.__setattr__(self, "frequencies", n)
        object.__setattr__(self, "amplitudes", a)

    def __len__(self):
        return len(self.frequencies)

    def diagnostics(self) -> dict:
        """Amplitude-decay trend and partial sums of a_k^2.

        Singularity of the limit measure depends on the infinite tail and is
        not decidable from a prefix; these numbers are reported as-is.
        """
        a = np.array(self.amplitudes)
        return {
            "amplitude_trend_decreasing": bool(
                len(a) < 2 or np.all(np.abs(a[1:]) <= np.abs(a[:-1]) + 1e-15)),
            "sum_of_squares_partial": [float(x) for x in np.cumsum(a ** 2)],
        }


def decompose(spec: RieszSpec, n: int) -> dict[int, int] | None:
    """The unique representation n = sum_k eps_k n_k with eps_k in {-1,0,1},
    or None when no representation exists.

    Greedy from the top frequency down: lacunarity q > 3 forces
    sum_{j<k} n_j < n_k / 2, so the top participating index is determined
    by |remainder| > n_k / 2.  Raises UndecidablePrefixError when larger,
    unseen frequencies could still participate.
    """
    freqs = spec.frequencies
    if not freqs:
        if n == 0:
            return {}
        raise UndecidablePrefixError("empty spec cannot decide n != 0")
    # any unseen frequency n_K satisfies n_K >= q * n_{K-1} > 3 n_{K-1}; a
    # representation using it would need |n| > n_K/2 > 1.5 n_{K-1}
    decidable = abs(n) <= 1.5 * freqs[-1]
    rem = n
    eps: dict[int, int] = {}
    for k in range(len(freqs) - 1, -1, -1):
        if abs(rem) * 2 > freqs[k]:
            sign = 1 if rem > 0 else -1
            eps[k] = sign
            rem -= sign * freqs[k]
    if rem == 0:
        return eps
    if not decidable:
        raise UndecidablePrefixError(
            f"|n|={abs(n)} may involve frequencies beyond the stored prefix")
    return None


def fourier_coefficient(spec: RieszSpec, n: int) -> float:
    """mu_hat(n) = prod_k (a_k/2)^{|eps_k|} over the representation of n,
    or 0 if none exists; symmetric in n -> -n."""
    eps = decompose(spec, n)
    if eps is None:
        return 0.0
    out = 1.0
    for k in eps:
        out *= spec.amplitudes[k] / 2
    return out


def partial_density(spec: RieszSpec, K: int, t) -> np.ndarray | float:
    """(1/2pi) prod_{k<=K} (1 + a_k cos(n_k t)); strictly positive."""
    if not (0 <= K <= len(spec)):
        raise ValueError(f"K={K} outside stored prefix of length {len(spec)}")
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, 1.0 / (2 * np.pi))
    for k in range(K):
        out = out * (1 + spec.amplitudes[k] * np.cos(spec.frequencies[k] * t))
    return out if out.shape else float(out)


def verify_coefficients(spec: RieszSpec, K: int, n_max: int,
                        grid_factor: int = 8) -> float:
    """Max deviation between quadrature Fourier coefficients of the K-term
    partial density and the closed formula restricted to k <= K.

    Uses the trapezoid rule on a uniform grid, exact for trigonometric
    polynomials below the Nyquist frequency.
    """
    if not (0 <= K <= len(spec)):
        raise ValueError("K outside stored prefix")
    top_freq = max(spec.frequencies[:K], default=0)
    content = n_max + sum(spec.frequencies[:K])
    grid_n = grid_factor * max(top_freq, n_max, 1)
    if grid_n <= content:
        raise ValueError(f"grid of {grid_n} points violates Nyquist for "
                         f"frequency content {content}")
    t = np.arange(grid_n) * (2 * np.pi / grid_n)
    dens = partial_density(spec, K, t)
    sub = RieszSpec(spec.frequencies[:K] or (1,),
                    spec.amplitudes[:K] or (0.0,),
                    spec.ratio_bound) if K else None

    max_err = 0.0
    for n in range(-n_max, n_max + 1):
        quad = float(np.real(np.sum(np.exp(-1j * n * t) * dens))
                     * (2 * np.pi / grid_n))
        if K == 0:
            closed = 1.0 if n == 0 else 0.0
        else:
            try:
                closed = fourier_coefficient(sub, n)
            except UndecidablePrefixError:
                closed = 0.0   # no representation within k <= K
        max_err = max(max_err, abs(quad - closed))
    return max_err
