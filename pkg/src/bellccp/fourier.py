"""Fourier analysis of functions taking values in the d-th roots of unity.

A messaging rule x0 -> omega^(n(x0)) either concentrates its transform on a
single frequency (exactly the affine rules n(x0) = s*x0 + t) or spreads it
as a convex combination of roots of unity whose weights are multiples of
1/d.  Those weights are what make nonlinear messaging equivalent to a
probabilistic mixture of linear ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .functional import omega


@dataclass(frozen=True)
class OmegaFunction:
    """Function B(x0) = omega^(n(x0)) on x0 in 0..d-1, stored by exponents."""

    d: int
    n: tuple[int, ...]

    def __post_init__(self):
        n = tuple(int(v) for v in self.n)
        if len(n) != self.d:
            raise ValueError(f"need {self.d} exponents, got {len(n)}")
        if any(not 0 <= v < self.d for v in n):
            raise ValueError("exponents must lie in 0..d-1")
        object.__setattr__(self, "n", n)


def dft_power(bf: OmegaFunction, l: int, r: int) -> complex:
    """Transform coefficient of the r-th power:
    (1/d) * sum_x0 omega^(r*n(x0)) * omega^(-l*x0)."""
    d = bf.d
    if not 0 <= l < d:
        raise ValueError(f"l = {l} not in 0..{d - 1}")
    if r < 1:
        raise ValueError(f"power r must be >= 1, got {r}")
    exps = [(r * bf.n[x0] - l * x0) % d for x0 in range(d)]
    w = omega(d)
    return complex(sum(w**e for e in exps) / d)


def convex_weights(bf: OmegaFunction) -> np.ndarray:
    """Mixture weights lambda_nu: multiplicity of nu in the multiset
    {(n(x0) - x0) mod d} divided by d.

    These are the probabilities with which the rule is equivalent to
    sending x0 + nu; they always sum to 1 in steps of 1/d.
    """
    d = bf.d
    counts = np.zeros(d)
    for x0 in range(d):
        counts[(bf.n[x0] - x0) % d] += 1
    return counts / d


def linear_detect(bf: OmegaFunction) -> Optional[tuple[int, int]]:
    """Return (s, t) with n(x0) = s*x0 + t (mod d) for all x0, or None.

    Detection is by exact congruence, never by thresholding transform
    magnitudes.
    """
    d = bf.d
    t = bf.n[0]
    s = (bf.n[1] - bf.n[0]) % d if d > 1 else 0
    for x0 in range(d):
        if bf.n[x0] != (s * x0 + t) % d:
            return None
    return (s, t)
