"""Communication games derived from Bell functionals.

Alice holds a secret x0 (uniform over 0..d-1) and a setting x, Bob holds a
setting y.  Alice may send one message in 0..d-1; Bob announces a guess and
the pair earns the coefficient of term (i, k) at (x, y) whenever the guess
hits the shifted target (x0 + F) mod d.  Bob's decoding is always additive:
guess = message + shift(y).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError
from .functional import Behavior, BellFunctional, require_valid


@dataclass(frozen=True)
class CcpGame:
    """A guessing game with targets (x0 + F) mod d and payoffs c per term."""

    functional: BellFunctional
    x0_prior: np.ndarray

    def __post_init__(self):
        prior = np.asarray(self.x0_prior, dtype=float)
        if prior.shape != (self.d,):
            raise ValueError(f"x0 prior must have shape ({self.d},)")
        if abs(prior.sum() - 1.0) > 1e-12 or prior.min() < 0:
            raise ValueError("x0 prior must be a probability vector")
        prior = prior.copy()
        prior.setflags(write=False)
        object.__setattr__(self, "x0_prior", prior)

    @property
    def d(self) -> int:
        return self.functional.scenario.d

    @property
    def scenario(self):
        return self.functional.scenario

    @cached_property
    def term_index(self) -> dict:
        return {(t.x, t.y, t.i, t.k): t for t in self.functional.terms}


def build_game(f: BellFunctional) -> CcpGame:
    """Derive the guessing game of a valid functional (uniform secret)."""
    require_valid(f)
    d = f.scenario.d
    return CcpGame(f, np.full(d, 1.0 / d))


def f_eval(game: CcpGame, i: int, k: int, x0: int, x: int, y: int) -> int:
    """Target value (x0 + F) mod d of term (i, k) at settings (x, y)."""
    t = game.term_index.get((x, y, i, k))
    if t is None:
        raise ValueError(f"no term (i={i}, k={k}) at settings (x={x}, y={y})")
    return (x0 + t.F) % game.d


def linear_messaging_table(game: CcpGame, offset=None) -> np.ndarray:
    """m[x0, x, a] = (x0 + a + offset(x)) mod d; offset defaults to zero."""
    d, mA = game.d, game.scenario.mA
    x0 = np.arange(d)[:, None, None]
    a = np.arange(d)[None, None, :]
    off = np.zeros(mA, dtype=int) if offset is None else np.asarray(offset, dtype=int)
    return (x0 + a + off[None, :, None]) % d


def _check_behavior(game: CcpGame, beh: Behavior) -> None:
    if not game.scenario.same_shape(beh.scenario):
        raise DimensionMismatchError("behavior does not match the game's scenario")


def entangled_value(game: CcpGame, beh: Behavior) -> float:
    """Payoff of the linear strategy (message = x0 + a, guess = message + b)
    on a behavior.  Equals the Bell value of the behavior."""
    return entangled_value_general(game, beh, linear_messaging_table(game))


def entangled_value_general(game: CcpGame, beh: Behavior, m) -> float:
    """Payoff of an arbitrary deterministic messaging rule m(x0, x, a) with
    additive decoding guess = message + b:

    sum over x0, settings and outcomes of
    prior(x0) p(x,y) P(a,b|x,y) c * [m(x0,x,a) + b = x0 + F mod d].
    """
    _check_behavior(game, beh)
    d = game.d
    m = np.asarray(m, dtype=int)
    if m.shape != (d, game.scenario.mA, d):
        raise DimensionMismatchError(f"messaging table must have shape ({d}, {game.scenario.mA}, {d})")
    if m.min() < 0 or m.max() >= d:
        raise ValueError("messages must lie in 0..d-1")

    p = game.scenario.p
    prior = game.x0_prior
    b = np.arange(d)
    total = 0.0
    for t in game.functional.terms:
        w = p[t.x, t.y] * t.c
        if w == 0.0:
            continue
        P = beh.P[:, :, t.x, t.y]  # (a, b)
        for x0 in range(d):
            target = (x0 + t.F) % d
            hit = (m[x0, t.x][:, None] + b[None, :]) % d == target  # (a, b)
            total += prior[x0] * w * float(P[hit].sum())
    return total
