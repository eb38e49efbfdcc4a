"""Exact classical optimization.

Two bounds are computed by exhaustive search: the local-realistic maximum of
a Bell functional over deterministic assignments a(x), b(y), and the maximum
payoff of its derived guessing game over all messaging rules m(x0, x), with
Bob's decoder solved exactly from the message posterior (his decoder is NOT
restricted to the additive form here, which only makes the classical bound
harder to meet).  Tie-breaking is lexicographic throughout so results are
bit-for-bit reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ccp import CcpGame
from .errors import DimensionMismatchError, EnumerationCapError
from .functional import BellFunctional, require_valid

BELL_CAP_DEFAULT = 10**8
CCP_CAP_DEFAULT = 10**7
_CHUNK = 4096


@dataclass(frozen=True)
class DeterministicBellStrategy:
    """Fixed local assignments x -> a(x), y -> b(y)."""

    aOf: tuple[int, ...]
    bOf: tuple[int, ...]


@dataclass(frozen=True)
class MessagingStrategy:
    """Message table m[x0, x] in 0..d-1."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=int)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)


@dataclass(frozen=True)
class GuessStrategy:
    """Decoder table g[y, message] in 0..d-1."""

    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=int)
        g.setflags(write=False)
        object.__setattr__(self, "g", g)


def _digits(indices: np.ndarray, n_digits: int, base: int) -> np.ndarray:
    """Base-`base` digits of each index, most significant first."""
    out = np.empty((indices.size, n_digits), dtype=int)
    rest = indices.copy()
    for pos in range(n_digits - 1, -1, -1):
        out[:, pos] = rest % base
        rest //= base
    return out


def bell_bound(f: BellFunctional, cap: int = BELL_CAP_DEFAULT) -> tuple[float, DeterministicBellStrategy]:
    """Exact classical bound: max over all d^mA * d^mB deterministic
    strategies, with the lexicographically smallest maximizer.

    For each Alice assignment the optimal b(y) decouples across y, so the
    scan is d^mA * mB * d instead of d^(mA+mB), with identical result.
    """
    require_valid(f)
    s = f.scenario
    d, mA, mB = s.d, s.mA, s.mB
    if d ** (mA + mB) > cap:
        raise EnumerationCapError(f"d^(mA+mB) = {d ** (mA + mB)} exceeds cap {cap}")

    T = f.coefficient_table  # (mA, mB, d)
    best_value = -np.inf
    best_index = -1
    n_total = d**mA
    beta = np.arange(d)
    for start in range(0, n_total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, n_total))
        A = _digits(idx, mA, d)  # (n, mA); digit order = (a(0), a(1), ...)
        # V[n, y, beta] = sum_x p(x,y) T[x, y, (a(x)+beta) % d]
        V = np.zeros((idx.size, mB, d))
        for x in range(mA):
            shifted = (A[:, x][:, None] + beta[None, :]) % d  # (n, d)
            V += s.p[x][None, :, None] * T[x][:, shifted].transpose(1, 0, 2)
        values = V.max(axis=2).sum(axis=1)
        pos = int(np.argmax(values))
        if values[pos] > best_value:
            best_value = float(values[pos])
            best_index = int(idx[pos])

    aOf = tuple(int(v) for v in _digits(np.array([best_index]), mA, d)[0])
    bOf = []
    for y in range(mB):
        vy = np.zeros(d)
        for x in range(mA):
            vy += s.p[x, y] * T[x, y, (aOf[x] + beta) % d]
        bOf.append(int(np.argmax(vy)))
    return best_value, DeterministicBellStrategy(aOf, tuple(bOf))


def ccp_value_linear(game: CcpGame, s: DeterministicBellStrategy) -> float:
    """Payoff of the linear strategy m = x0 + a(x), guess = m + b(y)."""
    sc = game.scenario
    if len(s.aOf) != sc.mA or len(s.bOf) != sc.mB:
        raise DimensionMismatchError("strategy tables do not match the scenario")
    d = game.d
    total = 0.0
    for t in game.functional.terms:
        for x0 in range(d):
            guess = (x0 + s.aOf[t.x] + s.bOf[t.y]) % d
            if guess == (x0 + t.F) % d:
                total += game.x0_prior[x0] * sc.p[t.x, t.y] * t.c
    return total


def _posterior_payoffs(game: CcpGame, m: np.ndarray) -> np.ndarray:
    """W[y, message, guess] = expected payoff of announcing `guess` after
    seeing `message` at setting y, weighted by the joint over (x0, x)."""
    sc = game.scenario
    d = game.d
    W = np.zeros((sc.mB, d, d))
    for t in game.functional.terms:
        w = sc.p[t.x, t.y] * t.c
        if w == 0.0:
            continue
        for x0 in range(d):
            W[t.y, m[x0, t.x], (x0 + t.F) % d] += game.x0_prior[x0] * w
    return W


def bob_best_response(game: CcpGame, m: MessagingStrategy) -> tuple[GuessStrategy, float]:
    """Optimal decoder for a fixed messaging rule, ties to the smallest guess."""
    d = game.d
    table = np.asarray(m.m, dtype=int)
    if table.shape != (d, game.scenario.mA):
        raise DimensionMismatchError(f"messaging table must have shape ({d}, {game.scenario.mA})")
    W = _posterior_payoffs(game, table)
    g = W.argmax(axis=2)  # first maximum = smallest guess
    value = float(np.take_along_axis(W, g[:, :, None], axis=2).sum())
    return GuessStrategy(g), value


def messaging_payoff_additive(game: CcpGame, m: MessagingStrategy, bOf) -> np.ndarray:
    """Per-x payoff contributions of messaging m with the fixed additive
    decoder guess = message + b(y).  Summing the vector gives the payoff."""
    sc = game.scenario
    d = game.d
    table = np.asarray(m.m, dtype=int)
    out = np.zeros(sc.mA)
    for t in game.functional.terms:
        w = sc.p[t.x, t.y] * t.c
        for x0 in range(d):
            if (table[x0, t.x] + bOf[t.y]) % d == (x0 + t.F) % d:
                out[t.x] += game.x0_prior[x0] * w
    return out


def _success_weights(game: CcpGame) -> np.ndarray:
    """C[x0, x, y, g] = prior(x0) p(x,y) * (payoff when the guess is g),
    i.e. prior(x0) p(x,y) T[x, y, (g - x0) % d]."""
    sc = game.scenario
    d = game.d
    T = game.functional.coefficient_table  # (mA, mB, d)
    x0s = np.arange(d)
    gs = np.arange(d)
    shift = (gs[None, :] - x0s[:, None]) % d  # (x0, g)
    return np.einsum("i,xy,ixyg->ixyg", game.x0_prior, sc.p, T[:, :, shift].transpose(2, 0, 1, 3))


def _scan_messagings(game: CcpGame, cap: int, chunk: int, chunk_values) -> tuple[float, MessagingStrategy]:
    """Enumerate all d^(d*mA) messaging tables in lexicographic order
    (flattened x0-major) and keep the first maximizer of chunk_values."""
    d, mA = game.d, game.scenario.mA
    n_cells = d * mA
    n_total = d**n_cells
    if n_total > cap:
        raise EnumerationCapError(f"d^(d*mA) = {n_total} exceeds cap {cap}")
    best_value = -np.inf
    best_index = -1
    for start in range(0, n_total, chunk):
        idx = np.arange(start, min(start + chunk, n_total))
        tables = _digits(idx, n_cells, d).reshape(idx.size, d, mA)
        values = chunk_values(tables)
        pos = int(np.argmax(values))
        if values[pos] > best_value:
            best_value = float(values[pos])
            best_index = int(idx[pos])
    table = _digits(np.array([best_index]), n_cells, d).reshape(d, mA)
    return best_value, MessagingStrategy(table)


def ccp_bound_general(
    game: CcpGame, cap: int = CCP_CAP_DEFAULT, chunk: int = _CHUNK
) -> tuple[float, MessagingStrategy]:
    """Exact optimum of the guessing game over all d^(d*mA) messaging rules,
    with Bob's decoding of the game's additive form guess = message + b(y)
    and b optimized per rule.  Equals the classical Bell bound.

    Unrestricted decoders can genuinely exceed this bound (and the Bell
    bound) on functionals with mixed-sign coefficients; that variant is
    :func:`ccp_bound_free_decoding`.  Ties go to the lexicographically
    smallest rule (message table flattened x0-major)."""
    d, mB = game.d, game.scenario.mB
    C = _success_weights(game)  # (x0, x, y, g)
    beta = np.arange(d)

    def chunk_values(tables):
        # V[n, y, beta] = sum_{x0,x} C[x0, x, y, (m(x0,x) + beta) % d]
        V = np.zeros((tables.shape[0], mB, d))
        for x0 in range(d):
            for x in range(game.scenario.mA):
                guess = (tables[:, x0, x][:, None] + beta[None, :]) % d  # (n, beta)
                V += C[x0, x][:, guess].transpose(1, 0, 2)
        return V.max(axis=2).sum(axis=1)

    return _scan_messagings(game, cap, chunk, chunk_values)


def ccp_bound_free_decoding(
    game: CcpGame, cap: int = CCP_CAP_DEFAULT, chunk: int = _CHUNK
) -> tuple[float, MessagingStrategy]:
    """Optimum of the guessing game when Bob may decode each (y, message)
    pair arbitrarily (the decoder of :func:`bob_best_response`).

    This is at least :func:`ccp_bound_general` and can strictly exceed it
    (and the Bell bound) when negative coefficients reward dodging events.
    """
    d, mB = game.d, game.scenario.mB
    C = _success_weights(game)

    def chunk_values(tables):
        onehot = (tables[:, :, :, None] == np.arange(d)[None, None, None, :]).astype(float)
        # A[n, mu, y, g] = sum_{x0, x} [m(x0,x) = mu] C[x0, x, y, g]
        A = np.einsum("nixm,ixyg->nmyg", onehot, C)
        return A.max(axis=3).sum(axis=(1, 2))

    return _scan_messagings(game, cap, chunk, chunk_values)
