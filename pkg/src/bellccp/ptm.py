"""Prepare-transmit-measure protocols for the guessing games.

Alice encodes (x0, x) into a d-dimensional state, sends it, and Bob's raw
measurement outcome must hit the target (x0 + F) mod d.  The communication
limit is enforced structurally: preparations are d x d density matrices,
nothing larger.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ccp import CcpGame
from .errors import DimensionMismatchError, MarginalUniformityError
from .linalg import herm, partial_trace, projector, top_eigenvector
from .quantum import (
    DensityMatrix,
    MeasurementSet,
    Povm,
    check_uniform_marginals,
    measurement_best_response,
    random_basis_pvm,
)


class PreparationSet:
    """Table (x0, x) -> d-dimensional density matrix, stored as one array."""

    def __init__(self, states, *, trace_tol=1e-10, psd_tol=1e-9):
        states = np.asarray(states, dtype=complex)
        if states.ndim != 4 or states.shape[2] != states.shape[3]:
            raise ValueError("states must have shape (d, mA, dim, dim)")
        d, mA, dim, _ = states.shape
        if dim != d:
            raise ValueError(f"preparations must be d-dimensional (d = {d}, got dim = {dim})")
        for x0 in range(d):
            for x in range(mA):
                DensityMatrix(states[x0, x], trace_tol=trace_tol, psd_tol=psd_tol)
        self.states = states
        self.states.setflags(write=False)

    @property
    def d(self) -> int:
        return self.states.shape[0]

    @property
    def mA(self) -> int:
        return self.states.shape[1]

    def state(self, x0: int, x: int) -> np.ndarray:
        return self.states[x0, x]


def _check_bob(game: CcpGame, B: MeasurementSet) -> None:
    if B.outcomes != game.d or B.dim != game.d:
        raise DimensionMismatchError(
            f"Bob needs {game.d}-outcome measurements on dimension {game.d}, "
            f"got {B.outcomes} outcomes on dimension {B.dim}"
        )
    if B.settings != game.scenario.mB:
        raise DimensionMismatchError("measurement count does not match mB")


def ptm_value(game: CcpGame, prep: PreparationSet, B: MeasurementSet) -> float:
    """Average payoff: sum over x0, settings and terms of
    prior(x0) p(x,y) c * Tr[B^y_(x0+F) rho_(x0,x)]."""
    _check_bob(game, B)
    if prep.d != game.d or prep.mA != game.scenario.mA:
        raise DimensionMismatchError("preparation table does not match the game")
    d = game.d
    total = 0.0
    for t in game.functional.terms:
        w = game.scenario.p[t.x, t.y] * t.c
        if w == 0.0:
            continue
        for x0 in range(d):
            target = (x0 + t.F) % d
            total += game.x0_prior[x0] * w * float(
                np.trace(B[t.y][target] @ prep.state(x0, t.x)).real
            )
    return total


def ptm_from_bell(
    game: CcpGame,
    rho: DensityMatrix,
    A: MeasurementSet,
    tol: float,
    force: bool = False,
) -> PreparationSet:
    """Preparations that replay an entangled strategy as state transmission.

    Alice's preparation for (x0, x) is Bob's local state after Alice measured
    setting x and obtained outcome (-x0) mod d, scaled by d:

        rho_(x0, x) = d * Tr_A[(A^x_((-x0) mod d) (x) I) rho].

    The sign flip on the outcome index makes Bob's raw outcome b satisfy
    exactly the events a + b = F mod d that the Bell functional scores, so
    the resulting payoff equals the entangled payoff identically.  The
    construction yields unit-trace states only when Alice's marginals are
    uniform; otherwise it fails, or renormalizes when force=True (then the
    payoff equality is no longer guaranteed).
    """
    DA = A.dim
    if rho.dim % DA != 0:
        raise DimensionMismatchError(f"state dimension {rho.dim} not divisible by Alice's {DA}")
    DB = rho.dim // DA
    d = game.d
    if DB != d:
        raise DimensionMismatchError(f"Bob's local dimension {DB} must equal d = {d}")
    if A.outcomes != d or A.settings != game.scenario.mA:
        raise DimensionMismatchError("Alice's measurements do not match the game")

    report = check_uniform_marginals(rho, A, tol)
    if not report.passed and not force:
        raise MarginalUniformityError(report.worst_deviation, tol)

    mA = game.scenario.mA
    states = np.empty((d, mA, d, d), dtype=complex)
    for x0 in range(d):
        for x in range(mA):
            block = np.kron(A[x][(-x0) % d], np.eye(d)) @ rho.mat
            sigma = d * partial_trace(block, (DA, d), keep=1)
            sigma = herm(sigma)
            if force:
                tr = float(np.trace(sigma).real)
                if tr <= 0:
                    raise MarginalUniformityError(report.worst_deviation, tol)
                sigma = sigma / tr
            states[x0, x] = sigma
    trace_tol = max(1e-10, tol * d)
    return PreparationSet(states, trace_tol=trace_tol)


def _payoff_operators(game: CcpGame) -> np.ndarray:
    """O[x0, x] = sum_y p(x,y) sum_terms c B^y_((x0+F) mod d), as index table:
    returns (x0, x, y, target) weights to combine with Bob's elements."""
    d = game.d
    sc = game.scenario
    W = np.zeros((d, sc.mA, sc.mB, d))
    for t in game.functional.terms:
        for x0 in range(d):
            W[x0, t.x, t.y, (x0 + t.F) % d] += sc.p[t.x, t.y] * t.c
    return W


def preparation_best_response(game: CcpGame, B: MeasurementSet) -> PreparationSet:
    """Optimal pure preparations for fixed measurements: each rho_(x0,x) is
    the top-eigenvector projector of its payoff operator."""
    _check_bob(game, B)
    d = game.d
    mA = game.scenario.mA
    W = _payoff_operators(game)
    states = np.empty((d, mA, d, d), dtype=complex)
    for x0 in range(d):
        for x in range(mA):
            O = np.zeros((d, d), dtype=complex)
            for y in range(game.scenario.mB):
                for target in range(d):
                    w = W[x0, x, y, target]
                    if w != 0.0:
                        O += w * B[y][target]
            _, vec = top_eigenvector(O)
            states[x0, x] = projector(vec)
    return PreparationSet(states)


@dataclass(frozen=True)
class PtmSeesawResult:
    value: float
    prep: PreparationSet
    B: MeasurementSet
    converged: bool
    restart: int
    history: tuple[float, ...]


def _bob_ptm_operators(game: CcpGame, prep: PreparationSet) -> list[list[np.ndarray]]:
    """R_b^y = sum_{x0, x} prior(x0) p(x,y) c * rho_(x0,x) over terms whose
    target (x0 + F) mod d equals b."""
    d = game.d
    out = []
    for y in range(game.scenario.mB):
        Rs = [np.zeros((d, d), dtype=complex) for _ in range(d)]
        for t in game.functional.terms:
            if t.y != y:
                continue
            w = game.scenario.p[t.x, y] * t.c
            for x0 in range(d):
                Rs[(x0 + t.F) % d] += game.x0_prior[x0] * w * prep.state(x0, t.x)
        out.append([herm(r) for r in Rs])
    return out


def _seesaw_ptm_single(game, tol, max_iters, rng):
    d = game.d
    B = MeasurementSet([random_basis_pvm(d, d, rng) for _ in range(game.scenario.mB)])
    prep = preparation_best_response(game, B)
    history = []
    value = -np.inf
    converged = False
    for _ in range(max_iters):
        prep = preparation_best_response(game, B)
        for y, Rs in enumerate(_bob_ptm_operators(game, prep)):
            current = sum(np.trace(B[y][b] @ Rs[b]).real for b in range(d))
            resp = measurement_best_response(Rs, tol=min(tol, 1e-12), max_iters=200)
            if resp.value >= current:
                B = MeasurementSet([resp.povm if yy == y else B[yy] for yy in range(game.scenario.mB)])
        new_value = ptm_value(game, prep, B)
        history.append(new_value)
        if new_value - value < tol and np.isfinite(value):
            value = max(value, new_value)
            converged = True
            break
        value = max(value, new_value)
    return PtmSeesawResult(value, prep, B, converged, -1, tuple(history))


def seesaw_ptm(
    game: CcpGame,
    restarts: int = 10,
    tol: float = 1e-10,
    max_iters: int = 300,
    seed: int = 0,
    threads: int = 1,
) -> PtmSeesawResult:
    """Best found prepare-transmit-measure payoff (lower bound), alternating
    exact preparation updates with measurement fixed-point updates."""
    if restarts < 1:
        raise ValueError("need at least one restart")
    children = np.random.SeedSequence(seed).spawn(restarts)

    def run(k):
        rng = np.random.default_rng(children[k])
        res = _seesaw_ptm_single(game, tol, max_iters, rng)
        return PtmSeesawResult(res.value, res.prep, res.B, res.converged, k, res.history)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(k) for k in range(restarts)]
    return max(results, key=lambda r: (r.value, -r.restart))
