"""Built-in functional instances, random generators, and the reference
quantum strategies used as independent oracles in tests and demos."""

from __future__ import annotations

import numpy as np

from .functional import Behavior, BellFunctional, Scenario, Term
from .quantum import DensityMatrix, MeasurementSet, Povm
from .ptm import PreparationSet


def chsh() -> BellFunctional:
    """Two-input two-outcome game: score 1 when a + b = x*y (mod 2),
    uniform setting weights.  Classical bound 3/4."""
    scenario = Scenario(2, 2, 2, np.full((2, 2), 0.25))
    terms = [Term(x, y, 1, 0, (x * y) % 2, 1.0) for x in range(2) for y in range(2)]
    return BellFunctional(scenario, tuple(terms))


def cglmp(d: int) -> BellFunctional:
    """d-outcome two-setting functional with graded +/- coefficient blocks
    (the many-outcome successor of the correlation form of chsh()).

    Success events are written as a + b = F (mod d); relative to the usual
    presentation (which scores differences of outcomes) Bob's outcomes are
    relabeled b -> -b mod d.  Setting weights 1/4 are folded in, so values
    here are one quarter of the textbook expression; the classical bound is
    0.5 for every d.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    scenario = Scenario(d, 2, 2, np.full((2, 2), 0.25))
    K = d // 2 - 1
    terms = []
    for k in range(K + 1):
        w = 1.0 - 2.0 * k / (d - 1)
        # block i=1 (positive) / i=2 (negative), per settings (x, y)
        plus = {(0, 0): k, (0, 1): (-k) % d, (1, 0): (-k - 1) % d, (1, 1): k}
        minus = {(0, 0): (-k - 1) % d, (0, 1): (k + 1) % d, (1, 0): k, (1, 1): (-k - 1) % d}
        for (x, y), F in plus.items():
            terms.append(Term(x, y, 1, k, F, w))
        for (x, y), F in minus.items():
            terms.append(Term(x, y, 2, k, F, -w))
    return BellFunctional(scenario, tuple(terms))


def random_functional(
    seed: int,
    d: int,
    mA: int,
    mB: int,
    N: int,
    K: int,
    coefficient_range: tuple[float, float] = (-1.0, 1.0),
) -> BellFunctional:
    """Random valid instance: disjoint residue blocks per setting pair,
    coefficients uniform in the given range, random normalized setting
    weights.  Deterministic per seed."""
    if (K + 1) * N > d:
        raise ValueError(f"(K+1)*N = {(K + 1) * N} exceeds d = {d}; no valid instance exists")
    rng = np.random.default_rng(seed)
    p = rng.random((mA, mB)) + 0.1
    p /= p.sum()
    scenario = Scenario(d, mA, mB, p)
    lo, hi = coefficient_range
    terms = []
    for x in range(mA):
        for y in range(mB):
            residues = rng.choice(d, size=(K + 1) * N, replace=False)
            for i in range(1, N + 1):
                for k in range(K + 1):
                    F = int(residues[(i - 1) * (K + 1) + k])
                    c = float(rng.uniform(lo, hi))
                    terms.append(Term(x, y, i, k, F, c))
    return BellFunctional(scenario, tuple(terms), N=N, K=K)


def random_behavior(scenario: Scenario, rng: np.random.Generator) -> Behavior:
    """Random normalized behavior (no locality or quantum structure)."""
    P = rng.random((scenario.d, scenario.d, scenario.mA, scenario.mB))
    P /= P.sum(axis=(0, 1), keepdims=True)
    return Behavior(scenario, P)


def maximally_entangled(d: int) -> DensityMatrix:
    """Projector onto (1/sqrt(d)) sum_j |jj>."""
    vec = np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)
    return DensityMatrix(np.outer(vec, vec.conj()))


def _rotated_qubit_pvm(angle: float) -> Povm:
    """Projective qubit measurement in the x-z plane at the given Bloch angle."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    v0 = np.array([c, s], dtype=complex)
    v1 = np.array([-s, c], dtype=complex)
    return Povm([np.outer(v0, v0.conj()), np.outer(v1, v1.conj())])


def chsh_optimal_strategy() -> tuple[DensityMatrix, MeasurementSet, MeasurementSet]:
    """The standard optimal two-qubit strategy for chsh(): a maximally
    entangled pair with measurement angles 0, pi/2 (Alice) and +/- pi/4
    (Bob).  Its behavior scores (2 + sqrt(2))/4."""
    rho = maximally_entangled(2)
    A = MeasurementSet([_rotated_qubit_pvm(0.0), _rotated_qubit_pvm(np.pi / 2)])
    B = MeasurementSet([_rotated_qubit_pvm(np.pi / 4), _rotated_qubit_pvm(-np.pi / 4)])
    return rho, A, B


def _phase_basis(d: int, offset: float, sign: int) -> np.ndarray:
    """Columns are the vectors (1/sqrt(d)) sum_j omega^(sign*j*(col + offset)) |j>."""
    j = np.arange(d)[:, None]
    cols = np.arange(d)[None, :]
    return np.exp(sign * 2j * np.pi * j * (cols + offset) / d) / np.sqrt(d)


def cglmp_standard_strategy(
    d: int, weights: np.ndarray | None = None
) -> tuple[DensityMatrix, MeasurementSet, MeasurementSet]:
    """The textbook phase-basis strategy for cglmp(d).

    Alice measures in phase bases with offsets 0 and 1/2, Bob with offsets
    1/4 and -1/4; Bob's outcome labels carry the b -> -b relabeling that
    cglmp() builds in.  By default the state is maximally entangled (for
    d = 3 this scores (3 + 2*sqrt(3))/9); `weights` gives optional Schmidt
    coefficients (unnormalized) for non-maximally entangled variants.
    """
    if weights is None:
        weights = np.ones(d)
    weights = np.asarray(weights, dtype=float)
    vec = np.zeros(d * d, dtype=complex)
    for j in range(d):
        vec[j * d + j] = weights[j]
    vec /= np.linalg.norm(vec)
    rho = DensityMatrix(np.outer(vec, vec.conj()))

    A_povms = []
    for alpha in (0.0, 0.5):
        basis = _phase_basis(d, alpha, sign=+1)
        A_povms.append(Povm([np.outer(basis[:, a], basis[:, a].conj()) for a in range(d)]))
    B_povms = []
    for beta in (0.25, -0.25):
        # same positive phase sign as Alice: column b here is the
        # conventional outcome (-b) mod d, which is the built-in relabeling
        basis = _phase_basis(d, beta, sign=+1)
        B_povms.append(Povm([np.outer(basis[:, b], basis[:, b].conj()) for b in range(d)]))
    return rho, MeasurementSet(A_povms), MeasurementSet(B_povms)


def cglmp_optimal_weights(d: int) -> np.ndarray:
    """Schmidt weights of the best known state for the standard bases.
    For d = 3 this is (1, (sqrt(11) - sqrt(3))/2, 1)."""
    if d == 2:
        return np.ones(2)
    if d == 3:
        gamma = (np.sqrt(11.0) - np.sqrt(3.0)) / 2.0
        return np.array([1.0, gamma, 1.0])
    raise ValueError("optimal weights tabulated only for d in {2, 3}")


def qrac_strategy() -> tuple[PreparationSet, MeasurementSet]:
    """The qubit random-access-code protocol for the chsh() game.

    Encode u = x0 and v = x0 + x into the Bloch vector
    ((-1)^v, 0, (-1)^u)/sqrt(2); Bob reads u in the z basis (y = 0) and v in
    the x basis (y = 1).  Every round succeeds with probability
    cos^2(pi/8), so the payoff is (2 + sqrt(2))/4.
    """
    sigma_x = np.array([[0, 1], [1, 0]], dtype=complex)
    sigma_z = np.array([[1, 0], [0, -1]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    states = np.empty((2, 2, 2, 2), dtype=complex)
    for x0 in range(2):
        for x in range(2):
            u, v = x0, (x0 + x) % 2
            bloch = (((-1) ** v) * sigma_x + ((-1) ** u) * sigma_z) / np.sqrt(2)
            states[x0, x] = (eye + bloch) / 2
    prep = PreparationSet(states)

    def pvm_of(op):
        vals, vecs = np.linalg.eigh(op)
        # outcome 0 <-> eigenvalue +1, outcome 1 <-> eigenvalue -1
        plus = vecs[:, np.argmax(vals)]
        minus = vecs[:, np.argmin(vals)]
        return Povm([np.outer(plus, plus.conj()), np.outer(minus, minus.conj())])

    B = MeasurementSet([pvm_of(sigma_z), pvm_of(sigma_x)])
    return prep, B


CATALOG_BUILDERS = {"chsh": chsh}
for _d in range(2, 10):
    CATALOG_BUILDERS[f"cglmp{_d}"] = (lambda dd: (lambda: cglmp(dd)))(_d)


def catalog_names() -> list[str]:
    return sorted(CATALOG_BUILDERS)


def by_name(name: str) -> BellFunctional:
    try:
        return CATALOG_BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown catalog instance {name!r}; known: {catalog_names()}") from None
