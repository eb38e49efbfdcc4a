"""States, measurements, Born-rule behaviors, and see-saw optimization.

The see-saw alternates three exact best responses: the state moves to the
top eigenvector of the current Bell operator, and each party's measurement
for each setting is re-solved by a multiplicative fixed-point iteration of
minimum-error-discrimination type.  It produces lower bounds on the maximal
quantum value; no upper-bound certificates are computed here.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NumericalBreakdownError
from .functional import Behavior, BellFunctional, Scenario, require_valid
from .linalg import dagger, herm, inv_sqrt_psd, is_hermitian, partial_trace, projector, random_unitary, top_eigenvector

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
POVM_TOL = 1e-9


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix (validated)."""

    def __init__(self, mat, *, herm_tol=HERM_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
        mat = np.asarray(mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        if not is_hermitian(mat, herm_tol):
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace {tr!r} differs from 1 beyond tolerance {trace_tol}")
        if np.linalg.eigvalsh(herm(mat)).min() < -psd_tol:
            raise ValueError("density matrix is not positive semidefinite")
        self.mat = mat
        self.mat.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


class Povm:
    """d-outcome measurement: Hermitian PSD elements summing to identity."""

    def __init__(self, elements, *, tol=POVM_TOL):
        elements = [np.asarray(m, dtype=complex) for m in elements]
        if not elements:
            raise ValueError("a POVM needs at least one element")
        dim = elements[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for m in elements:
            if m.shape != (dim, dim):
                raise ValueError("POVM elements must share one square shape")
            if not is_hermitian(m, tol):
                raise ValueError("POVM element is not Hermitian")
            if np.linalg.eigvalsh(herm(m)).min() < -tol:
                raise ValueError("POVM element is not positive semidefinite")
            total += m
        if np.max(np.abs(total - np.eye(dim))) > tol:
            raise ValueError("POVM elements do not sum to the identity")
        self.elements = [_readonly(m) for m in elements]

    @property
    def outcomes(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __getitem__(self, b):
        return self.elements[b]


class MeasurementSet:
    """One POVM per setting, all with the same outcome count and dimension."""

    def __init__(self, povms):
        povms = list(povms)
        if not povms:
            raise ValueError("need at least one setting")
        d = povms[0].outcomes
        dim = povms[0].dim
        for p in povms:
            if p.outcomes != d or p.dim != dim:
                raise ValueError("all settings must share outcome count and dimension")
        self.povms = povms

    @property
    def settings(self) -> int:
        return len(self.povms)

    @property
    def outcomes(self) -> int:
        return self.povms[0].outcomes

    @property
    def dim(self) -> int:
        return self.povms[0].dim

    def __getitem__(self, x) -> Povm:
        return self.povms[x]


def _readonly(m):
    m = np.array(m)
    m.setflags(write=False)
    return m


def basis_pvm(dim: int, outcomes: int, unitary: np.ndarray | None = None) -> Povm:
    """Projective measurement onto (rotated) basis vectors.

    With outcomes > dim the extra elements are zero; with outcomes < dim the
    orthocomplement is folded into the last element so the set stays complete.
    """
    u = np.eye(dim, dtype=complex) if unitary is None else unitary
    elements = []
    for b in range(outcomes):
        if b < dim:
            elements.append(projector(u[:, b]))
        else:
            elements.append(np.zeros((dim, dim), dtype=complex))
    for extra in range(outcomes, dim):
        elements[-1] = elements[-1] + projector(u[:, extra])
    return Povm(elements)


def random_basis_pvm(dim: int, outcomes: int, rng: np.random.Generator) -> Povm:
    return basis_pvm(dim, outcomes, random_unitary(dim, rng))


def born_behavior(
    rho: DensityMatrix,
    A: MeasurementSet,
    B: MeasurementSet,
    scenario: Scenario | None = None,
) -> Behavior:
    """Behavior P(a,b|x,y) = Tr[(A_a^x (x) B_b^y) rho].

    If no scenario is given, one with uniform setting weights is attached;
    the weights play no role in the behavior itself.
    """
    DA, DB = A.dim, B.dim
    if DA * DB != rho.dim:
        raise DimensionMismatchError(f"state dimension {rho.dim} != {DA} * {DB}")
    if A.outcomes != B.outcomes:
        raise DimensionMismatchError("Alice and Bob must have the same outcome count")
    d, mA, mB = A.outcomes, A.settings, B.settings
    if scenario is None:
        scenario = Scenario(d, mA, mB, np.full((mA, mB), 1.0 / (mA * mB)))
    elif (scenario.d, scenario.mA, scenario.mB) != (d, mA, mB):
        raise DimensionMismatchError("scenario does not match the measurement sets")

    rho4 = rho.mat.reshape(DA, DB, DA, DB)
    Aarr = np.stack([np.stack(A[x].elements) for x in range(mA)])  # (mA, d, DA, DA)
    Barr = np.stack([np.stack(B[y].elements) for y in range(mB)])  # (mB, d, DB, DB)
    P = np.einsum("xaik,ybjl,klij->abxy", Aarr, Barr, rho4).real
    return Behavior(scenario, np.clip(P, 0.0, None))


@dataclass(frozen=True)
class BestResponse:
    povm: Povm
    value: float
    certificate_residual: float
    iterations: int


def measurement_best_response(R, tol: float = 1e-12, max_iters: int = 500) -> BestResponse:
    """Approximately maximize sum_b Tr[M_b R_b] over POVMs {M_b}.

    Multiplicative fixed-point update M_b <- L^(-1/2) R_b M_b R_b L^(-1/2)
    with L = sum_b R_b M_b R_b, started from the uniform POVM.  The R_b may
    be indefinite; a common multiple of the identity is subtracted first,
    which shifts the objective by a constant without moving the maximizer.
    The certificate residual is the worst dual-feasibility violation of
    Y = herm(sum_b M_b R_b); zero certifies a global optimum.
    """
    R = [np.asarray(m, dtype=complex) for m in R]
    n = len(R)
    if n == 0:
        raise ValueError("need at least one objective operator")
    dim = R[0].shape[0]
    for m in R:
        if m.shape != (dim, dim):
            raise ValueError("objective operators must share one square shape")
        if not is_hermitian(m, 1e-9):
            raise ValueError("objective operators must be Hermitian")

    low = min(np.linalg.eigvalsh(herm(m)).min() for m in R)
    shift = -low if low < 0 else 0.0
    Rs = [herm(m) + shift * np.eye(dim) for m in R]

    eye = np.eye(dim)
    M = [eye / n for _ in range(n)]
    ridge = 1e-12 * dim

    def objective(mats):
        return float(sum(np.trace(mats[b] @ R[b]).real for b in range(n)))

    value = objective(M)
    iterations = 0
    for iterations in range(1, max_iters + 1):
        lam = sum(Rs[b] @ M[b] @ Rs[b] for b in range(n))
        x = inv_sqrt_psd(lam, ridge)
        new = [x @ Rs[b] @ M[b] @ Rs[b] @ x for b in range(n)]
        deficit = eye - sum(new)
        new = [herm(m + deficit / n) for m in new]
        new_value = objective(new)
        if new_value < value - max(tol, 1e-12):
            raise NumericalBreakdownError(
                f"measurement fixed point decreased the objective by {value - new_value:.3e}"
            )
        M = new
        improved = new_value - value
        value = new_value
        if improved < tol:
            break

    Y = herm(sum(M[b] @ R[b] for b in range(n)))
    worst = min(np.linalg.eigvalsh(herm(Y - R[b])).min() for b in range(n))
    residual = max(0.0, -float(worst))
    return BestResponse(Povm(M), value, residual, iterations)


def bell_operator(f: BellFunctional, A: MeasurementSet, B: MeasurementSet) -> np.ndarray:
    """sum_{x,y} p(x,y) sum_terms c * sum_a A_a^x (x) B_(F-a)^y."""
    d = f.scenario.d
    G = np.zeros((A.dim * B.dim, A.dim * B.dim), dtype=complex)
    for t in f.terms:
        w = f.scenario.p[t.x, t.y] * t.c
        if w == 0.0:
            continue
        for a in range(d):
            G += w * np.kron(A[t.x][a], B[t.y][(t.F - a) % d])
    return G


def _alice_effective_operators(f, B, rho_mat, DA, DB):
    """R_a^x = Tr_B[(I (x) W_a^x) rho] with W_a^x collecting Bob's side."""
    d = f.scenario.d
    out = []
    for x in range(f.scenario.mA):
        Ws = [np.zeros((DB, DB), dtype=complex) for _ in range(d)]
        for t in f.terms:
            if t.x != x:
                continue
            w = f.scenario.p[x, t.y] * t.c
            for a in range(d):
                Ws[a] += w * B[t.y][(t.F - a) % d]
        Rs = [
            partial_trace(np.kron(np.eye(DA), Ws[a]) @ rho_mat, (DA, DB), keep=0)
            for a in range(d)
        ]
        out.append([herm(r) for r in Rs])
    return out


def _bob_effective_operators(f, A, rho_mat, DA, DB):
    d = f.scenario.d
    out = []
    for y in range(f.scenario.mB):
        Vs = [np.zeros((DA, DA), dtype=complex) for _ in range(d)]
        for t in f.terms:
            if t.y != y:
                continue
            w = f.scenario.p[t.x, y] * t.c
            for b in range(d):
                Vs[b] += w * A[t.x][(t.F - b) % d]
        Rs = [
            partial_trace(np.kron(Vs[b], np.eye(DB)) @ rho_mat, (DA, DB), keep=1)
            for b in range(d)
        ]
        out.append([herm(r) for r in Rs])
    return out


@dataclass(frozen=True)
class SeesawResult:
    value: float
    rho: DensityMatrix
    A: MeasurementSet
    B: MeasurementSet
    converged: bool
    restart: int
    history: tuple[float, ...]


def _seesaw_bell_single(f, DA, DB, tol, max_iters, rng):
    d = f.scenario.d
    A = MeasurementSet([random_basis_pvm(DA, d, rng) for _ in range(f.scenario.mA)])
    B = MeasurementSet([random_basis_pvm(DB, d, rng) for _ in range(f.scenario.mB)])
    rho_mat = None
    history = []
    value = -np.inf
    converged = False
    for _ in range(max_iters):
        G = bell_operator(f, A, B)
        top, vec = top_eigenvector(G)
        rho_mat = projector(vec)

        for x, Rs in enumerate(_alice_effective_operators(f, B, rho_mat, DA, DB)):
            current = sum(np.trace(A[x][a] @ Rs[a]).real for a in range(d))
            resp = measurement_best_response(Rs, tol=min(tol, 1e-12), max_iters=200)
            if resp.value >= current:
                A = MeasurementSet([resp.povm if xx == x else A[xx] for xx in range(f.scenario.mA)])
        for y, Rs in enumerate(_bob_effective_operators(f, A, rho_mat, DA, DB)):
            current = sum(np.trace(B[y][b] @ Rs[b]).real for b in range(d))
            resp = measurement_best_response(Rs, tol=min(tol, 1e-12), max_iters=200)
            if resp.value >= current:
                B = MeasurementSet([resp.povm if yy == y else B[yy] for yy in range(f.scenario.mB)])

        new_value = float(np.trace(bell_operator(f, A, B) @ rho_mat).real)
        history.append(new_value)
        if new_value - value < tol and np.isfinite(value):
            value = max(value, new_value)
            converged = True
            break
        value = max(value, new_value)
    return SeesawResult(
        value, DensityMatrix(rho_mat), A, B, converged, -1, tuple(history)
    )


def seesaw_bell(
    f: BellFunctional,
    DA: int,
    DB: int,
    restarts: int = 10,
    tol: float = 1e-10,
    seed: int = 0,
    max_iters: int = 300,
    threads: int = 1,
) -> SeesawResult:
    """Best found quantum value of a Bell functional with local dimensions
    DA, DB (a lower bound on the true maximum).

    Restarts are seeded independently and reduced deterministically: the
    best value wins, ties going to the lowest restart index.
    """
    require_valid(f)
    if restarts < 1:
        raise ValueError("need at least one restart")
    if DB < f.scenario.d:
        warnings.warn(
            f"DB = {DB} is below the outcome count d = {f.scenario.d}; "
            "preparation constructions require DB = d",
            stacklevel=2,
        )
    children = np.random.SeedSequence(seed).spawn(restarts)

    def run(k):
        rng = np.random.default_rng(children[k])
        res = _seesaw_bell_single(f, DA, DB, tol, max_iters, rng)
        return SeesawResult(res.value, res.rho, res.A, res.B, res.converged, k, res.history)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(k) for k in range(restarts)]
    return max(results, key=lambda r: (r.value, -r.restart))


@dataclass(frozen=True)
class MarginalReport:
    passed: bool
    worst_deviation: float
    table: np.ndarray  # p(a|x)


def check_uniform_marginals(rho: DensityMatrix, A: MeasurementSet, tol: float) -> MarginalReport:
    """Check that every Alice setting yields uniform outcomes on rho."""
    DA = A.dim
    if rho.dim % DA != 0:
        raise DimensionMismatchError(f"state dimension {rho.dim} not divisible by {DA}")
    DB = rho.dim // DA
    rho_A = partial_trace(rho.mat, (DA, DB), keep=0)
    d = A.outcomes
    table = np.empty((d, A.settings))
    for x in range(A.settings):
        for a in range(d):
            table[a, x] = np.trace(A[x][a] @ rho_A).real
    worst = float(np.max(np.abs(table - 1.0 / d)))
    return MarginalReport(worst <= tol, worst, table)
