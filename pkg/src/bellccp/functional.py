"""Bell functionals with modular-sum success events, and their evaluation.

A functional here is a weighted sum of probabilities of events of the form
``a + b = F (mod d)``, one event per table entry, evaluated on a behavior
P(a,b|x,y).  Everything is double precision; tables are numpy arrays frozen
after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from .errors import DimensionMismatchError, InvalidFunctionalError, NumericalBreakdownError

# Rule identifiers used in validation reports (and asserted on by tests).
RULE_SCENARIO = "scenario-shape"
RULE_P_NEGATIVE = "p-negative"
RULE_P_NORMALIZATION = "p-unnormalized"
RULE_INDEX_RANGE = "index-out-of-range"
RULE_F_RANGE = "f-out-of-range"
RULE_DUPLICATE_TERM = "duplicate-term"
RULE_F_COLLISION = "f-range-collision"
RULE_CAPACITY = "capacity-bound"

P_NORMALIZATION_TOL = 1e-12
BEHAVIOR_TOL = 1e-10
CORRELATOR_TOL = 1e-9
IMAG_RESIDUAL_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Scenario:
    """Measurement scenario: d outcomes, mA x mB settings, setting weights p(x,y).

    Construction only checks shapes; semantic constraints (nonnegative,
    normalized p, d >= 2) are reported by :func:`validate` so that broken
    input files can be diagnosed rather than rejected wholesale.
    """

    d: int
    mA: int
    mB: int
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (self.mA, self.mB):
            raise ValueError(f"p has shape {p.shape}, expected ({self.mA}, {self.mB})")
        object.__setattr__(self, "p", _frozen(p))

    def same_shape(self, other: "Scenario") -> bool:
        return (self.d, self.mA, self.mB) == (other.d, other.mA, other.mB)


class Term(NamedTuple):
    """One table entry: settings (x, y), block index i (1-based), level k
    (0-based), success residue F in 0..d-1, payoff coefficient c."""

    x: int
    y: int
    i: int
    k: int
    F: int
    c: float


@dataclass(frozen=True)
class BellFunctional:
    """Sparse term table over a scenario.

    ``N`` (number of blocks) and ``K`` (maximal level) are derived from the
    terms when not given explicitly; the class stores whatever it is given
    and leaves consistency checks to :func:`validate`.
    """

    scenario: Scenario
    terms: tuple[Term, ...]
    N: Optional[int] = None
    K: Optional[int] = None

    def __post_init__(self):
        terms = tuple(Term(*t) for t in self.terms)
        object.__setattr__(self, "terms", terms)
        if self.N is None:
            object.__setattr__(self, "N", max((t.i for t in terms), default=0))
        if self.K is None:
            object.__setattr__(self, "K", max((t.k for t in terms), default=0))

    @cached_property
    def coefficient_table(self) -> np.ndarray:
        """T[x, y, z] = sum of coefficients of terms at (x, y) with F == z.

        Only meaningful for valid functionals (in-range indices); operations
        call :func:`require_valid` before using it.
        """
        s = self.scenario
        table = np.zeros((s.mA, s.mB, s.d))
        for t in self.terms:
            table[t.x, t.y, t.F] += t.c
        table.setflags(write=False)
        return table


@dataclass(frozen=True)
class Violation:
    """One validation failure: rule identifier, offending location, detail."""

    rule: str
    where: tuple = ()
    detail: str = ""

    def __str__(self):
        loc = ""
        if self.where:
            loc = " at (" + ", ".join(str(w) for w in self.where) + ")"
        return f"{self.rule}{loc}: {self.detail}"


def validate(f: BellFunctional) -> list[Violation]:
    """Check all structural invariants; return a report (empty iff valid).

    Violations are data, not exceptions: a broken functional loaded from a
    file should produce a readable report naming each offending term.
    """
    out: list[Violation] = []
    s = f.scenario
    if s.d < 2 or s.mA < 1 or s.mB < 1:
        out.append(Violation(RULE_SCENARIO, (s.d, s.mA, s.mB), "need d >= 2, mA >= 1, mB >= 1"))
    if np.any(s.p < 0):
        xs, ys = np.nonzero(s.p < 0)
        for x, y in zip(xs, ys):
            out.append(Violation(RULE_P_NEGATIVE, (int(x), int(y)), f"p = {s.p[x, y]}"))
    total = float(s.p.sum())
    if abs(total - 1.0) > P_NORMALIZATION_TOL:
        out.append(Violation(RULE_P_NORMALIZATION, (), f"sum p = {total!r}, expected 1"))

    if (f.K + 1) * f.N > s.d:
        out.append(
            Violation(RULE_CAPACITY, (f.N, f.K), f"(K+1)*N = {(f.K + 1) * f.N} exceeds d = {s.d}")
        )

    seen: dict[tuple, Term] = {}
    residues: dict[tuple, list[Term]] = {}
    for t in f.terms:
        if not (0 <= t.x < s.mA and 0 <= t.y < s.mB and 1 <= t.i <= f.N and 0 <= t.k <= f.K):
            out.append(
                Violation(
                    RULE_INDEX_RANGE,
                    (t.x, t.y, t.i, t.k),
                    f"indices outside mA={s.mA}, mB={s.mB}, i in 1..{f.N}, k in 0..{f.K}",
                )
            )
            continue
        if not 0 <= t.F < s.d:
            out.append(Violation(RULE_F_RANGE, (t.x, t.y, t.i, t.k), f"F = {t.F} not in 0..{s.d - 1}"))
            continue
        key = (t.x, t.y, t.i, t.k)
        if key in seen:
            out.append(Violation(RULE_DUPLICATE_TERM, key, "second coefficient for this (x, y, i, k)"))
            continue
        seen[key] = t
        clash = residues.setdefault((t.x, t.y, t.F), [])
        if clash:
            o = clash[0]
            out.append(
                Violation(
                    RULE_F_COLLISION,
                    (t.x, t.y, t.i, t.k),
                    f"F = {t.F} already used by block (i={o.i}, k={o.k}) at the same settings",
                )
            )
        clash.append(t)
    return out


def require_valid(f: BellFunctional) -> None:
    violations = validate(f)
    if violations:
        raise InvalidFunctionalError(violations)


@dataclass(frozen=True)
class Behavior:
    """Conditional outcome table P[a, b, x, y], normalized per setting pair."""

    scenario: Scenario
    P: np.ndarray

    def __post_init__(self):
        s = self.scenario
        P = np.asarray(self.P, dtype=float)
        if P.shape != (s.d, s.d, s.mA, s.mB):
            raise ValueError(f"P has shape {P.shape}, expected {(s.d, s.d, s.mA, s.mB)}")
        if P.min() < -BEHAVIOR_TOL:
            raise ValueError(f"negative probability {P.min()!r} in behavior")
        sums = P.sum(axis=(0, 1))
        if np.max(np.abs(sums - 1.0)) > BEHAVIOR_TOL:
            raise ValueError("behavior not normalized per setting pair")
        object.__setattr__(self, "P", _frozen(np.clip(P, 0.0, None)))

    @cached_property
    def sum_distribution(self) -> np.ndarray:
        """S[z, x, y] = P(a + b = z mod d | x, y)."""
        d = self.scenario.d
        a = np.arange(d)
        z = np.arange(d)
        b_index = (z[None, :] - a[:, None]) % d  # shape (a, z)
        S = np.zeros((d, self.scenario.mA, self.scenario.mB))
        for aa in range(d):
            S += self.P[aa, b_index[aa], :, :]
        S.setflags(write=False)
        return S


@dataclass(frozen=True)
class CorrelatorTable:
    """Fourier side of a behavior: E[l, x, y] = <omega^(l(a+b))> at settings (x, y)."""

    d: int
    mA: int
    mB: int
    E: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.E, dtype=complex)
        if E.shape != (self.d, self.mA, self.mB):
            raise ValueError(f"E has shape {E.shape}, expected {(self.d, self.mA, self.mB)}")
        if np.max(np.abs(E[0] - 1.0)) > CORRELATOR_TOL:
            raise ValueError("E(0|x,y) must equal 1 for a normalized behavior")
        if np.max(np.abs(E)) > 1.0 + CORRELATOR_TOL:
            raise ValueError("correlator modulus exceeds 1")
        object.__setattr__(self, "E", _frozen(E))


def omega(d: int) -> complex:
    """Primitive d-th root of unity exp(2*pi*i/d)."""
    return np.exp(2j * np.pi / d)


def _check_same_scenario(f: BellFunctional, beh: Behavior) -> None:
    if not f.scenario.same_shape(beh.scenario):
        raise DimensionMismatchError(
            f"functional scenario (d={f.scenario.d}, mA={f.scenario.mA}, mB={f.scenario.mB}) "
            f"!= behavior scenario (d={beh.scenario.d}, mA={beh.scenario.mA}, mB={beh.scenario.mB})"
        )


def evaluate_bell(f: BellFunctional, beh: Behavior) -> float:
    """Value of the functional on a behavior:
    sum_{x,y} p(x,y) sum_terms c * P(a + b = F mod d | x, y)."""
    require_valid(f)
    _check_same_scenario(f, beh)
    S = beh.sum_distribution  # (d, mA, mB)
    T = f.coefficient_table  # (mA, mB, d)
    return float(np.einsum("xy,xyz,zxy->", f.scenario.p, T, S))


def correlators(beh: Behavior) -> CorrelatorTable:
    """Discrete Fourier transform of the a+b distribution,
    E(l|x,y) = sum_z omega^(l z) P(a + b = z | x, y)."""
    d = beh.scenario.d
    lz = np.outer(np.arange(d), np.arange(d))
    dft = omega(d) ** lz  # dft[l, z] = omega^(l*z)
    E = np.einsum("lz,zxy->lxy", dft, beh.sum_distribution)
    return CorrelatorTable(d, beh.scenario.mA, beh.scenario.mB, E)


def inverse_correlators(table: CorrelatorTable) -> np.ndarray:
    """Inverse transform: S[z, x, y] = (1/d) sum_l omega^(-l z) E(l|x,y)."""
    d = table.d
    lz = np.outer(np.arange(d), np.arange(d))
    idft = omega(d) ** (-lz) / d
    S = np.einsum("zl,lxy->zxy", idft.T, table.E)
    return S.real


def evaluate_bell_correlator(f: BellFunctional, table: CorrelatorTable) -> float:
    """Value of the functional computed on the Fourier side.

    Equals :func:`evaluate_bell` on the behavior that produced the table.
    The imaginary residual must vanish for genuine correlator tables; a
    large residual means the table was corrupted.
    """
    require_valid(f)
    s = f.scenario
    if (table.d, table.mA, table.mB) != (s.d, s.mA, s.mB):
        raise DimensionMismatchError("correlator table does not match the functional's scenario")
    d = s.d
    w = omega(d)
    # phases[x, y, l] = sum_terms c * omega^(-l F)
    zl = np.outer(np.arange(d), np.arange(d))
    phases = np.einsum("xyz,zl->xyl", f.coefficient_table, w ** (-zl))
    total = np.einsum("xy,xyl,lxy->", s.p / d, phases, table.E)
    if abs(total.imag) > IMAG_RESIDUAL_TOL:
        raise NumericalBreakdownError(
            f"imaginary residual {total.imag:.3e} in correlator evaluation; table is corrupted"
        )
    return float(total.real)


def uniform_behavior(scenario: Scenario) -> Behavior:
    d = scenario.d
    P = np.full((d, d, scenario.mA, scenario.mB), 1.0 / (d * d))
    return Behavior(scenario, P)


def deterministic_behavior(scenario: Scenario, aOf, bOf) -> Behavior:
    """Behavior of fixed local assignments a(x), b(y)."""
    d = scenario.d
    P = np.zeros((d, d, scenario.mA, scenario.mB))
    for x in range(scenario.mA):
        for y in range(scenario.mB):
            P[aOf[x] % d, bOf[y] % d, x, y] = 1.0
    return Behavior(scenario, P)
