"""Spectra of the unperturbed evolution and the rank-N kick machinery.

A base spectrum is the phase polynomial of one evolution period: basis state
n picks up the phase 2*pi*(beta_0 + beta_1 n + ... + beta_p n**p) * T, with
the coefficients beta_j stored as exact rationals in *turn* units (cycles per
n**j).  The eigenphase sequence

    theta_n = 2*pi * { alpha_n T / (2*pi*hbar) },   alpha_n = 2*pi*hbar*sum_j beta_j n**j

is therefore reduced mod 1 in integer arithmetic before any float appears.

The kick side: power-law states a_n proportional to n**(-gamma) (the
square-summable but not summable regime 1/2 < gamma <= 1), orthonormal
ensembles over interleaved index classes, the divergence diagnostic
B^-1(x) = sum |a_n|^2 / sin^2((x - theta_n)/2), the point-mass formula, and
the cotangent secular condition whose roots are the kicked eigenphases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.special import zeta as _hurwitz_zeta

from .errors import EnsembleError, PoleError, TrivialPerturbationError
from .rationals import Real, as_fraction, polynomial_fractional_parts

__all__ = [
    "BaseSpectrum",
    "ThetaSequence",
    "KickState",
    "KickEnsemble",
    "Divergent",
    "GammaWindow",
    "alpha_sequence",
    "theta_sequence",
    "power_law_state",
    "full_support_state",
    "orthonormal_ensemble",
    "b_inverse_partial",
    "b_inverse_per_kick",
    "point_mass",
    "cotangent_residual",
    "gamma_window",
    "circle_distance",
]

TWO_PI = 2.0 * math.pi
NORM_TOL = 1e-12
POLE_TOL = 1e-12


@dataclass(frozen=True)
class BaseSpectrum:
    """Polynomial eigenvalue law of the unkicked evolution.

    ``beta[j]`` is the coefficient of n**j in turns, so
    alpha_n = 2*pi*hbar * sum_j beta[j] * n**j.  ``period`` is the kick
    period T entering the one-period phase alpha_n * T / hbar; it defaults
    to 1 so theta_n = 2*pi*{alpha_n / (2*pi*hbar)} with no hidden constant.
    """

    beta: tuple[Fraction, ...]
    hbar: float = 1.0
    period: Fraction = Fraction(1)

    def __post_init__(self):
        coeffs = tuple(as_fraction(b) for b in self.beta)
        if len(coeffs) < 2:
            raise ValueError("need a polynomial of degree >= 1 (beta_0, beta_1, ...)")
        if all(c == 0 for c in coeffs[1:]):
            raise ValueError("at least one coefficient beta_j with j >= 1 must be nonzero")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        period = as_fraction(self.period)
        if period <= 0:
            raise ValueError("period must be positive")
        object.__setattr__(self, "beta", coeffs)
        object.__setattr__(self, "period", period)

    @classmethod
    def harmonic(cls, frequency: Real, hbar: float = 1.0,
                 period: Real = 1) -> "BaseSpectrum":
        """Linear law alpha_n = 2*pi*hbar*frequency*n (frequency in turns)."""
        return cls(beta=(Fraction(0), as_fraction(frequency)), hbar=hbar,
                   period=as_fraction(period))

    @classmethod
    def from_radians(cls, coefficients: Sequence[float], hbar: float = 1.0,
                     period: Real = 1) -> "BaseSpectrum":
        """Build from float coefficients given in radians per n**j."""
        return cls(beta=tuple(Fraction(float(c)) / Fraction(TWO_PI)
                              for c in coefficients),
                   hbar=hbar, period=as_fraction(period))

    @property
    def degree(self) -> int:
        return len(self.beta) - 1


def alpha_sequence(spec: BaseSpectrum, n_terms: int) -> np.ndarray:
    """Eigenvalues alpha_n = 2*pi*hbar*sum_j beta_j n**j for n = 0..n_terms-1."""
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    out = np.empty(n_terms, dtype=np.float64)
    scale = TWO_PI * spec.hbar
    for n in range(n_terms):
        acc = Fraction(0)
        power = 1
        for c in spec.beta:
            acc += c * power
            power *= n
        out[n] = scale * float(acc)
    return out


@dataclass(frozen=True)
class ThetaSequence:
    """Eigenphases theta_n in [0, 2*pi) of one unkicked period.

    ``unit_values`` are the same phases divided by 2*pi, i.e. the point set in
    [0, 1) whose equidistribution the counting arguments live on.
    """

    unit_values: np.ndarray
    source: BaseSpectrum

    def __post_init__(self):
        unit = np.asarray(self.unit_values, dtype=np.float64)
        unit.setflags(write=False)
        values = TWO_PI * unit
        values.setflags(write=False)
        object.__setattr__(self, "unit_values", unit)
        object.__setattr__(self, "_values", values)

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self) -> int:
        return int(self.unit_values.size)


def theta_sequence(spec: BaseSpectrum, n_terms: int) -> ThetaSequence:
    """theta_n = 2*pi*{alpha_n T / (2*pi*hbar)} for n = 0..n_terms-1.

    hbar cancels out of the reduction, which runs on exact rationals
    period * beta_j; the single rounding step is the final drop onto the
    2**-53 grid.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    coeffs = [spec.period * b for b in spec.beta]
    unit = polynomial_fractional_parts(coeffs, n_terms, start=0)
    return ThetaSequence(unit_values=unit, source=spec)


def circle_distance(x: float, angles: np.ndarray) -> np.ndarray:
    """Distance on the circle of circumference 2*pi, in [0, pi]."""
    d = np.abs(np.asarray(angles, dtype=np.float64) - x) % TWO_PI
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True)
class KickState:
    """One kick vector as coefficients over the basis of the base spectrum."""

    coefficients: np.ndarray
    gamma: float | None = None
    support: tuple[int, ...] = ()
    lost_tail: float = 0.0

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coefficients must be a nonempty vector")
        support = self.support or tuple(int(i) for i in np.nonzero(coeffs)[0])
        if not support:
            raise ValueError("kick state has empty support")
        norm_sq = float(np.sum(np.abs(coeffs) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state norm**2 = {norm_sq} deviates from 1 "
                             f"beyond {NORM_TOL}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "support", tuple(support))

    @property
    def dim(self) -> int:
        return int(self.coefficients.size)

    def weights(self) -> np.ndarray:
        """|a_n|**2 as a real vector."""
        return np.abs(self.coefficients) ** 2


def _progression_tail(support: Sequence[int], gamma: float) -> float:
    """Unnormalised weight sum n**(-2*gamma) over the continuation of an
    arithmetic-progression support; zero when no progression is apparent."""
    if len(support) < 2:
        return 0.0
    gaps = np.diff(np.asarray(support))
    if np.any(gaps != gaps[0]):
        return 0.0
    stride = int(gaps[0])
    nxt = support[-1] + stride
    return float(stride ** (-2 * gamma) * _hurwitz_zeta(2 * gamma, nxt / stride))


def power_law_state(gamma: float, dim: int,
                    support: Iterable[int] | None = None) -> KickState:
    """Normalised state with a_n = C * n**(-gamma) on the support, 0 elsewhere.

    Requires 1/2 < gamma <= 1: square-summable so C exists, but not summable,
    which is the regime where the kicked operator can grow a continuous
    spectral component.  Index 0 is excluded (n**(-gamma) is undefined there).
    The weight of the discarded power-law tail beyond the truncation is
    recorded unnormalised in ``lost_tail``.
    """
    if not 0.5 < gamma <= 1.0:
        raise ValueError(f"gamma = {gamma} outside the divergent regime (1/2, 1]")
    if dim < 2:
        raise ValueError("dim must be at least 2")
    if support is None:
        indices = tuple(range(1, dim))
    else:
        indices = tuple(sorted(int(i) for i in support))
        if not indices:
            raise ValueError("support must be nonempty")
        if indices[0] < 1 or indices[-1] >= dim:
            raise ValueError("support must lie inside {1, ..., dim-1}")
        if len(set(indices)) != len(indices):
            raise ValueError("support has repeated indices")
    idx = np.asarray(indices)
    raw = idx.astype(np.float64) ** (-gamma)
    norm = 1.0 / math.sqrt(float(np.sum(raw**2)))
    coeffs = np.zeros(dim, dtype=np.complex128)
    coeffs[idx] = norm * raw
    return KickState(coefficients=coeffs, gamma=gamma, support=indices,
                     lost_tail=_progression_tail(indices, gamma))


def full_support_state(gamma: float, dim: int) -> KickState:
    """Shifted power law a_n = C * (n+1)**(-gamma) with no zero coefficient.

    power_law_state leaves a_0 = 0, so the kicked operator keeps the bare
    eigenphase theta_0 and the secular identity cannot cover the whole
    spectrum.  This variant weights every basis state, which is what the
    all-eigenphase cotangent checks need.
    """
    if not 0.5 < gamma <= 1.0:
        raise ValueError(f"gamma = {gamma} outside the divergent regime (1/2, 1]")
    if dim < 2:
        raise ValueError("dim must be at least 2")
    raw = (np.arange(dim) + 1.0) ** (-gamma)
    raw /= math.sqrt(float(np.sum(raw**2)))
    return KickState(coefficients=raw.astype(np.complex128), gamma=gamma,
                     support=tuple(range(dim)),
                     lost_tail=float(_hurwitz_zeta(2 * gamma, dim + 1)))


@dataclass(frozen=True)
class KickEnsemble:
    """Orthonormal kick states with their strengths lambda_k (action units)."""

    states: tuple[KickState, ...]
    strengths: tuple[float, ...]

    def __post_init__(self):
        states = tuple(self.states)
        strengths = tuple(float(s) for s in self.strengths)
        if len(states) != len(strengths):
            raise EnsembleError("need exactly one strength per state")
        dims = {s.dim for s in states}
        if len(dims) > 1:
            raise EnsembleError("kick states live in different dimensions")
        for k in range(len(states)):
            for l in range(k + 1, len(states)):
                overlap = abs(np.vdot(states[k].coefficients,
                                      states[l].coefficients))
                if overlap > NORM_TOL:
                    raise EnsembleError(
                        f"states {k} and {l} overlap by {overlap:.3e}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "strengths", strengths)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim if self.states else 0


def orthonormal_ensemble(gamma: float, n_states: int, dim: int,
                         strengths: Sequence[float]) -> KickEnsemble:
    """Power-law states on interleaved index classes n = k+1 (mod n_states).

    Disjoint supports make the Gram matrix exactly the identity while each
    state stays an exact power law on its own class.
    """
    if n_states < 1:
        raise ValueError("n_states must be positive")
    if n_states > dim - 1:
        raise EnsembleError(f"dim = {dim} too small for {n_states} "
                            "disjoint supports in {1, ..., dim-1}")
    if len(strengths) != n_states:
        raise EnsembleError("need exactly one strength per state")
    states = []
    for k in range(n_states):
        support = range(k + 1, dim, n_states)
        states.append(power_law_state(gamma, dim, support))
    return KickEnsemble(states=tuple(states), strengths=tuple(strengths))


@dataclass(frozen=True)
class Divergent:
    """Marker for a diverging partial sum: x hit the eigenphase at pole_index
    with nonzero coefficient, so B(x) = 0 and the point carries no mass."""

    pole_index: int


def b_inverse_partial(x: float, state: KickState, theta: ThetaSequence,
                      n_terms: int, pole_tol: float = POLE_TOL):
    """Partial sum of B^-1(x) = sum_n |a_n|^2 / sin^2((x - theta_n)/2).

    Nondecreasing in n_terms.  Returns a Divergent marker instead of a float
    when x coincides with some theta_n carrying nonzero weight (distance on
    the circle below pole_tol); zero-weight terms never contribute and never
    make a pole.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    if n_terms > min(state.dim, len(theta)):
        raise ValueError("n_terms exceeds the available state or phase length")
    w = state.weights()[:n_terms]
    mask = w > 0.0
    d = circle_distance(x, theta.values[:n_terms])
    hits = np.nonzero(mask & (d < pole_tol))[0]
    if hits.size:
        return Divergent(pole_index=int(hits[0]))
    s = np.sin(0.5 * d[mask])
    return float(np.sum(w[mask] / (s * s)))


def b_inverse_per_kick(x: float, ensemble: KickEnsemble, theta: ThetaSequence,
                       n_terms: int, pole_tol: float = POLE_TOL):
    """Per-state partial sums of B_k^-1(x) and their product.

    e^{ix} keeps a point mass only while every factor stays finite, so the
    product is reported alongside the individual factors; if any factor
    diverges the product is the same Divergent marker.
    """
    per_k = tuple(b_inverse_partial(x, state, theta, n_terms, pole_tol)
                  for state in ensemble.states)
    product: float | Divergent = 1.0
    for value in per_k:
        if isinstance(value, Divergent):
            product = value
            break
        product *= value
    return per_k, product


def point_mass(x: float, lambda_over_hbar: float, b_inverse) -> float:
    """Spectral point mass at e^{ix} from the partial B^-1 value.

    Equals B(x) / sin^2(lambda/(2*hbar)), the real form of the prefactor
    -4(1+mu)/mu**2 with mu = e^{i lambda/hbar} - 1.  A Divergent marker means
    B(x) = 0: the point carries no mass.
    """
    s = math.sin(0.5 * lambda_over_hbar)
    if s * s < POLE_TOL:
        raise TrivialPerturbationError(
            f"lambda/hbar = {lambda_over_hbar} is congruent to 0 mod 2*pi")
    if isinstance(b_inverse, Divergent):
        return 0.0
    if not b_inverse > 0.0:
        raise ValueError("B^-1 partial sums are positive for nonempty states")
    return (1.0 / b_inverse) / (s * s)


def cotangent_residual(x: float, state: KickState, theta: ThetaSequence,
                       lambda_over_hbar: float,
                       pole_tol: float = POLE_TOL) -> float:
    """sum_n |a_n|^2 cot((x - theta_n)/2) - cot(lambda/(2*hbar)).

    A root in x is an eigenphase of the rank-1 kicked operator built from
    this state.  Raises PoleError naming the offending index when x sits on
    an eigenphase theta_n with nonzero weight.
    """
    n_terms = min(state.dim, len(theta))
    w = state.weights()[:n_terms]
    mask = w > 0.0
    if not np.any(mask):
        raise ValueError("state carries no weight inside the phase window")
    d_circ = circle_distance(x, theta.values[:n_terms])
    hits = np.nonzero(mask & (d_circ < pole_tol))[0]
    if hits.size:
        raise PoleError(int(hits[0]))
    s_kick = math.sin(0.5 * lambda_over_hbar)
    if abs(s_kick) < pole_tol:
        raise TrivialPerturbationError(
            f"lambda/hbar = {lambda_over_hbar} is congruent to 0 mod 2*pi")
    half = 0.5 * (x - theta.values[:n_terms][mask])
    total = float(np.sum(w[mask] * (np.cos(half) / np.sin(half))))
    return total - math.cos(0.5 * lambda_over_hbar) / s_kick


@dataclass(frozen=True)
class GammaWindow:
    """Open interval of power-law exponents forcing B^-1(x) -> infinity."""

    lo: float
    hi: float

    def __contains__(self, gamma: float) -> bool:
        return self.lo < gamma < self.hi

    def __iter__(self):
        return iter((self.lo, self.hi))


def gamma_window(j: int, eta: float) -> GammaWindow:
    """(1/2, 1/2 + 1/(2*eta*j)): the exponent window for power j and type eta."""
    if j < 1:
        raise ValueError("j must be a positive integer")
    if eta < 1.0:
        raise ValueError("every irrationality type satisfies eta >= 1")
    return GammaWindow(0.5, 0.5 + 1.0 / (2.0 * eta * j))
