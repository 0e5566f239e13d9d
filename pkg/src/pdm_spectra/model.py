"""Core model data: kinetic orderings, power-law mass profiles, generators.

The Hamiltonians treated here are position-dependent-mass operators

    H = -d/dx (1/M(x)) d/dx + potential,

where the kinetic term descends from the two-parameter symmetrized ordering
with exponents (alpha, beta, gamma), alpha + beta + gamma = -1.  The mass
profiles form the one-parameter power-law class

    mu(x) = (c1*x + c2)^(1/(delta+1)),        M(x) = mu(x)^(-2),

which is exactly the class on which mu'(x) * mu(x)^delta is constant.  The
exponent delta compatible with a given ordering is

    delta = 4*alpha + 1 + 4*alpha^2 / (beta + 1),

undefined at beta = -1.  Orderings and delta values are kept as exact
rationals; profile evaluation is floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Union

import numpy as np

from .errors import (
    BadIntervalError,
    BetaMinusOneError,
    OutOfDomainError,
    OutOfRangeError,
)

__all__ = [
    "AmbiguityOrdering",
    "ORDERING_PRESETS",
    "ordering_preset",
    "delta_of",
    "ProfileValues",
    "MassProfile",
    "ConstantMass",
    "profile_eval",
    "ScarfII",
    "SamsonovRoy",
    "Morse",
    "CustomGenerator",
    "constant_generator",
    "generator_eval",
    "ModelSpec",
]


def _as_fraction(value: Union[int, float, str, Fraction]) -> Fraction:
    """Coerce to an exact rational; floats go through their decimal repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class AmbiguityOrdering:
    """Kinetic ordering exponents (alpha, beta, gamma) with sum -1.

    The exponents are stored as exact rationals so that preset comparisons
    and the derived profile exponent involve no rounding.
    """

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    name: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _as_fraction(self.alpha))
        object.__setattr__(self, "beta", _as_fraction(self.beta))
        object.__setattr__(self, "gamma", _as_fraction(self.gamma))
        total = self.alpha + self.beta + self.gamma
        if total != -1:
            raise ValueError(
                f"ordering exponents must sum to -1, got {total} "
                f"from ({self.alpha}, {self.beta}, {self.gamma})"
            )

    def __str__(self) -> str:
        label = self.name or "AmbiguityOrdering"
        return f"{label}(alpha={self.alpha}, beta={self.beta}, gamma={self.gamma})"


ORDERING_PRESETS: dict[str, AmbiguityOrdering] = {
    "GoraWilliams": AmbiguityOrdering(Fraction(-1), Fraction(0), Fraction(0), "GoraWilliams"),
    "BenDanielDuke": AmbiguityOrdering(Fraction(0), Fraction(-1), Fraction(0), "BenDanielDuke"),
    "ZhuKroemer": AmbiguityOrdering(Fraction(-1, 2), Fraction(0), Fraction(-1, 2), "ZhuKroemer"),
    "LiKuhn": AmbiguityOrdering(Fraction(0), Fraction(-1, 2), Fraction(-1, 2), "LiKuhn"),
    "MustafaMazharimousavi": AmbiguityOrdering(
        Fraction(-1, 4), Fraction(-1, 2), Fraction(-1, 4), "MustafaMazharimousavi"
    ),
}


def ordering_preset(name: str) -> AmbiguityOrdering:
    """Return one of the named literature orderings."""
    try:
        return ORDERING_PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(ORDERING_PRESETS))
        raise ValueError(f"unknown ordering preset {name!r}; known presets: {known}") from None


def delta_of(ordering: AmbiguityOrdering) -> Fraction:
    """Profile exponent delta = 4a + 1 + 4a^2/(b+1) compatible with `ordering`.

    Raises
    ------
    BetaMinusOneError
        If the ordering has beta = -1 (BenDanielDuke), where the exponent
        formula degenerates and no power-law profile is singled out.
    """
    a, b = ordering.alpha, ordering.beta
    if b == -1:
        raise BetaMinusOneError(
            f"delta is undefined for beta = -1 (ordering {ordering.name or ordering})"
        )
    return 4 * a + 1 + 4 * a * a / (b + 1)


class ProfileValues(NamedTuple):
    """Pointwise profile data: mu, mu', mu'' and the mass M = mu^-2."""

    mu: np.ndarray | float
    mu_prime: np.ndarray | float
    mu_second: np.ndarray | float
    mass: np.ndarray | float


def _prepare(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _maybe_item(value: np.ndarray, scalar: bool):
    return value.item() if scalar else value


@dataclass(frozen=True)
class MassProfile:
    """Power-law profile mu(x) = (c1*x + c2)^(1/(delta+1)) on c1*x + c2 > 0."""

    c1: float
    c2: float
    delta: float

    def __post_init__(self) -> None:
        if self.c1 == 0.0:
            raise ValueError("c1 must be nonzero; use ConstantMass for a flat profile")
        if self.delta == -1.0:
            raise ValueError("delta = -1 makes the profile exponent 1/(delta+1) undefined")

    @property
    def singularity(self) -> float:
        """Position of the mass singularity, where c1*x + c2 = 0."""
        return -self.c2 / self.c1

    def _argument(self, x: np.ndarray) -> np.ndarray:
        u = self.c1 * x + self.c2
        if np.any(u <= 0.0):
            raise OutOfDomainError(
                f"position outside profile domain: need c1*x + c2 > 0 "
                f"(c1={self.c1}, c2={self.c2})"
            )
        return u

    def eval(self, x) -> ProfileValues:
        """Evaluate mu, mu', mu'' and M at `x` (scalar or array).

        Raises OutOfDomainError when any point has c1*x + c2 <= 0.
        """
        arr, scalar = _prepare(x)
        u = self._argument(arr)
        p = 1.0 / (self.delta + 1.0)
        mu = u**p
        mu1 = self.c1 * p * u ** (p - 1.0)
        mu2 = self.c1 * self.c1 * p * (p - 1.0) * u ** (p - 2.0)
        mass = u ** (-2.0 * p)
        return ProfileValues(
            _maybe_item(mu, scalar),
            _maybe_item(mu1, scalar),
            _maybe_item(mu2, scalar),
            _maybe_item(mass, scalar),
        )

    def mass_derivatives(self, x):
        """Return (M, M', M'') at `x`; used by the ordered-kinetic expansion."""
        arr, scalar = _prepare(x)
        u = self._argument(arr)
        e = -2.0 / (self.delta + 1.0)
        m = u**e
        m1 = self.c1 * e * u ** (e - 1.0)
        m2 = self.c1 * self.c1 * e * (e - 1.0) * u ** (e - 2.0)
        return _maybe_item(m, scalar), _maybe_item(m1, scalar), _maybe_item(m2, scalar)

    def mass_power(self, x, exponent: float):
        """M(x)**exponent evaluated directly on the profile argument."""
        arr, scalar = _prepare(x)
        u = self._argument(arr)
        return _maybe_item(u ** (-2.0 * float(exponent) / (self.delta + 1.0)), scalar)

    # Change of variables q(x) = integral of 1/mu.  Closed forms:
    #   delta != 0:  q = (delta+1)/(delta*c1) * (c1*x + c2)^(delta/(delta+1))
    #   delta == 0:  q = log(c1*x + c2)/c1
    def q_from_x(self, x):
        arr, scalar = _prepare(x)
        u = self._argument(arr)
        d = self.delta
        if d == 0.0:
            q = np.log(u) / self.c1
        else:
            q = (d + 1.0) / (d * self.c1) * u ** (d / (d + 1.0))
        return _maybe_item(q, scalar)

    def x_from_q(self, q):
        arr, scalar = _prepare(q)
        d = self.delta
        if d == 0.0:
            u = np.exp(self.c1 * arr)
        else:
            s = arr * d * self.c1 / (d + 1.0)
            if np.any(s <= 0.0):
                raise OutOfRangeError(
                    f"q value not attained by the map for delta={d}, c1={self.c1} "
                    "(the image of q is a half-line)"
                )
            u = s ** ((d + 1.0) / d)
        return _maybe_item((u - self.c2) / self.c1, scalar)

    def __str__(self) -> str:
        return f"MassProfile(c1={self.c1:g}, c2={self.c2:g}, delta={self.delta:g})"


@dataclass(frozen=True)
class ConstantMass:
    """Flat profile mu = M = 1; the change of variables is the identity."""

    def eval(self, x) -> ProfileValues:
        arr, scalar = _prepare(x)
        one = np.ones_like(arr)
        zero = np.zeros_like(arr)
        return ProfileValues(
            _maybe_item(one, scalar),
            _maybe_item(zero, scalar),
            _maybe_item(zero, scalar),
            _maybe_item(one.copy(), scalar),
        )

    def mass_derivatives(self, x):
        arr, scalar = _prepare(x)
        one = np.ones_like(arr)
        zero = np.zeros_like(arr)
        return _maybe_item(one, scalar), _maybe_item(zero, scalar), _maybe_item(zero.copy(), scalar)

    def mass_power(self, x, exponent: float):
        arr, scalar = _prepare(x)
        return _maybe_item(np.ones_like(arr), scalar)

    def q_from_x(self, x):
        arr, scalar = _prepare(x)
        return _maybe_item(arr.copy(), scalar)

    def x_from_q(self, q):
        arr, scalar = _prepare(q)
        return _maybe_item(arr.copy(), scalar)

    def __str__(self) -> str:
        return "ConstantMass()"


MassLike = Union[MassProfile, ConstantMass]


def profile_eval(profile: MassLike, x) -> ProfileValues:
    """Functional form of ``profile.eval(x)``."""
    return profile.eval(x)


class Generator:
    """Base for intertwiner generators F(q); subclasses return (F, F')."""

    def __call__(self, q):
        raise NotImplementedError


@dataclass(frozen=True)
class ScarfII(Generator):
    """F(q) = -v2*sech(q); `sign` selects the branch f(x) = sign*exp(q(x))
    used by the rational closed form of the target-picture potential."""

    v2: float
    sign: int = 1

    def __post_init__(self) -> None:
        if self.v2 == 0.0:
            raise ValueError("v2 must be nonzero")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")

    def __call__(self, q):
        arr, scalar = _prepare(q)
        sech = 1.0 / np.cosh(arr)
        f = -self.v2 * sech
        fp = self.v2 * sech * np.tanh(arr)
        return _maybe_item(f, scalar), _maybe_item(fp, scalar)

    def __str__(self) -> str:
        return f"ScarfII(v2={self.v2:g}, sign={self.sign:+d})"


@dataclass(frozen=True)
class SamsonovRoy(Generator):
    """F(q) = -4/(3*cos(q)^2 - 4) - 5/4, a pi-periodic bounded generator."""

    def __call__(self, q):
        arr, scalar = _prepare(q)
        den = 3.0 * np.cos(arr) ** 2 - 4.0
        f = -4.0 / den - 1.25
        fp = -24.0 * np.sin(arr) * np.cos(arr) / den**2
        return _maybe_item(f, scalar), _maybe_item(fp, scalar)

    def __str__(self) -> str:
        return "SamsonovRoy()"


@dataclass(frozen=True)
class Morse(Generator):
    """F(q) = a*exp(-q)."""

    a: float = 1.0

    def __call__(self, q):
        arr, scalar = _prepare(q)
        f = self.a * np.exp(-arr)
        return _maybe_item(f, scalar), _maybe_item(-f, scalar)

    def __str__(self) -> str:
        return f"Morse(a={self.a:g})"


class CustomGenerator(Generator):
    """Caller-supplied F and F'; the pair is cross-checked at construction.

    Parameters
    ----------
    f, f_prime : callables mapping float arrays to float arrays.
    sample_q : points where the declared derivative is compared against a
        centered difference of `f` (default: 25 points on [-3, 3]).
    tol : allowed mismatch, relative to 1 + |F'|.
    """

    def __init__(self, f: Callable, f_prime: Callable, sample_q=None, tol: float = 1e-6):
        self._f = f
        self._fp = f_prime
        qs = np.linspace(-3.0, 3.0, 25) if sample_q is None else np.asarray(sample_q, float)
        step = 1e-5
        declared = np.asarray(f_prime(qs), float)
        numeric = (np.asarray(f(qs + step), float) - np.asarray(f(qs - step), float)) / (2 * step)
        err = np.abs(declared - numeric) / (1.0 + np.abs(declared))
        if err.max() > tol:
            raise ValueError(
                f"declared derivative disagrees with centered differences of f: "
                f"max mismatch {err.max():.3e} at q={qs[err.argmax()]:g} (tol {tol:g})"
            )

    def __call__(self, q):
        arr, scalar = _prepare(q)
        f = np.asarray(self._f(arr), float)
        fp = np.asarray(self._fp(arr), float)
        return _maybe_item(f, scalar), _maybe_item(fp, scalar)

    def __str__(self) -> str:
        return "CustomGenerator()"


def constant_generator(value: float = 0.0) -> CustomGenerator:
    """Generator with F identically `value`; handy for free-operator limits."""
    return CustomGenerator(
        lambda q: np.full_like(np.asarray(q, float), float(value)),
        lambda q: np.zeros_like(np.asarray(q, float)),
    )


def generator_eval(generator: Generator, q):
    """Return (F(q), F'(q)) for scalar or array `q`."""
    return generator(q)


@dataclass(frozen=True)
class ModelSpec:
    """One solvable model: generator, ordering, profile, shift and q-window.

    The q-interval must map into the profile's domain; this is checked at
    construction.  `boundary` is kept explicit even though only Dirichlet
    truncation is implemented, so serialized specs stay self-describing.
    """

    generator: Generator
    ordering: AmbiguityOrdering
    profile: MassLike
    alpha0: float = 0.0
    q_interval: tuple[float, float] = (-8.0, 8.0)
    boundary: str = "dirichlet"

    def __post_init__(self) -> None:
        qa, qb = self.q_interval
        if not qa < qb:
            raise BadIntervalError(f"q interval must satisfy qa < qb, got ({qa}, {qb})")
        if self.boundary != "dirichlet":
            raise ValueError(f"unsupported boundary {self.boundary!r}")
        object.__setattr__(self, "q_interval", (float(qa), float(qb)))
        # Raises OutOfRangeError/OutOfDomainError when the window is invalid.
        self.profile.x_from_q(np.array(self.q_interval))

    @classmethod
    def from_ordering(
        cls,
        generator: Generator,
        ordering: AmbiguityOrdering,
        q_interval: tuple[float, float],
        c1: float = 1.0,
        c2: float = 0.0,
        alpha0: float = 0.0,
    ) -> "ModelSpec":
        """Build a spec whose profile exponent is derived from the ordering."""
        profile = MassProfile(c1, c2, float(delta_of(ordering)))
        return cls(generator, ordering, profile, alpha0, q_interval)

    @property
    def x_interval(self) -> tuple[float, float]:
        """Image of the q-interval under the change of variables."""
        qa, qb = self.q_interval
        return float(self.profile.x_from_q(qa)), float(self.profile.x_from_q(qb))
