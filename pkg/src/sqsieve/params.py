"""Exact-rational exponent bookkeeping for the sieve argument.

Every exponent inequality is evaluated in ``fractions.Fraction`` arithmetic:
the binding margins are of order 4e-5 and the argument rests on strict
inequalities, so floating point is never trusted here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

HALF = Fraction(1, 2)

# Reference values used throughout: sigma = 1/19.5 = 2/39, varpi = 1/4000.
REFERENCE_SIGMA = Fraction(2, 39)
REFERENCE_VARPI = Fraction(1, 4000)

RatLike = Fraction | int | str


def parse_rational(value: RatLike) -> Fraction:
    """Parse 'p/q' literals (either side may be decimal, e.g. '1/19.5') or decimals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    text = value.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        return Fraction(num.strip()) / Fraction(den.strip())
    return Fraction(text)


@dataclass(frozen=True)
class GapSet:
    """Exponent interval [1/2-sigma, 1/2+sigma] minus [1/2-2*varpi, 1/2+2*varpi]."""

    outer_lo: Fraction
    outer_hi: Fraction
    inner_lo: Fraction
    inner_hi: Fraction

    def __post_init__(self) -> None:
        if not (self.outer_lo < self.inner_lo <= self.inner_hi < self.outer_hi):
            raise ValueError("inner interval must be strictly inside the outer interval")

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, (Fraction, int, float)):
            return NotImplemented
        in_outer = self.outer_lo <= x <= self.outer_hi
        in_inner = self.inner_lo <= x <= self.inner_hi
        return in_outer and not in_inner


@dataclass(frozen=True)
class SieveParameters:
    """Exponent bundle (sigma, varpi, delta, eta, gamma) with derived quantities."""

    sigma: Fraction
    varpi: Fraction
    delta: Fraction
    eta: Fraction = Fraction(0)
    gamma: Fraction | None = None

    def __post_init__(self) -> None:
        for name in ("sigma", "varpi"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        # delta = 0 and eta = 0 are the reference values: the O(delta), O(eta)
        # slack terms are dropped and compensated by strict certification margins.
        if not 0 <= self.delta < 1:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")
        if not 0 <= self.eta < 1:
            raise ValueError(f"eta must lie in [0, 1), got {self.eta}")
        if self.sigma <= 2 * self.varpi + self.delta:
            raise ValueError(
                "sigma <= 2*varpi + delta: the unobstructed bilinear range is empty "
                f"(sigma={self.sigma}, varpi={self.varpi}, delta={self.delta})"
            )
        if self.gamma is not None and not (
            2 * self.varpi + self.delta <= self.gamma <= self.sigma
        ):
            raise ValueError(f"gamma={self.gamma} outside [2*varpi+delta, sigma]")

    @property
    def z_exp(self) -> Fraction:
        """Exponent of the sieve threshold Z."""
        return self.sigma - 2 * self.varpi - self.delta

    @property
    def alpha_threshold(self) -> Fraction:
        """Exponent cap for the short smooth variable: 1/8 + sigma/2 - 5*varpi/2 - eta."""
        return Fraction(1, 8) + self.sigma / 2 - 5 * self.varpi / 2 - self.eta

    @property
    def d_exp(self) -> Fraction:
        """Exponent of the square-modulus size D: 1/2 + 2*varpi."""
        return HALF + 2 * self.varpi

    @property
    def gap(self) -> GapSet:
        return GapSet(
            outer_lo=HALF - self.sigma,
            outer_hi=HALF + self.sigma,
            inner_lo=HALF - 2 * self.varpi,
            inner_hi=HALF + 2 * self.varpi,
        )


def derive_parameters(
    sigma: RatLike,
    varpi: RatLike,
    delta: RatLike,
    eta: RatLike = 0,
    gamma: RatLike | None = None,
) -> SieveParameters:
    """Build a validated parameter bundle from exact-rational inputs."""
    return SieveParameters(
        sigma=parse_rational(sigma),
        varpi=parse_rational(varpi),
        delta=parse_rational(delta),
        eta=parse_rational(eta),
        gamma=None if gamma is None else parse_rational(gamma),
    )


def reference_parameters(delta: RatLike = 0, eta: RatLike = 0) -> SieveParameters:
    """sigma = 1/19.5, varpi = 1/4000, with delta = eta = 0 by default."""
    return derive_parameters(REFERENCE_SIGMA, REFERENCE_VARPI, delta, eta)


@dataclass(frozen=True)
class Constraint:
    name: str
    value: Fraction
    bound: Fraction
    strict: bool

    @property
    def margin(self) -> Fraction:
        return self.bound - self.value

    @property
    def satisfied(self) -> bool:
        return self.margin > 0 if self.strict else self.margin >= 0

    def as_row(self) -> dict:
        return {
            "name": self.name,
            "value": str(self.value),
            "bound": str(self.bound),
            "margin": str(self.margin),
            "ok": self.satisfied,
        }


@dataclass(frozen=True)
class ConstraintReport:
    entries: tuple[Constraint, ...]

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.entries)

    def as_rows(self) -> list[dict]:
        return [c.as_row() for c in self.entries]


def _delta_caps(sigma: Fraction, varpi: Fraction) -> list[tuple[str, Fraction, bool]]:
    """Upper limits on delta from the three exponent-inequality families, at gamma = sigma.

    Returns (name, cap, strict) where strict means delta must stay below the cap.
    """
    return [
        ("type_ii_width", (1 - 19 * sigma - 90 * varpi) / 71, True),
        ("dispersion_diagonal", (1 - 10 * sigma - 40 * varpi) / 33, True),
        ("type_i_q_window", (HALF - 30 * varpi) / 12, False),
    ]


def max_admissible_delta(sigma: RatLike, varpi: RatLike) -> Fraction:
    """Exact supremum of delta admissible under all constraint families (gamma = sigma).

    Non-positive return value signals infeasibility.
    """
    s, w = parse_rational(sigma), parse_rational(varpi)
    if not 0 < s < 1 or not 0 <= w < 1:
        raise ValueError("sigma must lie in (0,1) and varpi in [0,1)")
    return min(cap for _, cap, _ in _delta_caps(s, w))


def binding_delta_constraint(sigma: RatLike, varpi: RatLike) -> str:
    """Name of the constraint family attaining the delta supremum."""
    s, w = parse_rational(sigma), parse_rational(varpi)
    return min(_delta_caps(s, w), key=lambda t: t[1])[0]


def constraint_report(
    sigma: RatLike, varpi: RatLike, delta: RatLike, gamma: RatLike | None = None
) -> ConstraintReport:
    """Evaluate every exponent inequality at the given values, exactly.

    gamma defaults to sigma (the worst case for the gamma-dependent families).
    """
    s, w, d = parse_rational(sigma), parse_rational(varpi), parse_rational(delta)
    g = s if gamma is None else parse_rational(gamma)
    entries = (
        Constraint("type_ii_width", 19 * s + 90 * w + 71 * d, Fraction(1), strict=True),
        Constraint("dispersion_gamma", 19 * g + 90 * w + 71 * d, Fraction(1), strict=True),
        Constraint("dispersion_diagonal", 10 * g + 40 * w + 33 * d, Fraction(1), strict=True),
        Constraint("type_i_q_window", 30 * w + 11 * d, HALF - d, strict=False),
        Constraint("type_ii_interior", 2 * w + d, s, strict=True),
    )
    return ConstraintReport(entries)


def check_type_ii_range(m_exp: RatLike, params: SieveParameters) -> bool:
    """True iff X^m_exp lands in the usable bilinear range.

    The excluded middle here is the delta-widened gap [1/2-2*varpi-delta,
    1/2+2*varpi+delta], not the gap set of the integration regions.
    """
    m = parse_rational(m_exp)
    if not 0 < m < 1:
        raise ValueError("m_exp must lie in (0, 1)")
    in_outer = HALF - params.sigma <= m <= HALF + params.sigma
    gap_lo = HALF - 2 * params.varpi - params.delta
    gap_hi = HALF + 2 * params.varpi + params.delta
    return in_outer and not (gap_lo <= m <= gap_hi)


@dataclass(frozen=True)
class FactorizationWindows:
    """Exponent windows for the modulus split d = r*q at bilinear position gamma."""

    r_window: tuple[Fraction, Fraction]
    q_window: tuple[Fraction, Fraction]
    type_i_q_window: tuple[Fraction, Fraction]
    w_exp: Fraction


def factorization_windows(params: SieveParameters, gamma: RatLike) -> FactorizationWindows:
    """Windows for R, Q (and the diagonal-control exponent W) as exact rationals."""
    g = parse_rational(gamma)
    if not 2 * params.varpi + params.delta <= g <= params.sigma:
        raise ValueError(f"gamma={g} outside [2*varpi+delta, sigma]")
    s, w, d = params.sigma, params.varpi, params.delta
    r_window = (HALF - 2 * w - 2 * g - 3 * d, HALF - 2 * w - 2 * g - 2 * d)
    q_window = (4 * w + 2 * g + 2 * d, 4 * w + 2 * g + 3 * d)
    type_i_q_window = (16 * w + 8 * d, 16 * w + 9 * d)
    w_exp = 2 * g - 4 * w - 2 * d

    # R and Q pair off so that the split always multiplies back to D.
    assert r_window[0] + q_window[1] == params.d_exp
    assert r_window[1] + q_window[0] == params.d_exp
    # Consistency with the R*sqrt(Q) window [N*X^-2delta, N*X^-delta/2], N = X^(1/2-gamma).
    n_exp = HALF - g
    assert r_window[0] + q_window[0] / 2 == n_exp - 2 * d
    assert r_window[1] + q_window[1] / 2 == n_exp - d / 2
    assert w_exp >= 0
    return FactorizationWindows(r_window, q_window, type_i_q_window, w_exp)


def load_config(path: str) -> dict[str, str]:
    """Read a key = value config file (one pair per line, # comments)."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip().strip('"')
    return out


def float_params(params: SieveParameters) -> dict[str, float]:
    """Float snapshot of the bundle for the numeric integrators."""
    gap = params.gap
    return {
        "sigma": float(params.sigma),
        "varpi": float(params.varpi),
        "delta": float(params.delta),
        "eta": float(params.eta),
        "alpha_threshold": float(params.alpha_threshold),
        "gap_outer_lo": float(gap.outer_lo),
        "gap_outer_hi": float(gap.outer_hi),
        "gap_inner_lo": float(gap.inner_lo),
        "gap_inner_hi": float(gap.inner_hi),
    }


def iter_rational_grid(lo: Fraction, hi: Fraction, n: int) -> Iterable[Fraction]:
    """n+1 evenly spaced exact rationals covering [lo, hi]."""
    step = (hi - lo) / n
    return (lo + k * step for k in range(n + 1))
