"""Orbifold elliptic genus: exact series assembly and numeric evaluation.

Two independent evaluation paths are provided.  The exact path assembles the
twisted-sector supertrace as a truncated series in (y, q) with fractional
exponents and exact cyclotomic phase arithmetic; the numeric path evaluates
the same object through ratios of Jacobi theta functions at complex (z, tau).

Sign convention: the genus returned by ``ell_genus_series`` and
``ell_genus_numeric`` carries an overall factor (-1)^c relative to the bare
normalized supertrace (c the integer central charge), which makes the z -> 0
limit equal the orbifold Euler number.  Sector-level functions are bare.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, prod

from . import _engine
from ._engine import RationalityError, SeriesContext
from .exactmath import CycNum, lcm
from .potential import Charges, Potential, compute_charges
from .qseries import BiSeries, Windows, geom_expand, series_mul
from .symmetry import (
    PhaseVector,
    SymmetryGroup,
    require_admissible,
    theta_coords,
)
from .theta import ThetaParams, lattice_distance, theta_value

DEFAULT_QMAX = Fraction(2)


class WindowCertificationError(ArithmeticError):
    """The y-window kept widening without the boundary band vanishing."""


class NearPoleError(ArithmeticError):
    """A denominator theta argument fell on (or too close to) its zero lattice."""

    def __init__(self, variable: int, n, n1, distance: float):
        super().__init__(
            f"near pole: denominator theta for variable {variable} at twists "
            f"n={n}, n1={n1} (lattice distance {distance:.2e})"
        )
        self.variable = variable
        self.n = n
        self.n1 = n1
        self.distance = distance


@dataclass(frozen=True)
class SectorKey:
    n: PhaseVector
    n1: PhaseVector


@dataclass
class EllValue:
    """Numeric genus value, with the evaluation point actually used."""

    value: complex
    z: complex
    tau: complex
    retries: int


@dataclass
class GenusSeries:
    """Exact genus expansion with run metadata."""

    terms: dict[tuple[Fraction, Fraction], Fraction]
    qmax: Fraction
    ycap: Fraction
    denominator: int
    central_charge: Fraction
    cy_degree: int
    group_generators: tuple[str, ...]
    potential_text: str
    boundary_margin: Fraction
    integer_coefficients: bool

    def coefficient(self, e_q, e_y) -> Fraction:
        return self.terms.get((Fraction(e_q), Fraction(e_y)), Fraction(0))

    def q_slice(self, e_q) -> dict[Fraction, Fraction]:
        eq = Fraction(e_q)
        return {ey: c for (q, ey), c in self.terms.items() if q == eq}

    def q_exponents(self) -> list[Fraction]:
        return sorted({q for (q, _) in self.terms})

    def evaluate(self, z: complex, tau: complex) -> complex:
        """Value at (y, q) = (e^(2 pi i z), e^(2 pi i tau)), fractional powers
        read off the (z, tau) branch."""
        out = 0j
        for (eq, ey), c in self.terms.items():
            out += float(c) * cmath.exp(2j * math.pi * (z * float(ey) + tau * float(eq)))
        return out

    def to_json_dict(self) -> dict:
        return {
            "D": self.denominator,
            "qmax": str(self.qmax),
            "ywindow": [str(-self.ycap), str(self.ycap)],
            "terms": [
                {"q": str(eq), "y": str(ey), "re": str(self.terms[(eq, ey)])}
                for (eq, ey) in sorted(self.terms)
            ],
            "metadata": {
                "cbar": str(self.central_charge),
                "cy_degree": self.cy_degree,
                "group": list(self.group_generators),
                "potential": self.potential_text,
                "boundary_margin": str(self.boundary_margin),
                "integer_coefficients": self.integer_coefficients,
            },
        }


# ---------------------------------------------------------------------------
# Exact path
# ---------------------------------------------------------------------------


def cone_supertrace_series(charges: Charges | tuple, windows: Windows) -> BiSeries:
    """Supertrace of the free untwisted cone, via the public series operations.

    Internally the window is padded so cancellations that re-enter the
    requested window are not lost to truncation, then restricted.
    """
    qs = tuple(charges.q) if isinstance(charges, Charges) else tuple(Fraction(q) for q in charges)
    d = lcm(*(q.denominator for q in qs), windows.qmax.denominator,
            windows.ymin.denominator, windows.ymax.denominator) if qs else 1
    pad = windows.qmax  # worst-case negative-y excursion rate is 1 per unit of q
    work = Windows.make(windows.qmax, windows.ymin - pad * len(qs), windows.ymax + pad * len(qs))
    out = BiSeries.one(d, 1, work)
    for q in qs:
        k = 0
        while k <= windows.qmax:  # fermionic raising modes, weight 1-q
            out = series_mul(out, BiSeries.from_terms(d, 1, work, {(Fraction(0), Fraction(0)): 1,
                                                                   (Fraction(k), 1 - q): -1}))
            k += 1
        k = 1
        while k <= windows.qmax:  # fermionic lowering modes, weight q-1
            out = series_mul(out, BiSeries.from_terms(d, 1, work, {(Fraction(0), Fraction(0)): 1,
                                                                   (Fraction(k), q - 1): -1}))
            k += 1
        k = 0
        while k <= windows.qmax:  # bosonic raising tower
            out = series_mul(out, geom_expand(q, k, 1, work, denominator=d))
            k += 1
        k = 1
        while k <= windows.qmax:  # bosonic lowering tower
            out = series_mul(out, geom_expand(-q, k, 1, work, denominator=d))
            k += 1
    return out.restricted(windows)


def _conductor(charges: tuple[Fraction, ...], moduli: tuple[int, ...]) -> int:
    return lcm(*(q.denominator for q in charges), *moduli)


def _build_context(
    charges: tuple[Fraction, ...],
    moduli: tuple[int, ...],
    qmax: Fraction,
    st_lo: Fraction,
    st_hi: Fraction,
    theta_max: tuple[Fraction, ...],
) -> SeriesContext:
    """Context with a work window wide enough to be exact on [st_lo, st_hi]."""
    n = _conductor(charges, moduli)
    d = lcm(2, n, qmax.denominator, st_lo.denominator, st_hi.denominator,
            *(q.denominator for q in charges))
    cap = _engine.negative_capacity(charges, theta_max, qmax)
    ylo = floor((-cap) * d)
    yhi = ceil((st_hi + cap) * d)
    return SeriesContext(
        conductor=n,
        phi=len(_engine.root_vec(n, 0)),
        rows=_engine._sparse_rows(n),
        conj_rows=_engine._conj_rows(n),
        denominator=d,
        qcap=int(qmax * d),
        ylo=min(ylo, floor(st_lo * d)),
        yhi=yhi,
        charges=charges,
        moduli=moduli,
    )


def _group_data(group: SymmetryGroup):
    moduli = group.coordinate_moduli()
    coords = group.scaled_elements(moduli)
    gens = [tuple(int(e * m) for e, m in zip(g.entries, moduli)) for g in group.generators]
    ann = _engine.annihilator_elements(coords, moduli, gens)
    if ann is not None and len(ann) >= len(coords):
        ann = None  # not profitable
    return moduli, coords, ann


def sector_supertrace_series(
    potential: Potential, group: SymmetryGroup, n: PhaseVector, windows: Windows
) -> BiSeries:
    """Group-averaged supertrace series of the sector twisted by n.

    Includes the 1/|G| average over the second twist and the sector
    prefactor; all stored q-exponents are non-negative (asserted).
    """
    require_admissible(potential, group)
    if n not in group:
        raise ValueError("twist must be an element of the group")
    charges = compute_charges(potential)
    moduli, coords, ann = _group_data(group)
    thetas = theta_coords(n)
    ctx = _build_context(
        tuple(charges.q), moduli, windows.qmax, windows.ymin, windows.ymax, thetas
    )
    a_vec = tuple(int(t * m) for t, m in zip(thetas, moduli))
    if ann is not None:
        total = _engine.double_sum(ctx, [a_vec], ann, "D", "T")
        scalar = Fraction(len(coords), prod(moduli)) * Fraction(1, len(coords))
    else:
        total = _engine.double_sum(ctx, [a_vec], coords, "D", "D")
        scalar = Fraction(1, len(coords))
    assert all(kq >= 0 for (kq, _) in total), "negative q-exponent in sector series"
    n_cond = ctx.conductor
    terms = {}
    for (kq, ky), vec in total.items():
        if windows.ymin * ctx.denominator <= ky <= windows.ymax * ctx.denominator:
            terms[(kq, ky)] = CycNum(n_cond, tuple(Fraction(c) * scalar for c in vec))
    return BiSeries(ctx.denominator, n_cond, windows, terms)


def _genus_rational_terms(
    potential: Potential,
    group: SymmetryGroup,
    qmax: Fraction,
    ycap: Fraction,
) -> tuple[dict[tuple[Fraction, Fraction], Fraction], int]:
    """Signed, shifted, rationalized genus terms on the final window."""
    charges = compute_charges(potential)
    cbar = charges.central_charge
    assert cbar.denominator == 1
    shift = Fraction(cbar, 2)
    moduli, coords, ann = _group_data(group)
    theta_max = tuple(Fraction(m - 1, m) for m in moduli)
    ctx = _build_context(
        tuple(charges.q), moduli, qmax, -ycap + shift, ycap + shift, theta_max
    )
    if ann is not None:
        total = _engine.double_sum(ctx, ann, ann, "T", "T")
        weight = Fraction(len(coords), prod(moduli)) ** 2
    else:
        total = _engine.double_sum(ctx, coords, coords, "D", "D")
        weight = Fraction(1)
    assert all(kq >= 0 for (kq, _) in total), "negative q-exponent in genus series"
    d = ctx.denominator
    ky_shift = int(shift * d)
    shifted = {}
    for (kq, ky), vec in total.items():
        ky2 = ky - ky_shift
        if -ycap * d <= ky2 <= ycap * d and kq <= qmax * d:
            shifted[(kq, ky2)] = vec
    sign = -1 if int(cbar) % 2 else 1
    scalar = Fraction(sign, len(coords)) * weight
    return _engine.rationalize(shifted, ctx, scalar), d


def default_y_cap(potential: Potential, qmax: Fraction) -> Fraction:
    charges = compute_charges(potential)
    return abs(charges.central_charge) / 2 + qmax * max(1 / q for q in charges.q)


def ell_genus_series(
    potential: Potential,
    group: SymmetryGroup,
    qmax=None,
    ycap=None,
    *,
    certify_margin: Fraction | int = 1,
    max_widen: int = 4,
    widen_step: Fraction | int = 2,
) -> GenusSeries:
    """Exact genus expansion through q^qmax, with a certified y-window.

    The y-window starts at ``ycap`` (or a charge-based default) and widens
    until a band of width ``certify_margin`` at both window edges carries no
    nonzero coefficient at any computed q-level; the achieved margin is
    reported on the result.
    """
    require_admissible(potential, group)
    charges = compute_charges(potential)
    qmax = Fraction(qmax) if qmax is not None else DEFAULT_QMAX
    ycap = Fraction(ycap) if ycap is not None else default_y_cap(potential, qmax)
    certify_margin = Fraction(certify_margin)
    for _ in range(max_widen + 1):
        terms, d = _genus_rational_terms(potential, group, qmax, ycap)
        reach = max((abs(ey) for (_, ey) in terms), default=Fraction(0))
        margin = ycap - reach
        if margin >= certify_margin:
            break
        ycap = ycap + Fraction(widen_step)
    else:
        raise WindowCertificationError(
            f"no vanishing boundary band of width {certify_margin} up to ycap={ycap}"
        )
    assert all(eq >= 0 for (eq, _) in terms)
    return GenusSeries(
        terms=terms,
        qmax=qmax,
        ycap=ycap,
        denominator=d,
        central_charge=charges.central_charge,
        cy_degree=charges.cy_degree,
        group_generators=tuple(group.generator_strings()),
        potential_text=potential.text,
        boundary_margin=margin,
        integer_coefficients=all(c.denominator == 1 for c in terms.values()),
    )


# ---------------------------------------------------------------------------
# Numeric path
# ---------------------------------------------------------------------------


def sector_value_from_coords(
    charges,
    thetas_n,
    thetas_n1,
    z: complex,
    tau: complex,
    params: ThetaParams | None = None,
    pole_eps: float = 1e-6,
) -> complex:
    """Theta-ratio product for one sector pair, from raw rational twists.

    The twists need not be canonical representatives; integer shifts flip
    numerator and denominator signs together and leave the value unchanged.
    """
    qs = tuple(charges.q) if isinstance(charges, Charges) else tuple(Fraction(q) for q in charges)
    out = 1.0 + 0j
    for j, (qj, tn, tn1) in enumerate(zip(qs, thetas_n, thetas_n1)):
        nu_den = float(qj) * z + float(tn) * tau + float(tn1)
        dist = lattice_distance(nu_den, tau)
        if dist < pole_eps:
            raise NearPoleError(j, tuple(thetas_n), tuple(thetas_n1), dist)
        nu_num = (1 - float(qj)) * z - float(tn) * tau - float(tn1)
        out *= (
            cmath.exp(-2j * math.pi * z * float(tn))
            * theta_value(nu_num, tau, params)
            / theta_value(nu_den, tau, params)
        )
    return out


def sector_value_numeric(
    potential: Potential,
    group: SymmetryGroup,
    n: PhaseVector,
    n1: PhaseVector,
    z: complex,
    tau: complex,
    params: ThetaParams | None = None,
    pole_eps: float = 1e-6,
) -> complex:
    """Numeric value of one (n, n1) sector term (no group averaging)."""
    if n not in group or n1 not in group:
        raise ValueError("twists must be elements of the group")
    charges = compute_charges(potential)
    return sector_value_from_coords(
        charges, theta_coords(n), theta_coords(n1), z, tau, params, pole_eps
    )


def _numeric_total(
    potential: Potential,
    group: SymmetryGroup,
    z: complex,
    tau: complex,
    params: ThetaParams | None,
    pole_eps: float,
) -> complex:
    charges = compute_charges(potential)
    qs = tuple(charges.q)
    moduli, coords, ann = _group_data(group)
    cache: dict[tuple, complex] = {}

    def base_factor(j: int, a: int, b: int) -> complex:
        m = moduli[j]
        key = (qs[j], m, a % m, b % m)
        val = cache.get(key)
        if val is None:
            tn, tn1 = Fraction(a % m, m), Fraction(b % m, m)
            nu_den = float(qs[j]) * z + float(tn) * tau + float(tn1)
            dist = lattice_distance(nu_den, tau)
            if dist < pole_eps:
                n_repr = next(e for e, c in zip(group.elements, coords) if c[j] == a % m)
                n1_repr = next(e for e, c in zip(group.elements, coords) if c[j] == b % m)
                raise NearPoleError(j, n_repr.entries, n1_repr.entries, dist)
            nu_num = (1 - float(qs[j])) * z - float(tn) * tau - float(tn1)
            val = (
                cmath.exp(-2j * math.pi * z * float(tn))
                * theta_value(nu_num, tau, params)
                / theta_value(nu_den, tau, params)
            )
            cache[key] = val
        return val

    hat_cache: dict[tuple, complex] = {}

    def hat(j: int, side: str, index: int, other: int) -> complex:
        m = moduli[j]
        key = (qs[j], m, side, index % m, other % m)
        val = hat_cache.get(key)
        if val is None:
            val = 0j
            for t in range(m):
                w = cmath.exp(2j * math.pi * index * t / m)
                val += w * (base_factor(j, t, other) if side == "L" else base_factor(j, other, t))
            hat_cache[key] = val
        return val

    def hat2(j: int, s: int, s2: int) -> complex:
        m = moduli[j]
        key = (qs[j], m, "LR", s % m, s2 % m)
        val = hat_cache.get(key)
        if val is None:
            val = 0j
            for t in range(m):
                val += cmath.exp(2j * math.pi * s2 * t / m) * hat(j, "L", s, t)
            hat_cache[key] = val
        return val

    if ann is not None:
        reps = ann
        weight = (len(coords) / prod(moduli)) ** 2

        def factor(j, il, ir):
            return hat2(j, il, ir)

    else:
        reps = coords
        weight = 1.0

        def factor(j, il, ir):
            return base_factor(j, il, ir)

    total = 0j
    for rl in reps:
        for rr in reps:
            term = 1.0 + 0j
            for j in range(len(qs)):
                term *= factor(j, rl[j], rr[j])
            total += term
    return total * weight / len(coords)


def ell_genus_numeric(
    potential: Potential,
    group: SymmetryGroup,
    z: complex,
    tau: complex,
    params: ThetaParams | None = None,
    retries: int = 3,
    perturbation: float = 1e-3,
    pole_eps: float = 1e-6,
) -> EllValue:
    """Numeric genus value at (z, tau).

    Individual sector terms have poles on a measure-zero set even though the
    total is finite; on a near-pole hit the evaluation deterministically
    retries at z + perturbation (up to ``retries`` times, count reported).
    """
    require_admissible(potential, group)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    cbar = compute_charges(potential).central_charge
    sign = -1 if int(cbar) % 2 else 1
    z_cur = complex(z)
    attempts = 0
    while True:
        try:
            value = _numeric_total(potential, group, z_cur, tau, params, pole_eps)
            return EllValue(sign * value, z_cur, tau, attempts)
        except NearPoleError:
            if attempts >= retries:
                raise
            attempts += 1
            z_cur = z_cur + perturbation
