"""Shared fixtures: test potentials and a slow reference builder for sector
series, assembled from the public series operations only."""

from fractions import Fraction
from functools import lru_cache

from orbigenus.exactmath import lcm, root_of_unity
from orbigenus.potential import compute_charges, parse_potential
from orbigenus.qseries import BiSeries, Windows, geom_expand, series_mul

F = Fraction

QUINTIC = parse_potential("x1^5+x2^5+x3^5+x4^5+x5^5")
CUBIC = parse_potential("x1^3+x2^3+x3^3")
TWO_SQUARES = parse_potential("x1^2+x2^2")
K3_CHAIN = parse_potential("x1^3*x2+x2^4+x3^4+x4^4")
LOOP_K3 = parse_potential("x1^3*x2+x2^3*x1+x3^4+x4^4")


@lru_cache(maxsize=None)
def genus_series_cached(text, group_gens, qmax, ycap):
    from orbigenus.genus import ell_genus_series
    from orbigenus.symmetry import SymmetryGroup

    p = parse_potential(text)
    group = SymmetryGroup.from_generator_strings(group_gens, p.dimension)
    return ell_genus_series(p, group, qmax=qmax, ycap=ycap)


def reference_sector_pair_series(potential, thetas_n, thetas_n1, windows, conductor):
    """One (n, n1) sector term built factor-by-factor from public ops.

    Slow but structurally independent of the fused engine: expands every
    numerator polynomial and denominator tower explicitly and applies the
    sector prefactor as an exponent shift at the end.
    """
    charges = compute_charges(potential)
    pad = sum(
        (q * windows.qmax / (1 - t) for q, t in zip(charges.q, thetas_n)),
        F(0),
    ) + len(charges.q) * (1 + windows.qmax)
    d = lcm(
        conductor,
        windows.qmax.denominator,
        windows.ymin.denominator,
        windows.ymax.denominator,
        *(q.denominator for q in charges.q),
        *(t.denominator for t in thetas_n),
    )
    work = Windows.make(windows.qmax, windows.ymin - pad, windows.ymax + pad)
    out = BiSeries.one(d, conductor, work)
    for j, qj in enumerate(charges.q):
        tn, tn1 = thetas_n[j], thetas_n1[j]
        zeta = root_of_unity(int(tn1 * conductor), conductor)
        zeta_bar = root_of_unity(-int(tn1 * conductor), conductor)
        # fermionic factors (1 - zbar y^(1-q) q^(k-t)), k >= 0, shifted by the
        # per-variable prefactor piece (y^-1 q)^t so exponents stay >= 0
        bracket = BiSeries.from_terms(
            d, conductor, work,
            {(tn, -tn): 1, (F(0), 1 - qj - tn): -zeta_bar},
        )
        out = series_mul(out, bracket)
        k = 1
        while k - tn <= windows.qmax:
            out = series_mul(out, BiSeries.from_terms(
                d, conductor, work,
                {(F(0), F(0)): 1, (k - tn, 1 - qj): -zeta_bar}))
            k += 1
        k = 1
        while k + tn <= windows.qmax:
            out = series_mul(out, BiSeries.from_terms(
                d, conductor, work,
                {(F(0), F(0)): 1, (k + tn, qj - 1): -zeta}))
            k += 1
        k = 0
        while k + tn <= windows.qmax:
            out = series_mul(out, geom_expand(qj, k + tn, zeta, work, denominator=d))
            k += 1
        k = 1
        while k - tn <= windows.qmax:
            out = series_mul(out, geom_expand(-qj, k - tn, zeta_bar, work, denominator=d))
            k += 1
    return out.restricted(windows)
