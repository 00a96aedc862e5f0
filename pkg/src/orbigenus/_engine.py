"""Internal engine assembling twisted-sector supertrace series exactly.

Series here are plain dicts keyed by scaled integer exponents (kq, ky) with
integer coefficient vectors over the power basis of zeta_N; all rational
normalization (1/|G|, character-sum weights) is applied once at the end, so
the hot loops touch only machine/big integers.

The double group sum is evaluated per side either directly over the group
elements or, when the annihilator of the group inside prod_j Z/m_j is
smaller, through the character-sum identity

    sum_{t in G} X(t) = (|G| / prod_j m_j) sum_{s in ann(G)} sum_t e(s.t) X(t),

which factorizes over coordinates and collapses |G|^2 sector products to
|ann(G)|^2 of them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .exactmath import (
    CycNum,
    NotRationalError,
    _power_rows,
    cyc_to_rational,
    euler_phi,
    lcm,
)

ANNIHILATOR_CAP = 4_000_000

Vec = tuple[int, ...]
Series = dict[tuple[int, int], list[int]]


class RationalityError(ArithmeticError):
    """A fully summed genus coefficient failed to be rational."""

    def __init__(self, e_q: Fraction, e_y: Fraction, residual):
        super().__init__(
            f"non-rational coefficient at (q^{e_q}, y^{e_y}); residual components {residual}"
        )
        self.e_q = e_q
        self.e_y = e_y
        self.residual = residual


@dataclass
class SeriesContext:
    """Shared data for one genus computation."""

    conductor: int
    phi: int
    rows: tuple  # sparse reduction rows for x^k, k in [phi, 2*phi-2]
    conj_rows: tuple  # rows for x^((N-k) % N), k in [0, phi)
    denominator: int
    qcap: int
    ylo: int
    yhi: int
    charges: tuple[Fraction, ...]
    moduli: tuple[int, ...]
    factor_cache: dict = field(default_factory=dict)
    hat_cache: dict = field(default_factory=dict)


def _sparse_rows(n: int) -> tuple:
    phi = euler_phi(n)
    rows = _power_rows(n)
    out = []
    for k in range(2 * phi - 1):
        if k < phi:
            out.append(None)
        else:
            out.append(tuple((i, c) for i, c in enumerate(rows[k]) if c))
    return tuple(out)


def _conj_rows(n: int) -> tuple:
    rows = _power_rows(n)
    phi = euler_phi(n)
    return tuple(rows[(n - k) % n] for k in range(phi))


def root_vec(n: int, k: int) -> Vec:
    return _power_rows(n)[k % n]


def vec_mul(u, v, phi: int, rows) -> list[int]:
    out = [0] * phi
    for i, ui in enumerate(u):
        if not ui:
            continue
        for j, vj in enumerate(v):
            if not vj:
                continue
            c = ui * vj
            k = i + j
            if k < phi:
                out[k] += c
            else:
                for idx, r in rows[k]:
                    out[idx] += c * r
    return out


def vec_conj(u, ctx: SeriesContext) -> list[int]:
    out = [0] * ctx.phi
    for i, ui in enumerate(u):
        if not ui:
            continue
        for idx, c in enumerate(ctx.conj_rows[i]):
            if c:
                out[idx] += ui * c
    return out


def series_mul(a: Series, b: Series, ctx: SeriesContext) -> Series:
    if len(a) > len(b):
        a, b = b, a
    qcap, ylo, yhi, phi, rows = ctx.qcap, ctx.ylo, ctx.yhi, ctx.phi, ctx.rows
    out: Series = {}
    b_items = list(b.items())
    for (kq1, ky1), v1 in a.items():
        for (kq2, ky2), v2 in b_items:
            kq = kq1 + kq2
            if kq > qcap:
                continue
            ky = ky1 + ky2
            if ky < ylo or ky > yhi:
                continue
            prod_vec = vec_mul(v1, v2, phi, rows)
            key = (kq, ky)
            cur = out.get(key)
            if cur is None:
                out[key] = prod_vec
            else:
                for i, c in enumerate(prod_vec):
                    cur[i] += c
    return {k: v for k, v in out.items() if any(v)}


def series_add_scaled(acc: Series, s: Series, vec: Vec, ctx: SeriesContext) -> None:
    """acc += vec * s (vec a coefficient vector, e.g. a root of unity)."""
    phi, rows = ctx.phi, ctx.rows
    for key, v in s.items():
        scaled = vec_mul(vec, v, phi, rows)
        cur = acc.get(key)
        if cur is None:
            acc[key] = scaled
        else:
            for i, c in enumerate(scaled):
                cur[i] += c


def series_add_conj(acc: Series, s: Series, ctx: SeriesContext) -> None:
    for key, v in s.items():
        scaled = vec_conj(v, ctx)
        cur = acc.get(key)
        if cur is None:
            acc[key] = scaled
        else:
            for i, c in enumerate(scaled):
                cur[i] += c


# ---------------------------------------------------------------------------
# Single-variable factors
# ---------------------------------------------------------------------------


def _scaled_exponent(value: Fraction, d: int) -> int:
    out = value * d
    if out.denominator != 1:
        raise AssertionError(f"exponent {value} not on the 1/{d} lattice")
    return int(out)


def variable_factor(ctx: SeriesContext, j: int, a: int, b: int) -> Series:
    """Exact single-variable factor for twist numerators (a, b) mod m_j.

    This is the j-th factor of the twisted-sector product with the
    (y^-1 q)^theta piece of the sector prefactor folded in, so every stored
    q-exponent is non-negative.
    """
    qj = ctx.charges[j]
    m = ctx.moduli[j]
    key = (qj, m, a % m, b % m)
    cached = ctx.factor_cache.get(key)
    if cached is not None:
        return cached
    n = ctx.conductor
    d = ctx.denominator
    a %= m
    b %= m
    theta = Fraction(a, m)
    ib = (b * (n // m)) % n
    one = root_vec(n, 0)
    zeta = root_vec(n, ib)
    zeta_bar = root_vec(n, -ib)

    def neg(vec: Vec) -> Vec:
        return tuple(-c for c in vec)

    qcap, ylo, yhi = ctx.qcap, ctx.ylo, ctx.yhi

    # (y^-1 q)^theta * (1 - zeta_bar y^(1-qj) q^(-theta)): non-negative q-powers
    series: Series = {}
    kq1, ky1 = _scaled_exponent(theta, d), _scaled_exponent(-theta, d)
    if kq1 <= qcap and ylo <= ky1 <= yhi:
        series[(kq1, ky1)] = list(one)
    ky2 = _scaled_exponent(1 - qj - theta, d)
    if ylo <= ky2 <= yhi:
        series[(0, ky2)] = list(neg(zeta_bar))

    polys: list[Series] = []
    # remaining fermionic factors with positive q-exponent
    k = 1
    while True:
        kq = _scaled_exponent(Fraction(k) - theta, d)
        if kq > qcap:
            break
        ky = _scaled_exponent(1 - qj, d)
        poly = {(0, 0): list(one)}
        if ylo <= ky <= yhi:
            poly[(kq, ky)] = list(neg(zeta_bar))
        polys.append(poly)
        k += 1
    k = 1
    while True:
        kq = _scaled_exponent(Fraction(k) + theta, d)
        if kq > qcap:
            break
        ky = _scaled_exponent(qj - 1, d)
        poly = {(0, 0): list(one)}
        if ylo <= ky <= yhi:
            poly[(kq, ky)] = list(neg(zeta))
        polys.append(poly)
        k += 1
    # bosonic towers, expanded in the fixed annulus
    k = 0
    while True:
        step_q = _scaled_exponent(Fraction(k) + theta, d)
        if step_q > qcap:
            break
        step_y = _scaled_exponent(qj, d)
        geom: Series = {}
        s = 0
        while True:
            kq, ky = s * step_q, s * step_y
            if kq > qcap or ky > yhi:
                break
            if ky >= ylo:
                geom[(kq, ky)] = list(root_vec(n, (s * ib) % n))
            s += 1
        polys.append(geom)
        k += 1
    k = 1
    while True:
        step_q = _scaled_exponent(Fraction(k) - theta, d)
        if step_q > qcap:
            break
        step_y = _scaled_exponent(-qj, d)
        geom = {}
        s = 0
        while True:
            kq, ky = s * step_q, s * step_y
            if kq > qcap or ky < ylo:
                break
            if ky <= yhi:
                geom[(kq, ky)] = list(root_vec(n, (-s * ib) % n))
            s += 1
        polys.append(geom)
        k += 1

    for poly in polys:
        series = series_mul(series, poly, ctx)
    ctx.factor_cache[key] = series
    return series


def _hat(ctx: SeriesContext, j: int, side: str, index: int, other: int) -> Series:
    """Character transform of the factor over one twist slot.

    side "L": sum over a of e(index*a/m) f(a, other);
    side "R": sum over b of e(index*b/m) f(other, b).
    """
    qj = ctx.charges[j]
    m = ctx.moduli[j]
    key = (qj, m, side, index % m, other % m)
    cached = ctx.hat_cache.get(key)
    if cached is not None:
        return cached
    n = ctx.conductor
    acc: Series = {}
    for t in range(m):
        w = root_vec(n, (index * t * (n // m)) % n)
        f = variable_factor(ctx, j, t, other) if side == "L" else variable_factor(ctx, j, other, t)
        series_add_scaled(acc, f, w, ctx)
    acc = {k: v for k, v in acc.items() if any(v)}
    ctx.hat_cache[key] = acc
    return acc


def _hat2(ctx: SeriesContext, j: int, s: int, s2: int) -> Series:
    """Double character transform over both twist slots."""
    qj = ctx.charges[j]
    m = ctx.moduli[j]
    key = (qj, m, "LR", s % m, s2 % m)
    cached = ctx.hat_cache.get(key)
    if cached is not None:
        return cached
    n = ctx.conductor
    acc: Series = {}
    for t in range(m):
        w = root_vec(n, (s2 * t * (n // m)) % n)
        series_add_scaled(acc, _hat(ctx, j, "L", s, t), w, ctx)
    acc = {k: v for k, v in acc.items() if any(v)}
    ctx.hat_cache[key] = acc
    return acc


# ---------------------------------------------------------------------------
# Group data and the double sum
# ---------------------------------------------------------------------------


def annihilator_elements(coords: list[Vec], moduli: tuple[int, ...], generators: list[Vec]):
    """All s in prod_j Z/m_j with s.t integral for every t in the group.

    coords/generators are coordinate-scaled tuples.  Returns None when the
    ambient product group is too large to enumerate.
    """
    total = prod(moduli)
    if total > ANNIHILATOR_CAP:
        return None
    m_all = lcm(*moduli)
    weights = [m_all // m for m in moduli]
    gen_rows = [tuple(g[j] * weights[j] for j in range(len(moduli))) for g in generators]
    out = []
    for s in itertools.product(*[range(m) for m in moduli]):
        if all(sum(sj * rj for sj, rj in zip(s, row)) % m_all == 0 for row in gen_rows):
            out.append(s)
    assert len(out) * len(coords) == total, "annihilator size mismatch"
    return out


def _neg(vec: Vec, moduli: tuple[int, ...]) -> Vec:
    return tuple((m - x) % m for x, m in zip(vec, moduli))


def double_sum(
    ctx: SeriesContext,
    reps_l: list[Vec],
    reps_r: list[Vec],
    mode_l: str,
    mode_r: str,
) -> Series:
    """Sum over (left, right) representatives of the product over variables.

    mode "D" iterates group-element coordinates, mode "T" annihilator
    characters.  Complex conjugation pairs representatives, so roughly half
    the products are computed and mirrored.
    """
    d = len(ctx.moduli)

    def factor(j: int, il: int, ir: int) -> Series:
        if mode_l == "D" and mode_r == "D":
            return variable_factor(ctx, j, il, ir)
        if mode_l == "D" and mode_r == "T":
            return _hat(ctx, j, "R", ir, il)
        if mode_l == "T" and mode_r == "D":
            return _hat(ctx, j, "L", il, ir)
        return _hat2(ctx, j, il, ir)

    def conj_partner(rl: Vec, rr: Vec) -> tuple[Vec, Vec]:
        if mode_l == "D" and mode_r == "D":
            return (rl, _neg(rr, ctx.moduli))
        if mode_l == "D" and mode_r == "T":
            return (rl, rr)
        if mode_l == "T" and mode_r == "D":
            return (_neg(rl, ctx.moduli), _neg(rr, ctx.moduli))
        return (_neg(rl, ctx.moduli), rr)

    total: Series = {}
    for rl in reps_l:
        for rr in reps_r:
            partner = conj_partner(rl, rr)
            if partner < (rl, rr):
                continue  # covered as the conjugate of an earlier product
            product: Series | None = None
            for j in range(d):
                f = factor(j, rl[j], rr[j])
                product = dict((k, list(v)) for k, v in f.items()) if product is None else series_mul(product, f, ctx)
            if product is None:
                product = {(0, 0): list(root_vec(ctx.conductor, 0))}
            series_add_scaled(total, product, root_vec(ctx.conductor, 0), ctx)
            if partner != (rl, rr):
                series_add_conj(total, product, ctx)
    return {k: v for k, v in total.items() if any(v)}


# ---------------------------------------------------------------------------
# Window sizing and finalization
# ---------------------------------------------------------------------------


def negative_capacity(
    charges: tuple[Fraction, ...], theta_max: tuple[Fraction, ...], qmax: Fraction
) -> Fraction:
    """Upper bound on the total negative y-excursion inside the q-window.

    Cost accounting: the only q-free negative y comes from the fermionic
    bracket term y^(1-q-theta) when q+theta > 1; every other unit of negative
    y costs q-budget at rate at most max(1, q_j/(1-theta_j)).
    """
    free = sum(
        (max(Fraction(0), q + t - 1) for q, t in zip(charges, theta_max)),
        Fraction(0),
    )
    rate = Fraction(1)
    for q, t in zip(charges, theta_max):
        rate = max(rate, q / (1 - t))
    return free + qmax * rate


def rationalize(
    total: Series, ctx: SeriesContext, scalar: Fraction
) -> dict[tuple[Fraction, Fraction], Fraction]:
    """Scale accumulated integer-vector terms and demand rational values."""
    out: dict[tuple[Fraction, Fraction], Fraction] = {}
    n = ctx.conductor
    d = ctx.denominator
    for (kq, ky), vec in sorted(total.items()):
        value = CycNum(n, tuple(Fraction(c) * scalar for c in vec))
        e_q, e_y = Fraction(kq, d), Fraction(ky, d)
        try:
            rat = cyc_to_rational(value)
        except NotRationalError as err:
            raise RationalityError(e_q, e_y, err.residual) from err
        if rat:
            out[(e_q, e_y)] = rat
    return out
