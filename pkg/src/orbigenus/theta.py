"""Numerical Jacobi theta function and its transformation identities.

The function computed here is the odd theta

    T(v, t) = i q^(1/8) e^(-i pi v) (1 - e^(2 pi i v))
              prod_{n>=1} (1-q^n)(1-q^n e^(2 pi i v))(1-q^n e^(-2 pi i v)),

with q = e^(2 pi i t), holomorphic for t in the upper half-plane, odd in v,
with simple zeros exactly on the lattice Z t + Z.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class ThetaParams:
    """Truncation control for the infinite product.

    ``terms`` fixes the number of product factors; when None it is chosen per
    evaluation so the dropped tail is below ``tolerance`` (|q|^P < tolerance).
    """

    terms: int | None = None
    tolerance: float = 1e-15

    def resolve_terms(self, tau: complex) -> int:
        if self.terms is not None:
            return self.terms
        qabs = math.exp(-2 * math.pi * tau.imag)
        if qabs <= 0:
            return 8
        p = int(math.log(self.tolerance) / math.log(qabs)) + 1 if qabs < 1 else 600
        return max(8, min(600, p))


DEFAULT_PARAMS = ThetaParams()


def truncation_bound(tau: complex, terms: int) -> float:
    """Magnitude |q|^P of the first dropped product factor."""
    return math.exp(-2 * math.pi * tau.imag * terms)


def theta_value(nu: complex, tau: complex, params: ThetaParams | None = None) -> complex:
    """Truncated triple-product value; deterministic for fixed params."""
    if tau.imag <= 0:
        raise ValueError(f"tau = {tau} must lie in the upper half-plane")
    params = params or DEFAULT_PARAMS
    terms = params.resolve_terms(tau)
    q = cmath.exp(TWO_PI_I * tau)
    u = cmath.exp(TWO_PI_I * nu)
    # q^(1/8) is the principal eighth root of q itself, so shifting tau by one
    # leaves the value literally unchanged
    value = 1j * cmath.exp(cmath.log(q) / 8) * cmath.exp(-1j * math.pi * nu) * (1 - u)
    qn = 1.0 + 0j
    for _ in range(terms):
        qn *= q
        value *= (1 - qn) * (1 - qn * u) * (1 - qn / u)
    return value


def lattice_distance(nu: complex, tau: complex) -> float:
    """Distance of nu from the zero lattice Z tau + Z, in lattice coordinates."""
    alpha = nu.imag / tau.imag
    beta = nu - alpha * tau
    da = abs(alpha - round(alpha))
    db = abs(beta.real - round(beta.real))
    return max(da, db)


def default_samples(count: int, seed: int = 0) -> list[tuple[complex, complex]]:
    """Seeded (nu, tau) samples kept away from lattice zeros and the real axis."""
    rng = random.Random(seed)
    samples = []
    for _ in range(count):
        nu = complex(rng.uniform(0.08, 0.42), rng.uniform(-0.2, 0.2))
        tau = complex(rng.uniform(-0.45, 0.45), rng.uniform(0.9, 1.8))
        samples.append((nu, tau))
    return samples


def _residual(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def check_theta_identities(
    samples: list[tuple[complex, complex]],
    params: ThetaParams | None = None,
    skip_threshold: float = 1e-10,
) -> dict:
    """Max residual of the four classical identities over the samples.

    Samples where either side is too close to a zero are skipped and reported.
    Returns {"residuals": {name: float}, "skipped": [(name, nu, tau), ...]}.
    """
    params = params or DEFAULT_PARAMS
    names = ("tau_shift", "nu_shift", "nu_tau_shift", "inversion")
    residuals = {name: 0.0 for name in names}
    skipped: list[tuple[str, complex, complex]] = []
    worst_truncation = 0.0
    for nu, tau in samples:
        worst_truncation = max(
            worst_truncation, truncation_bound(tau, params.resolve_terms(tau))
        )
        base = theta_value(nu, tau, params)
        pairs = {
            "tau_shift": (theta_value(nu, tau + 1, params), base),
            "nu_shift": (theta_value(nu + 1, tau, params), -base),
            "nu_tau_shift": (
                theta_value(nu + tau, tau, params),
                -cmath.exp(-TWO_PI_I * nu - 1j * math.pi * tau) * base,
            ),
            "inversion": (
                theta_value(nu / tau, -1 / tau, params),
                -1j * cmath.sqrt(tau / 1j) * cmath.exp(1j * math.pi * nu * nu / tau) * base,
            ),
        }
        for name, (lhs, rhs) in pairs.items():
            if max(abs(lhs), abs(rhs)) < skip_threshold:
                skipped.append((name, nu, tau))
                continue
            residuals[name] = max(residuals[name], _residual(lhs, rhs))
    return {
        "residuals": residuals,
        "skipped": skipped,
        "truncation_bound": worst_truncation,
    }
