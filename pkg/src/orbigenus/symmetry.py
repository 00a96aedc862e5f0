"""Diagonal symmetry groups of invertible potentials and their duality.

Group elements are d-tuples of rationals in [0, 1) under addition mod 1.
Groups are always fully materialized (desk scale, capped at 10^6 elements);
internally elements are handled as integer tuples scaled by the group
exponent, which keeps closure and pairing arithmetic exact and fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .exactmath import (
    int_matrix,
    invert_rational_matrix,
    lcm,
    mat_det,
    smith_normal_form,
)
from .potential import Potential, compute_charges, transpose_potential

GROUP_SIZE_CAP = 10**6


class GroupSizeError(ValueError):
    """Materialization would exceed the size cap."""


class AdmissibilityError(ValueError):
    """Group fails the grading / determinant-one sandwich condition."""


@dataclass(frozen=True)
class PhaseVector:
    """Rational d-tuple mod 1, stored canonically with entries in [0, 1)."""

    entries: tuple[Fraction, ...]

    @classmethod
    def canonical(cls, values: Iterable) -> "PhaseVector":
        return cls(tuple(Fraction(v) % 1 for v in values))

    def __post_init__(self):
        if any(not (0 <= e < 1) for e in self.entries):
            raise ValueError("phase vector entries must lie in [0, 1)")

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        return PhaseVector(tuple((a + b) % 1 for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "PhaseVector":
        return PhaseVector(tuple((-a) % 1 for a in self.entries))

    def __mul__(self, k: int) -> "PhaseVector":
        return PhaseVector(tuple((a * k) % 1 for a in self.entries))

    __rmul__ = __mul__

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def order(self) -> int:
        return lcm(*(e.denominator for e in self.entries)) if self.entries else 1

    def sum_is_integral(self) -> bool:
        return sum(self.entries, Fraction(0)).denominator == 1

    def as_string(self) -> str:
        return ",".join(str(e) for e in self.entries)

    @classmethod
    def from_string(cls, text: str) -> "PhaseVector":
        return cls.canonical(Fraction(part.strip()) for part in text.split(","))

    def __str__(self) -> str:
        return f"({self.as_string()})"


def _scale(vec: PhaseVector, m: int) -> tuple[int, ...]:
    return tuple(int(e * m) for e in vec.entries)


def _closure_scaled(
    generators: Sequence[tuple[int, ...]], m: int, dimension: int, cap: int = GROUP_SIZE_CAP
) -> list[tuple[int, ...]]:
    zero = (0,) * dimension
    elements = {zero}
    frontier = [zero]
    gens = [g for g in generators if g != zero]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                s = tuple((a + b) % m for a, b in zip(e, g))
                if s not in elements:
                    elements.add(s)
                    nxt.append(s)
                    if len(elements) > cap:
                        raise GroupSizeError(f"group exceeds the cap of {cap} elements")
        frontier = nxt
    return sorted(elements)


def _minimal_generators(
    elements: Sequence[tuple[int, ...]], m: int, dimension: int
) -> list[tuple[int, ...]]:
    """Small generating set by greedy closure over the sorted element list."""
    chosen: list[tuple[int, ...]] = []
    span = {(0,) * dimension}
    for e in elements:
        if e not in span:
            chosen.append(e)
            span = set(_closure_scaled(chosen, m, dimension))
            if len(span) == len(elements):
                break
    return chosen


def _invariant_factors(
    generators: Sequence[tuple[int, ...]], m: int, dimension: int
) -> tuple[int, ...]:
    """Isomorphism type of the subgroup of (1/m Z / Z)^d spanned by generators.

    If the lattice spanned by the scaled generators together with m Z^d has
    Smith factors d_1 | ... | d_d over Z^d, the quotient group is the direct
    sum of Z/(m/d_i); reading the chain backwards restores divisibility order.
    """
    rows = [list(g) for g in generators]
    rows.extend([m if i == j else 0 for j in range(dimension)] for i in range(dimension))
    snf = smith_normal_form(int_matrix(rows))
    factors = [m // d for d in reversed(snf.factors)]
    return tuple(f for f in factors if f > 1)


class SymmetryGroup:
    """Finite abelian group of phase vectors, fully materialized."""

    def __init__(
        self,
        generators: tuple[PhaseVector, ...],
        elements: tuple[PhaseVector, ...],
        structure: tuple[int, ...],
    ):
        self.generators = generators
        self.elements = elements
        self.structure = structure
        self._element_set = frozenset(elements)

    @classmethod
    def generate(cls, generators: Iterable[PhaseVector], dimension: int) -> "SymmetryGroup":
        gens = [g for g in generators]
        if any(g.dimension != dimension for g in gens):
            raise ValueError("generator dimension mismatch")
        m = lcm(1, *(g.order() for g in gens))
        scaled = [_scale(g, m) for g in gens]
        closure = _closure_scaled(scaled, m, dimension)
        minimal = _minimal_generators(closure, m, dimension)
        elements = tuple(
            PhaseVector(tuple(Fraction(a, m) for a in e)) for e in closure
        )
        gen_vecs = tuple(PhaseVector(tuple(Fraction(a, m) for a in g)) for g in minimal)
        if not gen_vecs:
            gen_vecs = (PhaseVector.canonical([0] * dimension),)
        structure = _invariant_factors(minimal, m, dimension) if minimal else ()
        return cls(gen_vecs, elements, structure)

    @classmethod
    def trivial(cls, dimension: int) -> "SymmetryGroup":
        return cls.generate([PhaseVector.canonical([0] * dimension)], dimension)

    @classmethod
    def from_generator_strings(cls, texts: Iterable[str], dimension: int) -> "SymmetryGroup":
        return cls.generate([PhaseVector.from_string(t) for t in texts], dimension)

    def generator_strings(self) -> list[str]:
        return [g.as_string() for g in self.generators]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dimension(self) -> int:
        return self.elements[0].dimension

    @property
    def exponent(self) -> int:
        return lcm(1, *(g.order() for g in self.generators))

    def coordinate_moduli(self) -> tuple[int, ...]:
        """Per-coordinate denominator bound over the whole group."""
        mods = [1] * self.dimension
        for g in self.generators:
            for j, e in enumerate(g.entries):
                mods[j] = lcm(mods[j], e.denominator)
        return tuple(mods)

    def scaled_elements(self, moduli: Sequence[int] | None = None) -> list[tuple[int, ...]]:
        """Elements as integer tuples, coordinate j scaled by moduli[j]."""
        mods = tuple(moduli) if moduli is not None else self.coordinate_moduli()
        return [tuple(int(e * m) for e, m in zip(el.entries, mods)) for el in self.elements]

    def __contains__(self, vec: PhaseVector) -> bool:
        return vec in self._element_set

    def __iter__(self) -> Iterator[PhaseVector]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymmetryGroup) and self._element_set == other._element_set

    def __hash__(self) -> int:
        return hash(self._element_set)

    def is_subgroup_of(self, other: "SymmetryGroup") -> bool:
        return self._element_set <= other._element_set

    def __repr__(self) -> str:
        shape = "x".join(f"Z/{f}" for f in self.structure) or "trivial"
        return f"SymmetryGroup(order={self.order}, {shape})"


# ---------------------------------------------------------------------------
# Groups attached to a potential
# ---------------------------------------------------------------------------


@lru_cache(maxsize=128)
def aut_group(potential: Potential) -> SymmetryGroup:
    """All diagonal phase symmetries; generated by the columns of A^-1."""
    det = abs(mat_det(potential.matrix))
    if det > GROUP_SIZE_CAP:
        raise GroupSizeError(f"|det A| = {det} exceeds the cap of {GROUP_SIZE_CAP}")
    inv = invert_rational_matrix(potential.matrix)
    columns = zip(*inv)
    gens = [PhaseVector.canonical(col) for col in columns]
    group = SymmetryGroup.generate(gens, potential.dimension)
    assert group.order == det, "automorphism group order must equal |det A|"
    return group


def grading_element(potential: Potential) -> PhaseVector:
    """Phase vector of the exponential grading operator (the charges mod 1)."""
    charges = compute_charges(potential)
    vec = PhaseVector.canonical(charges.q)
    assert vec in aut_group(potential)
    return vec


@lru_cache(maxsize=128)
def sl_subgroup(potential: Potential) -> SymmetryGroup:
    """Subgroup of aut_group whose coordinates sum to an integer."""
    aut = aut_group(potential)
    members = [e for e in aut.elements if e.sum_is_integral()]
    m = aut.exponent
    scaled = [_scale(e, m) for e in members]
    gens = _minimal_generators(sorted(scaled), m, potential.dimension)
    gen_vecs = [PhaseVector(tuple(Fraction(a, m) for a in g)) for g in gens]
    if not gen_vecs:
        gen_vecs = [PhaseVector.canonical([0] * potential.dimension)]
    return SymmetryGroup.generate(gen_vecs, potential.dimension)


def grading_subgroup(potential: Potential) -> SymmetryGroup:
    """The cyclic group generated by the grading element."""
    return SymmetryGroup.generate([grading_element(potential)], potential.dimension)


def require_admissible(potential: Potential, group: SymmetryGroup) -> None:
    """Check <J> <= group <= SL; raise AdmissibilityError otherwise."""
    charges = compute_charges(potential)
    if charges.cy_degree is None:
        raise AdmissibilityError(
            f"J_W not in SL_W: charge sum {sum(charges.q)} is not a positive integer"
        )
    j = grading_element(potential)
    if j not in group:
        raise AdmissibilityError("group does not contain the grading element")
    if not group.is_subgroup_of(sl_subgroup(potential)):
        raise AdmissibilityError("group is not contained in the determinant-one subgroup")


def admissible_subgroups(potential: Potential) -> list[SymmetryGroup]:
    """All groups between <J> and SL, enumerated through the quotient SL/<J>."""
    charges = compute_charges(potential)
    if charges.cy_degree is None:
        raise AdmissibilityError(
            f"J_W not in SL_W: charge sum {sum(charges.q)} is not a positive integer"
        )
    sl = sl_subgroup(potential)
    m = sl.exponent
    d = potential.dimension
    j_scaled = _scale(grading_element(potential), m)
    j_multiples = []
    cur = (0,) * d
    while True:
        j_multiples.append(cur)
        cur = tuple((a + b) % m for a, b in zip(cur, j_scaled))
        if cur == (0,) * d:
            break

    def label(e: tuple[int, ...]) -> tuple[int, ...]:
        return min(tuple((a + b) % m for a, b in zip(e, k)) for k in j_multiples)

    sl_scaled = [_scale(e, m) for e in sl.elements]
    labels = sorted({label(e) for e in sl_scaled})
    zero_label = label((0,) * d)
    label_add = {
        (a, b): label(tuple((x + y) % m for x, y in zip(a, b)))
        for a in labels
        for b in labels
    }

    def close(subset: frozenset) -> frozenset:
        out = set(subset) | {zero_label}
        frontier = list(out)
        while frontier:
            nxt = []
            for a in frontier:
                for b in list(out):
                    s = label_add[(a, b)]
                    if s not in out:
                        out.add(s)
                        nxt.append(s)
            frontier = nxt
        return frozenset(out)

    found = {frozenset({zero_label})}
    queue = [frozenset({zero_label})]
    while queue:
        current = queue.pop()
        for x in labels:
            if x in current:
                continue
            bigger = close(current | {x})
            if bigger not in found:
                found.add(bigger)
                queue.append(bigger)

    groups = []
    for subset in found:
        members = [e for e in sl_scaled if label(e) in subset]
        gens = _minimal_generators(sorted(members), m, d)
        gens.append(j_scaled)
        vecs = [PhaseVector(tuple(Fraction(a, m) for a in g)) for g in gens]
        groups.append(SymmetryGroup.generate(vecs, d))
    groups.sort(key=lambda g: (g.order, tuple(e.entries for e in g.elements)))
    return groups


def dual_group(potential: Potential, group: SymmetryGroup) -> SymmetryGroup:
    """Symmetries of the transposed potential pairing integrally with group.

    The pairing is p_bar . A . p; membership is checked against the group's
    generators in exact scaled-integer arithmetic.
    """
    aut = aut_group(potential)
    if not group.is_subgroup_of(aut):
        raise ValueError("group is not a subgroup of the automorphism group")
    ambient = aut_group(transpose_potential(potential))
    mbar = ambient.exponent
    mg = group.exponent
    a = potential.matrix
    d = potential.dimension
    modulus = mbar * mg
    # For each generator v of the group, precompute A.v (scaled by mg).
    paired = []
    for gen in group.generators:
        v = _scale(gen, mg)
        paired.append(tuple(sum(a[i][j] * v[j] for j in range(d)) for i in range(d)))
    members = []
    for el in ambient.elements:
        u = _scale(el, mbar)
        if all(sum(ui * wi for ui, wi in zip(u, w)) % modulus == 0 for w in paired):
            members.append(el)
    m2 = ambient.exponent
    scaled = sorted(_scale(e, m2) for e in members)
    gens = _minimal_generators(scaled, m2, d)
    vecs = [PhaseVector(tuple(Fraction(x, m2) for x in g)) for g in gens]
    if not vecs:
        vecs = [PhaseVector.canonical([0] * d)]
    return SymmetryGroup.generate(vecs, d)


def theta_coords(vec: PhaseVector) -> tuple[Fraction, ...]:
    """Canonical coordinates of a group element, each in [0, 1)."""
    return vec.entries


def box_representatives(group: SymmetryGroup) -> list[PhaseVector]:
    """One canonical representative per group element (coordinates in [0,1))."""
    return list(group.elements)
