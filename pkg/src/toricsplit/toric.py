"""Fans, torus-invariant divisors, and the Picard lattice.

A fan is stored as its primitive ray generators together with the ray
index sets of its maximal cones.  A divisor sum(a_ray D_ray) is just the
coefficient sequence ``a`` ordered like the rays; a divisor class is an
integer vector in the canonical Picard basis computed by `pic_basis`.

Only smooth complete fans are accepted by the downstream machinery.
Projectivity is not tested separately; every fan in the bundled corpus
is projective, and validation reports record that assumption.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

from .errors import FanFormatError, NotSmoothCompleteError
from .lattice import (
    dot,
    hnf_rows,
    integer_kernel,
    mat_mul,
    smith_normal_form,
    solve_rational,
    transpose,
    vec_gcd,
)
from .polyhedra import dim_and_lattice_points, polytope_of_divisor


@dataclass(frozen=True)
class Fan:
    rank: int
    rays: tuple
    max_cones: tuple

    @classmethod
    def from_data(cls, rank, rays, max_cones):
        rank = int(rank)
        rays = tuple(tuple(int(c) for c in ray) for ray in rays)
        if rank < 1:
            raise FanFormatError("rank must be positive")
        if not rays:
            raise FanFormatError("a fan needs at least one ray")
        for ray in rays:
            if len(ray) != rank:
                raise FanFormatError(f"ray {list(ray)} does not have length {rank}")
            if not any(ray):
                raise FanFormatError("zero vector is not a valid ray")
            if vec_gcd(ray) != 1:
                raise FanFormatError(f"ray {list(ray)} is not primitive")
        if len(set(rays)) != len(rays):
            raise FanFormatError("duplicate rays")
        cones = []
        for cone in max_cones:
            idx = tuple(sorted(int(i) for i in cone))
            if len(set(idx)) != len(idx):
                raise FanFormatError(f"cone {list(cone)} repeats a ray index")
            if not idx:
                raise FanFormatError("empty maximal cone")
            if idx[0] < 0 or idx[-1] >= len(rays):
                raise FanFormatError(f"cone {list(cone)} has a ray index out of range")
            cones.append(idx)
        if not cones:
            raise FanFormatError("a fan needs at least one maximal cone")
        return cls(rank=rank, rays=rays, max_cones=tuple(sorted(set(cones))))

    @classmethod
    def from_dict(cls, data):
        try:
            return cls.from_data(data["rank"], data["rays"], data["max_cones"])
        except (KeyError, TypeError) as exc:
            raise FanFormatError(f"bad fan document: {exc}") from exc

    def to_dict(self):
        return {
            "rank": self.rank,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
        }

    def canonical_key(self) -> str:
        """Representation-independent key: rays sorted, cones remapped."""
        order = sorted(range(len(self.rays)), key=lambda i: self.rays[i])
        rename = {old: new for new, old in enumerate(order)}
        cones = sorted(tuple(sorted(rename[i] for i in cone)) for cone in self.max_cones)
        return json.dumps(
            {
                "rank": self.rank,
                "rays": [list(self.rays[i]) for i in order],
                "max_cones": [list(c) for c in cones],
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class ValidationReport:
    smooth: bool
    complete: bool
    simplicial: bool
    notes: tuple = ("projectivity assumed",)

    def ok(self):
        return self.smooth and self.complete


def _det(mat):
    n = len(mat)
    m = [row[:] for row in mat]
    sign = 1
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        for i in range(c + 1, n):
            # fraction-free forward elimination on rationals
            f = Fraction(m[i][c], m[c][c])
            m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    for c in range(n):
        det *= m[c][c]
    return det * sign


def validate_fan(fan: Fan) -> ValidationReport:
    """Smoothness, completeness and simpliciality of a fan.

    Completeness uses facet pairing: every facet of every maximal cone
    must be shared by exactly two maximal cones, and the facet adjacency
    graph must be connected.
    """
    n = fan.rank
    simplicial = all(len(cone) == n for cone in fan.max_cones) and all(
        _det([list(fan.rays[i]) for i in cone]) != 0
        for cone in fan.max_cones
        if len(cone) == n
    )
    smooth = simplicial and all(
        abs(_det([list(fan.rays[i]) for i in cone])) == 1 for cone in fan.max_cones
    )
    complete = False
    if simplicial:
        facets = {}
        for ci, cone in enumerate(fan.max_cones):
            for drop in cone:
                facet = tuple(i for i in cone if i != drop)
                facets.setdefault(facet, []).append(ci)
        complete = all(len(cs) == 2 for cs in facets.values())
        if complete:
            # connectivity across shared facets
            adj = {i: set() for i in range(len(fan.max_cones))}
            for cs in facets.values():
                adj[cs[0]].add(cs[1])
                adj[cs[1]].add(cs[0])
            seen = {0}
            stack = [0]
            while stack:
                for j in adj[stack.pop()]:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
            complete = len(seen) == len(fan.max_cones)
    return ValidationReport(smooth=smooth, complete=complete, simplicial=simplicial)


def require_smooth_complete(fan: Fan):
    report = validate_fan(fan)
    if not report.ok():
        raise NotSmoothCompleteError(
            f"fan is not smooth and complete (smooth={report.smooth}, "
            f"complete={report.complete})"
        )


# ---------------------------------------------------------------------------
# Picard group


@dataclass(frozen=True)
class PicBasis:
    """Canonical coordinates on Pic X.

    projection sends a ray-coefficient vector to the class of its
    divisor; section_matrix picks one divisor back per class, with
    projection @ section = identity.  The projection rows are the
    Hermite normal form basis of the lattice of linear relations among
    the rays, so the coordinates are reproducible across runs.
    """

    projection: tuple
    section_matrix: tuple

    @property
    def rank(self):
        return len(self.projection)

    def to_class(self, coeffs):
        return tuple(dot(row, coeffs) for row in self.projection)

    def section(self, cls):
        return tuple(dot(row, cls) for row in self.section_matrix)

    @property
    def zero(self):
        return (0,) * self.rank


@lru_cache(maxsize=None)
def pic_basis(fan: Fan) -> PicBasis:
    require_smooth_complete(fan)
    ray_matrix = [list(r) for r in fan.rays]
    relations = integer_kernel(transpose(ray_matrix))
    proj = hnf_rows(relations)
    k = len(proj)
    assert k == len(fan.rays) - fan.rank
    s = smith_normal_form(proj)
    if any(x != 1 for x in s.diagonal()):
        raise NotSmoothCompleteError("class lattice has torsion")
    # u @ proj @ v = [I | 0], so proj @ (v[:, :k] @ u) = identity
    v_cols = [row[:k] for row in s.v]
    section = mat_mul(v_cols, s.u)
    return PicBasis(
        projection=tuple(tuple(row) for row in proj),
        section_matrix=tuple(tuple(row) for row in section),
    )


def divisor_class(fan: Fan, coeffs):
    return pic_basis(fan).to_class(tuple(coeffs))


def div_char(fan: Fan, m):
    """Principal divisor of the character with exponent vector m."""
    return tuple(dot(m, ray) for ray in fan.rays)


def canonical_divisor(fan: Fan):
    return (-1,) * len(fan.rays)


# ---------------------------------------------------------------------------
# Cone tests


def _cartier_data(fan: Fan, coeffs):
    for cone in fan.max_cones:
        mat = [list(fan.rays[i]) for i in cone]
        m = solve_rational(mat, [-Fraction(coeffs[i]) for i in cone])
        assert m is not None, "smooth cones have unique Cartier data"
        yield cone, m


def is_nef(fan: Fan, coeffs) -> bool:
    """Support function convexity: <m_cone, ray> >= -a_ray everywhere."""
    require_smooth_complete(fan)
    for cone, m in _cartier_data(fan, coeffs):
        for i, ray in enumerate(fan.rays):
            if dot(m, ray) < -Fraction(coeffs[i]):
                return False
    return True


def is_ample(fan: Fan, coeffs) -> bool:
    """Strict convexity: equality only on the rays of each cone."""
    require_smooth_complete(fan)
    for cone, m in _cartier_data(fan, coeffs):
        for i, ray in enumerate(fan.rays):
            if i in cone:
                continue
            if dot(m, ray) <= -Fraction(coeffs[i]):
                return False
    return True


def is_nef_class(fan: Fan, cls) -> bool:
    return is_nef(fan, pic_basis(fan).section(cls))


def is_ample_class(fan: Fan, cls) -> bool:
    return is_ample(fan, pic_basis(fan).section(cls))


def is_nef_qdivisor(fan: Fan, coeffs) -> bool:
    """Nef test for rational coefficients via a cleared multiple."""
    den = 1
    for c in coeffs:
        den = lcm(den, Fraction(c).denominator)
    return is_nef(fan, [int(Fraction(c) * den) for c in coeffs])


def is_effective_class(fan: Fan, cls) -> bool:
    """True iff some representative has all coefficients nonnegative,
    i.e. the section polytope of any representative has a lattice point."""
    rep = pic_basis(fan).section(cls)
    _, points = dim_and_lattice_points(polytope_of_divisor(fan, rep))
    return bool(points)


# ---------------------------------------------------------------------------
# Constructions


def product_fan(f: Fan, g: Fan) -> Fan:
    rays = [tuple(r) + (0,) * g.rank for r in f.rays]
    rays += [(0,) * f.rank + tuple(r) for r in g.rays]
    shift = len(f.rays)
    cones = [
        tuple(sorted(tuple(cf) + tuple(i + shift for i in cg)))
        for cf in f.max_cones
        for cg in g.max_cones
    ]
    return Fan.from_data(f.rank + g.rank, rays, cones)


def projective_space(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays.append((-1,) * n)
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan.from_data(n, rays, cones)


def hirzebruch(a: int) -> Fan:
    rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    cones = [(0, 1), (1, 2), (2, 3), (0, 3)]
    return Fan.from_data(2, rays, cones)
