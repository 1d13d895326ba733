"""Sheaf cohomology of line bundles on smooth complete toric varieties.

The weight-m piece of H^q(X, O(D)) is the reduced simplicial cohomology,
one degree down, of the subcomplex of the fan's ray complex induced on
N(m) = {rays with <m, v_ray> < -a_ray}.  Weights are grouped into the
sign regions of the arrangement <m, v_ray> = -a_ray, so each region is
scored once and multiplied by its lattice point count.

Regions whose subcomplex has no reduced cohomology are skipped without
being enumerated; any contributing region must be bounded on a complete
variety, and an unbounded one raises immediately instead of looping.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, lcm

from .errors import TableIncompleteError, NotNefError, UnboundedPolyhedronError, UnboundedRegionError
from .lattice import rank_rational, vec_add
from .polyhedra import (
    HPolyhedron,
    affine_region_decomposition,
    dim_and_lattice_points,
)
from .toric import Fan, divisor_class, is_nef, pic_basis, require_smooth_complete


@lru_cache(maxsize=None)
def _ray_complex(fan: Fan):
    """All subsets of ray sets of cones, the abstract simplicial complex."""
    faces = {frozenset()}
    for cone in fan.max_cones:
        for size in range(1, len(cone) + 1):
            faces.update(frozenset(s) for s in itertools.combinations(cone, size))
    return frozenset(faces)


def _boundary_rank(lower, upper):
    """Rank over Q of the boundary map from span(upper) to span(lower)."""
    if not upper or not lower:
        return 0
    index = {f: i for i, f in enumerate(lower)}
    rows = []
    for face in upper:
        row = [0] * len(lower)
        for i, v in enumerate(face):
            sub = face[:i] + face[i + 1 :]
            row[index[sub]] = (-1) ** i
        rows.append(row)
    return rank_rational(rows)


@lru_cache(maxsize=None)
def _contribution(fan: Fan, vertices: frozenset):
    """Per-weight cohomology vector (h^0..h^n) of the induced subcomplex.

    Entry q is the reduced Betti number in degree q-1; the empty vertex
    set contributes (1, 0, ..., 0) through reduced degree -1.
    """
    n = fan.rank
    complex_faces = [f for f in _ray_complex(fan) if f <= vertices]
    by_dim = {}
    for f in complex_faces:
        by_dim.setdefault(len(f) - 1, []).append(tuple(sorted(f)))
    for faces in by_dim.values():
        faces.sort()
    out = []
    for q in range(n + 1):
        k = q - 1
        ck = by_dim.get(k, [])
        rank_in = _boundary_rank(by_dim.get(k - 1, []), ck)
        rank_out = _boundary_rank(ck, by_dim.get(k + 1, []))
        out.append(len(ck) - rank_in - rank_out)
    return tuple(out)


def _sheaf_cohomology_raw(fan: Fan, coeffs):
    """Cohomology from raw coefficients, bypassing the class cache."""
    n = fan.rank
    h = [0] * (n + 1)
    for region in affine_region_decomposition(fan.rays, list(coeffs)):
        vertices = frozenset(i for i, s in enumerate(region.signs) if s < 0)
        contrib = _contribution(fan, vertices)
        if not any(contrib):
            continue
        try:
            _, points = dim_and_lattice_points(region.closure)
        except UnboundedPolyhedronError as exc:
            raise UnboundedRegionError(
                f"weight region {region.signs} contributes cohomology but is "
                f"unbounded; the fan cannot be complete or the engine is broken"
            ) from exc
        count = sum(
            1 for m in points if region.contains_lattice_point(m, fan.rays, coeffs)
        )
        if count:
            for q in range(n + 1):
                h[q] += count * contrib[q]
    return tuple(h)


@lru_cache(maxsize=None)
def cohomology_of_class(fan: Fan, cls):
    """(h^0, ..., h^n) of the line bundle with the given class."""
    return _sheaf_cohomology_raw(fan, pic_basis(fan).section(tuple(cls)))


def sheaf_cohomology(fan: Fan, coeffs):
    """(h^0, ..., h^n) of O(sum a_ray D_ray), memoized per divisor class."""
    require_smooth_complete(fan)
    return cohomology_of_class(fan, divisor_class(fan, tuple(coeffs)))


def euler_char(fan: Fan, cls) -> int:
    return sum((-1) ** q * hq for q, hq in enumerate(cohomology_of_class(fan, cls)))


# ---------------------------------------------------------------------------
# Tables


@dataclass
class CohomologyTable:
    """Cohomology dimension vectors indexed by divisor class.

    For the splitting checker the table plays the role of the unknown
    bundle: values[c] is (h^0..h^n) of the bundle twisted by the line
    bundle of class c.
    """

    pic_rank: int
    dim: int
    values: dict = field(default_factory=dict)

    def get(self, cls):
        return self.values[tuple(cls)]

    def covers(self, classes):
        return [c for c in classes if tuple(c) not in self.values]

    def to_json_obj(self):
        rows = [
            {"class": list(c), "h": list(h)} for c, h in sorted(self.values.items())
        ]
        return {"pic_rank": self.pic_rank, "dim": self.dim, "rows": rows}

    @classmethod
    def from_json_obj(cls, data):
        rows = data["rows"] if isinstance(data, dict) else data
        values = {}
        for row in rows:
            values[tuple(int(x) for x in row["class"])] = tuple(
                int(x) for x in row["h"]
            )
        if isinstance(data, dict) and "pic_rank" in data:
            pic_rank = int(data["pic_rank"])
            dim = int(data["dim"])
        else:
            some = next(iter(values))
            pic_rank = len(some)
            dim = len(values[some]) - 1
        for h in values.values():
            if len(h) != dim + 1:
                raise ValueError("inconsistent cohomology vector lengths")
        return cls(pic_rank=pic_rank, dim=dim, values=values)

    @classmethod
    def of_bundle(cls, fan: Fan, summands, classes):
        """Table of a known sum of line bundles over the given classes.

        summands: iterable of (class, multiplicity).
        """
        table = cls(pic_rank=pic_basis(fan).rank, dim=fan.rank)
        for c in classes:
            c = tuple(c)
            total = [0] * (fan.rank + 1)
            for d_cls, mult in summands:
                hv = cohomology_of_class(fan, vec_add(d_cls, c))
                for q in range(fan.rank + 1):
                    total[q] += mult * hv[q]
            table.values[c] = tuple(total)
        return table


def cohomology_table(fan: Fan, classes) -> CohomologyTable:
    """Table of the structure sheaf twisted through the given classes,
    i.e. rows are just cohomology of the class itself."""
    table = CohomologyTable(pic_rank=pic_basis(fan).rank, dim=fan.rank)
    for c in classes:
        table.values[tuple(c)] = cohomology_of_class(fan, tuple(c))
    return table


def table_lookup(table: CohomologyTable, classes):
    missing = table.covers(classes)
    if missing:
        raise TableIncompleteError(missing)
    return [table.get(c) for c in classes]


# ---------------------------------------------------------------------------
# Vanishing floors


def bb_vanishing_floor(fan: Fan, qcoeffs) -> int:
    """dim of the section polyhedron of a nef Q-divisor d.

    Guarantees h^q(O(-ceil(d))) = 0 for all q below the returned floor
    (Batyrev-Borisov vanishing); callers use it as a certificate.
    """
    coeffs = [Fraction(c) for c in qcoeffs]
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    if not is_nef(fan, [int(c * den) for c in coeffs]):
        raise NotNefError("vanishing floor requires a nef divisor")
    poly = HPolyhedron(
        n=fan.rank,
        ineqs=tuple((tuple(ray), -a) for ray, a in zip(fan.rays, coeffs)),
    )
    dim, _ = dim_and_lattice_points(poly)
    return dim


def ceil_divisor(coeffs):
    return tuple(int(ceil(Fraction(c))) for c in coeffs)
