"""Rational polyhedra, hyperplane arrangements, and their faces.

Three consumers drive the design: section polytopes of divisors (lattice
point counts and affine dimension), the weight-space sign regions behind
the cohomology engine, and periodic arrangements on a torus R^n/Z^n whose
faces index the strata of the diagonal resolution.

Linear programming is replaced throughout by Fourier-Motzkin elimination
with strictness flags.  At this scale (dimension <= 4, a few dozen
inequalities) that is fast enough, stays exact, and produces rational
witness points, which the face enumeration needs anyway.

Inequality rows are triples ``(coeffs, rhs, strict)`` meaning
``coeffs . x >= rhs``, or ``> rhs`` when strict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, lcm
from typing import TYPE_CHECKING

from .errors import UnboundedPolyhedronError
from .lattice import (
    dot,
    hnf_rows,
    identity_matrix,
    integer_kernel,
    primitive,
    rank_rational,
    rref,
    solve_rational,
    vec_gcd,
)

if TYPE_CHECKING:  # pragma: no cover
    from .toric import Fan


# ---------------------------------------------------------------------------
# Fourier-Motzkin core


def _norm_row(coeffs, rhs, strict):
    """Scale a row to primitive integer coefficients, rhs stays rational."""
    coeffs = [Fraction(c) for c in coeffs]
    rhs = Fraction(rhs)
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    ivec = [int(c * den) for c in coeffs]
    rhs = rhs * den
    g = vec_gcd(ivec)
    if g > 1:
        ivec = [x // g for x in ivec]
        rhs = rhs / g
    return (tuple(ivec), rhs, strict)


def _tighten(rows):
    """Drop rows dominated by another row with the same normal."""
    best = {}
    for coeffs, rhs, strict in rows:
        cur = best.get(coeffs)
        if cur is None or rhs > cur[0] or (rhs == cur[0] and strict and not cur[1]):
            best[coeffs] = (rhs, strict)
    return [(c, r, s) for c, (r, s) in best.items()]


def _fm_eliminate(rows, k):
    pos, neg, rest = [], [], []
    for row in rows:
        c = row[0][k]
        (pos if c > 0 else neg if c < 0 else rest).append(row)
    out = list(rest)
    for cp, rp, sp in pos:
        for cn, rn, sn in neg:
            a, b = cp[k], -cn[k]
            coeffs = tuple(b * x + a * y for x, y in zip(cp, cn))
            rhs = b * rp + a * rn
            out.append(_norm_row(coeffs, rhs, sp or sn))
    return _tighten(out)


def fm_witness(rows, n):
    """A rational point satisfying every row, or None if none exists."""
    stages = [_tighten([_norm_row(*r) for r in rows])]
    for k in range(n - 1, -1, -1):
        stages.append(_fm_eliminate(stages[-1], k))
    for coeffs, rhs, strict in stages[-1]:
        if rhs > 0 or (strict and rhs == 0):
            return None
    x = [Fraction(0)] * n
    for k in range(n):
        lo = hi = None
        lo_strict = hi_strict = False
        for coeffs, rhs, strict in stages[n - 1 - k]:
            c = coeffs[k]
            if c == 0:
                continue
            val = (rhs - sum(coeffs[j] * x[j] for j in range(k))) / c
            if c > 0:
                if lo is None or val > lo:
                    lo, lo_strict = val, strict
                elif val == lo and strict:
                    lo_strict = True
            else:
                if hi is None or val < hi:
                    hi, hi_strict = val, strict
                elif val == hi and strict:
                    hi_strict = True
        if lo is None and hi is None:
            x[k] = Fraction(0)
        elif lo is None:
            x[k] = hi - 1
        elif hi is None:
            x[k] = lo + 1
        elif lo < hi:
            x[k] = (lo + hi) / 2
        else:
            # Fourier-Motzkin projections are exact, so a feasible final
            # stage guarantees a closed choice here.
            assert lo == hi and not lo_strict and not hi_strict
            x[k] = lo
    return tuple(x)


def _coordinate_bounds(rows, n, i):
    """(lo, hi) of coordinate i over the solution set; None marks unbounded."""
    reduced = _tighten([_norm_row(*r) for r in rows])
    for k in range(n):
        if k != i:
            reduced = _fm_eliminate(reduced, k)
    lo = hi = None
    for coeffs, rhs, strict in reduced:
        c = coeffs[i]
        if c == 0:
            continue
        val = rhs / c
        if c > 0:
            lo = val if lo is None else max(lo, val)
        else:
            hi = val if hi is None else min(hi, val)
    return lo, hi


# ---------------------------------------------------------------------------
# Closed polyhedra


@dataclass(frozen=True)
class HPolyhedron:
    """Closed polyhedron {x : <normal, x> >= bound for each inequality}."""

    n: int
    ineqs: tuple

    def rows(self):
        return [(tuple(normal), Fraction(bound), False) for normal, bound in self.ineqs]


def polytope_of_divisor(fan: "Fan", coeffs) -> HPolyhedron:
    """Section polyhedron {m : <m, v_ray> >= -a_ray} of sum(a_ray D_ray)."""
    return HPolyhedron(
        n=fan.rank,
        ineqs=tuple((tuple(ray), -Fraction(a)) for ray, a in zip(fan.rays, coeffs)),
    )


def dim_and_lattice_points(p: HPolyhedron):
    """Affine dimension (-1 when empty) and all lattice points of p.

    Raises UnboundedPolyhedronError when the recession cone is nontrivial;
    callers are expected to pass polytopes.
    """
    rows = p.rows()
    if fm_witness(rows, p.n) is None:
        return -1, []
    box = []
    for i in range(p.n):
        lo, hi = _coordinate_bounds(rows, p.n, i)
        if lo is None or hi is None:
            raise UnboundedPolyhedronError(f"coordinate {i} unbounded")
        box.append((ceil(lo), floor(hi)))
    points = []
    for m in itertools.product(*(range(lo, hi + 1) for lo, hi in box)):
        if all(dot(normal, m) >= bound for normal, bound in p.ineqs):
            points.append(tuple(m))
    points.sort()
    return _affine_dim(p), points


def _affine_dim(p: HPolyhedron):
    """Affine dimension of a nonempty bounded polyhedron via its vertices."""
    if p.n == 0:
        return 0
    verts = set()
    ineqs = list(p.ineqs)
    for subset in itertools.combinations(range(len(ineqs)), p.n):
        mat = [list(ineqs[i][0]) for i in subset]
        if rank_rational(mat) < p.n:
            continue
        x = solve_rational(mat, [ineqs[i][1] for i in subset])
        if x is None:
            continue
        if all(dot(normal, x) >= bound for normal, bound in ineqs):
            verts.add(tuple(x))
    assert verts, "bounded nonempty polyhedron must have a vertex"
    verts = sorted(verts)
    base = verts[0]
    diffs = [[x - b for x, b in zip(v, base)] for v in verts[1:]]
    return rank_rational(diffs) if diffs else 0


# ---------------------------------------------------------------------------
# Faces of affine arrangements

# A hyperplane is (normal, level) for the equation <x, normal> = level,
# with normal a primitive integer vector whose first nonzero entry is
# positive.


def _sign_canon(v):
    lead = next((x for x in v if x), 0)
    return tuple(-x for x in v) if lead < 0 else tuple(v)


def _canon_hyperplane(normal, level):
    normal = [Fraction(c) for c in normal]
    level = Fraction(level)
    den = 1
    for c in normal:
        den = lcm(den, c.denominator)
    ivec = [int(c * den) for c in normal]
    level = level * den
    g = vec_gcd(ivec)
    if g > 1:
        ivec = [x // g for x in ivec]
        level = level / g
    lead = next((x for x in ivec if x), 0)
    if lead < 0:
        ivec = [-x for x in ivec]
        level = -level
    return tuple(ivec), level


def _affine_faces(hyperplanes, n, extra_rows=()):
    """All relatively open faces of an affine arrangement.

    hyperplanes: deduplicated (normal, level) pairs.  extra_rows further
    restrict the region of interest (used for the half-open unit cube);
    they cut the face set, they do not refine it.

    Yields (dim, sample) with sample a rational point in the relative
    interior of the face intersected with the extra-row region.
    """
    flats = {}
    for size in range(0, n + 1):
        for subset in itertools.combinations(hyperplanes, size):
            aug = [list(w) + [lvl] for w, lvl in subset]
            key = rref(aug) if aug else ()
            if key in flats:
                continue
            if any(not any(row[:-1]) and row[-1] for row in key):
                flats[key] = None  # inconsistent
                continue
            if subset:
                mat = [list(w) for w, _ in subset]
                point = solve_rational(mat, [lvl for _, lvl in subset])
                basis = integer_kernel(mat)
            else:
                point = [Fraction(0)] * n
                basis = identity_matrix(n)
            flats[key] = (point, basis)

    for flat in flats.values():
        if flat is None:
            continue
        point, basis = flat
        d = len(basis)

        # Reduce the restriction rows into flat coordinates; skip the flat
        # if a row excludes it entirely.
        base_rows = []
        feasible = True
        for coeffs, rhs, strict in extra_rows:
            cb = tuple(dot(coeffs, b) for b in basis)
            const = dot(coeffs, point)
            if any(cb):
                base_rows.append((cb, Fraction(rhs) - const, strict))
            elif const < rhs or (strict and const == rhs):
                feasible = False
                break
        if not feasible:
            continue

        induced = {}
        for w, lvl in hyperplanes:
            wb = tuple(dot(w, b) for b in basis)
            off = lvl - dot(w, point)
            if any(wb):
                induced[_canon_hyperplane(wb, off)] = None
            elif off != 0:
                pass  # parallel, disjoint from flat
        induced = list(induced)

        # Split the flat into chambers of the induced arrangement.  Each
        # cell keeps a witness so most feasibility checks are sign tests.
        wit0 = fm_witness(base_rows, d)
        if wit0 is None:
            continue
        cells = [(base_rows, wit0)]
        for wb, off in induced:
            nxt = []
            for rows, wit in cells:
                val = dot(wb, wit) - off
                for sgn in (1, -1):
                    row = (tuple(sgn * c for c in wb), sgn * off, True)
                    if sgn * val > 0:
                        nxt.append((rows + [row], wit))
                        continue
                    w2 = fm_witness(rows + [row], d)
                    if w2 is not None:
                        nxt.append((rows + [row], w2))
            cells = nxt
        for _, wit in cells:
            sample = tuple(
                point[i] + sum(wit[j] * basis[j][i] for j in range(d))
                for i in range(n)
            )
            yield d, sample


# ---------------------------------------------------------------------------
# Periodic arrangements on the torus R^n / Z^n


@dataclass(frozen=True)
class Face:
    """One stratum: its dimension, a rational sample point with coordinates
    in [0,1), the input normals active at the sample, and a descriptor key
    canonical under integer translation."""

    dim: int
    sample: tuple
    active: tuple
    key: tuple


@dataclass(frozen=True)
class FaceComplex:
    ambient: str
    n: int
    normals: tuple
    faces: tuple

    def counts(self):
        out = [0] * (self.n + 1)
        for f in self.faces:
            out[f.dim] += 1
        return tuple(out)

    def locate(self, point):
        """Faces whose stratum contains the given torus point."""
        geo = _geometric_normals(self.normals)
        reduced = [Fraction(c) - floor(Fraction(c)) for c in point]
        key = _torus_key(reduced, geo, _torus_shifts(geo))
        return [f for f in self.faces if f.key == key]


def _geometric_normals(normals):
    return sorted({_sign_canon(primitive(w)) for w in normals})


def _descriptor(point, geo):
    out = []
    for w in geo:
        val = dot(point, w)
        fl = floor(val)
        out.append((1, int(val)) if val == fl and val.denominator == 1 else (0, fl))
    return tuple(out)


def _torus_key(point, geo, shifts):
    desc = _descriptor([Fraction(c) for c in point], geo)
    return min(
        tuple((on, k + s) for (on, k), s in zip(desc, shift)) for shift in shifts
    )


def _torus_shifts(geo):
    """Integer level-shift patterns (<t, w>)_w realizable by t in Z^n,
    bounded per normal by its 1-norm.  These are the only translations
    that can identify two faces meeting the unit cube."""
    n = len(geo[0])
    gens = [[w[i] for w in geo] for i in range(n)]
    basis = hnf_rows(gens)
    s = len(basis)
    bounds = [sum(abs(c) for c in w) for w in geo]
    if s == 0:
        return [tuple(0 for _ in geo)]
    rows = []
    for j in range(len(geo)):
        col = tuple(basis[k][j] for k in range(s))
        rows.append((col, Fraction(-bounds[j]), False))
        rows.append((tuple(-c for c in col), Fraction(-bounds[j]), False))
    box = []
    for k in range(s):
        lo, hi = _coordinate_bounds(rows, s, k)
        assert lo is not None and hi is not None
        box.append((ceil(lo), floor(hi)))
    shifts = set()
    for u in itertools.product(*(range(lo, hi + 1) for lo, hi in box)):
        sigma = tuple(sum(u[k] * basis[k][j] for k in range(s)) for j in range(len(geo)))
        if all(abs(x) <= b for x, b in zip(sigma, bounds)):
            shifts.add(sigma)
    return sorted(shifts)


def torus_arrangement_faces(normals, n) -> FaceComplex:
    """Faces of the periodic arrangement {x : <x, w> in Z for some w}.

    Enumerates the faces of the affine arrangement of all integer levels
    meeting the unit cube, keeps those meeting the half-open cube
    [0,1)^n, and glues faces identified by integer translation.
    """
    normals = tuple(tuple(int(c) for c in w) for w in normals)
    if any(not any(w) for w in normals):
        raise ValueError("zero normal")
    if not normals:
        zero = tuple(Fraction(0) for _ in range(n))
        return FaceComplex("torus", n, normals, (Face(n, zero, (), ()),))
    geo = _geometric_normals(normals)
    hyps = []
    for w in geo:
        k_lo = sum(min(c, 0) for c in w)
        k_hi = sum(max(c, 0) for c in w)
        hyps.extend((w, Fraction(k)) for k in range(k_lo, k_hi + 1))
    cube = []
    for i in range(n):
        e = tuple(int(i == j) for j in range(n))
        cube.append((e, Fraction(0), False))
        cube.append((tuple(-c for c in e), Fraction(-1), True))
    shifts = _torus_shifts(geo)

    groups = {}
    for dim, sample in _affine_faces(hyps, n, cube):
        key = _torus_key(sample, geo, shifts)
        cur = groups.get(key)
        if cur is None or (dim, sample) < cur:
            groups[key] = (dim, sample)
        else:
            assert cur[0] == dim, "glued faces must share a dimension"
    faces = []
    for key, (dim, sample) in groups.items():
        active = tuple(
            i for i, w in enumerate(normals) if dot(sample, w).denominator == 1
        )
        faces.append(Face(dim=dim, sample=sample, active=active, key=key))
    faces.sort(key=lambda f: (f.dim, f.sample))
    return FaceComplex("torus", n, normals, tuple(faces))


# ---------------------------------------------------------------------------
# Sign regions of a weight-space arrangement


@dataclass(frozen=True)
class SignRegion:
    """Locus where every <m, v_i> + a_i has a fixed sign (-1, 0 or +1).

    closure relaxes the strict inequalities; together with signs it
    recovers the exact region.
    """

    signs: tuple
    sample: tuple
    closure: HPolyhedron

    def contains_lattice_point(self, m, normals, bounds):
        for s, v, a in zip(self.signs, normals, bounds):
            val = dot(m, v) + a
            if (val > 0) - (val < 0) != s:
                return False
        return True


def affine_region_decomposition(normals, bounds):
    """All faces of the arrangement <m, v_i> = -a_i over R^n.

    Full- and lower-dimensional regions are listed separately; each comes
    with a sign per input hyperplane (several inputs may define the same
    geometric hyperplane and then share signs up to orientation).
    """
    normals = [tuple(v) for v in normals]
    n = len(normals[0]) if normals else 0
    hyps = {}
    for v, a in zip(normals, bounds):
        if not any(v):
            raise ValueError("zero normal")
        hyps[_canon_hyperplane(v, -Fraction(a))] = None
    regions = []
    for _, sample in _affine_faces(list(hyps), n):
        signs = []
        for v, a in zip(normals, bounds):
            val = dot(sample, v) + a
            signs.append((val > 0) - (val < 0))
        ineqs = []
        for s, v, a in zip(signs, normals, bounds):
            if s >= 0:
                ineqs.append((tuple(v), -Fraction(a)))
            if s <= 0:
                ineqs.append((tuple(-c for c in v), Fraction(a)))
        regions.append(
            SignRegion(
                signs=tuple(signs),
                sample=sample,
                closure=HPolyhedron(n=n, ineqs=tuple(ineqs)),
            )
        )
    regions.sort(key=lambda r: r.signs)
    return regions
