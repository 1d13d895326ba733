"""Terms of the diagonal resolution and their certified properties.

The torus M_R/M carries the Bondal stratification cut out by the ray
arrangement <x, v_ray> in Z.  Labels of strata are line bundle classes
obtained by rounding; the terms of the resolution of the diagonal on
X x X are box products of labels read off the antidiagonal copy of the
torus, one term per stratum, in homological degree equal to the stratum
dimension.

`audit_terms` re-derives, for every term, the three facts the vanishing
argument consumes: an effective representative of -E, a fractional
representative of E with coefficients in [0,1), and the dimension bound
p <= dim P_{-E}.  `certify_ample_support` combines those symbolic
certificates with direct cohomology checks on sampled ample divisors.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor

from .errors import InternalInconsistencyError
from .lattice import dot, vec_neg, vec_sub
from .polyhedra import (
    fm_witness,
    dim_and_lattice_points,
    polytope_of_divisor,
    torus_arrangement_faces,
)
from .cohomology import cohomology_of_class
from .toric import Fan, is_ample_class, pic_basis, require_smooth_complete


@dataclass(frozen=True)
class BondalLabel:
    """Rounded divisor class and fractional parts of a torus point."""

    cls: tuple
    fractional: tuple


def bondal_label(fan: Fan, point) -> BondalLabel:
    """Label of the stratification at a rational point of M_R/M.

    The class of sum(floor(<x, v_ray>) D_ray) and the fractional parts
    <x, v_ray> - floor(...) are both invariant under lattice translation
    of the point.
    """
    vals = [Fraction(dot(point, ray)) for ray in fan.rays]
    floors = [floor(v) for v in vals]
    fracs = tuple(v - f for v, f in zip(vals, floors))
    return BondalLabel(cls=divisor_class_checked(fan, floors), fractional=fracs)


def divisor_class_checked(fan, coeffs):
    return pic_basis(fan).to_class(tuple(coeffs))


@lru_cache(maxsize=None)
def thomsen_collection(fan: Fan):
    """Classes of line bundle summands of high Frobenius pushforwards of O,
    computed as the label set of the ray stratification."""
    require_smooth_complete(fan)
    fc = torus_arrangement_faces(fan.rays, fan.rank)
    return tuple(sorted({bondal_label(fan, f.sample).cls for f in fc.faces}))


@dataclass(frozen=True)
class Stratum:
    """Stratum of the antidiagonal torus with its label pair.

    out_cls is the label at the sample (the output-side factor of the
    box product); coh_cls is the label at the negated sample, the factor
    whose cohomology the spectral sequence consumes.
    """

    dim: int
    sample: tuple
    out_cls: tuple
    coh_cls: tuple


@lru_cache(maxsize=None)
def diagonal_strata(fan: Fan):
    require_smooth_complete(fan)
    normals = fan.rays + tuple(vec_neg(r) for r in fan.rays)
    fc = torus_arrangement_faces(normals, fan.rank)
    strata = []
    for f in fc.faces:
        out = bondal_label(fan, f.sample)
        coh = bondal_label(fan, vec_neg(f.sample))
        strata.append(
            Stratum(dim=f.dim, sample=f.sample, out_cls=out.cls, coh_cls=coh.cls)
        )
    strata.sort(key=lambda s: (s.dim, s.sample))
    return tuple(strata)


@dataclass(frozen=True)
class ResolutionTerms:
    """Multiset of label pairs (out, coh) per homological degree."""

    by_degree: tuple  # index p -> sorted tuple of (out_cls, coh_cls)

    def ranks(self):
        return tuple(len(terms) for terms in self.by_degree)

    def length(self):
        return len(self.by_degree) - 1

    def multiplicities(self):
        """Yields (p, out_cls, coh_cls, mult)."""
        for p, terms in enumerate(self.by_degree):
            for (out, coh), mult in sorted(Counter(terms).items()):
                yield p, out, coh, mult

    def coh_classes(self):
        return sorted({coh for terms in self.by_degree for _, coh in terms})

    def to_json_obj(self):
        return [
            {
                "p": p,
                "terms": [
                    {"Eprime": list(out), "E": list(coh), "mult": mult}
                    for _, out, coh, mult in group
                ],
            }
            for p, group in _group_by_degree(self)
        ]


def _group_by_degree(terms: ResolutionTerms):
    for p in range(len(terms.by_degree)):
        yield p, [m for m in terms.multiplicities() if m[0] == p]


@lru_cache(maxsize=None)
def build_resolution_terms(fan: Fan) -> ResolutionTerms:
    strata = diagonal_strata(fan)
    top = max(s.dim for s in strata)
    buckets = [[] for _ in range(top + 1)]
    for s in strata:
        buckets[s.dim].append((s.out_cls, s.coh_cls))
    return ResolutionTerms(by_degree=tuple(tuple(sorted(b)) for b in buckets))


# ---------------------------------------------------------------------------
# Term audits


@dataclass(frozen=True)
class TermAudit:
    p: int
    out_cls: tuple
    coh_cls: tuple
    mult: int
    effective_rep: tuple  # coefficients of -E, all >= 0 when ok_effective
    fractional: tuple  # c_ray in [0,1) with -sum(c D) ~ E, when ok_fractional
    polytope_dim: int
    ok_effective: bool
    ok_fractional: bool
    ok_dim: bool

    @property
    def ok(self):
        return self.ok_effective and self.ok_fractional and self.ok_dim

    def to_json_obj(self):
        return {
            "p": self.p,
            "Eprime": list(self.out_cls),
            "E": list(self.coh_cls),
            "mult": self.mult,
            "effective_rep": list(self.effective_rep) if self.effective_rep else None,
            "fractional": [str(c) for c in self.fractional] if self.fractional else None,
            "polytope_dim": self.polytope_dim,
            "ok_effective": self.ok_effective,
            "ok_fractional": self.ok_fractional,
            "ok_dim": self.ok_dim,
        }


def _fractional_representative(fan: Fan, cls):
    """c_ray in [0,1) with -sum(c_ray D_ray) rationally equivalent to cls.

    Solved as feasibility of -1 < rep_ray + <x, v_ray> <= 0 over x in
    M_Q; returns None when no such representative exists.
    """
    rep = pic_basis(fan).section(cls)
    rows = []
    for ray, a in zip(fan.rays, rep):
        rows.append((tuple(ray), Fraction(-1 - a), True))
        rows.append((vec_neg(ray), Fraction(a), False))
    x = fm_witness(rows, fan.rank)
    if x is None:
        return None
    c = tuple(-(a + dot(x, ray)) for ray, a in zip(fan.rays, rep))
    assert all(0 <= ci < 1 for ci in c)
    return c


def audit_terms(fan: Fan, terms: ResolutionTerms):
    """Re-derive the three term facts for every term; failed checks land
    in the report rather than being dropped."""
    pic = pic_basis(fan)
    audits = []
    for p, out, coh, mult in terms.multiplicities():
        neg_rep = pic.section(vec_neg(coh))
        dim_p, points = dim_and_lattice_points(polytope_of_divisor(fan, neg_rep))
        if points:
            m0 = points[0]
            eff = tuple(a + dot(m0, ray) for ray, a in zip(fan.rays, neg_rep))
            ok_eff = all(a >= 0 for a in eff)
        else:
            eff = ()
            ok_eff = False
        frac = _fractional_representative(fan, coh)
        if frac is None:
            frac = ()
            ok_frac = False
        else:
            # rational class of -sum(c D) must equal the class of E exactly
            ok_frac = pic.to_class(tuple(-c for c in frac)) == tuple(
                Fraction(x) for x in coh
            )
        audits.append(
            TermAudit(
                p=p,
                out_cls=out,
                coh_cls=coh,
                mult=mult,
                effective_rep=eff,
                fractional=frac,
                polytope_dim=dim_p,
                ok_effective=ok_eff,
                ok_fractional=ok_frac,
                ok_dim=p <= dim_p,
            )
        )
    return audits


# ---------------------------------------------------------------------------
# Ample support certification


@dataclass(frozen=True)
class TermSupport:
    p: int
    out_cls: tuple
    coh_cls: tuple
    symbolic_ok: bool
    empirical_failures: tuple  # (ample class, q, h^q) triples
    status: str  # proven | unproven | failed

    def to_json_obj(self):
        return {
            "p": self.p,
            "Eprime": list(self.out_cls),
            "E": list(self.coh_cls),
            "symbolic_ok": self.symbolic_ok,
            "empirical_failures": [
                {"ample": list(d), "q": q, "h": h} for d, q, h in self.empirical_failures
            ],
            "status": self.status,
        }


@dataclass(frozen=True)
class SupportReport:
    samples: tuple
    terms: tuple

    @property
    def all_proven(self):
        return all(t.status == "proven" for t in self.terms)

    def to_json_obj(self):
        return {
            "samples": [list(d) for d in self.samples],
            "all_proven": self.all_proven,
            "terms": [t.to_json_obj() for t in self.terms],
        }


def certify_ample_support(fan: Fan, terms: ResolutionTerms, sample_classes) -> SupportReport:
    """Check that every term's cohomology factor vanishes below its degree
    after twisting down by ample divisors.

    The symbolic layer is the term audit: when it passes, vanishing holds
    for every ample divisor, not just the samples.  The empirical layer
    recomputes h^q(O(E - D)) for the sampled D.  A symbolic pass with an
    empirical failure cannot happen unless the engine itself is broken,
    so it raises instead of reporting.
    """
    samples = [tuple(c) for c in sample_classes]
    for d in samples:
        if not is_ample_class(fan, d):
            raise ValueError(f"sample class {list(d)} is not ample")
    audits = {(a.p, a.out_cls, a.coh_cls): a.ok for a in audit_terms(fan, terms)}
    rows = []
    for p, out, coh, mult in terms.multiplicities():
        symbolic = audits[(p, out, coh)]
        failures = []
        for d in samples:
            hv = cohomology_of_class(fan, vec_sub(coh, d))
            for q in range(p):
                if hv[q]:
                    failures.append((d, q, hv[q]))
        if symbolic and failures:
            raise InternalInconsistencyError(
                f"term (p={p}, E={list(coh)}) passed the symbolic audit but "
                f"h^q(O(E-D)) != 0 at {failures[0]}"
            )
        status = "proven" if symbolic else ("unproven" if not failures else "failed")
        rows.append(
            TermSupport(
                p=p,
                out_cls=out,
                coh_cls=coh,
                symbolic_ok=symbolic,
                empirical_failures=tuple(failures),
                status=status,
            )
        )
    return SupportReport(samples=tuple(samples), terms=tuple(rows))


def sample_ample_classes(fan: Fan, count, seed=0, box=6):
    """Deterministic rejection sample of ample classes in a coefficient box."""
    rank = pic_basis(fan).rank
    rng = random.Random(seed)
    found = []
    seen = set()
    for _ in range(20000):
        cls = tuple(rng.randint(-2, box) for _ in range(rank))
        if cls in seen:
            continue
        seen.add(cls)
        if is_ample_class(fan, cls):
            found.append(cls)
            if len(found) == count:
                return found
    raise RuntimeError("could not find enough ample classes; widen the box")


def sample_nef_classes(fan: Fan, count, seed=0, box=6):
    from .toric import is_nef_class

    rank = pic_basis(fan).rank
    rng = random.Random(seed)
    found = []
    seen = set()
    for _ in range(20000):
        cls = tuple(rng.randint(-1, box) for _ in range(rank))
        if cls in seen:
            continue
        seen.add(cls)
        if is_nef_class(fan, cls):
            found.append(cls)
            if len(found) == count:
                return found
    raise RuntimeError("could not find enough nef classes; widen the box")
