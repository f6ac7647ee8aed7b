"""Rate-region polygons over exact rationals.

Regions are given as half-plane systems in the nonnegative quadrant and
turned into counterclockwise vertex lists.  Everything is a ``Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple

from .encoders import boundary_points, lower_bound_rank
from .errors import PreconditionError
from .netgraph import CutVector

LOW, HIGH = "Low", "High"
BOTH, OWN = "both", "own"

# decode mode (t1, t2) for points whose best construction comes from each region
REGION_MODES = {
    "base": (BOTH, BOTH),
    "region2": (BOTH, OWN),
    "region2p": (BOTH, OWN),
    "region3": (OWN, BOTH),
    "region3p": (OWN, BOTH),
    "region1": (OWN, OWN),
}
COMPARISON_ONLY = ("C_t1", "C_t2")


class RatePoint(NamedTuple):
    r1: Fraction
    r2: Fraction

    @classmethod
    def of(cls, r1, r2) -> "RatePoint":
        return cls(Fraction(r1), Fraction(r2))

    def mirrored(self) -> "RatePoint":
        return RatePoint(self.r2, self.r1)

    def dominated_by(self, other) -> bool:
        return self.r1 <= other[0] and self.r2 <= other[1]


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Polygon:
    """Convex polygon, vertices counterclockwise from the lowest-leftmost one.

    Degenerate regions keep one (a point) or two (a segment) vertices; an
    infeasible system gives no vertices.
    """

    vertices: tuple[RatePoint, ...]

    def contains(self, p) -> bool:
        p = RatePoint.of(*p)
        v = self.vertices
        if not v:
            return False
        if len(v) == 1:
            return p == v[0]
        if len(v) == 2:
            a, b = v
            return (_cross(a, b, p) == 0 and min(a.r1, b.r1) <= p.r1 <= max(a.r1, b.r1)
                    and min(a.r2, b.r2) <= p.r2 <= max(a.r2, b.r2))
        return all(_cross(v[i], v[(i + 1) % len(v)], p) >= 0 for i in range(len(v)))

    def contains_polygon(self, other: "Polygon") -> bool:
        return all(self.contains(p) for p in other.vertices)

    def mirrored(self) -> "Polygon":
        return convex_hull([p.mirrored() for p in self.vertices])

    def as_list(self) -> list:
        return [[fraction_json(p.r1), fraction_json(p.r2)] for p in self.vertices]


def fraction_json(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def convex_hull(points, down_closed: bool = False) -> Polygon:
    """Monotone-chain hull; collinear points are dropped.

    With ``down_closed`` the projections onto both axes and the origin are
    added first, which is the hull of the down-left closure for points in
    the nonnegative quadrant.
    """
    pts = {RatePoint.of(*p) for p in points}
    if down_closed and pts:
        zero = Fraction(0)
        pts |= {RatePoint(p.r1, zero) for p in pts} | {RatePoint(zero, p.r2) for p in pts}
        pts.add(RatePoint(zero, zero))
    pts = sorted(pts)
    if len(pts) <= 2:
        return Polygon(tuple(pts))

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return Polygon(tuple(hull))


def contains(poly: Polygon, p) -> bool:
    return poly.contains(p)


def from_halfplanes(constraints) -> Polygon:
    """Polygon {a*r1 + b*r2 <= c for each (a, b, c)} ∩ {r1, r2 >= 0}."""
    cons = [tuple(Fraction(x) for x in c) for c in constraints]
    cons += [(Fraction(-1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(-1), Fraction(0))]
    cands = []
    for (a1, b1, c1), (a2, b2, c2) in combinations(cons, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        x = (c1 * b2 - c2 * b1) / det
        y = (a1 * c2 - a2 * c1) / det
        if all(a * x + b * y <= c for a, b, c in cons):
            cands.append((x, y))
    return convex_hull(cands)


def box(r1_max, r2_max, sum_max=None) -> Polygon:
    cons = [(1, 0, r1_max), (0, 1, r2_max)]
    if sum_max is not None:
        cons.append((1, 1, sum_max))
    return from_halfplanes(cons)


def terminal_capacity_region(cv: CutVector, i: int) -> Polygon:
    """Routing capacity region seen by t_i alone, in (R_{i1}, R_{i2}) coordinates."""
    if i == 1:
        return box(cv.k11, cv.k21, cv.k121)
    if i == 2:
        return box(cv.k12, cv.k22, cv.k122)
    raise ValueError("terminal index must be 1 or 2")


def terminal_corner_points(cv: CutVector) -> dict[str, RatePoint]:
    return {
        "a": RatePoint.of(cv.k121 - cv.k21, cv.k21),
        "b": RatePoint.of(cv.k12, cv.k122 - cv.k12),
        "c": RatePoint.of(cv.k11, cv.k121 - cv.k11),
        "d": RatePoint.of(cv.k122 - cv.k22, cv.k22),
    }


def base_region(cv: CutVector) -> Polygon:
    return box(min(cv.k12, cv.k11), min(cv.k21, cv.k22), min(cv.k121, cv.k122))


def classify(cv: CutVector) -> str:
    return LOW if cv.k12 + cv.k21 <= min(cv.k121, cv.k122) else HIGH


def ef09_region(cv: CutVector) -> Polygon:
    if cv.k22 <= cv.k11:
        return from_halfplanes([(1, 2, cv.k11), (0, 1, cv.k22)])
    return from_halfplanes([(2, 1, cv.k22), (1, 0, cv.k11)])


def rank_term_bounds(cv: CutVector) -> tuple[int, int]:
    """Lower bounds on rank([H11 H12 M2]) and rank([H21 M1 H22]) at Q1 / Q2."""
    bp = boundary_points(cv)
    sw = cv.swapped()
    return (lower_bound_rank(cv, *bp.q1),
            lower_bound_rank(sw, bp.q2[1], bp.q2[0]))


def _low_regions(cv: CutVector) -> dict[str, Polygon]:
    return {
        "region1": box(cv.k121 - cv.k21, cv.k122 - cv.k12),
        "region2p": box(cv.k11, cv.k21, cv.k121),
        "region3p": box(cv.k12, cv.k22, cv.k122),
    }


def _high_regions(cv: CutVector, terms) -> tuple[dict[str, Polygon], list[str]]:
    both = min(cv.k121, cv.k122)
    out, flags = {}, []
    if cv.k12 <= cv.k11:
        out["region2"] = box(cv.k11, both - cv.k12, terms[0])
    else:
        flags.append("region2-guard-failed")
    if cv.k21 <= cv.k22:
        out["region3"] = box(both - cv.k21, cv.k22, terms[1])
    else:
        flags.append("region3-guard-failed")
    if not out:
        flags.append("inapplicable")
    return out, flags


def _hull_of(polys) -> Polygon:
    return convex_hull([p for poly in polys for p in poly.vertices], down_closed=True)


@dataclass
class RegionReport:
    cut_vector: CutVector
    classification: str
    regions: dict[str, Polygon]
    hull: Polygon
    ef09: Polygon
    flags: list[str] = field(default_factory=list)
    rank_terms: dict = field(default_factory=dict)
    vertex_modes: list = field(default_factory=list)

    def mode_of(self, p) -> tuple[str, str, str]:
        """(region, mode at t1, mode at t2) of the first region containing p."""
        for name in REGION_MODES:
            poly = self.regions.get(name)
            if poly is not None and poly.contains(p):
                return (name, *REGION_MODES[name])
        raise ValueError(f"{p} lies in no achievable sub-region")

    def to_json(self) -> dict:
        return {
            "cut_vector": self.cut_vector.as_dict(),
            "classification": self.classification,
            "regions": {k: v.as_list() for k, v in self.regions.items()},
            "comparison_only": [k for k in COMPARISON_ONLY if k in self.regions] + ["ef09"],
            "hull": self.hull.as_list(),
            "ef09": self.ef09.as_list(),
            "flags": list(self.flags),
            "rank_terms": self.rank_terms,
            "vertex_modes": [
                {"vertex": [fraction_json(v[0]), fraction_json(v[1])], "region": r, "t1": m1, "t2": m2}
                for v, r, m1, m2 in self.vertex_modes
            ],
        }


def achievable_region(cv: CutVector, rank_terms=None, seed=None) -> RegionReport:
    """Achievable region for a cut vector.

    ``rank_terms`` are the code-dependent sum-rate bounds
    (rank([H11 H12 M2]), rank([H21 M1 H22])); without them their lower
    bounds are used.
    """
    bounds = rank_term_bounds(cv)
    terms = tuple(rank_terms) if rank_terms is not None else bounds
    if terms[0] < bounds[0] or terms[1] < bounds[1]:
        raise PreconditionError("rank-terms", f"rank terms {terms} below lower bounds {bounds}")
    regions = {
        "C_t1": terminal_capacity_region(cv, 1),
        "C_t2": terminal_capacity_region(cv, 2),
        "base": base_region(cv),
    }
    flags: list[str] = []
    cls = classify(cv)
    tie = cv.k12 + cv.k21 == min(cv.k121, cv.k122)
    if cls == LOW:
        if rank_terms is not None and terms != (cv.k121, cv.k122):
            raise PreconditionError("rank-terms", "low interference forces rank terms (k121, k122)")
        regions.update(_low_regions(cv))
        if tie:
            flags.append("tie")
    else:
        extra, extra_flags = _high_regions(cv, terms)
        regions.update(extra)
        flags.extend(extra_flags)
    achievable = [poly for name, poly in regions.items() if name not in COMPARISON_ONLY]
    hull = _hull_of(achievable)
    if tie:
        high, _ = _high_regions(cv, (cv.k121, cv.k122))
        alt = _hull_of([regions["base"], *high.values()])
        assert alt == hull, "low and high constructions disagree at the regime boundary"
    report = RegionReport(
        cut_vector=cv,
        classification=cls,
        regions=regions,
        hull=hull,
        ef09=ef09_region(cv),
        flags=flags,
        rank_terms={
            "bound": list(bounds),
            "achieved": list(rank_terms) if rank_terms is not None else None,
            "used": list(terms),
            "seed": seed,
        },
    )
    report.vertex_modes = [(v, *report.mode_of(v)) for v in hull.vertices]
    return report


def mirrored_report_polygons(report: RegionReport) -> dict[str, Polygon]:
    """Polygons of ``report`` with session labels exchanged."""
    rename = {"C_t1": "C_t2", "C_t2": "C_t1", "region2": "region3", "region3": "region2",
              "region2p": "region3p", "region3p": "region2p"}
    return {rename.get(k, k): v.mirrored() for k, v in report.regions.items()}


def compare_with_ef09(report: RegionReport) -> dict:
    """Vertices that lie in exactly one of our hull and Region EF09."""
    only_ef09 = [p for p in report.ef09.vertices if not report.hull.contains(p)]
    only_ours = [p for p in report.hull.vertices if not report.ef09.contains(p)]
    return {
        "ef09_not_ours": [[fraction_json(a), fraction_json(b)] for a, b in only_ef09],
        "ours_not_ef09": [[fraction_json(a), fraction_json(b)] for a, b in only_ours],
        "hull_contains_ef09": report.hull.contains_polygon(report.ef09),
        "ef09_contains_hull": report.ef09.contains_polygon(report.hull),
    }


def render_svg(report: RegionReport, size: int = 400) -> str:
    """Axes, filled hull, outlined sub-regions and labelled hull vertices."""
    pad = 40
    pts = [p for poly in report.regions.values() for p in poly.vertices] + list(report.ef09.vertices)
    span = max([1] + [float(c) for p in pts for c in p])
    scale = (size - 2 * pad) / span

    def xy(p):
        return pad + float(p[0]) * scale, size - pad - float(p[1]) * scale

    def path(poly):
        return " ".join(f"{x:.2f},{y:.2f}" for x, y in map(xy, poly.vertices))

    colors = {"base": "#555555", "region1": "#1f77b4", "region2": "#d62728", "region3": "#2ca02c",
              "region2p": "#d62728", "region3p": "#2ca02c", "C_t1": "#9467bd", "C_t2": "#8c564b"}
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<line x1="{pad}" y1="{size - pad}" x2="{size - pad / 2}" y2="{size - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{size - pad}" x2="{pad}" y2="{pad / 2}" stroke="black"/>',
           f'<text x="{size - pad}" y="{size - pad / 3}">R1</text>',
           f'<text x="{pad / 4}" y="{pad}">R2</text>']
    if len(report.hull.vertices) >= 3:
        out.append(f'<polygon points="{path(report.hull)}" fill="#cccccc" stroke="none"/>')
    for name, poly in report.regions.items():
        if len(poly.vertices) >= 2:
            dash = ' stroke-dasharray="4,3"' if name in COMPARISON_ONLY else ""
            out.append(f'<polygon points="{path(poly)}" fill="none" '
                       f'stroke="{colors.get(name, "black")}"{dash}><title>{name}</title></polygon>')
    if len(report.ef09.vertices) >= 2:
        out.append(f'<polygon points="{path(report.ef09)}" fill="none" stroke="#ff7f0e" '
                   f'stroke-dasharray="1,3"><title>ef09</title></polygon>')
    for v, region, m1, m2 in report.vertex_modes:
        x, y = xy(v)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3"/>')
        out.append(f'<text x="{x + 4:.2f}" y="{y - 4:.2f}" font-size="11">'
                   f'({fraction_json(v[0])},{fraction_json(v[1])}) {region}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
