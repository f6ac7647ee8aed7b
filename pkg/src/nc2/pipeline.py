"""Whole-network analysis: normalize, code, encode at the boundary points, report regions.

:func:`analyze` freezes one valid code and the boundary-point encoders for a
seed; :meth:`Analysis.realize` then produces encoders for any hull vertex.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import gfmat
from .codegen import CodedNetwork, TransferMatrices, generate_valid_code
from .encoders import (EncoderPair, base_encoders, boundary_points, in_base_region,
                       region1_encoders, region2_point_encoders, region2_range,
                       region3_point_encoders, region3_range, rank_term)
from .errors import ConstructionError, LemmaAssertionError
from .netgraph import CutVector, Network, cut_vector, normalize
from .regions import REGION_MODES, RatePoint, RegionReport, achievable_region


@dataclass(frozen=True)
class Construction:
    label: str
    point: tuple[int, int]
    encoders: EncoderPair
    modes: tuple[str, str]
    delta: int | None = None


@dataclass
class Analysis:
    network: Network
    normalized: Network
    cut_vector: CutVector
    coded: CodedNetwork
    tm: TransferMatrices
    seed: int
    q1_encoders: EncoderPair
    q2_encoders: EncoderPair
    report: RegionReport
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def q(self) -> int:
        return self.coded.q

    def swapped(self) -> "Analysis":
        """This analysis with session labels exchanged, sharing the same network code."""
        rho1, rho2 = self.report.rank_terms["achieved"]
        report = achievable_region(self.cut_vector.swapped(), (rho2, rho1), seed=self.seed)
        report.rank_terms["q"] = self.q
        return Analysis(self.network.swapped(), self.normalized.swapped(), self.cut_vector.swapped(),
                        self.coded.swapped(), self.tm.swapped(), self.seed,
                        self.q2_encoders.swapped(), self.q1_encoders.swapped(), report)

    def region2_points(self):
        """[(delta, (r1, r2))] along the Region 2 boundary, or [] if unavailable."""
        return self._sweep("region2")

    def region3_points(self):
        return self._sweep("region3")

    def _sweep(self, which):
        key = ("sweep", which)
        if key not in self._cache:
            cv, tm, seed = self.cut_vector, self.tm, self.seed
            pts = []
            if which == "region2" and cv.k12 <= cv.k11 and boundary_points(cv).q1[0] < cv.k11:
                start, rho, r1p, dmax = region2_range(tm, cv, seed)
                pts = [(d, (r1p + d, start.rates[1] - d)) for d in range(dmax + 1)]
            elif which == "region3" and cv.k21 <= cv.k22 and boundary_points(cv).q2[1] < cv.k22:
                start, rho, r2p, dmax = region3_range(tm, cv, seed)
                pts = [(d, (start.rates[0] - d, r2p + d)) for d in range(dmax + 1)]
            self._cache[key] = pts
        return self._cache[key]

    def construction(self, label: str, delta: int | None = None) -> Construction:
        key = (label, delta)
        if key in self._cache:
            return self._cache[key]
        cv, tm, seed = self.cut_vector, self.tm, self.seed
        if label == "region1":
            enc = region1_encoders(tm, cv, seed)
            cons = Construction("region1", enc.rates, enc, REGION_MODES["region1"])
        elif label == "region2":
            enc, pt = region2_point_encoders(tm, cv, delta, seed)
            cons = Construction("region2", pt, enc, REGION_MODES["region2"], delta)
        elif label == "region3":
            enc, pt = region3_point_encoders(tm, cv, delta, seed)
            cons = Construction("region3", pt, enc, REGION_MODES["region3"], delta)
        else:
            raise ValueError(label)
        self._cache[key] = cons
        return cons

    def realize(self, p) -> Construction:
        """Encoders achieving the integer rate point p, with decode modes."""
        p = RatePoint.of(*p)
        if p.r1.denominator != 1 or p.r2.denominator != 1:
            raise ValueError(f"{p} is not an integer point")
        r1, r2 = int(p.r1), int(p.r2)
        cv, tm, seed = self.cut_vector, self.tm, self.seed
        if in_base_region(cv, r1, r2):
            key = ("base", (r1, r2))
            if key not in self._cache:
                enc = base_encoders(tm, cv, r1, r2, seed)
                self._cache[key] = Construction("base", (r1, r2), enc, REGION_MODES["base"])
            return self._cache[key]
        regions = self.report.regions
        candidates = []
        if "region2" in regions or "region2p" in regions:
            candidates += [("region2", d, pt) for d, pt in self.region2_points()]
        if "region3" in regions or "region3p" in regions:
            candidates += [("region3", d, pt) for d, pt in self.region3_points()]
        if "region1" in regions:
            candidates.append(("region1", None, (cv.k121 - cv.k21, cv.k122 - cv.k12)))
        for label, delta, pt in candidates:
            if r1 <= pt[0] and r2 <= pt[1]:
                cons = self.construction(label, delta)
                enc = cons.encoders.truncated(r1, r2)
                return Construction(cons.label, (r1, r2), enc, cons.modes, delta)
        raise LemmaAssertionError(f"no construction reaches ({r1}, {r2})")


def _analyze_at(net: Network, norm: Network, cv: CutVector, seed: int, q: int | None) -> Analysis:
    coded, tm = generate_valid_code(norm, seed, q)
    bp = boundary_points(cv)
    enc1 = base_encoders(tm, cv, *bp.q1, seed)
    # Q2 encoders come from the label-swapped instance so Region 3 mirrors Region 2 exactly
    enc2 = base_encoders(tm.swapped(), cv.swapped(), bp.q2[1], bp.q2[0], seed).swapped()
    rho1 = rank_term(tm, enc1.M2)
    rho2 = rank_term(tm.swapped(), enc2.M1)
    report = achievable_region(cv, (rho1, rho2), seed=seed)
    report.rank_terms["q"] = coded.q
    return Analysis(net, norm, cv, coded, tm, seed, enc1, enc2, report)


def analyze(net: Network, seed: int = 0, q: int | None = None) -> Analysis:
    """Normalize, find a valid code and boundary encoders, and compute the region.

    If encoders cannot be found over the code's field, the field is escalated.
    """
    norm = normalize(net)
    cv = cut_vector(norm)
    last = None
    for p in gfmat.field_ladder(q):
        try:
            return _analyze_at(net, norm, cv, seed, p)
        except ConstructionError as exc:
            last = exc
    raise ConstructionError(f"analysis failed on every field size: {last}")
