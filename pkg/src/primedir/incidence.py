"""Tube families on the torus, exact overlap scanning, and pair-selection counting.

A tube family at denominator r, level s and thickness exponent C1 is the set

    { beta : |v . beta - b/r - m| <= 2^(-C1 s) for integers b, m }

minus a small ball at the origin, i.e. equally spaced slabs perpendicular to v.
Two non-parallel families intersect along an exact lattice of parallelogram
cells (a rank-2 arithmetic progression in each coordinate), which makes
worst-case overlap counting certifiable: a point covered by >= 2 tubes lies in
some pair's intersection cell, whose corners are crossings of slab boundary
lines, so scanning cell centers and corners over all pairs (plus one interior
point per family for the overlap-1 floor) finds the maximum.

All geometry is exact.  Points are carried as integer triples (px, py, d)
meaning (px/d, py/d), and membership tests reduce to big-integer comparisons;
the public API speaks Fractions.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .directions import DirectionSet
from .errors import ParseError

__all__ = [
    "TubeFamily",
    "ScanWindow",
    "OverlapReport",
    "tube_membership",
    "candidate_intersections",
    "max_overlap_scan",
    "scan_direction_set",
    "families_from_direction_set",
    "parallel_baseline",
    "default_window",
    "greedy_pair_selection",
    "SelectedPair",
    "intersection_shrink_check",
    "ShrinkReport",
    "save_overlap_report",
    "load_overlap_report",
    "replay_witness",
]


@dataclass(frozen=True)
class TubeFamily:
    """One family of parallel tubes: direction v, denominator r, level s.

    ``exclusion_radius`` is the origin ball removed from the domain (the
    scaled-torus variant uses 1/A, the unit-torus variant 1/A^2);
    ``torus_side`` is the periodization side length (1 for the unit torus,
    the integer rescaling constant for the scaled variant, or None to scan a
    plain window with no folding).
    """

    v: tuple[Fraction, Fraction]
    r: int
    s: int
    C1: int
    exclusion_radius: Fraction = Fraction(0)
    torus_side: int | None = None
    label: str = ""

    def __post_init__(self):
        if not (1 << self.s) <= self.r < (1 << (self.s + 1)):
            raise ValueError(f"need 2^s <= r < 2^(s+1); got r={self.r}, s={self.s}")
        if self.C1 < 1:
            raise ValueError("thickness exponent C1 must be >= 1")
        vx, vy = Fraction(self.v[0]), Fraction(self.v[1])
        if vx == 0 and vy == 0:
            raise ValueError("tube direction must be nonzero")
        # thickness 2^(-C1 s) below the tube spacing 1/(r |v|):
        # equivalent to r^2 |v|^2 < 4^(C1 s), exactly.
        if self.s >= 1 and self.r**2 * (vx * vx + vy * vy) >= Fraction(4) ** (self.C1 * self.s):
            raise ValueError("tube thickness is not below the tube spacing; raise C1")

    @property
    def thickness(self) -> Fraction:
        return Fraction(1, 2 ** (self.C1 * self.s))


@dataclass(frozen=True)
class ScanWindow:
    """Closed axis-aligned box of exact rationals."""

    x_lo: Fraction
    x_hi: Fraction
    y_lo: Fraction
    y_hi: Fraction

    def __post_init__(self):
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise ValueError("empty window")

    def corners(self):
        return [
            (self.x_lo, self.y_lo),
            (self.x_lo, self.y_hi),
            (self.x_hi, self.y_lo),
            (self.x_hi, self.y_hi),
        ]

    def center(self) -> tuple[Fraction, Fraction]:
        return ((self.x_lo + self.x_hi) / 2, (self.y_lo + self.y_hi) / 2)

    def contains(self, x: Fraction, y: Fraction) -> bool:
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi


def default_window(variant: str, half: int = 1) -> ScanWindow:
    """[-1/2, 1/2]^2 for the unit-torus variant, [-half, half]^2 for the scaled one."""
    if variant == "k":
        h = Fraction(1, 2)
    elif variant == "ktilde":
        h = Fraction(half)
    else:
        raise ValueError("variant must be 'k' or 'ktilde'")
    return ScanWindow(-h, h, -h, h)


# -- integer fast path -----------------------------------------------------------

class _IntFamily:
    """Direction as an integer pair over a denominator, plus scan constants."""

    __slots__ = ("ax", "ay", "den", "r", "shift", "ex_n", "ex_d", "side")

    def __init__(self, fam: TubeFamily):
        vx, vy = Fraction(fam.v[0]), Fraction(fam.v[1])
        den = math.lcm(vx.denominator, vy.denominator)
        self.ax = vx.numerator * (den // vx.denominator)
        self.ay = vy.numerator * (den // vy.denominator)
        self.den = den
        self.r = fam.r
        self.shift = fam.C1 * fam.s  # thickness = 2^-shift
        ex = Fraction(fam.exclusion_radius)
        self.ex_n, self.ex_d = ex.numerator, ex.denominator
        self.side = fam.torus_side

    def member(self, px: int, py: int, d: int) -> bool:
        """Is (px/d, py/d) in the family? Exact integer arithmetic."""
        # double the triple so the torus half-side stays integral
        px, py, d = 2 * px, 2 * py, 2 * d
        if self.side is not None:
            span = self.side * d
            half = span // 2
            px = (px + half) % span - half
            py = (py + half) % span - half
        if self.ex_n and (px * px + py * py) * self.ex_d**2 < self.ex_n**2 * d * d:
            return False
        T = self.ax * px + self.ay * py
        X = self.r * T
        Dd = self.den * d
        b = (2 * X + Dd) // (2 * Dd)  # nearest integer to X / Dd
        return abs(X - b * Dd) << self.shift <= self.r * Dd


def tube_membership(beta: tuple[Fraction, Fraction], fam: TubeFamily) -> bool:
    """Exact membership of a rational point in a tube family.

    The slab condition is closed (boundary points are members) and the test
    locates the nearest plane index by rounding, never by search.
    """
    bx, by = Fraction(beta[0]), Fraction(beta[1])
    d = math.lcm(bx.denominator, by.denominator)
    return _IntFamily(fam).member(bx.numerator * (d // bx.denominator),
                                  by.numerator * (d // by.denominator), d)


# -- pairwise intersection lattices ------------------------------------------------

def _plane_range(fam: TubeFamily, window: ScanWindow) -> tuple[int, int]:
    """Indices a with the slab v.beta ~ a/r meeting the window (thickness included)."""
    vx, vy = Fraction(fam.v[0]), Fraction(fam.v[1])
    dots = [vx * cx + vy * cy for cx, cy in window.corners()]
    lo = min(dots) - fam.thickness
    hi = max(dots) + fam.thickness
    return math.ceil(lo * fam.r), math.floor(hi * fam.r)


def _pair_lattice(f1: TubeFamily, f2: TubeFamily, window: ScanWindow, offsets: bool):
    """Integer-triple candidate points of the (f1, f2) intersection lattice.

    Yields (px, py, d) for each admissible plane-index pair (a, b), the cell
    center, and, when ``offsets`` is set, the four cell corners (crossings of
    the slab boundary lines).  d is a common positive denominator.
    """
    i1, i2 = _IntFamily(f1), _IntFamily(f2)
    delta = i1.ax * i2.ay - i1.ay * i2.ax
    if delta == 0:
        raise ValueError("tube directions are parallel")
    a_lo, a_hi = _plane_range(f1, window)
    b_lo, b_hi = _plane_range(f2, window)
    c1, c2 = i1.shift, i2.shift
    r1, r2 = f1.r, f2.r
    D = delta * r1 * r2 * (1 << (c1 + c2))
    sgn = 1 if D > 0 else -1
    D *= sgn
    offs = [(0, 0), (-1, -1), (-1, 1), (1, -1), (1, 1)] if offsets else [(0, 0)]
    out = []
    for a in range(a_lo, a_hi + 1):
        for b in range(b_lo, b_hi + 1):
            for o1, o2 in offs:
                u = (a << c1) + o1 * r1  # t1 = u / (r1 2^c1)
                w = (b << c2) + o2 * r2
                px = sgn * (
                    i2.ay * i1.den * u * r2 * (1 << c2) - i1.ay * i2.den * w * r1 * (1 << c1)
                )
                py = sgn * (
                    -i2.ax * i1.den * u * r2 * (1 << c2) + i1.ax * i2.den * w * r1 * (1 << c1)
                )
                out.append((px, py, D))
    return out


def candidate_intersections(
    f1: TubeFamily, f2: TubeFamily, window: ScanWindow
) -> list[tuple[Fraction, Fraction]]:
    """Exact centers of the (f1, f2) tube-plane intersection lattice in the window.

    The centers solve v1.beta = a/r1, v2.beta = b/r2; every returned point is a
    member of both (thickened) families.  Raises ValueError on parallel input.
    """
    pts = []
    for px, py, d in _pair_lattice(f1, f2, window, offsets=False):
        x, y = Fraction(px, d), Fraction(py, d)
        if window.contains(x, y):
            pts.append((x, y))
    return pts


# -- the scan ------------------------------------------------------------------------

@dataclass
class OverlapReport:
    """Worst-case overlap over a window, with a replayable witness."""

    s: int
    C1: int
    max_overlap: int
    witness: tuple[Fraction, Fraction] | None
    family_count: int
    method: str  # "exact-candidates" | "grid-sample"
    variant: str
    window: ScanWindow
    candidates_checked: int = 0
    r_values: tuple[int, ...] | None = None  # per-family denominators, for replay


def _interior_point(fam: TubeFamily, window: ScanWindow) -> tuple[Fraction, Fraction] | None:
    """A point on a tube center plane inside the window (overlap floor >= 1).

    Walks perpendicularly from the window center to nearby planes, then along
    each plane (the zero-index plane passes through the excluded origin ball,
    so an on-plane offset is usually needed).
    """
    vx, vy = Fraction(fam.v[0]), Fraction(fam.v[1])
    n2 = vx * vx + vy * vy
    cx, cy = window.center()
    t0 = vx * cx + vy * cy
    a0 = round(t0 * fam.r)
    w_quarter = min(window.x_hi - window.x_lo, window.y_hi - window.y_lo) / 4
    for a in (a0, a0 - 1, a0 + 1, a0 - 2, a0 + 2):
        lam = (Fraction(a, fam.r) - t0) / n2
        px, py = cx + lam * vx, cy + lam * vy
        for mu in (Fraction(0), w_quarter, -w_quarter, 2 * w_quarter, -2 * w_quarter):
            x, y = px - mu * vy, py + mu * vx  # slide along the plane
            if window.contains(x, y) and tube_membership((x, y), fam):
                return (x, y)
    return None


def _count_at(ints: list[_IntFamily], px: int, py: int, d: int) -> int:
    return sum(1 for f in ints if f.member(px, py, d))


def max_overlap_scan(
    families: list[TubeFamily],
    window: ScanWindow,
    budget: int = 2_000_000,
    sample_count: int = 20_000,
    seed: int = 0,
) -> OverlapReport:
    """Maximum pointwise overlap of the families over the window.

    Exact method: overlap counts are evaluated at every pairwise lattice cell
    center and corner (sufficient for any maximum >= 2) plus one interior
    point per family (the overlap-1 floor).  If the candidate count would
    exceed ``budget`` the scan falls back to a seeded grid sample and labels
    the report method accordingly.
    """
    if not families:
        raise ValueError("need at least one family")
    variant = "k" if families[0].torus_side == 1 else "ktilde"
    ints = [_IntFamily(f) for f in families]
    s, C1 = families[0].s, families[0].C1

    # candidate budget estimate
    est = 0
    ranges = [_plane_range(f, window) for f in families]
    for i in range(len(families)):
        for j in range(i + 1, len(families)):
            if ints[i].ax * ints[j].ay - ints[i].ay * ints[j].ax != 0:
                est += 5 * (ranges[i][1] - ranges[i][0] + 1) * (ranges[j][1] - ranges[j][0] + 1)

    best = 0
    witness: tuple[Fraction, Fraction] | None = None
    checked = 0
    if est <= budget:
        method = "exact-candidates"
        for i in range(len(families)):
            for j in range(i + 1, len(families)):
                if ints[i].ax * ints[j].ay - ints[i].ay * ints[j].ax == 0:
                    continue
                for px, py, d in _pair_lattice(families[i], families[j], window, offsets=True):
                    x, y = Fraction(px, d), Fraction(py, d)
                    if not window.contains(x, y):
                        continue
                    checked += 1
                    c = _count_at(ints, px, py, d)
                    if c > best:
                        best, witness = c, (x, y)
    else:
        method = "grid-sample"
        rng = random.Random(seed)
        res = 1 << 24
        wx, wy = window.x_hi - window.x_lo, window.y_hi - window.y_lo
        for _ in range(sample_count):
            x = window.x_lo + Fraction(rng.randrange(res + 1), res) * wx
            y = window.y_lo + Fraction(rng.randrange(res + 1), res) * wy
            d = math.lcm(x.denominator, y.denominator)
            checked += 1
            c = _count_at(ints, x.numerator * (d // x.denominator), y.numerator * (d // y.denominator), d)
            if c > best:
                best, witness = c, (x, y)

    # overlap-1 floor from per-family interior points
    for fam in families:
        pt = _interior_point(fam, window)
        if pt is None:
            continue
        d = math.lcm(pt[0].denominator, pt[1].denominator)
        c = _count_at(ints, pt[0].numerator * (d // pt[0].denominator),
                      pt[1].numerator * (d // pt[1].denominator), d)
        checked += 1
        if c > best:
            best, witness = c, pt

    return OverlapReport(
        s=s, C1=C1, max_overlap=best, witness=witness,
        family_count=len(families), method=method, variant=variant,
        window=window, candidates_checked=checked,
        r_values=tuple(f.r for f in families),
    )


def replay_witness(report: OverlapReport, families: list[TubeFamily]) -> int:
    """Recompute the overlap count at the report's witness point."""
    if report.witness is None:
        return 0
    return sum(1 for f in families if tube_membership(report.witness, f))


# -- families from a constructed direction set ---------------------------------------

def default_c1(ds: DirectionSet, margin: int = 16) -> int:
    """Thickness exponent large enough that the ball at the origin captures a
    single tube per direction: 2^(-C1) below the exclusion radius by a margin.

    Mirrors the requirement that the thickness constant be chosen sufficiently
    large depending on A: every family's zero-index tube passes through the
    origin, so the all-directions overlap zone there has radius on the order
    of thickness / min angle and must sit inside the excluded ball.
    """
    if ds.A is None:
        raise ValueError("rescale the set first (the thickness default derives from A)")
    return (ds.A * ds.A).bit_length() + margin


def families_from_direction_set(
    ds: DirectionSet,
    s: int,
    C1: int | None = None,
    r_values: list[int] | None = None,
    variant: str = "ktilde",
) -> list[TubeFamily]:
    """Tube families for every direction of a constructed set.

    The scaled-torus variant uses the rational pre-scaling vectors with
    exclusion ball 1/A; the unit-torus variant uses the integer vectors with
    exclusion ball 1/A^2 (and needs the set rescaled first).  ``r_values``
    defaults to r = 2^s for every direction; ``C1`` to the spec override or
    the A-derived default.
    """
    if C1 is None:
        C1 = ds.spec.C1 if ds.spec.C1 is not None else default_c1(ds)
    if r_values is None:
        r_values = [1 << s] * len(ds.vectors)
    if len(r_values) != len(ds.vectors):
        raise ValueError("need one denominator per direction")
    if variant == "ktilde":
        if ds.A is None:
            raise ValueError("rescale the set first (the exclusion ball needs A)")
        return [
            TubeFamily(
                v=(rec.v.x, rec.v.y), r=r_values[i], s=s, C1=C1,
                exclusion_radius=Fraction(1, ds.A),
                torus_side=ds.A_tilde, label=f"v{i}",
            )
            for i, rec in enumerate(ds.vectors)
        ]
    if variant == "k":
        if ds.integer_vectors is None:
            raise ValueError("rescale the set first (the unit-torus variant uses integer vectors)")
        return [
            TubeFamily(
                v=(Fraction(ix), Fraction(iy)), r=r_values[i], s=s, C1=C1,
                exclusion_radius=Fraction(1, ds.A**2),
                torus_side=1, label=f"v{i}",
            )
            for i, (ix, iy) in enumerate(ds.integer_vectors)
        ]
    raise ValueError("variant must be 'k' or 'ktilde'")


def scan_direction_set(
    ds: DirectionSet,
    s: int,
    C1: int | None = None,
    r_values: list[int] | None = None,
    variant: str = "ktilde",
    window: ScanWindow | None = None,
    **scan_kw,
) -> OverlapReport:
    """Build the tube families of a direction set and run the overlap scan."""
    fams = families_from_direction_set(ds, s=s, C1=C1, r_values=r_values, variant=variant)
    if window is None:
        window = default_window(variant)
    return max_overlap_scan(fams, window, **scan_kw)


def parallel_baseline(
    v: tuple[Fraction, Fraction], count: int, s: int, C1: int, r: int | None = None
) -> list[TubeFamily]:
    """The adversarial baseline: ``count`` copies of one direction with equal r.

    Every copy shares its tube planes, so the overlap at any plane point is
    exactly ``count``.
    """
    if r is None:
        r = 1 << s
    return [TubeFamily(v=v, r=r, s=s, C1=C1, label=f"copy{i}") for i in range(count)]


# -- greedy pair selection and shrinking intersections --------------------------------

@dataclass(frozen=True)
class SelectedPair:
    i: int
    j: int
    prime: int


def greedy_pair_selection(ds: DirectionSet, indices: list[int] | None = None) -> list[SelectedPair]:
    """Inductively select disjoint pairs whose y-coordinate integer factors
    share a fresh window prime.

    Step j scans the unused elements in index order and takes the first pair
    whose factors n_i * (prime product) are both divisible by some window
    prime not chosen at an earlier step.  Returns the pairs with their primes;
    an empty list is a valid outcome.
    """
    if indices is None:
        indices = list(range(len(ds.vectors)))
    factors = {i: ds.y_factor(i) for i in indices}
    unused = list(indices)
    chosen_primes: set[int] = set()
    out: list[SelectedPair] = []
    while len(unused) >= 2:
        found = None
        for ai in range(len(unused)):
            for bi in range(ai + 1, len(unused)):
                i, j = unused[ai], unused[bi]
                shared = next(
                    (
                        p
                        for p in ds.prime_window
                        if p not in chosen_primes
                        and factors[i] % p == 0
                        and factors[j] % p == 0
                    ),
                    None,
                )
                if shared is not None:
                    found = (i, j, shared)
                    break
            if found:
                break
        if not found:
            break
        i, j, p = found
        out.append(SelectedPair(i, j, p))
        chosen_primes.add(p)
        unused.remove(i)
        unused.remove(j)
    return out


@dataclass
class ShrinkReport:
    pair_count: int
    radii: list[float]  # measured x-containment radius after 1, 2, ... pairs
    contained_in: float  # the final radius
    empty: bool


def _pair_x_intervals(
    f1: TubeFamily, f2: TubeFamily, window: ScanWindow
) -> list[tuple[Fraction, Fraction]]:
    """Exact x-coordinate intervals of the (f1, f2) intersection cells in the window."""
    i1, i2 = _IntFamily(f1), _IntFamily(f2)
    delta = i1.ax * i2.ay - i1.ay * i2.ax
    if delta == 0:
        raise ValueError("parallel pair")
    # extents of one cell along each axis: from the corner formula,
    # x varies by +- (|v2y| thick1 + |v1y| thick2) / |det|, y analogously.
    det = Fraction(delta, i1.den * i2.den)
    ext = (abs(Fraction(i2.ay, i2.den)) * f1.thickness + abs(Fraction(i1.ay, i1.den)) * f2.thickness) / abs(det)
    ext_y = (abs(Fraction(i2.ax, i2.den)) * f1.thickness + abs(Fraction(i1.ax, i1.den)) * f2.thickness) / abs(det)
    excl = min(Fraction(f1.exclusion_radius), Fraction(f2.exclusion_radius))
    ivs = []
    for px, py, d in _pair_lattice(f1, f2, window, offsets=False):
        x, y = Fraction(px, d), Fraction(py, d)
        if not (window.x_lo - ext <= x <= window.x_hi + ext
                and window.y_lo - ext_y <= y <= window.y_hi + ext_y):
            continue
        # cells swallowed by the excluded origin ball contribute no points
        if excl > 0 and (abs(x) + ext) ** 2 + (abs(y) + ext_y) ** 2 <= excl * excl:
            continue
        ivs.append((x - ext, x + ext))
    ivs.sort()
    merged: list[tuple[Fraction, Fraction]] = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return merged


def _intersect_interval_unions(a, b):
    out = []
    ia = ib = 0
    while ia < len(a) and ib < len(b):
        lo = max(a[ia][0], b[ib][0])
        hi = min(a[ia][1], b[ib][1])
        if lo <= hi:
            out.append((lo, hi))
        if a[ia][1] < b[ib][1]:
            ia += 1
        else:
            ib += 1
    return out


def intersection_shrink_check(
    ds: DirectionSet,
    pairs: list[SelectedPair],
    s: int,
    C1: int | None = None,
    r_values: dict[int, int] | None = None,
    window: ScanWindow | None = None,
) -> ShrinkReport:
    """Measure how the x-coordinate set of the running pair-intersection shrinks.

    For each selected pair, the x-coordinates of its two-family intersection
    form a union of exact intervals around a rank-2 progression; intersecting
    these unions across pairs with distinct fresh primes should collapse
    toward the origin.  The report carries the measured containment radius
    after each pair (sup |x| over the surviving set; 0 when empty).

    ``C1`` defaults to the spec override or a deliberately mild 8: measured
    radii are only informative when the intervals are fat enough to meet.
    """
    if C1 is None:
        C1 = ds.spec.C1 if ds.spec.C1 is not None else 8
    if window is None:
        window = default_window("ktilde")
    if not pairs:
        raise ValueError("need at least one selected pair")
    current: list[tuple[Fraction, Fraction]] | None = None
    radii: list[float] = []
    for sp in pairs:
        r_i = (r_values or {}).get(sp.i, 1 << s)
        r_j = (r_values or {}).get(sp.j, 1 << s)
        excl = Fraction(1, ds.A) if ds.A else Fraction(0)
        f1 = TubeFamily(v=(ds.vectors[sp.i].v.x, ds.vectors[sp.i].v.y), r=r_i, s=s, C1=C1,
                        exclusion_radius=excl, torus_side=ds.A_tilde)
        f2 = TubeFamily(v=(ds.vectors[sp.j].v.x, ds.vectors[sp.j].v.y), r=r_j, s=s, C1=C1,
                        exclusion_radius=excl, torus_side=ds.A_tilde)
        ivs = _pair_x_intervals(f1, f2, window)
        current = ivs if current is None else _intersect_interval_unions(current, ivs)
        radius = max((max(abs(lo), abs(hi)) for lo, hi in current), default=Fraction(0))
        radii.append(float(radius))
    return ShrinkReport(
        pair_count=len(pairs),
        radii=radii,
        contained_in=radii[-1],
        empty=not current,
    )


# -- report files -----------------------------------------------------------------------

_REPORT_SCHEMA = "primedir.overlap_report.v1"


def save_overlap_report(report: OverlapReport, path) -> None:
    doc = {
        "schema": _REPORT_SCHEMA,
        "s": report.s,
        "C1": report.C1,
        "max_overlap": report.max_overlap,
        "witness": (
            [f"{report.witness[0].numerator}/{report.witness[0].denominator}",
             f"{report.witness[1].numerator}/{report.witness[1].denominator}"]
            if report.witness is not None
            else None
        ),
        "family_count": report.family_count,
        "method": report.method,
        "variant": report.variant,
        "window": [str(report.window.x_lo), str(report.window.x_hi),
                   str(report.window.y_lo), str(report.window.y_hi)],
        "candidates_checked": report.candidates_checked,
        "r_values": list(report.r_values) if report.r_values is not None else None,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def load_overlap_report(path) -> OverlapReport:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc.msg} at line {exc.lineno}") from exc
    if doc.get("schema") != _REPORT_SCHEMA:
        raise ParseError(f"{path}: unexpected schema {doc.get('schema')!r}")
    wit = doc["witness"]
    witness = None
    if wit is not None:
        nx, dx = wit[0].split("/")
        ny, dy = wit[1].split("/")
        witness = (Fraction(int(nx), int(dx)), Fraction(int(ny), int(dy)))
    win = [Fraction(w) for w in doc["window"]]
    rv = doc.get("r_values")
    return OverlapReport(
        s=doc["s"], C1=doc["C1"], max_overlap=doc["max_overlap"], witness=witness,
        family_count=doc["family_count"], method=doc["method"], variant=doc["variant"],
        window=ScanWindow(*win), candidates_checked=doc["candidates_checked"],
        r_values=tuple(rv) if rv is not None else None,
    )
