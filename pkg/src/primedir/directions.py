"""Explicit direction families with prime-structured coordinates, in exact arithmetic.

A family of N plane vectors is built component-wise as

    v_i = (m_i, n_i) * Q_i * (p_{i,1} ... p_{i,kappa}) / R

where (m_i, n_i) are lattice points in an annulus of radius ~N^2 with slope
in [1/4, 1/2] and pairwise non-parallel, the p's are kappa distinct primes
drawn from a common window, Q_i = 2^(e_i) is a dyadic normalizer placing
|v_i| in [1/10, 10], and R is the integer window scale.  Rescaling by a
suitable integer multiple of R * prod(Q_i^{-1} : Q_i <= 1) clears every
denominator at once, landing the family in an integer annulus of radius ~A.

Two parameter modes share the construction code:

* strict: the window is the smallest ceil(N^(eps/2)) primes in
  [N^(M/eps), 10 N^(M/eps)] and R = N^(M kappa / eps) (eps nudged so R is an
  integer).  These formulas only become non-vacuous for astronomically large
  N, so strict mode mostly exercises the error paths at desk scale.
* toy: window base and count are free knobs (defaults chosen so kappa >= 2
  once N allows it), and R is base^kappa.  Same invariants, same validation.

All construction and validation is exact: Fractions and big integers only,
no floating point.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from itertools import combinations

from .arith import is_prime_certified
from .errors import ConstructionError, ParseError

__all__ = [
    "DirectionSpec",
    "RationalVector",
    "VectorRecord",
    "DirectionSet",
    "choose_kappa",
    "choose_prime_window",
    "select_mn_pairs",
    "construct_directions",
    "rescale_to_integers",
    "validate_direction_set",
    "min_angle",
    "MinAngleResult",
    "serialize",
    "deserialize",
    "save_direction_set",
    "load_direction_set",
]


@dataclass(frozen=True)
class DirectionSpec:
    """Parameters of one construction run.

    C0 governs the integer-annulus radius target A ~ N^C0; C1 overrides the
    tube thickness exponent handed to incidence scans (None derives the
    thickness from A at scan time, mirroring "C1 sufficiently large depending
    on A").  window_base and window_count override the prime window in toy
    mode.
    """

    N: int
    eps: float
    M: int = 2
    mode: str = "toy"
    seed: int = 0
    C0: int = 3
    C1: int | None = None
    window_base: int | None = None
    window_count: int | None = None

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("family size N must be >= 2")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if self.mode not in ("toy", "strict"):
            raise ValueError(f"mode must be 'toy' or 'strict', got {self.mode!r}")
        if self.M < 1:
            raise ValueError("window exponent M must be >= 1")


@dataclass(frozen=True)
class RationalVector:
    x: Fraction
    y: Fraction

    def norm2(self) -> Fraction:
        return self.x * self.x + self.y * self.y


@dataclass(frozen=True)
class VectorRecord:
    """One constructed direction with its full provenance."""

    m: int
    n: int
    q_exponent: int  # Q_i = 2^q_exponent
    prime_subset: tuple[int, ...]  # indices into the prime window
    v: RationalVector


@dataclass(frozen=True)
class DirectionSet:
    spec: DirectionSpec
    kappa: int
    prime_window: tuple[int, ...]
    scale_denominator: int  # R: the integer the prime products are divided by
    eps_adjusted: float | None
    vectors: tuple[VectorRecord, ...]
    A: int | None = None
    A_tilde: int | None = None
    integer_vectors: tuple[tuple[int, int], ...] | None = None

    def prime_product(self, i: int) -> int:
        out = 1
        for idx in self.vectors[i].prime_subset:
            out *= self.prime_window[idx]
        return out

    def y_factor(self, i: int) -> int:
        """(v_i)_y * R / Q_i = n_i * (prime product): the integer whose prime
        structure drives the pair-selection argument."""
        return self.vectors[i].n * self.prime_product(i)


def choose_kappa(window_size: int, N: int) -> int:
    """Smallest kappa with C(window_size, kappa) >= N distinct prime subsets."""
    if window_size < 1:
        raise ConstructionError("prime window is empty")
    for kappa in range(1, window_size + 1):
        if math.comb(window_size, kappa) >= N:
            return kappa
    raise ConstructionError(
        f"window of {window_size} primes admits only "
        f"{math.comb(window_size, window_size // 2)} subsets < N = {N}; "
        "enlarge the window (toy: window_count; strict: increase M)"
    )


def _primes_from(lo: int, count: int, hi: int) -> list[int]:
    """The smallest ``count`` primes in [lo, hi]; ConstructionError if exhausted."""
    out: list[int] = []
    p = max(2, lo)
    while len(out) < count:
        if p > hi:
            raise ConstructionError(
                f"prime window [{lo}, {hi}] exhausted after {len(out)} of {count} primes; "
                "raise the window exponent M"
            )
        if is_prime_certified(p):
            out.append(p)
        p += 1 if p == 2 else 2 if p % 2 == 1 else 1
    return out


def _window_params(spec: DirectionSpec) -> tuple[int, int]:
    """(base, count) of the prime window for either mode."""
    if spec.mode == "strict":
        exp = spec.M / spec.eps
        base = spec.N ** round(exp) if abs(exp - round(exp)) < 1e-12 else math.ceil(spec.N**exp)
        count = math.ceil(spec.N ** (spec.eps / 2))
        return base, count
    base = spec.window_base if spec.window_base is not None else 1000
    if spec.window_count is not None:
        count = spec.window_count
    else:
        # smallest window affording kappa = 2 subsets (falls back to kappa = 1
        # for tiny N, where C(w, 2) >= N forces w >= N anyway)
        count = 3
        while math.comb(count, 2) < spec.N:
            count += 1
    return base, count


def choose_prime_window(spec: DirectionSpec) -> list[int]:
    """The prime window P: smallest ``count`` certified primes in [base, 10 base]."""
    base, count = _window_params(spec)
    return _primes_from(base, count, 10 * base)


def select_mn_pairs(N: int, seed: int) -> list[tuple[int, int]]:
    """N lattice pairs (m, n): slope in [1/4, 1/2], radius in [N^2/10, 10 N^2],
    pairwise non-parallel.

    Candidates are enumerated canonically (m ascending, n ascending), shuffled
    by the seed, then filtered greedily by exact cross products.  Deterministic
    given (N, seed).
    """
    if N < 2:
        raise ValueError("need N >= 2")
    lo4, hi4 = N**4, 100 * N**4  # 100(m^2+n^2) >= N^4 and m^2+n^2 <= 100 N^4
    target = max(64, 4 * N)
    m_hard_cap = 10 * N**2 + 2

    def enumerate_candidates(limit: int) -> list[tuple[int, int]]:
        cands: list[tuple[int, int]] = []
        for m in range(1, m_hard_cap):
            for n in range((m + 3) // 4, m // 2 + 1):
                r2 = m * m + n * n
                if 100 * r2 >= lo4 and r2 <= hi4:
                    cands.append((m, n))
            if len(cands) >= limit:
                break
        return cands

    while True:
        cands = enumerate_candidates(target)
        order = list(cands)
        rng_local = random.Random(f"{seed}:mn")
        rng_local.shuffle(order)
        chosen: list[tuple[int, int]] = []
        for m, n in order:
            if all(m * n2 - n * m2 != 0 for m2, n2 in chosen):
                chosen.append((m, n))
                if len(chosen) == N:
                    return chosen
        if len(cands) < target:  # enumeration exhausted the whole region
            raise ConstructionError(
                f"only {len(chosen)} pairwise non-parallel slope-admissible pairs exist "
                f"for N = {N}"
            )
        target *= 4


def _choose_prime_subsets(window_size: int, kappa: int, N: int, seed: int) -> list[tuple[int, ...]]:
    total = math.comb(window_size, kappa)
    rng = random.Random(f"{seed}:subsets")
    if total <= 200_000:
        pool = list(combinations(range(window_size), kappa))
        rng.shuffle(pool)
        return pool[:N]
    out: set[tuple[int, ...]] = set()
    while len(out) < N:
        out.add(tuple(sorted(rng.sample(range(window_size), kappa))))
    return sorted(out)  # canonical order; selection randomness already applied


def _dyadic_exponent(T: Fraction) -> int:
    """Smallest e with 4^e * T >= 1/100: places |2^e v~| in [1/10, 2/10)."""
    if T <= 0:
        raise ValueError("need a positive squared magnitude")
    e = 0
    while Fraction(4) ** e * T < Fraction(1, 100):
        e += 1
    while Fraction(4) ** (e - 1) * T >= Fraction(1, 100):
        e -= 1
    return e


def construct_directions(spec: DirectionSpec) -> DirectionSet:
    """Run the full construction and validate every invariant exactly.

    Raises ConstructionError naming the violated constraint if any step
    cannot be satisfied.
    """
    window = choose_prime_window(spec)
    kappa = choose_kappa(len(window), spec.N)

    eps_adjusted: float | None = None
    if spec.mode == "strict":
        exact_exp = spec.M * kappa / spec.eps
        if abs(exact_exp - round(exact_exp)) < 1e-12:
            R = spec.N ** round(exact_exp)
        else:
            R = max(2, round(spec.N**exact_exp))
            eps_adjusted = spec.M * kappa * math.log(spec.N) / math.log(R)
    else:
        base, _ = _window_params(spec)
        R = base**kappa

    pairs = select_mn_pairs(spec.N, spec.seed)
    subsets = _choose_prime_subsets(len(window), kappa, spec.N, spec.seed)

    records = []
    for (m, n), subset in zip(pairs, subsets):
        prod = 1
        for idx in subset:
            prod *= window[idx]
        S = Fraction(prod, R)
        e = _dyadic_exponent(S * S * (m * m + n * n))
        q_lo = Fraction(1, (2 ** (100 * kappa)) * spec.N**2)
        q_hi = Fraction(2 ** (100 * kappa), spec.N**2)
        Q = Fraction(2**e) if e >= 0 else Fraction(1, 2**-e)
        if not q_lo <= Q <= q_hi:
            raise ConstructionError(
                f"dyadic normalizer bullet violated: Q = 2^{e} outside "
                f"[2^-{100 * kappa} N^-2, 2^{100 * kappa} N^-2] for (m, n) = ({m}, {n})"
            )
        v = RationalVector(x=m * Q * S, y=n * Q * S)
        records.append(
            VectorRecord(m=m, n=n, q_exponent=e, prime_subset=tuple(subset), v=v)
        )

    ds = DirectionSet(
        spec=spec,
        kappa=kappa,
        prime_window=tuple(window),
        scale_denominator=R,
        eps_adjusted=eps_adjusted,
        vectors=tuple(records),
    )
    validate_direction_set(ds)
    return ds


def validate_direction_set(ds: DirectionSet) -> None:
    """Check all construction constraints in exact arithmetic.

    Raises ConstructionError naming the first violated constraint.  Also
    recomputes each vector from its metadata, so metadata tampering is caught.
    """
    N = ds.spec.N
    if len(ds.vectors) != N:
        raise ConstructionError(f"family holds {len(ds.vectors)} vectors, spec says {N}")
    seen_subsets = set()
    for i, rec in enumerate(ds.vectors):
        m, n = rec.m, rec.n
        if m <= 0 or n <= 0:
            raise ConstructionError(f"positivity bullet violated at vector {i}: {(m, n)}")
        if not (m <= 4 * n and 2 * n <= m):
            raise ConstructionError(
                f"slope bullet violated at vector {i}: n/m = {Fraction(n, m)} not in [1/4, 1/2]"
            )
        r2 = m * m + n * n
        if not (100 * r2 >= N**4 and r2 <= 100 * N**4):
            raise ConstructionError(
                f"lattice-annulus bullet violated at vector {i}: |(m,n)|^2 = {r2}"
            )
        if len(set(rec.prime_subset)) != ds.kappa:
            raise ConstructionError(
                f"distinct-primes bullet violated at vector {i}: {rec.prime_subset}"
            )
        if not all(0 <= idx < len(ds.prime_window) for idx in rec.prime_subset):
            raise ConstructionError(f"prime subset of vector {i} indexes outside the window")
        key = tuple(sorted(rec.prime_subset))
        if key in seen_subsets:
            raise ConstructionError(
                f"distinct-collections bullet violated: vector {i} repeats {key}"
            )
        seen_subsets.add(key)
        e = rec.q_exponent
        Q = Fraction(2**e) if e >= 0 else Fraction(1, 2**-e)
        q_lo = Fraction(1, (2 ** (100 * ds.kappa)) * N**2)
        q_hi = Fraction(2 ** (100 * ds.kappa), N**2)
        if not q_lo <= Q <= q_hi:
            raise ConstructionError(
                f"dyadic normalizer bullet violated at vector {i}: Q = 2^{e}"
            )
        S = Fraction(ds.prime_product(i), ds.scale_denominator)
        if rec.v.x != m * Q * S or rec.v.y != n * Q * S:
            raise ConstructionError(f"vector {i} disagrees with its construction metadata")
        norm2 = rec.v.norm2()
        if not (Fraction(1, 100) <= norm2 <= Fraction(100)):
            raise ConstructionError(
                f"magnitude bullet violated at vector {i}: |v|^2 = {float(norm2):.3g}"
            )
    for i in range(N):
        for j in range(i + 1, N):
            cross = ds.vectors[i].m * ds.vectors[j].n - ds.vectors[i].n * ds.vectors[j].m
            if cross == 0:
                raise ConstructionError(
                    f"non-parallel bullet violated for vectors {i}, {j}"
                )
    if ds.integer_vectors is not None:
        _validate_rescaling(ds)


def _validate_rescaling(ds: DirectionSet) -> None:
    A, At = ds.A, ds.A_tilde
    if A is None or At is None or ds.integer_vectors is None:
        raise ConstructionError("incomplete rescaling metadata")
    if not (Fraction(A, 10) <= At <= 10 * A):
        raise ConstructionError(f"A_tilde = {At} outside [A/10, 10A]")
    for i, (ix, iy) in enumerate(ds.integer_vectors):
        vx, vy = ds.vectors[i].v.x * At, ds.vectors[i].v.y * At
        if vx.denominator != 1 or vy.denominator != 1 or (int(vx), int(vy)) != (ix, iy):
            raise ConstructionError(f"integer vector {i} is not exactly A_tilde * v_{i}")
        r2 = ix * ix + iy * iy
        if not (10_000 * r2 >= A * A and r2 <= 10_000 * A * A):
            raise ConstructionError(
                f"integer-annulus condition violated at vector {i}: |Av|^2 = {r2}"
            )


def base_multiple(ds: DirectionSet) -> int:
    """R times the product of Q_i^{-1} over Q_i <= 1: rescaling by any multiple
    of this clears every denominator."""
    out = ds.scale_denominator
    for rec in ds.vectors:
        if rec.q_exponent <= 0:
            out *= 2**-rec.q_exponent
    return out


def rescale_to_integers(ds: DirectionSet, A: int | None = None) -> DirectionSet:
    """Rescale by the smallest multiple A_tilde of the base multiple with
    A_tilde >= A/10; every A_tilde * v_i is exactly integral.

    ``A`` defaults to max(N^C0, base multiple).  Raises ValueError when no
    multiple fits in [A/10, 10A] (A too small for this family).
    """
    B = base_multiple(ds)
    if A is None:
        A = max(ds.spec.N ** ds.spec.C0, B)
    if A < 1:
        raise ValueError("annulus radius A must be >= 1")
    t = -((-A) // (10 * B))  # ceil(A / (10 B))
    At = t * B
    if At > 10 * A:
        raise ValueError(
            f"no multiple of the base multiple {B} lies in [A/10, 10A] for A = {A}"
        )
    ints = []
    for rec in ds.vectors:
        vx, vy = rec.v.x * At, rec.v.y * At
        if vx.denominator != 1 or vy.denominator != 1:
            raise ConstructionError("rescaling failed to clear a denominator")
        ints.append((int(vx), int(vy)))
    out = replace(ds, A=A, A_tilde=At, integer_vectors=tuple(ints))
    _validate_rescaling(out)
    return out


@dataclass(frozen=True)
class MinAngleResult:
    i: int
    j: int
    sin2: Fraction  # squared sine of the angle between v_i and v_j

    @property
    def sin(self) -> float:
        return math.sqrt(float(self.sin2))


def min_angle(ds: DirectionSet) -> MinAngleResult:
    """Minimizing pair and exact squared sine of the smallest angle.

    sin^2 = (m_i n_j - n_i m_j)^2 / (|(m_i,n_i)|^2 |(m_j,n_j)|^2); the dyadic
    and prime factors cancel, so the comparison is exact on the (m, n) data.
    """
    if len(ds.vectors) < 2:
        raise ValueError("need at least two vectors")
    best: MinAngleResult | None = None
    for i in range(len(ds.vectors)):
        mi, ni = ds.vectors[i].m, ds.vectors[i].n
        for j in range(i + 1, len(ds.vectors)):
            mj, nj = ds.vectors[j].m, ds.vectors[j].n
            s2 = Fraction((mi * nj - ni * mj) ** 2, (mi * mi + ni * ni) * (mj * mj + nj * nj))
            if best is None or s2 < best.sin2:
                best = MinAngleResult(i, j, s2)
    return best


# -- serialization -----------------------------------------------------------------

_DS_SCHEMA = "primedir.direction_set.v1"


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _frac_parse(s: str, where: str) -> Fraction:
    try:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    except Exception as exc:
        raise ParseError(f"bad rational {s!r} at {where}") from exc


def _payload(ds: DirectionSet) -> dict:
    return {
        "schema": _DS_SCHEMA,
        "spec": asdict(ds.spec),
        "kappa": ds.kappa,
        "prime_window": [str(p) for p in ds.prime_window],
        "scale_denominator": str(ds.scale_denominator),
        "eps_adjusted": ds.eps_adjusted,
        "vectors": [
            {
                "m": rec.m,
                "n": rec.n,
                "q_exponent": rec.q_exponent,
                "prime_subset": list(rec.prime_subset),
                "x": _frac_str(rec.v.x),
                "y": _frac_str(rec.v.y),
            }
            for rec in ds.vectors
        ],
        "A": str(ds.A) if ds.A is not None else None,
        "A_tilde": str(ds.A_tilde) if ds.A_tilde is not None else None,
        "integer_vectors": (
            [[str(x), str(y)] for x, y in ds.integer_vectors]
            if ds.integer_vectors is not None
            else None
        ),
    }


def serialize(ds: DirectionSet) -> bytes:
    """Canonical JSON bytes (sorted keys, fixed separators) with a content hash.

    Byte-identical for identical spec + seed, which is the determinism contract
    between CLI commands.
    """
    payload = _payload(ds)
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canonical.encode()).hexdigest()
    return json.dumps({"content_hash": digest, **payload}, sort_keys=True, indent=1).encode()


def deserialize(data: bytes, validate: bool = True) -> DirectionSet:
    """Parse, re-hash, rebuild, and (by default) re-validate a DirectionSet."""
    try:
        doc = json.loads(data.decode())
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed direction-set file: {exc.msg} at line {exc.lineno} col {exc.colno}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != _DS_SCHEMA:
        raise ParseError(f"unexpected schema {doc.get('schema')!r} at top level")
    recorded = doc.pop("content_hash", None)
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canonical.encode()).hexdigest()
    if recorded != digest:
        raise ParseError("content hash mismatch: file was modified after writing")
    try:
        spec = DirectionSpec(**doc["spec"])
        vectors = tuple(
            VectorRecord(
                m=rec["m"],
                n=rec["n"],
                q_exponent=rec["q_exponent"],
                prime_subset=tuple(rec["prime_subset"]),
                v=RationalVector(
                    _frac_parse(rec["x"], f"vectors[{i}].x"),
                    _frac_parse(rec["y"], f"vectors[{i}].y"),
                ),
            )
            for i, rec in enumerate(doc["vectors"])
        )
        ds = DirectionSet(
            spec=spec,
            kappa=doc["kappa"],
            prime_window=tuple(int(p) for p in doc["prime_window"]),
            scale_denominator=int(doc["scale_denominator"]),
            eps_adjusted=doc["eps_adjusted"],
            vectors=vectors,
            A=int(doc["A"]) if doc["A"] is not None else None,
            A_tilde=int(doc["A_tilde"]) if doc["A_tilde"] is not None else None,
            integer_vectors=(
                tuple((int(x), int(y)) for x, y in doc["integer_vectors"])
                if doc["integer_vectors"] is not None
                else None
            ),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed field in direction-set file: {exc}") from exc
    if validate:
        validate_direction_set(ds)
    return ds


def save_direction_set(ds: DirectionSet, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(ds))


def load_direction_set(path, validate: bool = True) -> DirectionSet:
    with open(path, "rb") as fh:
        return deserialize(fh.read(), validate=validate)
