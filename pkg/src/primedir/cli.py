"""Batch orchestration CLI.

Subcommands: construct, mult-error, incidence, apply, norm-sweep, selftest.
Every command validates its numeric flags against the module preconditions
before any compute starts, caches the prime sieve under PD_CACHE_DIR, writes
machine-readable reports (CSV or JSON, all schema-tagged), and never mutates
an input file.

Flag resolution order: explicit flag > --profile preset > built-in fallback.

Exit codes: 0 ok, 1 runtime error, 2 validation/construction failure, 3 usage.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import incidence, maximal, multiplier, selftest
from .arith import load_prime_table, save_prime_table, sieve_primes
from .directions import (
    DirectionSpec,
    construct_directions,
    load_direction_set,
    min_angle,
    rescale_to_integers,
    save_direction_set,
    serialize,
)
from .errors import ConstructionError, ParseError

PROFILES = {
    "desk-small": {
        "n": 4, "eps": 1.0, "seed": 7, "k_min": 10, "k_max": 12,
        "l": 64, "limit": 1 << 13, "grid": 256, "k_list": "10,11,12", "s": 1,
    },
    "desk-full": {
        "n": 8, "eps": 0.5, "seed": 7, "k_min": 14, "k_max": 16,
        "l": 128, "limit": 1 << 21, "grid": 1024, "k_list": "14,16,18,20", "s": 2,
    },
}


class UsageError(Exception):
    """Flag combination violates a documented precondition."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; the contract says 3
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(3)


def _opt(args, name: str, fallback=None, required: bool = False):
    """Resolve a flag: explicit value, else profile preset, else fallback."""
    val = getattr(args, name, None)
    if val is None and args.profile:
        val = PROFILES[args.profile].get(name)
    if val is None:
        val = fallback
    if val is None and required:
        raise UsageError(f"--{name.replace('_', '-')} is required (or use --profile)")
    return val


def _cache_dir(arg: str | None) -> Path:
    d = Path(arg or os.environ.get("PD_CACHE_DIR") or Path.home() / ".cache" / "primedir")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _get_table(limit: int, cache_dir: str | None):
    d = _cache_dir(cache_dir)
    path = d / f"primes_{limit}.pdpt"
    if path.exists():
        try:
            return load_prime_table(path)
        except (ParseError, ValueError) as exc:
            print(f"cache {path} invalid ({exc}); rebuilding", file=sys.stderr)
    table = sieve_primes(limit)
    save_prime_table(table, path)
    return table


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"cannot parse {what} list {text!r}")


def _parse_vectors(text: str) -> tuple[tuple[int, int], ...]:
    out = []
    for part in text.split(";"):
        xy = part.split(",")
        if len(xy) != 2:
            raise UsageError(f"vector {part!r} is not 'x,y'")
        try:
            out.append((int(xy[0]), int(xy[1])))
        except ValueError:
            raise UsageError(f"vector {part!r} is not a pair of integers")
    return tuple(out)


# -- commands ---------------------------------------------------------------------


def cmd_construct(args) -> int:
    n = _opt(args, "n", required=True)
    eps = _opt(args, "eps", required=True)
    seed = _opt(args, "seed", 0)
    if n < 2:
        raise UsageError("family size --n must be >= 2")
    if not 0 < eps <= 1:
        raise UsageError("--eps must lie in (0, 1]")
    spec = DirectionSpec(
        N=n, eps=eps, M=args.m_exp, mode=args.mode, seed=seed,
        C0=args.c0, C1=args.c1, window_base=args.window_base,
        window_count=args.window_count,
    )
    ds = construct_directions(spec)
    if not args.no_rescale:
        ds = rescale_to_integers(ds, args.a)
    save_direction_set(ds, args.out)
    ma = min_angle(ds)
    digest = hashlib.sha256(serialize(ds)).hexdigest()[:16]
    print(f"VALID n={spec.N} kappa={ds.kappa} min_angle_sin~{ma.sin:.3e} hash={digest}")
    print(f"wrote {args.out}")
    return 0


def cmd_mult_error(args) -> int:
    ks = _parse_int_list(_opt(args, "k_list", "14,16,18,20"), "k")
    grid = _opt(args, "grid", 1024)
    if not ks:
        raise UsageError("--k-list is empty")
    if args.d <= 16:
        raise UsageError("--d must exceed 16 (the main-term approximation requires D > 2^4)")
    if grid < 1:
        raise UsageError("--grid must be positive")
    limit = _opt(args, "limit", 1 << (max(ks) + 1))
    if limit < 1 << (max(ks) + 1):
        raise UsageError(f"--limit must be >= 2^{max(ks) + 1} for k = {max(ks)}")
    table = _get_table(limit, args.cache_dir)
    if args.threads > 1 and len(ks) > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            parts = list(
                pool.map(
                    lambda k: multiplier.error_profile([k], args.d, grid, table, arc_D=args.arc_d),
                    ks,
                )
            )
        rows = [r for part in parts for r in part.rows]
    else:
        rows = multiplier.error_profile(ks, args.d, grid, table, arc_D=args.arc_d).rows
    multiplier.write_error_profile_csv(rows, args.out)
    for r in rows:
        print(f"k={r.k} sup|E_k|={r.sup_abs_E:.6f} argmax={r.argmax_alpha:.6f} wall={r.wall_ms:.0f}ms")
    print(f"wrote {args.out}")
    return 0


def cmd_incidence(args) -> int:
    s = _opt(args, "s", required=True)
    if s < 1:
        raise UsageError("--s must be >= 1")
    ds = load_direction_set(args.ds)
    if ds.A is None:
        ds = rescale_to_integers(ds)
    win = incidence.default_window(args.variant, half=args.window_half)
    n = len(ds.vectors)

    def families_for(r_values):
        if r_values is None:
            r_values = [1 << s] * n
        if args.baseline == "parallel":
            rec = ds.vectors[0]
            fam_c1 = args.c1 if args.c1 is not None else incidence.default_c1(ds)
            return incidence.parallel_baseline(
                (rec.v.x, rec.v.y), n, s=s, C1=fam_c1, r=r_values[0]
            )
        return incidence.families_from_direction_set(
            ds, s=s, C1=args.c1, r_values=r_values, variant=args.variant
        )

    if args.replay:
        rep = incidence.load_overlap_report(args.replay)
        fams = families_for(list(rep.r_values) if rep.r_values else None)
        count = incidence.replay_witness(rep, fams)
        if count != rep.max_overlap:
            print(f"REPLAY MISMATCH: witness count {count} != reported {rep.max_overlap}")
            return 2
        print(f"replay ok: witness attains {count}")
        return 0

    rng = random.Random(args.seed)
    best = None
    for sweep in range(max(1, args.r_sweeps)):
        if sweep == 0:
            r_values = [1 << s] * n
        else:
            r_values = [rng.randrange(1 << s, 1 << (s + 1)) for _ in range(n)]
        rep = incidence.max_overlap_scan(families_for(r_values), win, budget=args.budget)
        if best is None or rep.max_overlap > best.max_overlap:
            best = rep
    incidence.save_overlap_report(best, args.out)
    print(
        f"max_overlap={best.max_overlap} method={best.method} "
        f"candidates={best.candidates_checked} families={best.family_count}"
    )
    print(f"wrote {args.out}")
    return 0


def cmd_apply(args) -> int:
    L = _opt(args, "l", 64)
    k_min = _opt(args, "k_min", required=True)
    k_max = _opt(args, "k_max", required=True)
    if k_min > k_max:
        raise UsageError("--k-min must be <= --k-max")
    limit = _opt(args, "limit", 1 << (k_max + 1))
    if limit < 1 << (k_max + 1):
        raise UsageError(f"--limit must be >= 2^{k_max + 1}")
    table = _get_table(limit, args.cache_dir)
    if args.ds:
        ds = load_direction_set(args.ds)
        if ds.integer_vectors is None:
            ds = rescale_to_integers(ds)
        cfg = maximal.OperatorConfig.from_direction_set(ds, k_min, k_max, table)
    elif args.vectors:
        cfg = maximal.OperatorConfig(
            directions=_parse_vectors(args.vectors), k_min=k_min, k_max=k_max, table=table
        )
    else:
        raise UsageError("need --ds or --vectors")

    if args.delta:
        f = maximal.GridFunction.delta(L)
    elif args.input:
        f = maximal.load_grid_function(args.input)
        if f.L != L:
            raise UsageError(f"input grid side {f.L} != --l {L}")
    else:
        raise UsageError("need --delta or --input FILE")

    out = maximal.maximal_op(f, cfg, method=args.method)
    if args.delta:
        disjoint = maximal.delta_spread_disjoint(cfg, L)
        closed = maximal.delta_spread_value(cfg)
        measured = out.norm2()
        rel = abs(measured - closed) / closed if closed else float("nan")
        print(
            f"delta-spread: measured={measured:.12g} closed_form={closed:.12g} "
            f"rel={rel:.3g} disjoint_precondition={disjoint}"
        )
    if args.out:
        maximal.save_grid_function(out, args.out)
        print(f"wrote {args.out}")
    if args.csv:
        maximal.export_csv(out, args.csv)
        print(f"wrote {args.csv}")
    return 0


def cmd_norm_sweep(args) -> int:
    ns = sorted(set(_parse_int_list(args.n_list, "n")))
    if not ns or ns[0] < 1:
        raise UsageError("--n-list must hold positive sizes")
    eps = _opt(args, "eps", 0.5)
    seed = _opt(args, "seed", 7)
    L = _opt(args, "l", 64)
    k_min = _opt(args, "k_min", 10)
    k_max = _opt(args, "k_max", 12)
    if k_min > k_max:
        raise UsageError("--k-min must be <= --k-max")
    limit = _opt(args, "limit", 1 << (k_max + 1))
    table = _get_table(limit, args.cache_dir)
    # one family at the largest size; prefixes give genuinely nested sets,
    # making the ratio table monotone by construction
    spec = DirectionSpec(N=max(ns[-1], 2), eps=eps, seed=seed)
    ds = rescale_to_integers(construct_directions(spec))
    rows = []
    for n in ns:
        cfg = maximal.OperatorConfig(
            directions=tuple(ds.integer_vectors[:n]), k_min=k_min, k_max=k_max, table=table
        )
        rep = maximal.empirical_norm(cfg, L, trials=args.trials, seed=seed)
        overall = max(v["max_ratio"] for v in rep.per_family.values())
        rows.append((n, overall, rep))
        print(f"N={n}: max ratio {overall:.6f}")
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["schema", "primedir.norm_sweep.v1"])
        w.writerow(["n", "family", "max_ratio", "argmax"])
        for n, _, rep in rows:
            for fam, info in rep.per_family.items():
                w.writerow([n, fam, info["max_ratio"], info["argmax"]])
    print(f"wrote {args.out}")
    return 0


def cmd_selftest(args) -> int:
    return 0 if selftest.run_all(verbose=True) else 1


# -- parser ------------------------------------------------------------------------


def _build_parser() -> _Parser:
    p = _Parser(prog="primedir", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", choices=sorted(PROFILES), help="named desk-scale preset")
    common.add_argument("--cache-dir", help="sieve cache directory (default $PD_CACHE_DIR)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker cap for data-parallel sweeps")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    c = add("construct", help="build, validate, and write a direction set")
    c.add_argument("--n", type=int)
    c.add_argument("--eps", type=float)
    c.add_argument("--mode", choices=["toy", "strict"], default="toy")
    c.add_argument("--seed", type=int)
    c.add_argument("--m-exp", type=int, default=2, help="window exponent M")
    c.add_argument("--c0", type=int, default=3)
    c.add_argument("--c1", type=int, default=None)
    c.add_argument("--window-base", type=int, default=None)
    c.add_argument("--window-count", type=int, default=None)
    c.add_argument("--a", type=int, default=None, help="integer annulus radius (default N^C0)")
    c.add_argument("--no-rescale", action="store_true")
    c.add_argument("--out", required=True)
    c.set_defaults(fn=cmd_construct)

    m = add("mult-error", help="sweep sup|m_k - L_k| and write a CSV")
    m.add_argument("--k-list", dest="k_list")
    m.add_argument("--d", type=float, default=17.0)
    m.add_argument("--arc-d", type=float, default=None,
                   help="classification exponent for the per-arc column")
    m.add_argument("--grid", type=int)
    m.add_argument("--limit", type=int)
    m.add_argument("--out", required=True)
    m.set_defaults(fn=cmd_mult_error)

    i = add("incidence", help="max-overlap scan of a direction set's tubes")
    i.add_argument("--ds", required=True)
    i.add_argument("--s", type=int)
    i.add_argument("--c1", type=int, default=None)
    i.add_argument("--variant", choices=["k", "ktilde"], default="ktilde")
    i.add_argument("--baseline", choices=["parallel"], default=None)
    i.add_argument("--window-half", type=int, default=1)
    i.add_argument("--r-sweeps", type=int, default=1,
                   help="random denominator assignments to sweep (first is all 2^s)")
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--budget", type=int, default=2_000_000)
    i.add_argument("--replay", default=None, help="verify the witness of an existing report")
    i.add_argument("--out", default="overlap.json")
    i.set_defaults(fn=cmd_incidence)

    a = add("apply", help="apply the maximal operator to a grid function")
    a.add_argument("--ds", default=None)
    a.add_argument("--vectors", default=None, help="'x,y;x,y;...' integer directions")
    a.add_argument("--l", type=int)
    a.add_argument("--k-min", dest="k_min", type=int)
    a.add_argument("--k-max", dest="k_max", type=int)
    a.add_argument("--limit", type=int)
    a.add_argument("--delta", action="store_true",
                   help="use a point mass input and check the spread identity")
    a.add_argument("--input", default=None, help="grid-function file")
    a.add_argument("--method", choices=["spectral", "spatial"], default="spectral")
    a.add_argument("--out", default=None)
    a.add_argument("--csv", default=None)
    a.set_defaults(fn=cmd_apply)

    n = add("norm-sweep", help="empirical norm ratios over nested family sizes")
    n.add_argument("--n-list", dest="n_list", default="4,8,16")
    n.add_argument("--eps", type=float)
    n.add_argument("--seed", type=int)
    n.add_argument("--l", type=int)
    n.add_argument("--k-min", dest="k_min", type=int)
    n.add_argument("--k-max", dest="k_max", type=int)
    n.add_argument("--limit", type=int)
    n.add_argument("--trials", type=int, default=8)
    n.add_argument("--out", required=True)
    n.set_defaults(fn=cmd_norm_sweep)

    s = add("selftest", help="run every built-in oracle check")
    s.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        code = args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 3
    except (ConstructionError, ParseError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1
    if code == 0:
        print(f"done in {time.perf_counter() - t0:.2f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
