import json
import re
from fractions import Fraction

import pytest

from primedir import directions as D
from primedir.arith import is_prime_certified
from primedir.errors import ConstructionError, ParseError


class TestSpec:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            D.DirectionSpec(N=1, eps=0.5)
        with pytest.raises(ValueError):
            D.DirectionSpec(N=4, eps=0.0)
        with pytest.raises(ValueError):
            D.DirectionSpec(N=4, eps=1.5)
        with pytest.raises(ValueError):
            D.DirectionSpec(N=4, eps=0.5, mode="loose")


class TestKappa:
    def test_examples(self):
        assert D.choose_kappa(4, 6) == 2
        assert D.choose_kappa(6, 20) == 3
        assert D.choose_kappa(5, 10) == 2

    def test_small_window_takes_singletons(self):
        assert D.choose_kappa(8, 8) == 1

    def test_infeasible_raises(self):
        with pytest.raises(ConstructionError, match="enlarge"):
            D.choose_kappa(2, 4)


class TestPrimeWindow:
    def test_toy_example(self):
        spec = D.DirectionSpec(N=4, eps=1.0, window_base=1000, window_count=4)
        assert D.choose_prime_window(spec) == [1009, 1013, 1019, 1021]

    def test_strict_small_case(self):
        spec = D.DirectionSpec(N=4, eps=1.0, M=2, mode="strict")
        assert D.choose_prime_window(spec) == [17, 19]

    def test_all_members_certified(self):
        spec = D.DirectionSpec(N=8, eps=0.5, seed=3)
        assert all(is_prime_certified(p) for p in D.choose_prime_window(spec))

    def test_exhausted_window_raises(self):
        spec = D.DirectionSpec(N=4, eps=1.0, window_base=10, window_count=100)
        with pytest.raises(ConstructionError, match="exhausted"):
            D.choose_prime_window(spec)


class TestMnPairs:
    def test_constraints_exact(self):
        for N in (2, 4, 16):
            pairs = D.select_mn_pairs(N, seed=0)
            assert len(pairs) == N
            for m, n in pairs:
                assert m > 0 and n > 0
                assert m <= 4 * n and 2 * n <= m  # slope in [1/4, 1/2]
                r2 = m * m + n * n
                assert 100 * r2 >= N**4 and r2 <= 100 * N**4
            for i in range(N):
                for j in range(i + 1, N):
                    mi, ni = pairs[i]
                    mj, nj = pairs[j]
                    assert mi * nj - ni * mj != 0

    def test_deterministic(self):
        assert D.select_mn_pairs(8, seed=42) == D.select_mn_pairs(8, seed=42)
        assert D.select_mn_pairs(8, seed=42) != D.select_mn_pairs(8, seed=43)


class TestConstruction:
    def test_toy_matrix_validates(self, toy_matrix):
        for (n, eps), ds in toy_matrix.items():
            D.validate_direction_set(ds)  # raises on any violated constraint
            assert len(ds.vectors) == n

    def test_magnitude_window_exact(self, toy_matrix):
        for ds in toy_matrix.values():
            for rec in ds.vectors:
                n2 = rec.v.norm2()
                assert Fraction(1, 100) <= n2 <= Fraction(100)

    def test_distinct_prime_subsets(self, toy_matrix):
        for ds in toy_matrix.values():
            subsets = {tuple(sorted(r.prime_subset)) for r in ds.vectors}
            assert len(subsets) == len(ds.vectors)

    def test_cross_products_at_least_one(self, toy_matrix):
        for ds in toy_matrix.values():
            for i in range(len(ds.vectors)):
                for j in range(i + 1, len(ds.vectors)):
                    vi, vj = ds.vectors[i], ds.vectors[j]
                    assert abs(vi.m * vj.n - vi.n * vj.m) >= 1

    def test_strict_tiny_n_infeasible(self):
        spec = D.DirectionSpec(N=4, eps=1.0, M=2, mode="strict")
        with pytest.raises(ConstructionError):
            D.construct_directions(spec)

    def test_validator_names_bullet(self, toy_ds):
        import dataclasses

        bad_vec = dataclasses.replace(
            toy_ds.vectors[0], prime_subset=toy_ds.vectors[1].prime_subset
        )
        bad = dataclasses.replace(
            toy_ds, vectors=(bad_vec,) + toy_ds.vectors[1:], integer_vectors=None, A=None,
            A_tilde=None,
        )
        with pytest.raises(ConstructionError, match="bullet|metadata"):
            D.validate_direction_set(bad)


class TestRescaling:
    def test_denominators_cleared(self, toy_matrix):
        for ds in toy_matrix.values():
            for (ix, iy), rec in zip(ds.integer_vectors, ds.vectors):
                assert rec.v.x * ds.A_tilde == ix
                assert rec.v.y * ds.A_tilde == iy

    def test_annulus_exact(self, toy_matrix):
        for ds in toy_matrix.values():
            A = ds.A
            for ix, iy in ds.integer_vectors:
                r2 = ix * ix + iy * iy
                assert 10_000 * r2 >= A * A and r2 <= 10_000 * A * A

    def test_base_multiple_is_identity_point(self, toy_ds):
        B = D.base_multiple(toy_ds)
        ds = D.rescale_to_integers(
            D.construct_directions(toy_ds.spec), A=B
        )
        assert ds.A_tilde == B

    def test_too_small_a_rejected(self, toy_ds):
        fresh = D.construct_directions(toy_ds.spec)
        B = D.base_multiple(fresh)
        with pytest.raises(ValueError):
            D.rescale_to_integers(fresh, A=max(1, B // 200))


class TestMinAngle:
    def test_matches_direct_formula(self, toy_ds):
        res = D.min_angle(toy_ds)
        best = min(
            Fraction(
                (vi.m * vj.n - vi.n * vj.m) ** 2,
                (vi.m**2 + vi.n**2) * (vj.m**2 + vj.n**2),
            )
            for i, vi in enumerate(toy_ds.vectors)
            for vj in toy_ds.vectors[i + 1 :]
        )
        assert res.sin2 == best > 0

    def test_scaling_lower_bound(self, toy_matrix):
        # cross >= 1 and |(m,n)| <= 10 N^2 force sin >= 1/(100 N^4)
        for (n, _), ds in toy_matrix.items():
            res = D.min_angle(ds)
            assert res.sin2 * (100 * n**4) ** 2 >= 1


class TestSerialization:
    def test_round_trip_byte_identical(self, toy_ds):
        blob = D.serialize(toy_ds)
        assert D.serialize(D.deserialize(blob)) == blob

    def test_determinism(self, toy_ds):
        again = D.rescale_to_integers(D.construct_directions(toy_ds.spec))
        assert D.serialize(again) == D.serialize(toy_ds)

    def test_seed_changes_bytes(self, toy_ds):
        import dataclasses

        other = D.rescale_to_integers(
            D.construct_directions(dataclasses.replace(toy_ds.spec, seed=8))
        )
        assert D.serialize(other) != D.serialize(toy_ds)

    def test_value_tamper_rejected(self, toy_ds):
        blob = D.serialize(toy_ds)
        m = re.search(rb'"m": (\d+)', blob)
        bad = blob[: m.start(1)] + str(int(m.group(1)) + 1).encode() + blob[m.end(1) :]
        with pytest.raises(ParseError, match="hash"):
            D.deserialize(bad)

    def test_semantic_tamper_rejected(self, toy_ds):
        # recompute the hash but duplicate a prime subset: the validator fires
        import hashlib

        doc = json.loads(D.serialize(toy_ds))
        doc.pop("content_hash")
        doc["vectors"][1]["prime_subset"] = doc["vectors"][0]["prime_subset"]
        canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        doc2 = {"content_hash": hashlib.sha256(canon.encode()).hexdigest(), **doc}
        with pytest.raises(ConstructionError, match="bullet|metadata"):
            D.deserialize(json.dumps(doc2, sort_keys=True, indent=1).encode())

    def test_malformed_json_reports_location(self):
        with pytest.raises(ParseError, match="line"):
            D.deserialize(b'{"schema": "primedir.direction_set.v1", ')

    def test_file_round_trip(self, toy_ds, tmp_path):
        path = tmp_path / "ds.json"
        D.save_direction_set(toy_ds, path)
        again = D.load_direction_set(path)
        assert D.serialize(again) == D.serialize(toy_ds)


class TestStrictScale:
    def test_integral_scale_exponent(self):
        # the smallest strict-mode instance the window formulas admit:
        # N = 50, eps = 1, M = 1 gives an 8-prime window in [50, 500] and
        # kappa = 3 (C(8,3) = 56 >= 50), with R = N^(M kappa / eps) = 50^3
        spec = D.DirectionSpec(N=50, eps=1.0, M=1, mode="strict", seed=1)
        window = D.choose_prime_window(spec)
        assert window == [53, 59, 61, 67, 71, 73, 79, 83]
        assert D.choose_kappa(len(window), spec.N) == 3
        ds = D.construct_directions(spec)
        assert ds.scale_denominator == 50**3
        assert ds.eps_adjusted is None
        D.validate_direction_set(ds)

    def test_y_factor_structure(self, toy_ds):
        # the y factor is n_i times the vector's prime product, exactly
        for i, rec in enumerate(toy_ds.vectors):
            prod = 1
            for idx in rec.prime_subset:
                prod *= toy_ds.prime_window[idx]
            assert toy_ds.y_factor(i) == rec.n * prod
            assert rec.v.y * toy_ds.scale_denominator == rec.n * prod * Fraction(2) ** rec.q_exponent
