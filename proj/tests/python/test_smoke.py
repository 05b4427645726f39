import numpy as np
import pytest

import conceptkit as ck


def test_fit_matches_dense_formula():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((40, 5))
    c = ck.fit_conceptor(x, 2.0)
    r = x.T @ x / len(x)
    dense = r @ np.linalg.inv(r + np.eye(5) / 4.0)
    assert np.allclose(c.matrix, dense, atol=1e-10)
    assert np.allclose(ck.correlation_matrix(x), r)
    assert 0.0 <= c.quota <= 1.0
    assert c.regate(10.0).quota >= c.quota


def test_boolean_operations_and_compose():
    rng = np.random.default_rng(1)
    a = ck.fit_conceptor(rng.standard_normal((30, 4)), 2.0)
    b = ck.fit_conceptor(rng.standard_normal((30, 4)), 2.0)
    assert np.allclose(ck.NOT(ck.NOT(a)).matrix, a.matrix, atol=1e-14)
    assert np.allclose(ck.AND(a, b).matrix, ck.AND(b, a).matrix, atol=1e-9)
    composed = ck.compose("AND_NOT(a,b)", {"a": a, "b": b})
    assert composed.expression == "AND(a,NOT(b))"
    assert np.allclose(composed.matrix, ck.AND_NOT(a, b).matrix, atol=1e-14)
    with pytest.raises(ck.ParseError, match="offending token"):
        ck.compose("AND(a", {"a": a})


def test_files_round_trip(tmp_path):
    bundle = ck.synth_bipolar(seed=3)
    path = tmp_path / "x.bundle"
    ck.save_bundle(bundle, path)
    assert ck.load_bundle(path) == bundle
    assert ck.decode_bundle(ck.encode_bundle(bundle)) == bundle
    assert bundle.poles[0] == "positive"

    c = ck.fit_conceptor_bundle(bundle, aperture=10.0)
    ck.save_conceptor(ck.conceptor_record(c, "toy", 4), tmp_path / "x.cpt")
    rec = ck.load_conceptor(tmp_path / "x.cpt")
    assert rec.concept == "toy" and rec.layer == 4
    assert np.allclose(rec.to_conceptor().matrix, c.matrix, atol=1e-5)

    plan = ck.conceptor_plan(rec, "interpolate", 0.0, layer=4)
    ck.save_plan(plan, tmp_path / "x.plan")
    z = bundle.matrix.astype(np.float64)
    assert np.array_equal(ck.load_plan(tmp_path / "x.plan").apply(z), z)

    with pytest.raises(ck.DataError):
        ck.load_bundle(tmp_path / "missing.bundle")


def test_geometry_and_metrics():
    bundle = ck.synth_bipolar(seed=7)
    v = ck.diffmean(bundle)
    basis, _ = ck.top_k_subspace(bundle.matrix.astype(np.float64), 1)
    assert ck.capture_fraction(v, basis) >= 0.95
    assert ck.subspace_overlap(basis, basis) == pytest.approx(1.0)

    assert ck.win_ratio([0, 0, 0.1, 0.4, 0.9], [1, 2, 0.5, 0.4, 0.1]) == pytest.approx(0.6)
    assert ck.degeneracy_flag([10, 5], [20, 10]) == (2.0, False)
    assert ck.auc([3.0, 3.0], [0, 1]) == 0.5
    assert ck.pearson_r([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)
    tally = ck.mcq_tally(
        '{"question_id":"q","letter_logits":[0,0,0,0],'
        '"category_of_letter":{"A":"both","B":"neutral","C":"concept1_only","D":"concept2_only"}}\n'
    )
    assert tally["both"] == pytest.approx((0.25, 1.0))
    with pytest.raises(ck.DomainError):
        ck.synth_bipolar(d=4, rank=4)
