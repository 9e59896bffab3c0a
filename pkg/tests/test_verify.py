import json

import numpy as np
import pytest
from scipy.integrate import quad

from monometric.cm_kernel import ando_transform, f_bures, f_power, f_wyd, monomial
from monometric.exceptions import DomainError, ValidationError
from monometric.metrics import fisher_info, metric_eval
from monometric.pullback import EmbeddingPair, log_pair, paired_metric, wyd_pair
from monometric.spectra import DensityMatrix, random_density, random_tangent, random_unitary
from monometric.verify import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    QuantumChannel,
    StochasticMap,
    apply_channel,
    characterize_pair,
    classical_contraction_test,
    contraction_test,
    dephasing_channel,
    loewner_matrix,
    loewner_test,
    lookup_h,
    merge_map,
    normalize_pair,
    opmono_matrix_search,
    perturbation_corpus,
    power_family_scan,
    power_pairs,
    random_cptp,
    random_stochastic,
    resolve_pair,
    reverify_contraction,
    reverify_loewner,
    reverify_matrix_pair,
    rv_index,
    slope_matched_sqrt_pair,
    unitary_channel,
)
from monometric.verify._verdict import classify, jsonable, run_trials
from monometric.verify.channels import merge_identity
from monometric.verify.regvar import default_sequence


def within_10pct(a, b):
    return abs(a - b) <= 0.1 * abs(b)


class TestVerdictPlumbing:
    def test_classify(self):
        assert classify([np.nan, -1.0]) == (PASS, None)
        assert classify([np.nan, 1e-6]) == (INCONCLUSIVE, 1)
        assert classify([2e-4, 1.0, np.nan]) == (FAIL, 1)

    def test_run_trials_independent_of_jobs(self):
        draw = lambda rng: float(rng.standard_normal())
        assert run_trials(draw, 3, 50, jobs=1) == run_trials(draw, 3, 50, jobs=4)

    def test_jsonable(self):
        out = jsonable({"a": np.eye(2, dtype=complex), "b": np.float64(1.5), "c": np.arange(3)})
        assert out["a"] == {"dim": 2, "rows": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}
        assert json.loads(json.dumps(out)) == out


class TestLoewner:
    def test_identity_pass(self):
        f = monomial(1)
        np.testing.assert_allclose(loewner_matrix(f, [0.5, 2.0, 7.0]), np.ones((3, 3)))
        assert loewner_test(f, n_sets=50).status == PASS

    def test_square_oracle(self):
        L = loewner_matrix(monomial(2), [1.0, 2.0, 3.0])
        np.testing.assert_allclose(L, [[2, 3, 4], [3, 4, 5], [4, 5, 6]])
        # characteristic polynomial lambda (lambda^2 - 12 lambda - 6)
        assert np.linalg.eigvalsh(L)[0] == pytest.approx(6 - np.sqrt(42), rel=1e-12)
        assert 6 - np.sqrt(42) == pytest.approx(-0.481, abs=1e-3)

    def test_square_fails_with_witness(self):
        v = loewner_test(monomial(2), n_sets=20)
        assert v.status == FAIL and v.witness["violation"] > 1e-4
        assert within_10pct(reverify_loewner(monomial(2), v.witness), v.witness["violation"])

    def test_wy_pass(self):
        v = loewner_test(f_wyd(0.5))
        assert v.status == PASS and v.worst >= -1e-12 * 1e3

    def test_needs_two_points(self):
        with pytest.raises(ValidationError):
            loewner_test(f_bures(), n_points=1)

    def test_jobs_invariant(self):
        a = loewner_test(f_wyd(2.5), n_sets=40, seed=5).as_dict()
        b = loewner_test(f_wyd(2.5), n_sets=40, seed=5, jobs=3).as_dict()
        assert a == b


class TestMatrixSearch:
    def test_identity_pass(self):
        assert opmono_matrix_search(monomial(1), trials=200).status == PASS

    def test_cube_dim2(self):
        v = opmono_matrix_search(monomial(3), dims=(2,), trials=200)
        assert v.status == FAIL
        assert within_10pct(reverify_matrix_pair(monomial(3), v.witness), v.witness["violation"])
        A, B = v.witness["A"], v.witness["B"]
        assert np.linalg.eigvalsh(B - A)[0] >= -1e-9 * np.linalg.norm(B, 2)

    def test_wyd3_fails(self):
        v = opmono_matrix_search(f_wyd(3.0), trials=300)
        assert v.status == FAIL
        assert within_10pct(reverify_matrix_pair(f_wyd(3.0), v.witness), v.witness["violation"])

    def test_sqrt_pass(self):
        assert opmono_matrix_search(monomial(0.5), trials=300).status == PASS


class TestPowerAndAndo:
    def test_scan(self):
        rows = power_family_scan((1.0, 1.5, 2.0), n_sets=60, trials=150)
        assert all(r.passed for r in rows)
        assert rows[0].as_dict()["nu"] == 1.0

    def test_scan_below_one_fails(self):
        (row,) = power_family_scan((0.5,), n_sets=60, trials=150)
        assert not row.passed

    def test_nu_beyond_two_passes(self):
        # the Ando transform of Bures for any nu >= 1, beyond the stated [1, 2] range
        assert loewner_test(f_power(3.0), n_sets=100).passed

    @pytest.mark.parametrize("nu", [1.0, 1.3, 1.7, 2.0])
    def test_ando_closure(self, nu):
        for f in (f_bures(), f_wyd(0.0), f_wyd(-1.0), f_wyd(0.5), f_wyd(2.0)):
            assert loewner_test(ando_transform(f, nu), n_sets=60).passed, (f.name, nu)


class TestChannels:
    def test_trace_preserving(self):
        for n, m in ((2, 2), (3, 2), (2, 4)):
            T = random_cptp(n, m, seed=1)
            S = sum(K.conj().T @ K for K in T.kraus)
            np.testing.assert_allclose(S, np.eye(n), atol=1e-10)
            out = apply_channel(T, random_density(n, 2))
            assert np.trace(out).real == pytest.approx(1, abs=1e-12)
            assert np.linalg.eigvalsh(out)[0] >= -1e-12

    def test_rank_one_is_unitary(self):
        T = random_cptp(3, 3, kraus_rank=1, seed=4)
        rho = random_density(3, 5)
        np.testing.assert_allclose(np.linalg.eigvalsh(T(rho)), np.linalg.eigvalsh(rho.matrix), atol=1e-12)

    def test_dephasing(self):
        rho = random_density(3, 6)
        out = dephasing_channel(3)(rho)
        np.testing.assert_allclose(out, np.diag(np.diag(rho.matrix)), atol=1e-15)

    def test_rejects_non_tp(self):
        with pytest.raises(ValidationError, match="trace preserving"):
            QuantumChannel((np.eye(2) * 0.9,))

    def test_bad_rank(self):
        with pytest.raises(ValidationError):
            random_cptp(4, 2, kraus_rank=1)

    def test_unitary_equality(self):
        rng = np.random.default_rng(0)
        for f in (f_bures(), f_wyd(0.0), f_wyd(-1.0)):
            U = random_unitary(4, rng)
            rho, X = random_density(4, rng), random_tangent(4, rng)
            T = unitary_channel(U)
            a = metric_eval(f, rho, X)
            b = metric_eval(f, DensityMatrix(T(rho)), T(X))
            assert b == pytest.approx(a, rel=1e-10)

    def test_wy_contracts(self):
        v = contraction_test(f_wyd(0.5), trials=150)
        assert v.status == PASS and v.info["max_ratio_after_before"] <= 1 + 1e-9

    def test_square_violates(self):
        f = monomial(2)
        v = contraction_test(f, trials=150)
        assert v.status == FAIL
        assert within_10pct(reverify_contraction(f, v.witness), v.witness["violation"])

    def test_jobs_invariant(self):
        a = contraction_test(f_bures(), trials=30, seed=9).as_dict()
        b = contraction_test(f_bures(), trials=30, seed=9, jobs=4).as_dict()
        assert a == b


class TestStochastic:
    def test_columns(self):
        M = random_stochastic(4, 3, seed=0).matrix
        np.testing.assert_allclose(M.sum(axis=0), 1, atol=1e-12)
        assert M.shape == (3, 4) and np.all(M >= 0)

    def test_rejects(self):
        with pytest.raises(ValidationError):
            StochasticMap(np.array([[0.5, 0.5], [0.4, 0.5]]))
        with pytest.raises(ValidationError):
            StochasticMap(np.array([[1.5, 0.0], [-0.5, 1.0]]))

    def test_merge_closed_form(self):
        rho, A = np.array([0.2, 0.5, 0.3]), np.array([0.4, -0.1, -0.3])
        before, after = merge_identity(rho, A, 0, 1)
        assert before == pytest.approx(fisher_info(rho, A), rel=1e-15)
        oracle = (A[0] + A[1]) ** 2 / (rho[0] + rho[1]) + A[2] ** 2 / rho[2]
        assert after == pytest.approx(oracle, rel=1e-12)
        assert after < before

    def test_merge_map(self):
        np.testing.assert_allclose(merge_map(3, 0, 2).matrix, [[1, 0, 1], [0, 1, 0]])
        with pytest.raises(ValidationError):
            merge_map(3, 1, 1)

    def test_classical_contraction(self):
        assert classical_contraction_test(trials=200).status == PASS


class TestNormalizePair:
    def test_wyd_form(self):
        c = normalize_pair(wyd_pair(0.5))
        x = np.array([0.25, 4.0])
        np.testing.assert_allclose(c.phi(x), (np.sqrt(x) - 1) / 0.5)

    def test_affine(self):
        pr = EmbeddingPair("affine", lambda x: 3 * np.asarray(x) + 5, lambda x: 3 + 0 * np.asarray(x),
                           lambda x: np.asarray(x) / 3, lambda x: 0 * np.asarray(x) + 1 / 3)
        c = normalize_pair(pr)
        x = np.array([0.5, 2.0])
        np.testing.assert_allclose(c.phi(x), x - 1)
        np.testing.assert_allclose(c.chi(x), x - 1)
        np.testing.assert_allclose(c.dphi(x) * c.dchi(x), pr.dphi(x) * pr.dchi(x))

    def test_idempotent(self):
        once = normalize_pair(wyd_pair(-0.5))
        twice = normalize_pair(once)
        assert twice is once

    def test_metric_invariant(self):
        rho, A = random_density(3, 1), random_tangent(3, 2)
        pr = wyd_pair(1.5)
        assert paired_metric(normalize_pair(pr), rho, A) == pytest.approx(paired_metric(pr, rho, A))

    def test_zero_slope(self):
        pr = EmbeddingPair("flat", lambda x: (np.asarray(x) - 1) ** 2, lambda x: 2 * (np.asarray(x) - 1),
                           np.log, lambda x: 1 / np.asarray(x))
        with pytest.raises(ValidationError):
            normalize_pair(pr)


class TestCharacterize:
    def test_power_pairs(self):
        for pr, expected in power_pairs():
            assert characterize_pair(pr, loewner_sets=60).passed == expected, pr.name

    def test_wyd3_only_recovered_f_fails(self):
        r = characterize_pair(wyd_pair(3.0))
        assert r.failed_checks == ["recovered_f"]
        wit = r.check("recovered_f").witness
        assert wit["violation"] > 1e-4

    def test_slope_matched_homogeneity(self):
        r = characterize_pair(slope_matched_sqrt_pair(0.1))
        chk = r.check("homogeneity")
        assert not chk.passed and chk.residual > 1e-2
        # spot (x, y, t) = (2, 1, 10)
        c = normalize_pair(slope_matched_sqrt_pair(0.1))
        spot = abs(10 * c.kernel(20.0, 10.0) - c.kernel(2.0, 1.0)) / c.kernel(2.0, 1.0)
        assert spot > 1e-2

    def test_slope_matched_chi_against_quad(self):
        for eps in (1e-2, 1e-1):
            pr = slope_matched_sqrt_pair(eps)
            for x in (0.01, 0.5, 3.0, 40.0):
                ref, _ = quad(lambda s: 1 / (np.sqrt(s) + 2 * eps * s**2), 1.0, x, epsabs=0, epsrel=1e-12)
                assert pr.chi(x) == pytest.approx(ref, rel=1e-10, abs=1e-12)
            x = np.geomspace(1e-2, 1e2, 9)
            np.testing.assert_allclose(x * pr.dphi(x) * pr.dchi(x), 1.0, rtol=1e-13)

    def test_corpus_all_fail_with_witness(self):
        corpus = perturbation_corpus()
        assert len(corpus) >= 12
        for pr in corpus:
            r = characterize_pair(pr, loewner_sets=60)
            assert not r.passed, pr.name
            for name in r.failed_checks:
                assert name in {"symmetry", "homogeneity", "slope_product", "recovered_f"}
                assert r.check(name).witness

    def test_report_json(self):
        d = characterize_pair(log_pair()).as_dict()
        assert d["pass"] is True and len(d["checks"]) == 4
        json.dumps(d)

    def test_resolve(self):
        assert resolve_pair("corpus:0").name == perturbation_corpus()[0].name
        assert "slope-matched" in resolve_pair("slope-matched:eps=0.1").name
        with pytest.raises(ValidationError):
            resolve_pair("corpus:99")


class TestRegularVariation:
    def test_linear(self):
        est = rv_index(lambda x: np.asarray(x))
        assert est.index_p == pytest.approx(1.0, abs=1e-12) and est.stderr <= 1e-12

    def test_log_slowly_varying(self):
        est = rv_index(lookup_h("log"), x_sequence=default_sequence("zero", first=1e-2))
        # oracle: 1 + log(1/t)/log(1/x) decays like 1/|log x|
        assert abs(est.index_p) <= 0.05 and est.stderr > 0
        x, t = 1e-10, 0.5
        assert np.log(np.log(1 / (t * x)) / np.log(1 / x)) / np.log(t) == pytest.approx(
            np.log1p(np.log(1 / t) / np.log(1 / x)) / np.log(t))

    def test_sqrt_log(self):
        est = rv_index(lookup_h("powerlog:p=0.5"))
        assert est.index_p == pytest.approx(0.5, abs=0.05)
        x = 1e-12
        h = lookup_h("powerlog:p=0.5")
        direct = np.log(h(0.5 * x) / h(x)) / np.log(0.5)
        assert float(direct) == pytest.approx(0.5, abs=0.05)

    def test_infinity(self):
        est = rv_index(lookup_h("power:p=-1.5"), side="infinity")
        assert est.index_p == pytest.approx(-1.5, abs=1e-12)

    def test_wyd_product(self):
        for p in (0.2, 0.5, 0.8):
            assert rv_index(lookup_h(f"wyd-product:p={p}")).index_p == pytest.approx(1.0, abs=1e-12)

    def test_samples_and_stderr(self):
        est = rv_index(lookup_h("powerlog:p=1"))
        assert len(est.samples) == 20 * 4 and est.stderr >= 0

    def test_errors(self):
        with pytest.raises(DomainError):
            rv_index(lambda x: -np.asarray(x))
        with pytest.raises(ValidationError):
            rv_index(lambda x: x, t_grid=(1.0,))
        with pytest.raises(ValidationError):
            lookup_h("nope:p=1")
