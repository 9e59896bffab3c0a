import numpy as np
import pytest

from monometric.cm_kernel import WYD_P_GRID, f_bures, f_wyd, lookup
from monometric.exceptions import ValidationError
from monometric.metrics import fisher_info, metric_eval
from monometric.pullback import (
    NqVector,
    amari_embedding,
    amari_pair,
    amari_pullback,
    amari_pullback_commutative,
    d_embed,
    d_embed_split,
    duality_map,
    duality_pairing,
    kernel_grid,
    log_pair,
    lookup_pair,
    matrix_pairing_residual,
    nq_norm,
    paired_metric,
    pairing_check,
    pairing_residual,
    tabulated_pair,
    wyd_pair,
)
from monometric.spectra import DensityMatrix, mat_fn, random_density, random_tangent

SX = np.array([[0, 1], [1, 0]], dtype=complex)
RHO = DensityMatrix(np.diag([0.9, 0.1]))
ADMISSIBLE = [p for p in WYD_P_GRID if -1 <= p <= 2]


def fd_derivative(func, rho, A, h):
    # central difference of t -> func(rho + tA)
    R = rho.matrix
    return (mat_fn(R + h * A, func) - mat_fn(R - h * A, func)) / (2 * h)


class TestPairs:
    def test_half(self):
        pr = wyd_pair(0.5)
        assert pr.phi(4.0) == pytest.approx(4.0) and pr.chi(4.0) == pytest.approx(4.0)

    def test_log_endpoint(self):
        for p in (0.0, 1.0):
            pr = wyd_pair(p)
            x = np.array([0.3, 2.0])
            np.testing.assert_allclose(pr.phi(x), x)
            np.testing.assert_allclose(pr.chi(x), np.log(x))
            np.testing.assert_allclose(pr.dphi(x) * pr.dchi(x), 1 / x)

    @pytest.mark.parametrize("p", ADMISSIBLE + [-2.0, 3.0])
    def test_slope_product(self, p):
        pr = wyd_pair(p)
        x = np.geomspace(1e-3, 1e3, 31)
        np.testing.assert_allclose(x * pr.dphi(x) * pr.dchi(x), 1.0, rtol=1e-10)

    @pytest.mark.parametrize("p", [-1.0, 0.25, 0.5, 1.5, 3.0])
    def test_derivatives_central_difference(self, p):
        pr = wyd_pair(p)
        x = np.array([0.02, 0.7, 3.0, 90.0])
        h = 1e-6 * x
        np.testing.assert_allclose(pr.dphi(x), (pr.phi(x + h) - pr.phi(x - h)) / (2 * h), rtol=1e-7)
        np.testing.assert_allclose(pr.dchi(x), (pr.chi(x + h) - pr.chi(x - h)) / (2 * h), rtol=1e-7)

    @pytest.mark.parametrize("p", [-1.0, 0.3, 0.5, 2.0])
    def test_k_homogeneous(self, p):
        pr = wyd_pair(p)
        rng = np.random.default_rng(0)
        x, y, t = 10 ** rng.uniform(-2, 2, (3, 500))
        k = lambda a, b: (pr.phi(a) - pr.phi(b)) * (pr.chi(a) - pr.chi(b))
        np.testing.assert_allclose(k(t * x, t * y), t * k(x, y), rtol=1e-9)

    def test_amari_matches_wyd(self):
        for q in (1.5, 2.0, 3.0, 10.0):
            a, w = amari_pair(q), wyd_pair(1 / q)
            x, y = kernel_grid(12)
            np.testing.assert_allclose(a.kernel(x, y), w.kernel(x, y), rtol=1e-11)

    def test_lookup(self):
        assert lookup_pair("p=0.5").name == "wyd:p=0.5"
        assert lookup_pair("wyd:p=-1").name == "wyd:p=-1"
        assert lookup_pair("log").phi(2.0) == 2.0
        assert lookup_pair("amari:q=2").name == "amari:q=2"
        with pytest.raises(ValidationError):
            lookup_pair("nope:p=1")

    def test_tabulated(self, tmp_path):
        xs = np.geomspace(0.05, 20, 300)
        pr = tabulated_pair(xs, 2 * np.sqrt(xs), 2 * np.sqrt(xs))
        x = np.array([0.1, 1.0, 9.0])
        np.testing.assert_allclose(pr.phi(x), 2 * np.sqrt(x), rtol=1e-6)
        np.testing.assert_allclose(pr.dphi(x), 1 / np.sqrt(x), rtol=1e-4)
        path = tmp_path / "pair.csv"
        np.savetxt(path, np.column_stack([xs, xs, np.log(xs)]), delimiter=",", header="x,phi,chi",
                   comments="")
        tp = lookup_pair(f"table:{path}")
        assert tp.dchi(2.0) == pytest.approx(0.5, rel=1e-4)


class TestDEmbed:
    def test_identity(self):
        rho, A = random_density(4, 0), random_tangent(4, 1)
        np.testing.assert_allclose(d_embed(lambda x: x, np.ones_like, rho, A), A, atol=1e-13)

    def test_commuting(self):
        A = np.diag([0.5, -0.5]).astype(complex)
        np.testing.assert_allclose(d_embed(np.sqrt, lambda x: 0.5 / np.sqrt(x), RHO, A),
                                   mat_fn(RHO.matrix, lambda x: 0.5 / np.sqrt(x)) @ A, atol=1e-14)

    def test_sqrt_spot(self):
        D = d_embed(lambda x: 2 * np.sqrt(x), lambda x: 1 / np.sqrt(x), RHO, SX)
        expected = (2 * np.sqrt(0.9) - 2 * np.sqrt(0.1)) / 0.8
        assert D[0, 1].real == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(1.5811, abs=1e-4)
        # oracle: finite differences over a step sweep
        for h in (1e-4, 1e-5, 1e-6):
            fd = fd_derivative(lambda x: 2 * np.sqrt(x), RHO, SX, h)
            assert fd[0, 1].real == pytest.approx(expected, rel=1e-6)

    def test_chain_rule_random(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            n = int(rng.integers(2, 7))
            rho, A = random_density(n, rng), random_tangent(n, rng)
            # keep rho + tA positive for the finite difference
            rho = DensityMatrix(0.5 * rho.matrix + 0.5 * np.eye(n) / n)
            for func, deriv in ((np.log, lambda x: 1 / x), (np.sqrt, lambda x: 0.5 / np.sqrt(x))):
                fd = fd_derivative(func, rho, A, 1e-5)
                np.testing.assert_allclose(d_embed(func, deriv, rho, A), fd, atol=1e-6)

    def test_split_form_agrees(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            n = int(rng.integers(2, 7))
            rho, A = random_density(n, rng), random_tangent(n, rng)
            a = d_embed(np.log, lambda x: 1 / x, rho, A)
            b = d_embed_split(np.log, lambda x: 1 / x, rho, A)
            np.testing.assert_allclose(a, b, atol=1e-8 * max(1, np.abs(a).max()))


class TestPairedMetric:
    def test_log_scalar(self):
        assert paired_metric(log_pair(), np.eye(2) / 2, SX) == pytest.approx(4.0)

    def test_wy_spot(self):
        assert paired_metric(wyd_pair(0.5), RHO, SX, SX) == pytest.approx(5.0, rel=1e-13)
        assert 2 * 1.5811388300841898**2 == pytest.approx(5.0)

    def test_zero(self):
        assert paired_metric(wyd_pair(0.3), RHO, np.zeros((2, 2))) == 0

    def test_bilinear(self):
        rng = np.random.default_rng(4)
        rho, A, B = random_density(4, rng), random_tangent(4, rng), random_tangent(4, rng)
        pr = wyd_pair(-0.5)
        assert paired_metric(pr, rho, A, 3 * B) == pytest.approx(3 * paired_metric(pr, rho, A, B))

    def test_equivalence_grid(self):
        rng = np.random.default_rng(5)
        for p in ADMISSIBLE:
            f, pr = f_wyd(p), wyd_pair(p)
            for n in range(2, 7):
                for _ in range(8):
                    rho = random_density(n, rng)
                    A, B = random_tangent(n, rng), random_tangent(n, rng)
                    g = metric_eval(f, rho, A, B)
                    assert abs(paired_metric(pr, rho, A, B) - g) <= 1e-8 * (1 + abs(g))


class TestPairingResidual:
    def test_half(self):
        assert pairing_residual(f_wyd(0.5), wyd_pair(0.5)) <= 1e-9

    def test_log(self):
        assert pairing_residual(lookup("bkm"), log_pair()) <= 1e-9

    def test_mismatch(self):
        assert pairing_residual(f_bures(), wyd_pair(0.5)) > 1e-2
        # oracle at (4, 1): 2/(x+y) = 0.4 against 4/(sqrt x + sqrt y)^2 = 4/9
        grid = (np.array([4.0]), np.array([1.0]))
        assert pairing_residual(f_bures(), wyd_pair(0.5), grid) == pytest.approx(abs(0.4 - 4 / 9) / 0.4)

    def test_matrix_mismatch(self):
        assert matrix_pairing_residual(f_bures(), wyd_pair(0.5), trials=5) > 1e-3

    def test_report(self):
        r = pairing_check(f_wyd(0.3), wyd_pair(0.3), trials=5)
        assert r.passed and r.as_dict()["pass"] is True
        # f_p = f_(1-p), so the reflected pair matches too
        assert pairing_check(f_wyd(0.3), wyd_pair(0.7), trials=2).passed
        assert not pairing_check(f_wyd(0.3), wyd_pair(1.5), trials=2).passed

    def test_slope_consequence(self):
        # pairs passing against some catalog f satisfy phi' chi' = 1/x
        x = np.geomspace(1e-3, 1e3, 25)
        for p in (-1.0, 0.25, 1.5):
            pr = wyd_pair(p)
            assert pairing_residual(f_wyd(p), pr) <= 1e-9
            np.testing.assert_allclose(pr.dphi(x) * pr.dchi(x), 1 / x, rtol=1e-10)


class TestNq:
    def test_norm(self):
        v = NqVector(3.0, np.array([1.0, -2.0]))
        assert nq_norm(v) == pytest.approx((1 + 8) ** (1 / 3) / 3)

    def test_rejects_q(self):
        with pytest.raises(ValidationError):
            NqVector(1.0, np.eye(2))

    def test_amari_unit_sphere(self):
        assert nq_norm(amari_embedding(RHO, 2.0)) == pytest.approx(1.0, rel=1e-14)
        for q in (1.5, 3.0, 10.0):
            assert nq_norm(amari_embedding(random_density(4, 1), q)) == pytest.approx(1.0, rel=1e-12)

    def test_self_dual(self):
        v = amari_embedding(RHO, 2.0)
        np.testing.assert_allclose(duality_map(v).matrix, v.matrix, atol=1e-15)

    def test_q4_spot(self):
        v = amari_embedding(np.eye(2) / 2, 4.0)
        np.testing.assert_allclose(v.matrix, 4 * 0.5**0.25 * np.eye(2), rtol=1e-15)
        J = duality_map(v)
        assert J.q == pytest.approx(4 / 3)
        np.testing.assert_allclose(J.matrix, 4 / 3 * 0.5**0.75 * np.eye(2), rtol=1e-14)

    def test_pairing_is_one(self):
        for q in (1.5, 2.0, 4.0):
            for rho in (random_density(3, 2), np.array([0.2, 0.3, 0.5])):
                v = amari_embedding(rho, q)
                J = duality_map(v)
                assert duality_pairing(v, J) == pytest.approx(1.0, rel=1e-12)
                assert nq_norm(J) == pytest.approx(1.0, rel=1e-12)

    def test_involution(self):
        for q in (1.5, 3.0):
            v = amari_embedding(random_density(4, 5), q)
            np.testing.assert_allclose(duality_map(duality_map(v)).matrix, v.matrix, atol=1e-10)

    def test_off_sphere_rejected(self):
        with pytest.raises(ValidationError, match="sphere"):
            duality_map(NqVector(2.0, np.eye(2)))
        with pytest.raises(ValidationError, match="positive"):
            duality_map(NqVector(2.0, np.diag([2.0, -0.1])))


class TestAmariPullback:
    def test_uniform(self):
        for q in (1.5, 2.0, 7.0):
            assert amari_pullback_commutative([0.5, 0.5], [1, -1], [1, -1], q) == pytest.approx(4.0)

    def test_q5_spot(self):
        v = amari_pullback_commutative([0.9, 0.1], [1, -1], [1, -1], 5.0)
        assert v == pytest.approx(fisher_info([0.9, 0.1], [1, -1]), rel=1e-14)

    def test_q_independent(self):
        rng = np.random.default_rng(6)
        rho = rng.dirichlet(np.ones(5))
        A, B = rng.standard_normal((2, 5))
        A -= A.mean()
        B -= B.mean()
        assert amari_pullback_commutative(rho, A, B, 2.0) == pytest.approx(
            amari_pullback_commutative(rho, A, B, 3.0), rel=1e-12)

    def test_noncommutative_is_wyd(self):
        rng = np.random.default_rng(7)
        for q in (1.5, 2.0, 4.0):
            rho, A, B = random_density(4, rng), random_tangent(4, rng), random_tangent(4, rng)
            g = metric_eval(f_wyd(1 / q), rho, A, B)
            assert amari_pullback(rho, A, B, q) == pytest.approx(g, rel=1e-9)
