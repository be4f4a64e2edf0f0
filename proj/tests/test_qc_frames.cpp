#include <doctest.h>

#include "test_support.hpp"
#include "ttstar/qc_frames.hpp"

using namespace ttstar;
using namespace ttstar::loops;
using namespace ttstar::qc_frames;
using test_support::random_unit;
using test_support::uniform;

TEST_SUITE("qc_frames") {

TEST_CASE("series_f0: value at the origin, circle value, leading terms") {
    auto f = series_f0(Cplx(1e-40), 8);
    CHECK(std::abs(f.coeff(0) - 1.0) <= 1e-30);

    // modified Bessel value: sum 1/(i!)^2 = I0(2)
    auto g = series_f0(Cplx(1.0), 64);
    CHECK(std::abs(g.evaluate(1.0) - 2.2795853023360673) <= 1e-13);

    CHECK(std::abs(g.coeff(0) - 1.0) <= 1e-15);
    CHECK(std::abs(g.coeff(-2) - 1.0) <= 1e-15);  // + z / l^2 at z = 1

    CHECK_THROWS_AS((void)series_f0(Cplx(1.0), 4), BudgetExceeded);
}

TEST_CASE("series_f1: zero at origin, leading term, harmonic recurrence oracle") {
    auto f = series_f1(Cplx(1e-40), 8);
    for (int k = f.lo; k <= f.hi; ++k) CHECK(std::abs(f.coeff(k)) <= 1e-30);

    const Cplx z(0.7, 0.2);
    auto g = series_f1(z, 64);
    CHECK(std::abs(g.coeff(-3) - (-2.0 * z)) <= 1e-15);

    // recurrence H_i = H_{i-1} + 1/i against the stored coefficients
    double fact = 1.0, H = 0.0;
    Cplx zi(1.0);
    for (int i = 1; i <= 20; ++i) {
        fact *= i;
        H += 1.0 / i;
        zi *= z;
        Cplx expect = -2.0 * H * zi / (fact * fact);
        if (-(2 * i + 1) >= g.lo) CHECK(std::abs(g.coeff(-(2 * i + 1)) - expect) <= 1e-15 * std::max(1.0, std::abs(expect)));
    }
}

TEST_CASE("canonical_L0: identity limit, unimodularity, homogeneity") {
    auto p0 = FramePoint::from_z(Cplx(1e-30), 1.0);
    CHECK(max_coeff_norm(trimmed(canonical_L0(p0) - TruncatedLoop::identity(), 0.0)) <= 1e-29);

    for (int i = 0; i < 6; ++i) {
        Cplx z(uniform(-0.8, 0.8), uniform(-0.8, 0.8));
        if (std::abs(z) < 1e-3) continue;
        auto L0 = canonical_L0(FramePoint::from_z(z, 1.0));
        Cplx lam = random_unit();
        Mat2 v = L0.evaluate(lam);
        CHECK(std::abs(v.determinant() - 1.0) <= 1e-10);  // Wronskian constancy
        CHECK(is_twisted(L0, 1e-14));
    }

    // L0(eps^2 z, eps l) = d(eps)^{-1} L0(z, l) d(eps) at eps = i, z = 0.1
    const Cplx eps(0.0, 1.0);
    const Cplx z(0.1, 0.0);
    auto left = lambda_substitute(canonical_L0(FramePoint::from_z(eps * eps * z, 1.0)), eps);
    auto right = conjugate_by_d(canonical_L0(FramePoint::from_z(z, 1.0)), eps);
    CHECK(max_coeff_norm(left - right) <= 1e-13);
}

TEST_CASE("gamma0: unit case, reality identity, Euler-constant entries, domain guard") {
    auto g1 = gamma0(1.0);
    TruncatedLoop expect = TruncatedLoop::identity() +
                           TruncatedLoop::monomial((Mat2() << 0, -1, 0, 0).finished(), 1);
    CHECK(max_coeff_norm(g1 - expect) == 0.0);

    const double a = 2.4;
    TruncatedLoop lhs = compose(apply_C(gamma0(a)), invert(gamma0(a)));
    CHECK(std::abs(lhs.coeff(0)(0, 0) - a) <= 1e-12);
    CHECK(std::abs(lhs.coeff(1)(0, 1) - 1.0) <= 1e-12);
    CHECK(std::abs(lhs.coeff(-1)(1, 0) + 1.0) <= 1e-12);

    const double fourgamma = 2.3088626596061315;
    CHECK(std::abs(gamma0(fourgamma).coeff(0)(0, 0).real() - 0.6581137277478403) <= 1e-12);
    CHECK(std::abs(gamma0(fourgamma).coeff(0)(0, 0).real() - 0.658) <= 1e-3);

    CHECK_THROWS_AS((void)gamma0(0.0), DomainError);
    CHECK_THROWS_AS((void)gamma0(-1.0), DomainError);
}

TEST_CASE("gamma0_negative: the rho < 0 branch satisfies C(g0) g0^{-1} = -[[a,l],[-1/l,0]]") {
    const double a = -1.8;
    TruncatedLoop lhs = compose(apply_C(gamma0_negative(a)), invert(gamma0_negative(a)));
    CHECK(std::abs(lhs.coeff(0)(0, 0) - (-a)) <= 1e-12);
    CHECK(std::abs(lhs.coeff(1)(0, 1) + 1.0) <= 1e-12);
    CHECK(std::abs(lhs.coeff(-1)(1, 0) - 1.0) <= 1e-12);
}

TEST_CASE("model_Z: closed forms and consistency with C(E)^{-1} E") {
    auto z1 = model_Z(1.0, Cplx(0.0));  // |z| = 1
    CHECK(std::abs(z1.coeff(0)(0, 0) - 1.0) <= 1e-15);
    CHECK(std::abs(z1.coeff(1)(0, 1) - 1.0) <= 1e-15);
    CHECK(std::abs(z1.coeff(-1)(1, 0) + 1.0) <= 1e-15);

    auto z2 = model_Z(1.0, Cplx(-1.0));  // |z| = e^{-1}: a + 2 log r = -1
    CHECK(std::abs(z2.coeff(0)(0, 0) + 1.0) <= 1e-15);

    for (int i = 0; i < 8; ++i) {
        const double a = uniform(0.2, 8.0);
        const Cplx t(uniform(-2, 1), uniform(-3, 3));
        TruncatedLoop E = model_E(a, t);
        TruncatedLoop direct = compose(apply_C_inverse(E), E);
        CHECK(max_coeff_norm(trimmed(direct - model_Z(a, t), 0.0)) <= 1e-12);
    }
}

TEST_CASE("Z reality: apply_C(Z) equals invert(Z)") {
    const double a = 3.1;
    const Cplx t(0.2, 1.1);
    TruncatedLoop Z = model_Z(a, t);
    CHECK(max_coeff_norm(trimmed(apply_C(Z) - invert(Z), 0.0)) <= 1e-12);
}

TEST_CASE("homogeneity_delta: identity at eps = 1, reality for the dressing family, negative control") {
    const double a = 1.0;
    const Cplx t = std::log(Cplx(0.2));
    CHECK(max_coeff_norm(trimmed(homogeneity_delta(a, t, Cplx(1.0)) - TruncatedLoop::identity(), 0.0)) <= 1e-13);

    const Cplx eps(0.0, 1.0);
    TruncatedLoop delta = homogeneity_delta(a, t, eps);
    CHECK(max_coeff_norm(trimmed(apply_C(delta) - delta, 0.0)) <= 1e-10);

    // replacing the dressing loop by I destroys the reality of delta
    TruncatedLoop bad = homogeneity_delta_for(TruncatedLoop::identity(), t, eps);
    CHECK(max_coeff_norm(apply_C(bad) - bad) > 1e-3);
}

TEST_CASE("connection form: L^{-1} dL matches the potential by finite differences") {
    const Cplx z(0.3, 0.2);
    const double h = 1e-5;
    auto L = [&](Cplx zz) { return canonical_L(FramePoint::from_z(zz, 1.0)); };
    TruncatedLoop dL = (L(z + h) - L(z - h)) * Cplx(1.0 / (2.0 * h));
    TruncatedLoop form = compose(invert(L(z)), dL);
    TruncatedLoop eta = TruncatedLoop::monomial(dpw_potential_coeff(z), -1);
    CHECK(sup_norm(form - eta) <= 1e-6);
}

TEST_CASE("potential homogeneity: eta(eps^2 z, eps l) d(eps^2 z) = d^{-1} eta d dz") {
    for (int i = 0; i < 4; ++i) {
        const Cplx z(uniform(0.05, 0.6), uniform(-0.3, 0.3));
        const Cplx eps = random_unit();
        TruncatedLoop eta_scaled =
            lambda_substitute(TruncatedLoop::monomial(dpw_potential_coeff(eps * eps * z), -1), eps) * (eps * eps);
        TruncatedLoop expect = conjugate_by_d(TruncatedLoop::monomial(dpw_potential_coeff(z), -1), eps);
        CHECK(max_coeff_norm(eta_scaled - expect) <= 1e-12);
    }
}

TEST_CASE("build_frames: invariants of the assembled tuple") {
    auto p = FramePoint::from_z(Cplx(0.15, 0.1), 2.0);
    auto fr = build_frames(p);
    CHECK(is_twisted(fr.L0, 1e-12));
    CHECK(is_twisted(fr.L, 1e-12));
    CHECK(is_twisted(fr.E, 1e-12));
    CHECK(is_unimodular(fr.L0));
    CHECK(is_unimodular(fr.E));
    CHECK(max_coeff_norm(trimmed(fr.L - compose(exp_tN_over_lambda(p.t), fr.L0), 0.0)) <= 1e-14);
    CHECK(max_coeff_norm(trimmed(compose(apply_C_inverse(fr.E), fr.E) - fr.Z, 0.0)) <= 1e-12);
}

TEST_CASE("FramePoint: branch bookkeeping") {
    CHECK_THROWS_AS((void)FramePoint::from_z(Cplx(0.0), 1.0), DomainError);
    auto p = FramePoint::from_z(Cplx(-0.25, 0.0), 1.0);
    CHECK(p.t.imag() == doctest::Approx(3.14159265358979).epsilon(1e-12));
    CHECK(!p.continued);
    auto q = FramePoint::from_t(Cplx(std::log(0.25), 4.0), 1.0);
    CHECK(q.continued);
    CHECK(std::abs(q.z - std::exp(q.t)) <= 1e-15);
}

}  // TEST_SUITE
