#include <doctest.h>

#include "test_support.hpp"
#include "ttstar/factorization.hpp"
#include "ttstar/painleve3.hpp"
#include "ttstar/qc_frames.hpp"

using namespace ttstar;
using namespace ttstar::loops;
using namespace ttstar::factorization;
using qc_frames::FramePoint;
using test_support::uniform;

namespace {
constexpr double kFourGamma = 4.0 * painleve3::kEulerGamma;

TruncatedLoop full_frame(double a, Cplx t) {
    return qc_frames::dressed_frame(FramePoint::from_t(t, a));
}
}  // namespace

TEST_SUITE("factorization") {

TEST_CASE("birkhoff: identity and constant inputs") {
    auto f = birkhoff(TruncatedLoop::identity());
    CHECK(max_coeff_norm(trimmed(f.x_minus - TruncatedLoop::identity(), 0.0)) <= 1e-12);
    CHECK(max_coeff_norm(trimmed(f.x_plus - TruncatedLoop::identity(), 0.0)) <= 1e-12);
    CHECK(f.residual <= 1e-13);

    Mat2 c = test_support::random_sl2();
    auto g = birkhoff(TruncatedLoop::constant(c));
    CHECK(max_coeff_norm(trimmed(g.x_minus - TruncatedLoop::identity(), 0.0)) <= 1e-10);
    CHECK((g.x_plus.coeff(0) - c).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("birkhoff: the unit model loop splits into the displayed factors") {
    // X = [[1, l], [-1/l, 0]]
    TruncatedLoop X = qc_frames::model_Z(1.0, Cplx(0.0));
    auto f = birkhoff(X);
    TruncatedLoop xm_expect = TruncatedLoop::identity() +
                              TruncatedLoop::monomial((Mat2() << 0, 0, -1, 0).finished(), -1);
    TruncatedLoop xp_expect = TruncatedLoop::identity() +
                              TruncatedLoop::monomial((Mat2() << 0, 1, 0, 0).finished(), 1);
    CHECK(max_coeff_norm(trimmed(f.x_minus - xm_expect, 0.0)) <= 1e-12);
    CHECK(max_coeff_norm(trimmed(f.x_plus - xp_expect, 0.0)) <= 1e-12);
    CHECK(max_coeff_norm(trimmed(compose(f.x_minus, f.x_plus) - X, 0.0)) <= 1e-12);
}

TEST_CASE("iwasawa_su11: identity") {
    auto iw = iwasawa_su11(TruncatedLoop::identity());
    CHECK(iw.orbit == Orbit::Identity);
    CHECK(iw.k == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_coeff_norm(trimmed(iw.F - TruncatedLoop::identity(), 0.0)) <= 1e-10);
    CHECK(max_coeff_norm(trimmed(iw.B - TruncatedLoop::identity(), 0.0)) <= 1e-10);
}

TEST_CASE("iwasawa_su11: model frame at a = 1, |z| = 1/e lands in the W orbit with k = 1") {
    auto iw = iwasawa_su11(qc_frames::model_E(1.0, Cplx(-1.0)));
    CHECK(iw.orbit == Orbit::W);
    CHECK(iw.k == doctest::Approx(1.0).epsilon(1e-10));
    TruncatedLoop b_expect = TruncatedLoop::identity() +
                             TruncatedLoop::monomial((Mat2() << 0, -1, 0, 0).finished(), 1);
    CHECK(max_coeff_norm(trimmed(iw.B - b_expect, 1e-9)) <= 1e-9);
}

TEST_CASE("iwasawa_su11: k-asymptotics of the full frame near the origin") {
    const double a = kFourGamma;
    const double r = 1e-6;
    auto iw = iwasawa_su11(full_frame(a, Cplx(std::log(r))));
    const double ratio = iw.k / std::sqrt(-a - 2.0 * std::log(r));
    CHECK(ratio > 0.99);
    CHECK(ratio < 1.01);
}

TEST_CASE("iwasawa_su11: rejects non-twisted input") {
    TruncatedLoop bad = TruncatedLoop::identity() +
                        TruncatedLoop::monomial((Mat2() << 0, 0.5, 0, 0).finished(), 0);
    CHECK_THROWS_AS((void)iwasawa_su11(bad), NotTwisted);
}

TEST_CASE("model_iwasawa: closed forms of both orbit cases") {
    // a = 1, |z| = 1: identity orbit, B = [[1, l], [0, 1]]
    auto c1 = model_iwasawa(1.0, Cplx(0.0));
    CHECK(c1.orbit == Orbit::Identity);
    CHECK(c1.k == doctest::Approx(1.0));
    CHECK(std::abs(c1.B.coeff(1)(0, 1) - 1.0) <= 1e-15);

    // a = 1, |z| = 1/e: W orbit, B = [[1, -l], [0, 1]]
    auto c2 = model_iwasawa(1.0, Cplx(-1.0));
    CHECK(c2.orbit == Orbit::W);
    CHECK(c2.k == doctest::Approx(1.0));
    CHECK(std::abs(c2.B.coeff(1)(0, 1) + 1.0) <= 1e-15);

    // a = 2, |z| = e^{-2}: k = sqrt(2)
    auto c3 = model_iwasawa(2.0, Cplx(-2.0));
    CHECK(c3.orbit == Orbit::W);
    CHECK(c3.k == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS((void)model_iwasawa(1.0, Cplx(-0.5)), OrbitBoundary);
}

TEST_CASE("model factors reconstruct the frame") {
    for (int i = 0; i < 6; ++i) {
        const double a = uniform(0.3, 6.0);
        const Cplx t(uniform(-2.0, 0.5), uniform(-3.0, 3.0));
        if (std::abs(a + 2 * t.real()) < 0.05) continue;
        auto m = model_iwasawa(a, t);
        TruncatedLoop rebuilt = (m.orbit == Orbit::W) ? compose(compose(m.F, orbit_w()), m.B)
                                                      : compose(m.F, m.B);
        CHECK(max_coeff_norm(trimmed(rebuilt - qc_frames::model_E(a, t), 0.0)) <= 1e-12);
        CHECK(max_coeff_norm(trimmed(apply_C(m.F) - m.F, 0.0)) <= 1e-11);
    }
}

TEST_CASE("oracle equivalence: numeric factorization matches the closed forms") {
    int done = 0;
    while (done < 50) {
        const double a = uniform(0.1, 10.0);
        const double logr = uniform(-2.5, 1.0);
        if (std::abs(a + 2 * logr) <= 0.05) continue;
        const Cplx t(logr, uniform(-3.1, 3.1));
        auto oracle = model_iwasawa(a, t);
        auto numeric = iwasawa_su11(qc_frames::model_E(a, t));
        CHECK(numeric.orbit == oracle.orbit);
        CHECK(std::abs(numeric.k - oracle.k) / oracle.k <= 1e-8);
        CHECK(max_coeff_norm(numeric.B - oracle.B) <= 1e-8);
        ++done;
    }
}

TEST_CASE("factor invariants: reconstruction, reality, twisting, unimodularity, k > 0") {
    const double a = kFourGamma;
    for (double r : {1e-3, 0.05, 0.3}) {
        auto L = full_frame(a, Cplx(std::log(r), 0.4));
        auto iw = iwasawa_su11(L);
        CHECK(iw.k > 0.0);
        CHECK(iw.diag.reconstruction <= 1e-9);
        CHECK(iw.diag.reality <= 1e-9);
        CHECK(is_twisted(iw.F, 1e-8));
        CHECK(is_twisted(iw.B, 1e-8));
        CHECK(is_unimodular(iw.B, LoopConfig{.tol_det = 1e-8}));
    }
}

TEST_CASE("homogeneity of the full-frame positive factor") {
    const double a = kFourGamma;
    const Cplx t = std::log(Cplx(0.12, 0.07));
    const Cplx eps = std::polar(1.0, 1.0471975511965976);  // e^{i pi/3}
    auto base = iwasawa_su11(full_frame(a, t));
    auto moved = iwasawa_su11(full_frame(a, t + std::log(eps * eps)));
    TruncatedLoop lhs = lambda_substitute(moved.B, eps);
    TruncatedLoop rhs = conjugate_by_d(base.B, eps);
    CHECK(max_coeff_norm(lhs - rhs) <= 1e-8);
    CHECK(std::abs(moved.k - base.k) <= 1e-10);
}

TEST_CASE("orbit boundary detection window around r = e^{-a/2}") {
    const double a = 2.0;
    const double rstar = std::exp(-a / 2.0);

    // model oracle: flags exactly in a narrow band
    CHECK_THROWS_AS((void)model_iwasawa(a, Cplx(std::log(rstar))), OrbitBoundary);
    CHECK_NOTHROW((void)model_iwasawa(a, Cplx(std::log(rstar + 1e-6))));
    CHECK_NOTHROW((void)model_iwasawa(a, Cplx(std::log(rstar - 1e-6))));

    // numeric path: the boundary is flagged inside a window of width <= 1e-6
    // (OffBigCell from the solve, or NonRealResult once B degenerates)
    CHECK_THROWS_AS((void)iwasawa_su11(qc_frames::model_E(a, Cplx(std::log(rstar)))), Error);
    CHECK_THROWS_AS((void)iwasawa_su11(qc_frames::model_E(a, Cplx(std::log(rstar + 1e-7)))), Error);
    CHECK_NOTHROW((void)iwasawa_su11(qc_frames::model_E(a, Cplx(std::log(rstar + 5e-7)))));
    CHECK_NOTHROW((void)iwasawa_su11(qc_frames::model_E(a, Cplx(std::log(rstar - 5e-7)))));
}

}  // TEST_SUITE
