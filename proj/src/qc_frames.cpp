#include "ttstar/qc_frames.hpp"

#include <cmath>
#include <numbers>

namespace ttstar::qc_frames {

using loops::compose;
using loops::invert;
using loops::TruncatedLoop;

Cplx ScalarLaurent::evaluate(Cplx lambda) const {
    Cplx acc = c.back();
    for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) acc = acc * lambda + c[static_cast<size_t>(i)];
    return acc * std::pow(lambda, lo);
}

int adaptive_z_terms(Cplx z) {
    const double az = std::abs(z);
    double fact = 1.0;
    for (int i = 1; i <= 64; ++i) {
        fact *= static_cast<double>(i);
        if (std::pow(az, i) / (fact * fact) < 1e-16) return std::max(i, 2);
    }
    return 64;
}

FramePoint FramePoint::from_z(Cplx z, double a) {
    if (z == Cplx(0.0)) throw DomainError("FramePoint: z must be nonzero");
    FramePoint p;
    p.z = z;
    p.t = std::log(z);  // principal branch, Im t in (-pi, pi]
    p.a = a;
    p.z_terms = adaptive_z_terms(z);
    return p;
}

FramePoint FramePoint::from_t(Cplx t, double a) {
    FramePoint p;
    p.t = t;
    p.z = std::exp(t);
    p.a = a;
    p.z_terms = adaptive_z_terms(p.z);
    p.continued = t.imag() <= -std::numbers::pi || t.imag() > std::numbers::pi;
    return p;
}

ScalarLaurent series_f0(Cplx z, int budget) {
    const int m = adaptive_z_terms(z);
    if (budget < 2 * m) throw BudgetExceeded("series_f0: budget cannot hold 2*z_terms");
    ScalarLaurent s;
    s.lo = -2 * m;
    s.hi = 0;
    s.c.assign(static_cast<size_t>(2 * m + 1), Cplx(0.0));
    Cplx zi(1.0);
    double fact = 1.0;
    for (int i = 0; i <= m; ++i) {
        if (i > 0) {
            zi *= z;
            fact *= static_cast<double>(i);
        }
        s.c[static_cast<size_t>(-2 * i - s.lo)] = zi / (fact * fact);
    }
    return s;
}

ScalarLaurent series_f1(Cplx z, int budget) {
    const int m = adaptive_z_terms(z);
    if (budget < 2 * m + 1) throw BudgetExceeded("series_f1: budget cannot hold 2*z_terms");
    ScalarLaurent s;
    s.lo = -(2 * m + 1);
    s.hi = 0;
    s.c.assign(static_cast<size_t>(2 * m + 2), Cplx(0.0));
    Cplx zi(1.0);
    double fact = 1.0, harmonic = 0.0;
    for (int i = 1; i <= m; ++i) {
        zi *= z;
        fact *= static_cast<double>(i);
        harmonic += 1.0 / static_cast<double>(i);
        s.c[static_cast<size_t>(-(2 * i + 1) - s.lo)] = -2.0 * harmonic * zi / (fact * fact);
    }
    return s;
}

TruncatedLoop canonical_L0(const FramePoint& p) {
    const int m = p.z_terms;
    // Entries assembled termwise; the Euler operator z d/dz turns z^i into i z^i.
    const int lo = -(2 * m + 1);
    std::vector<Mat2> c(static_cast<size_t>(-lo + 1), Mat2::Zero());
    auto at = [&](int k) -> Mat2& { return c[static_cast<size_t>(k - lo)]; };
    Cplx zi(1.0);
    double fact = 1.0, harmonic = 0.0;
    at(0)(0, 0) = 1.0;
    at(0)(1, 1) = 1.0;
    for (int i = 1; i <= m; ++i) {
        zi *= p.z;
        fact *= static_cast<double>(i);
        harmonic += 1.0 / static_cast<double>(i);
        const Cplx term = zi / (fact * fact);
        at(-2 * i)(0, 0) = term;                                        // f0
        at(-2 * i + 1)(0, 1) = static_cast<double>(i) * term;           // lambda * euler(f0)
        at(-(2 * i + 1))(1, 0) = -2.0 * harmonic * term;                // f1
        at(-2 * i)(1, 1) = term - 2.0 * static_cast<double>(i) * harmonic * term;  // f0 + lambda * euler(f1)
    }
    return TruncatedLoop(lo, std::move(c));
}

TruncatedLoop exp_tN_over_lambda(Cplx t) {
    std::vector<Mat2> c(2, Mat2::Zero());
    c[0](1, 0) = t;  // power -1
    c[1] = Mat2::Identity();
    return TruncatedLoop(-1, std::move(c));
}

TruncatedLoop canonical_L(const FramePoint& p) {
    return compose(exp_tN_over_lambda(p.t), canonical_L0(p));
}

TruncatedLoop gamma0(double a) {
    if (!(a > 0.0)) throw DomainError("gamma0: requires a > 0");
    const double s = std::sqrt(a);
    std::vector<Mat2> c(2, Mat2::Zero());
    c[0](0, 0) = 1.0 / s;
    c[0](1, 1) = s;
    c[1](0, 1) = -1.0 / s;
    return TruncatedLoop(0, std::move(c));
}

TruncatedLoop gamma0_negative(double a) {
    if (!(a < 0.0)) throw DomainError("gamma0_negative: requires a < 0");
    const double s = std::sqrt(-a);
    std::vector<Mat2> c(2, Mat2::Zero());
    c[0](0, 0) = 1.0 / s;
    c[0](1, 1) = s;
    c[1](0, 1) = 1.0 / s;
    return TruncatedLoop(0, std::move(c));
}

TruncatedLoop model_E(double a, Cplx t) {
    return compose(invert(gamma0(a)), exp_tN_over_lambda(t));
}

TruncatedLoop model_Z(double a, Cplx t) {
    std::vector<Mat2> c(3, Mat2::Zero());
    c[0](1, 0) = -1.0;                 // power -1
    c[1](0, 0) = a + 2.0 * t.real();   // a + t + tbar
    c[2](0, 1) = 1.0;                  // power +1
    return TruncatedLoop(-1, std::move(c));
}

TruncatedLoop dressed_frame(const FramePoint& p) {
    return compose(invert(gamma0(p.a)), canonical_L(p));
}

TruncatedLoop homogeneity_delta_for(const TruncatedLoop& g0, Cplx t, Cplx eps) {
    const Cplx t_shift = t + std::log(eps * eps);  // fixed principal branch of log
    TruncatedLoop e_tilde =
        compose(invert(loops::lambda_substitute(g0, eps)), loops::lambda_substitute(exp_tN_over_lambda(t_shift), eps));
    TruncatedLoop e_inv = compose(exp_tN_over_lambda(-t), g0);
    return compose(e_tilde, loops::conjugate_by_d(e_inv, eps));
}

TruncatedLoop homogeneity_delta(double a, Cplx t, Cplx eps) {
    return homogeneity_delta_for(gamma0(a), t, eps);
}

Mat2 dpw_potential_coeff(Cplx z) {
    if (z == Cplx(0.0)) throw DomainError("dpw_potential_coeff: z must be nonzero");
    Mat2 m = Mat2::Zero();
    m(0, 1) = 1.0;
    m(1, 0) = 1.0 / z;
    return m;
}

CanonicalFrames build_frames(const FramePoint& p) {
    CanonicalFrames f{canonical_L0(p), canonical_L(p), model_E(p.a, p.t), model_Z(p.a, p.t)};
    return f;
}

}  // namespace ttstar::qc_frames
