#include "ttstar/factorization.hpp"

#include <cmath>

#include "ttstar/qc_frames.hpp"

namespace ttstar::factorization {

using loops::apply_C;
using loops::apply_C_inverse;
using loops::compose;
using loops::invert;
using loops::max_coeff_norm;
using loops::TruncatedLoop;

namespace {

struct SolveResult {
    TruncatedLoop y_plus;
    double residual;
    double condition;
};

// One least-squares pass at a fixed unknown degree d.  The two columns of
// Y+ decouple and share the coefficient matrix, so a single QR serves both.
SolveResult birkhoff_solve(const TruncatedLoop& x, int d) {
    const int xlo = x.lo();
    const int xhi = x.hi();
    const int rows = 2 * (xhi + d + 1);
    const int cols = 2 * (d + 1);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(rows, cols);
    for (int p = 0; p <= xhi + d; ++p) {
        for (int j = std::max(0, p - xhi); j <= std::min(d, p - xlo); ++j) {
            M.block<2, 2>(2 * p, 2 * j) = x.coeff(p - j);
        }
    }
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(rows, 2);
    rhs(0, 0) = 1.0;
    rhs(1, 1) = 1.0;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(M);
    const auto& R = qr.matrixR();
    const int rank = std::min(rows, cols);
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rank; ++i) {
        double v = std::abs(R(i, i));
        rmax = std::max(rmax, v);
        rmin = std::min(rmin, v);
    }
    const double condition = (rmin > 0.0) ? rmax / rmin : std::numeric_limits<double>::infinity();
    Eigen::MatrixXcd y = qr.solve(rhs);

    std::vector<Mat2> yc(static_cast<size_t>(d + 1));
    for (int j = 0; j <= d; ++j) yc[static_cast<size_t>(j)] = y.block<2, 2>(2 * j, 0);
    TruncatedLoop y_plus(0, std::move(yc));

    // Residual taken on the product itself: positive powers and the
    // deviation of the constant block from I.
    TruncatedLoop prod = compose(x, y_plus);
    double resid = max_coeff_norm(loops::truncated(prod, 1, prod.hi()));
    resid = std::max(resid, (prod.coeff(0) - Mat2::Identity()).cwiseAbs().maxCoeff());
    return {std::move(y_plus), resid, condition};
}

}  // namespace

BirkhoffFactors birkhoff(const TruncatedLoop& x, const LoopConfig& cfg) {
    validate(cfg);
    SolveResult best = birkhoff_solve(x, cfg.degree);
    if (best.residual > cfg.tol_residual) {
        // Doubling the degree once separates truncation starvation from a
        // genuine stratum boundary.
        SolveResult retry = birkhoff_solve(x, 2 * cfg.degree);
        if (retry.residual < best.residual) best = std::move(retry);
    }
    if (best.residual > cfg.tol_residual || !(best.condition <= 1e12)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "birkhoff: residual %.3e, condition %.3e", best.residual,
                      best.condition);
        throw OffBigCell(buf);
    }
    BirkhoffFactors out;
    out.residual = best.residual;
    out.condition = best.condition;
    out.x_plus_inverse = loops::trimmed(best.y_plus);
    TruncatedLoop prod = compose(x, out.x_plus_inverse);
    out.x_minus = loops::trimmed(loops::truncated(prod, prod.lo(), 0));
    out.x_plus = loops::trimmed(invert(out.x_plus_inverse, cfg));
    return out;
}

IwasawaFactors iwasawa_su11(const TruncatedLoop& L, const LoopConfig& cfg) {
    if (!loops::is_twisted(L, 1e3 * cfg.tol_residual)) throw NotTwisted("iwasawa_su11: input loop is not twisted");

    TruncatedLoop X = compose(apply_C_inverse(L), L);
    BirkhoffFactors bf = birkhoff(X, cfg);

    const Cplx s_full = bf.x_plus.coeff(0)(0, 0);
    const double s = s_full.real();
    if (std::abs(s_full.imag()) > 1e3 * cfg.tol_residual * std::max(1.0, std::abs(s)))
        throw OffBigCell("iwasawa_su11: constant block not real");

    IwasawaFactors out;
    out.diag.birkhoff_residual = bf.residual;
    out.diag.condition = bf.condition;
    out.orbit = (s > 0.0) ? Orbit::Identity : Orbit::W;
    out.k = std::sqrt(std::abs(s));
    const double sign = (s > 0.0) ? 1.0 : -1.0;

    Mat2 dk = Mat2::Zero();
    dk(0, 0) = sign / out.k;
    dk(1, 1) = sign * out.k;
    out.B = compose(TruncatedLoop::constant(dk), bf.x_plus);

    // B^{-1} = Y+ diag(k, 1/k) * sign: no second numerical inversion needed.
    Mat2 dk_inv = Mat2::Zero();
    dk_inv(0, 0) = sign * out.k;
    dk_inv(1, 1) = sign / out.k;
    TruncatedLoop b_inv = compose(bf.x_plus_inverse, TruncatedLoop::constant(dk_inv));

    out.F = compose(L, b_inv);
    if (out.orbit == Orbit::W) out.F = compose(out.F, loops::orbit_w_inverse());
    out.F = loops::trimmed(out.F, 1e-16 * std::max(1.0, max_coeff_norm(out.F)));

    TruncatedLoop rebuilt = (out.orbit == Orbit::W) ? compose(compose(out.F, loops::orbit_w()), out.B)
                                                    : compose(out.F, out.B);
    out.diag.reconstruction = max_coeff_norm(rebuilt - L);
    out.diag.reality = max_coeff_norm(apply_C(out.F, cfg) - out.F);
    if (out.diag.reality > 1e3 * cfg.tol_residual) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "iwasawa_su11: C(F) - F = %.3e", out.diag.reality);
        throw NonRealResult(buf);
    }
    return out;
}

IwasawaFactors model_iwasawa(double a, Cplx t) {
    if (!(a > 0.0)) throw DomainError("model_iwasawa: requires a > 0");
    const double s = a + 2.0 * t.real();
    if (std::abs(s) < 1e-7) throw OrbitBoundary("model_iwasawa: a + t + tbar within 1e-7 of the orbit boundary");

    IwasawaFactors out;
    const double root = std::sqrt(std::abs(s));
    out.k = root;
    std::vector<Mat2> bc(2, Mat2::Zero());
    bc[0](0, 0) = root;
    bc[0](1, 1) = 1.0 / root;
    if (s > 0.0) {
        out.orbit = Orbit::Identity;
        bc[1](0, 1) = 1.0 / root;
    } else {
        out.orbit = Orbit::W;
        bc[1](0, 1) = -1.0 / root;
    }
    out.B = TruncatedLoop(0, std::move(bc));

    TruncatedLoop b_inv = invert(out.B);  // constant det, exact adjugate path
    out.F = compose(qc_frames::model_E(a, t), b_inv);
    if (out.orbit == Orbit::W) out.F = compose(out.F, loops::orbit_w_inverse());
    out.F = loops::trimmed(out.F);
    return out;
}

const char* orbit_name(Orbit o) { return o == Orbit::Identity ? "identity" : "w"; }

}  // namespace ttstar::factorization
