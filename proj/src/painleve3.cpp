#include "ttstar/painleve3.hpp"

#include <algorithm>
#include <cmath>

#include "ttstar/factorization.hpp"
#include "ttstar/qc_frames.hpp"

namespace ttstar::painleve3 {

namespace {

struct Deriv {
    double v, p;
};

inline Deriv rhs(double x, double v, double p) {
    return {p, 2.0 * std::sinh(2.0 * v) - p / x};
}

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

struct StepResult {
    double v, p;
    double err_v, err_p;
    bool finite;
};

StepResult dp45_step(double x, double v, double p, double h) {
    StepResult out{};
    auto k1 = rhs(x, v, p);
    auto k2 = rhs(x + C2 * h, v + h * A21 * k1.v, p + h * A21 * k1.p);
    auto k3 = rhs(x + C3 * h, v + h * (A31 * k1.v + A32 * k2.v), p + h * (A31 * k1.p + A32 * k2.p));
    auto k4 = rhs(x + C4 * h, v + h * (A41 * k1.v + A42 * k2.v + A43 * k3.v),
                  p + h * (A41 * k1.p + A42 * k2.p + A43 * k3.p));
    auto k5 = rhs(x + C5 * h, v + h * (A51 * k1.v + A52 * k2.v + A53 * k3.v + A54 * k4.v),
                  p + h * (A51 * k1.p + A52 * k2.p + A53 * k3.p + A54 * k4.p));
    auto k6 = rhs(x + h, v + h * (A61 * k1.v + A62 * k2.v + A63 * k3.v + A64 * k4.v + A65 * k5.v),
                  p + h * (A61 * k1.p + A62 * k2.p + A63 * k3.p + A64 * k4.p + A65 * k5.p));
    out.v = v + h * (B1 * k1.v + B3 * k3.v + B4 * k4.v + B5 * k5.v + B6 * k6.v);
    out.p = p + h * (B1 * k1.p + B3 * k3.p + B4 * k4.p + B5 * k5.p + B6 * k6.p);
    auto k7 = rhs(x + h, out.v, out.p);  // FSAL stage, used by the error estimate
    out.err_v = h * (E1 * k1.v + E3 * k3.v + E4 * k4.v + E5 * k5.v + E6 * k6.v + E7 * k7.v);
    out.err_p = h * (E1 * k1.p + E3 * k3.p + E4 * k4.p + E5 * k5.p + E6 * k6.p + E7 * k7.p);
    out.finite = std::isfinite(out.v) && std::isfinite(out.p);
    return out;
}

// Quintic Hermite basis on s in [0,1] from (y, y', y'') at both ends.
double quintic(double h, double y0, double d0, double dd0, double y1, double d1, double dd1, double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    const double H2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    const double H3 = 0.5 * s3 - s4 + 0.5 * s5;
    const double H4 = -4 * s3 + 7 * s4 - 3 * s5;
    const double H5 = 10 * s3 - 15 * s4 + 6 * s5;
    return H0 * y0 + H1 * h * d0 + H2 * h * h * dd0 + H3 * h * h * dd1 + H4 * h * d1 + H5 * y1;
}

double quintic_d1(double h, double y0, double d0, double dd0, double y1, double d1, double dd1, double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    const double dH0 = -30 * s2 + 60 * s3 - 30 * s4;
    const double dH1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    const double dH2 = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
    const double dH3 = 1.5 * s2 - 4 * s3 + 2.5 * s4;
    const double dH4 = -12 * s2 + 28 * s3 - 15 * s4;
    const double dH5 = 30 * s2 - 60 * s3 + 30 * s4;
    return (dH0 * y0 + dH1 * h * d0 + dH2 * h * h * dd0 + dH3 * h * h * dd1 + dH4 * h * d1 + dH5 * y1) / h;
}

}  // namespace

TransformPoint transform_chain(double r, double u) {
    if (!(r > 0.0)) throw DomainError("transform_chain: requires r > 0");
    TransformPoint t;
    t.r = r;
    t.u = u;
    t.x = 4.0 * std::sqrt(r);
    t.v = u - std::log(2.0) + 0.5 * std::log(r);
    t.y = std::exp(t.v);
    return t;
}

TransformPoint inverse_transform(double x, double v) {
    if (!(x > 0.0)) throw DomainError("inverse_transform: requires x > 0");
    TransformPoint t;
    t.x = x;
    t.v = v;
    t.r = x * x / 16.0;
    t.u = v + std::log(2.0) - 0.5 * std::log(t.r);
    t.y = std::exp(v);
    return t;
}

Seed piii_seed(double a, double x0) {
    if (!(x0 > 0.0)) throw DomainError("piii_seed: requires x0 > 0");
    if (x0 > 1e-2) throw DomainError("piii_seed: x0 beyond the asymptotic regime (x0 <= 1e-2)");
    const double bracket = a + 4.0 * std::log(x0) - 4.0 * std::log(4.0);
    const double y0 = -0.25 * x0 * bracket;
    if (!(y0 > 0.0)) throw SeedOutOfRegime("piii_seed: asymptotic y <= 0 at x0");
    return {std::log(y0), 1.0 / x0 + 4.0 / (x0 * bracket)};
}

double PIIITrace::v_at(double x) const {
    const auto& n = nodes;
    if (x <= n.front().x) return n.front().v;
    if (x >= n.back().x) return n.back().v;
    size_t lo = 0, hi = n.size() - 1;
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        (n[mid].x <= x ? lo : hi) = mid;
    }
    const double h = n[hi].x - n[lo].x;
    return quintic(h, n[lo].v, n[lo].vp, n[lo].vpp, n[hi].v, n[hi].vp, n[hi].vpp, (x - n[lo].x) / h);
}

double PIIITrace::vp_at(double x) const {
    const auto& n = nodes;
    if (x <= n.front().x) return n.front().vp;
    if (x >= n.back().x) return n.back().vp;
    size_t lo = 0, hi = n.size() - 1;
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        (n[mid].x <= x ? lo : hi) = mid;
    }
    const double h = n[hi].x - n[lo].x;
    return quintic_d1(h, n[lo].v, n[lo].vp, n[lo].vpp, n[hi].v, n[hi].vp, n[hi].vpp, (x - n[lo].x) / h);
}

double PIIITrace::residual_per_unit_length() const {
    const double len = nodes.back().x - nodes.front().x;
    return len > 0.0 ? rel_defect_sum / len : 0.0;
}

PIIITrace integrate(const Seed& seed, double a, double x0, double x_max, double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-6)) throw DomainError("integrate: tol must lie in [1e-12, 1e-6]");
    if (!(x0 > 0.0) || !(x_max > x0)) throw DomainError("integrate: need 0 < x0 < x_max");

    PIIITrace tr;
    tr.a = a;
    tr.tol = tol;
    double x = x0, v = seed.v0, p = seed.vp0;
    auto d0 = rhs(x, v, p);
    tr.nodes.push_back({x, v, p, d0.p});
    tr.err_pre = std::max(1e-13, 5.0 * std::pow(x0, 4) * std::log(x0) * std::log(x0));  // seed bound
    if (std::abs(v) <= 1.0) tr.x_lin = x;

    double h = 0.01 * x0;
    const double safety = 0.7;

    auto finish_singular = [&](double xs) {
        tr.status.smooth = false;
        tr.status.x_end = xs;
        tr.status.kind = (tr.nodes.back().v > 0.0) ? SingKind::VBlowUpPlus : SingKind::VBlowUpMinus;
    };

    // Bisect the |v| = kVCap crossing inside [x_a, x_a + h] to width 1e-8.
    auto bracket_crossing = [&](double xa, double va, double pa, double hstep) {
        double lo = 0.0, hi = hstep;
        while (hi - lo > 1e-8 * std::max(1.0, xa)) {
            const double mid = 0.5 * (lo + hi);
            StepResult s = dp45_step(xa, va, pa, mid);
            if (!s.finite || std::abs(s.v) >= kVCap) hi = mid;
            else lo = mid;
        }
        return xa + hi;
    };

    while (x < x_max) {
        h = std::min(h, x_max - x);
        StepResult s = dp45_step(x, v, p, h);
        if (!s.finite || std::abs(s.v) > 3.0 * kVCap) {
            h *= 0.5;
            if (h < 1e-13 * std::max(x, 1e-10)) {
                if (std::abs(v) > 5.0) {
                    finish_singular(x);
                    return tr;
                }
                throw ToleranceUnachievable("integrate: step size underflow away from a pole");
            }
            continue;
        }
        const double sc_v = std::max({std::abs(v), std::abs(s.v), 1e-3});
        const double sc_p = std::max({std::abs(p), std::abs(s.p), 1e-3});
        // Error per unit step, relative scaling: keeps injected noise
        // proportional to the decaying solution on the separatrix tail.
        const double err = std::max(std::abs(s.err_v) / sc_v, std::abs(s.err_p) / sc_p) / (tol * std::min(h, 1.0));
        if (err <= 1.0) {
            const bool crossed = std::abs(s.v) > kVCap;
            double x_new = x + h;
            if (crossed) x_new = bracket_crossing(x, v, p, h);
            x = x + h;
            v = s.v;
            p = s.p;
            auto d = rhs(x, v, p);
            tr.nodes.push_back({x, v, p, d.p});
            tr.rel_defect_sum += std::max(std::abs(s.err_v) / sc_v, std::abs(s.err_p) / sc_p);
            if (tr.x_lin < 0.0 && std::abs(v) <= 1.0) tr.x_lin = x;
            if (tr.x_lin < 0.0) tr.err_pre += std::abs(s.err_v);
            else tr.err_post_scaled += std::abs(s.err_v) * std::exp(-2.0 * std::min(x, 300.0));
            if (crossed) {
                finish_singular(x_new);
                return tr;
            }
        }
        const double grow = safety * std::pow(std::max(err, 1e-30), -0.25);
        h *= std::clamp(grow, 0.2, 4.0);
        if (h < 1e-13 * std::max(x, 1e-10)) {
            if (std::abs(v) > 5.0) {
                finish_singular(x);
                return tr;
            }
            throw ToleranceUnachievable("integrate: step size underflow away from a pole");
        }
    }
    tr.status.smooth = true;
    tr.status.x_end = x_max;
    return tr;
}

ClassifyResult classify(double a, double x_max, double tol, double x0) {
    if (!(a > 0.0)) throw DomainError("classify: requires a > 0");
    Seed seed = piii_seed(a, x0);
    PIIITrace tr = integrate(seed, a, x0, x_max, tol);

    ClassifyResult out;
    out.x_raw_end = tr.status.x_end;
    if (tr.status.smooth) {
        out.status = tr.status;
        return out;
    }
    // Noise envelope at the blow-up: error mass injected before the
    // trajectory reaches |v| <= 1 grows from there; mass injected after
    // grows from its own x.  Both ride the e^{2x} unstable mode.
    const double xs = tr.status.x_end;
    const double xl = (tr.x_lin >= 0.0) ? tr.x_lin : xs;
    out.envelope = tr.err_pre * std::exp(2.0 * std::max(0.0, xs - xl)) +
                   tr.err_post_scaled * std::exp(2.0 * std::min(xs, 300.0));
    const bool credible = kVCap >= 10.0 * out.envelope;
    if (credible) {
        out.status = tr.status;
    } else {
        out.status.smooth = true;
        out.status.x_end = x_max;
        out.status.kind.reset();
        out.credibility_limited = true;
    }
    return out;
}

CrosscheckReport crosscheck(double a, const std::vector<double>& r_samples, const LoopConfig& cfg, double tol) {
    CrosscheckReport rep;
    if (r_samples.empty()) return rep;
    double r_max = *std::max_element(r_samples.begin(), r_samples.end());

    const double x0 = 1e-4;
    Seed seed = piii_seed(a, x0);
    PIIITrace tr = integrate(seed, a, x0, 4.0 * std::sqrt(r_max) + 1e-6, tol);

    for (double r : r_samples) {
        const double x = 4.0 * std::sqrt(r);
        if (!tr.status.smooth && x > tr.status.x_end)
            throw DomainError("crosscheck: r sample beyond the singular radius");
        auto p = qc_frames::FramePoint::from_z(r, a);
        auto iw = factorization::iwasawa_su11(qc_frames::dressed_frame(p), cfg);
        CrosscheckRow row;
        row.r = r;
        row.k = iw.k;
        row.y_loop = iw.k * iw.k * std::sqrt(r);
        row.y_ode = tr.y_at(x);
        row.rel_err = std::abs(row.y_loop - row.y_ode) / std::abs(row.y_ode);
        rep.max_rel_err = std::max(rep.max_rel_err, row.rel_err);
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace ttstar::painleve3
