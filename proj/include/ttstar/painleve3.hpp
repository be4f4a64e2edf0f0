#pragma once

#include <optional>
#include <vector>

#include "ttstar/loops.hpp"

namespace ttstar::painleve3 {

/// Euler's constant, 50-digit literal.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243104215933593992;

/// Transformation chain r <-> x = 4 sqrt(r), u <-> v = u - (1/2) log|Q|,
/// y = e^v, at H = 1/2 (so |Q| = 4/r and v = u - log 2 + (1/2) log r).
struct TransformPoint {
    double r = 0.0;
    double x = 0.0;
    double u = 0.0;
    double v = 0.0;
    double y = 0.0;
};

TransformPoint transform_chain(double r, double u);
TransformPoint inverse_transform(double x, double v);

struct Seed {
    double v0;
    double vp0;
};

/// Asymptotic seed y ~ -(1/4) x (a + 4 log x - 4 log 4) as x -> 0, in the
/// (v, v') variables.  Requires 0 < x0 <= 1e-2; throws SeedOutOfRegime when
/// the seed y is not positive there.
Seed piii_seed(double a, double x0);

enum class SingKind { VBlowUpPlus, VBlowUpMinus };

struct TraceStatus {
    bool smooth = true;
    double x_end = 0.0;                 // x_max when smooth, x_s when singular
    std::optional<SingKind> kind;
};

struct PIIINode {
    double x, v, vp, vpp;  // vpp stored for quintic dense output
};

/// Adaptive solution of v'' + v'/x = 2 sinh 2v in the (v, v') variables.
struct PIIITrace {
    double a = 0.0;
    double tol = 0.0;
    std::vector<PIIINode> nodes;
    TraceStatus status;

    // Noise-envelope bookkeeping (see classify): accumulated error-estimate
    // mass before/after the trajectory enters |v| <= 1, and that entry point.
    double err_pre = 0.0;
    double err_post_scaled = 0.0;  // sum est_i * exp(-2 x_i) past x_lin
    double x_lin = -1.0;           // negative when never reached
    double rel_defect_sum = 0.0;   // sum of relative error estimates * h

    double v_at(double x) const;   // quintic Hermite dense output
    double vp_at(double x) const;
    double y_at(double x) const { return std::exp(v_at(x)); }

    /// Accumulated relative error estimate per unit length (EPUS measure).
    double residual_per_unit_length() const;
};

inline constexpr double kVCap = 30.0;

/// Integrate from the given seed over [x0, x_max] with Dormand-Prince 5(4),
/// relative error control per unit step, tolerance tol in [1e-12, 1e-6].
/// SingularAt is reported when |v| crosses kVCap (crossing bracketed to
/// width 1e-8) or the step size underflows near a pole.
PIIITrace integrate(const Seed& seed, double a, double x0, double x_max, double tol);

struct ClassifyResult {
    TraceStatus status;            // the reported classification
    double envelope = 0.0;         // noise envelope at the raw blow-up
    double x_raw_end = 0.0;        // where the raw trace actually stopped
    bool credibility_limited = false;  // raw blow-up was within the envelope
};

/// Classification over [x0, x_max]: SingularAt(x_s) is reported only when
/// the blow-up signal exceeds ten times the propagated noise envelope
/// (seed bound plus accumulated error estimates, amplified by the e^{2x}
/// unstable mode past |v| <= 1); otherwise no singularity is numerically
/// credible on the window and the trace classifies Smooth(x_max).
ClassifyResult classify(double a, double x_max, double tol = 1e-9, double x0 = 1e-4);

struct CrosscheckRow {
    double r, k, y_loop, y_ode, rel_err;
};

struct CrosscheckReport {
    std::vector<CrosscheckRow> rows;
    double max_rel_err = 0.0;
};

/// Dual-pipeline comparison: y from the Iwasawa route (k^2 sqrt(r) at
/// H = 1/2) against the ODE route at x = 4 sqrt(r).
CrosscheckReport crosscheck(double a, const std::vector<double>& r_samples, const LoopConfig& cfg = {},
                            double tol = 1e-9);

}  // namespace ttstar::painleve3
