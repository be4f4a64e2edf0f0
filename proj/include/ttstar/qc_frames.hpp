#pragma once

#include "ttstar/loops.hpp"

namespace ttstar::qc_frames {

using loops::TruncatedLoop;

/// Scalar Laurent series in the loop parameter (all powers <= 0 here).
struct ScalarLaurent {
    int lo = 0;
    int hi = 0;
    std::vector<Cplx> c;  // index k - lo

    Cplx coeff(int k) const {
        if (k < lo || k > hi) return Cplx(0.0);
        return c[static_cast<size_t>(k - lo)];
    }
    Cplx evaluate(Cplx lambda) const;
};

/// One domain point of the frame construction.  t is the primitive
/// coordinate; z = e^t.  Points built from z carry the principal branch
/// Im t in (-pi, pi]; from_t admits continued points beyond the slit.
struct FramePoint {
    Cplx t;
    Cplx z;
    double a = 1.0;
    int z_terms = 2;
    bool continued = false;  // Im t outside the principal branch

    static FramePoint from_z(Cplx z, double a);
    static FramePoint from_t(Cplx t, double a);
};

/// Smallest series order keeping the tail of f0, f1 on the circle below
/// 1e-15 (term bound |z|^i / (i!)^2), clamped to [2, 64].
int adaptive_z_terms(Cplx z);

/// f0(z) = sum_{i>=0} z^i / ((i!)^2 lambda^{2i}), truncated at z_terms.
/// budget is the highest |power| representable; throws BudgetExceeded when
/// it cannot hold 2*z_terms.
ScalarLaurent series_f0(Cplx z, int budget);

/// f1(z) = -(2/lambda) sum_{i>=1} H_i z^i / ((i!)^2 lambda^{2i}),
/// H_i the harmonic numbers.  f1(0) = 0 exactly.
ScalarLaurent series_f1(Cplx z, int budget);

/// The canonical frame L0 = [[f0, l*df0], [f1, f0 + l*df1]] with the Euler
/// operator d = z d/dz applied termwise; L0 -> I as z -> 0.
TruncatedLoop canonical_L0(const FramePoint& p);

/// exp(t N / lambda) = I + t N / lambda.
TruncatedLoop exp_tN_over_lambda(Cplx t);

/// L = exp(tN/lambda) * L0.
TruncatedLoop canonical_L(const FramePoint& p);

/// The dressing loop for a > 0: [[1/sqrt(a), -lambda/sqrt(a)], [0, sqrt(a)]].
/// Throws DomainError for a <= 0.
TruncatedLoop gamma0(double a);

/// The a < 0 branch (rho < 0).  Test fixture only; not reachable from the CLI.
TruncatedLoop gamma0_negative(double a);

/// E = gamma0(a)^{-1} exp(tN/lambda): the closed-form model frame.
TruncatedLoop model_E(double a, Cplx t);

/// Z = C(E)^{-1} E = rho [[a + t + tbar, lambda], [-1/lambda, 0]], rho = +1
/// on the public a > 0 branch.
TruncatedLoop model_Z(double a, Cplx t);

/// The full dressed frame gamma0(a)^{-1} L at p (input to the Iwasawa step).
TruncatedLoop dressed_frame(const FramePoint& p);

/// delta(eps) = E(eps^2 z, eps*lambda) d(eps)^{-1} E^{-1} d(eps) for the
/// gamma0 family; homogeneity defect witness of the model frame.
TruncatedLoop homogeneity_delta(double a, Cplx t, Cplx eps);

/// Same with an arbitrary constant dressing loop (negative-control hook).
TruncatedLoop homogeneity_delta_for(const TruncatedLoop& g0, Cplx t, Cplx eps);

/// The connection-form coefficient matrix [[0,1],[1/z,0]] of the potential.
Mat2 dpw_potential_coeff(Cplx z);

struct CanonicalFrames {
    TruncatedLoop L0;
    TruncatedLoop L;
    TruncatedLoop E;
    TruncatedLoop Z;
};

CanonicalFrames build_frames(const FramePoint& p);

}  // namespace ttstar::qc_frames
