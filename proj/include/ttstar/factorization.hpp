#pragma once

#include "ttstar/loops.hpp"

namespace ttstar::factorization {

using loops::TruncatedLoop;

/// Big-cell Birkhoff factors X = X_minus * X_plus with X_minus = I plus
/// strictly negative powers and X_plus holomorphic in the disk.
struct BirkhoffFactors {
    TruncatedLoop x_minus;
    TruncatedLoop x_plus;
    TruncatedLoop x_plus_inverse;  // the raw least-squares solution Y+
    double residual = 0.0;
    double condition = 0.0;
};

/// Solve [X*Y+]_k = 0 for k >= 1 and [X*Y+]_0 = I for the coefficients of
/// Y+ = X_plus^{-1} at powers 0..degree (block-Toeplitz least squares on the
/// Fourier coefficients), then X_minus = X*Y+, X_plus = Y+^{-1}.
/// Retries once at doubled degree when the residual fails; throws OffBigCell
/// when condition > 1e12 or the residual still exceeds tol_residual.
BirkhoffFactors birkhoff(const TruncatedLoop& x, const LoopConfig& cfg = {});

enum class Orbit { Identity, W };

/// Iwasawa data L = F * w * B: F in the twisted SU(1,1) loop group, w the
/// orbit representative (I or [[0,l],[-1/l,0]]), B with non-negative powers
/// and constant term diag(k, 1/k), k > 0.
struct IwasawaFactors {
    TruncatedLoop F;
    Orbit orbit = Orbit::Identity;
    TruncatedLoop B;
    double k = 1.0;

    struct Diagnostics {
        double birkhoff_residual = 0.0;
        double condition = 0.0;
        double reconstruction = 0.0;  // ||F w B - L||
        double reality = 0.0;         // ||C(F) - F||
    } diag;
};

/// SU(1,1) Iwasawa factorization through the Birkhoff step applied to
/// X = C(L)^{-1} L.  The (1,1) constant entry s of X_plus fixes the middle
/// factor: orbit Identity iff s > 0, orbit W iff s < 0, k^2 = |s|.
IwasawaFactors iwasawa_su11(const TruncatedLoop& L, const LoopConfig& cfg = {});

/// Closed-form factorization of the model frame E = gamma0(a)^{-1} e^{tN/l}
/// for a > 0: orbit Identity with k^2 = a+t+tbar when positive, orbit W with
/// k^2 = -(a+t+tbar) when negative.  Exact; serves as the oracle for
/// iwasawa_su11.  Throws OrbitBoundary when |a+t+tbar| < 1e-7.
IwasawaFactors model_iwasawa(double a, Cplx t);

const char* orbit_name(Orbit o);

}  // namespace ttstar::factorization
