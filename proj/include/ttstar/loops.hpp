#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "ttstar/errors.hpp"

namespace ttstar {

using Cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

struct LoopConfig {
    int sample_count = 256;     // circle samples, power of two
    int degree = 16;            // truncation half-width for factor solves
    double tol_det = 1e-10;     // pointwise invertibility floor
    double tol_residual = 1e-10;
};

/// Throws DomainError unless sample_count is a power of two and degree >= 1.
void validate(const LoopConfig& cfg);

namespace loops {

/// A 2x2 matrix-valued Laurent polynomial in the loop parameter, with
/// coefficients at powers lo..hi and a lazily synchronized cache of
/// evaluations on the unit circle.
class TruncatedLoop {
public:
    TruncatedLoop();  // the zero loop of width 1 at power 0
    TruncatedLoop(int lo, std::vector<Mat2> coeffs);

    static TruncatedLoop identity();
    static TruncatedLoop constant(const Mat2& m);
    static TruncatedLoop monomial(const Mat2& m, int power);

    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(coeffs_.size()) - 1; }
    int width() const { return static_cast<int>(coeffs_.size()); }

    /// Coefficient at power k; zero matrix outside [lo, hi].
    Mat2 coeff(int k) const;
    const std::vector<Mat2>& coeffs() const { return coeffs_; }

    /// Sum of coeff(k) * lambda^k.  Contract is |lambda| = 1; evaluation
    /// elsewhere is permitted but unvalidated for truncations.
    Mat2 evaluate(Cplx lambda) const;

    /// Evaluations at n equispaced points of the unit circle (n a power of
    /// two, n >= 2*width).  Cached; the cache is shared between copies and
    /// safe to fill from several threads.
    std::shared_ptr<const std::vector<Mat2>> samples(int n) const;

    TruncatedLoop operator+(const TruncatedLoop& other) const;
    TruncatedLoop operator-(const TruncatedLoop& other) const;
    TruncatedLoop operator*(const Cplx& s) const;

private:
    int lo_ = 0;
    std::vector<Mat2> coeffs_;

    struct SampleCache {
        std::mutex m;
        std::map<int, std::shared_ptr<const std::vector<Mat2>>> by_n;
    };
    std::shared_ptr<SampleCache> cache_ = std::make_shared<SampleCache>();
};

// Module constants: D = diag(1,-1), P = antidiag(1,1), N = [[0,0],[1,0]].
const Mat2& matD();
const Mat2& matP();
const Mat2& matN();

/// Orbit representative w = [[0, lambda], [-1/lambda, 0]] and its inverse.
TruncatedLoop orbit_w();
TruncatedLoop orbit_w_inverse();

/// Pointwise product; degree range is the Minkowski sum of the ranges.
TruncatedLoop compose(const TruncatedLoop& a, const TruncatedLoop& b);

/// Pointwise inverse, re-truncated to the configured degree.  Exact
/// (adjugate) when det is constant on the circle; via samples otherwise.
/// Throws SingularLoop when |det| < tol_det at a sample, TruncationError
/// when the re-truncation violates tol_residual.
TruncatedLoop invert(const TruncatedLoop& a, const LoopConfig& cfg = {});

/// The conjugate-linear involution C(g)(l) = D (conj(g(1/conj(l)))^T)^{-1} D.
TruncatedLoop apply_C(const TruncatedLoop& a, const LoopConfig& cfg = {});

/// C(g)^{-1} = D star(g)^T D: exact coefficient arithmetic, no inversion.
TruncatedLoop apply_C_inverse(const TruncatedLoop& a);

/// The twisting involution sigma(g)(l) = D g(-l) D.
TruncatedLoop apply_sigma(const TruncatedLoop& a);

/// Analytic d/dlambda: coefficient k*A_k moves to power k-1.
TruncatedLoop lambda_derivative(const TruncatedLoop& a);

/// Substitution lambda -> eps*lambda (coefficient A_k scaled by eps^k).
TruncatedLoop lambda_substitute(const TruncatedLoop& a, Cplx eps);

/// diag(1,eps)^{-1} * A * diag(1,eps).
TruncatedLoop conjugate_by_d(const TruncatedLoop& a, Cplx eps);

/// Largest entrywise |.| over all coefficients.
double max_coeff_norm(const TruncatedLoop& a);

/// Largest entrywise |.| over circle samples (the spec's tolerance norm).
double sup_norm(const TruncatedLoop& a);

/// Fixed points of sigma: diagonal entries only at even powers,
/// off-diagonal only at odd powers.
bool is_twisted(const TruncatedLoop& a, double tol = 1e-10);

/// det(A(l)) = 1 at every circle sample within tol_det.
bool is_unimodular(const TruncatedLoop& a, const LoopConfig& cfg = {});

/// Determinant as a scalar Laurent polynomial (coefficients by power).
std::vector<std::pair<int, Cplx>> det_loop(const TruncatedLoop& a);

/// Keep powers in [lo, hi]; throws TruncationError if dropped coefficient
/// mass exceeds tol (pass a negative tol to drop silently).
TruncatedLoop truncated(const TruncatedLoop& a, int lo, int hi, double tol = -1.0);

/// Drop near-zero coefficients at both ends of the range.
TruncatedLoop trimmed(const TruncatedLoop& a, double tol = 1e-15);

// Coefficient <-> circle-sample conversion (radix-2 FFT, n a power of two,
// exact when hi-lo+1 <= n).
std::vector<Mat2> circle_samples(const TruncatedLoop& a, int n);
TruncatedLoop loop_from_samples(const std::vector<Mat2>& samples, int lo, int hi);

int next_pow2(int n);

}  // namespace loops
}  // namespace ttstar
