#include "ttstar/loops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ttstar {

void validate(const LoopConfig& cfg) {
    if (cfg.sample_count < 2 || (cfg.sample_count & (cfg.sample_count - 1)) != 0)
        throw DomainError("LoopConfig: sample_count must be a power of two");
    if (cfg.degree < 1) throw DomainError("LoopConfig: degree must be >= 1");
}

}  // namespace ttstar

namespace ttstar::loops {

namespace {

constexpr double kPi = std::numbers::pi;

// In-place radix-2 Cooley-Tukey, X[j] <- sum_m x[m] e^{sign*2*pi*i*j*m/n}.
void fft(std::vector<Cplx>& x, int sign) {
    const size_t n = x.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        const Cplx wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            Cplx w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                Cplx u = x[i + j];
                Cplx v = x[i + j + len / 2] * w;
                x[i + j] = u + v;
                x[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

Mat2 zero2() { return Mat2::Zero(); }

// star(A): coefficient conj(A_{-k}) at power k.  On the circle this is the
// entrywise conjugate of the samples.
TruncatedLoop star(const TruncatedLoop& a) {
    std::vector<Mat2> c(a.width());
    for (int k = a.lo(); k <= a.hi(); ++k) c[a.hi() - k] = a.coeff(k).conjugate();
    return TruncatedLoop(-a.hi(), std::move(c));
}

// adj([[a,b],[c,d]]) = [[d,-b],[-c,a]], applied coefficientwise.
TruncatedLoop adjugate(const TruncatedLoop& a) {
    std::vector<Mat2> c(a.width());
    for (int i = 0; i < a.width(); ++i) {
        const Mat2& m = a.coeffs()[i];
        c[i] << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    }
    return TruncatedLoop(a.lo(), std::move(c));
}

TruncatedLoop conj_by_D(const TruncatedLoop& a) {
    std::vector<Mat2> c(a.width());
    for (int i = 0; i < a.width(); ++i) {
        const Mat2& m = a.coeffs()[i];
        c[i] << m(0, 0), -m(0, 1), -m(1, 0), m(1, 1);
    }
    return TruncatedLoop(a.lo(), std::move(c));
}

TruncatedLoop transpose(const TruncatedLoop& a) {
    std::vector<Mat2> c(a.width());
    for (int i = 0; i < a.width(); ++i) c[i] = a.coeffs()[i].transpose();
    return TruncatedLoop(a.lo(), std::move(c));
}

}  // namespace

TruncatedLoop::TruncatedLoop() : lo_(0), coeffs_(1, zero2()) {}

TruncatedLoop::TruncatedLoop(int lo, std::vector<Mat2> coeffs) : lo_(lo), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.assign(1, zero2());
}

TruncatedLoop TruncatedLoop::identity() { return constant(Mat2::Identity()); }

TruncatedLoop TruncatedLoop::constant(const Mat2& m) { return TruncatedLoop(0, {m}); }

TruncatedLoop TruncatedLoop::monomial(const Mat2& m, int power) { return TruncatedLoop(power, {m}); }

Mat2 TruncatedLoop::coeff(int k) const {
    if (k < lo() || k > hi()) return zero2();
    return coeffs_[static_cast<size_t>(k - lo_)];
}

Mat2 TruncatedLoop::evaluate(Cplx lambda) const {
    // Horner from the top power, then multiply by lambda^lo.
    Mat2 acc = coeffs_.back();
    for (int i = width() - 2; i >= 0; --i) acc = acc * lambda + coeffs_[static_cast<size_t>(i)];
    return acc * std::pow(lambda, lo_);
}

std::shared_ptr<const std::vector<Mat2>> TruncatedLoop::samples(int n) const {
    {
        std::lock_guard<std::mutex> lock(cache_->m);
        auto it = cache_->by_n.find(n);
        if (it != cache_->by_n.end()) return it->second;
    }
    auto s = std::make_shared<const std::vector<Mat2>>(circle_samples(*this, n));
    std::lock_guard<std::mutex> lock(cache_->m);
    auto [it, inserted] = cache_->by_n.emplace(n, s);
    return it->second;
}

TruncatedLoop TruncatedLoop::operator+(const TruncatedLoop& other) const {
    int lo = std::min(this->lo(), other.lo());
    int hi = std::max(this->hi(), other.hi());
    std::vector<Mat2> c(static_cast<size_t>(hi - lo + 1), zero2());
    for (int k = lo; k <= hi; ++k) c[static_cast<size_t>(k - lo)] = coeff(k) + other.coeff(k);
    return TruncatedLoop(lo, std::move(c));
}

TruncatedLoop TruncatedLoop::operator-(const TruncatedLoop& other) const {
    return *this + other * Cplx(-1.0, 0.0);
}

TruncatedLoop TruncatedLoop::operator*(const Cplx& s) const {
    std::vector<Mat2> c(coeffs_);
    for (auto& m : c) m *= s;
    return TruncatedLoop(lo_, std::move(c));
}

const Mat2& matD() {
    static const Mat2 d = (Mat2() << 1, 0, 0, -1).finished();
    return d;
}

const Mat2& matP() {
    static const Mat2 p = (Mat2() << 0, 1, 1, 0).finished();
    return p;
}

const Mat2& matN() {
    static const Mat2 n = (Mat2() << 0, 0, 1, 0).finished();
    return n;
}

TruncatedLoop orbit_w() {
    std::vector<Mat2> c(3, zero2());
    c[0](1, 0) = -1.0;  // power -1
    c[2](0, 1) = 1.0;   // power +1
    return TruncatedLoop(-1, std::move(c));
}

TruncatedLoop orbit_w_inverse() {
    std::vector<Mat2> c(3, zero2());
    c[0](1, 0) = 1.0;   // power -1
    c[2](0, 1) = -1.0;  // power +1
    return TruncatedLoop(-1, std::move(c));
}

TruncatedLoop compose(const TruncatedLoop& a, const TruncatedLoop& b) {
    const int lo = a.lo() + b.lo();
    const int hi = a.hi() + b.hi();
    std::vector<Mat2> c(static_cast<size_t>(hi - lo + 1), zero2());
    for (int i = a.lo(); i <= a.hi(); ++i) {
        const Mat2& ai = a.coeffs()[static_cast<size_t>(i - a.lo())];
        for (int j = b.lo(); j <= b.hi(); ++j) {
            c[static_cast<size_t>(i + j - lo)] += ai * b.coeffs()[static_cast<size_t>(j - b.lo())];
        }
    }
    return TruncatedLoop(lo, std::move(c));
}

std::vector<std::pair<int, Cplx>> det_loop(const TruncatedLoop& a) {
    const int lo = 2 * a.lo();
    const int hi = 2 * a.hi();
    std::vector<Cplx> d(static_cast<size_t>(hi - lo + 1), Cplx(0.0));
    for (int i = a.lo(); i <= a.hi(); ++i) {
        const Mat2& mi = a.coeffs()[static_cast<size_t>(i - a.lo())];
        for (int j = a.lo(); j <= a.hi(); ++j) {
            const Mat2& mj = a.coeffs()[static_cast<size_t>(j - a.lo())];
            d[static_cast<size_t>(i + j - lo)] += mi(0, 0) * mj(1, 1) - mi(0, 1) * mj(1, 0);
        }
    }
    std::vector<std::pair<int, Cplx>> out;
    for (int k = lo; k <= hi; ++k) out.emplace_back(k, d[static_cast<size_t>(k - lo)]);
    return out;
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<Mat2> circle_samples(const TruncatedLoop& a, int n) {
    if (n < 2 * a.width()) throw DomainError("circle_samples: need n >= 2*width");
    if ((n & (n - 1)) != 0) throw DomainError("circle_samples: n must be a power of two");
    std::vector<Mat2> out(static_cast<size_t>(n), zero2());
    std::vector<Cplx> bins(static_cast<size_t>(n));
    for (int r = 0; r < 2; ++r) {
        for (int cidx = 0; cidx < 2; ++cidx) {
            std::fill(bins.begin(), bins.end(), Cplx(0.0));
            for (int k = a.lo(); k <= a.hi(); ++k) {
                int m = ((k % n) + n) % n;
                bins[static_cast<size_t>(m)] += a.coeff(k)(r, cidx);
            }
            fft(bins, +1);
            for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)](r, cidx) = bins[static_cast<size_t>(j)];
        }
    }
    return out;
}

TruncatedLoop loop_from_samples(const std::vector<Mat2>& samples, int lo, int hi) {
    const int n = static_cast<int>(samples.size());
    if ((n & (n - 1)) != 0) throw DomainError("loop_from_samples: n must be a power of two");
    if (hi - lo + 1 > n) throw DomainError("loop_from_samples: window exceeds sample count");
    std::vector<Mat2> c(static_cast<size_t>(hi - lo + 1), zero2());
    std::vector<Cplx> bins(static_cast<size_t>(n));
    for (int r = 0; r < 2; ++r) {
        for (int cidx = 0; cidx < 2; ++cidx) {
            for (int j = 0; j < n; ++j) bins[static_cast<size_t>(j)] = samples[static_cast<size_t>(j)](r, cidx);
            fft(bins, -1);
            for (int k = lo; k <= hi; ++k) {
                int m = ((k % n) + n) % n;
                c[static_cast<size_t>(k - lo)](r, cidx) = bins[static_cast<size_t>(m)] / static_cast<double>(n);
            }
        }
    }
    return TruncatedLoop(lo, std::move(c));
}

TruncatedLoop truncated(const TruncatedLoop& a, int lo, int hi, double tol) {
    double dropped = 0.0;
    for (int k = a.lo(); k <= a.hi(); ++k) {
        if (k < lo || k > hi) dropped = std::max(dropped, a.coeff(k).cwiseAbs().maxCoeff());
    }
    if (tol >= 0.0 && dropped > tol)
        throw TruncationError("truncated: dropped coefficient mass " + std::to_string(dropped));
    std::vector<Mat2> c(static_cast<size_t>(hi - lo + 1), zero2());
    for (int k = std::max(lo, a.lo()); k <= std::min(hi, a.hi()); ++k) c[static_cast<size_t>(k - lo)] = a.coeff(k);
    return TruncatedLoop(lo, std::move(c));
}

TruncatedLoop trimmed(const TruncatedLoop& a, double tol) {
    int lo = a.lo(), hi = a.hi();
    auto small = [&](int k) { return a.coeff(k).cwiseAbs().maxCoeff() <= tol; };
    while (lo < hi && small(lo)) ++lo;
    while (hi > lo && small(hi)) --hi;
    return truncated(a, lo, hi);
}

TruncatedLoop invert(const TruncatedLoop& a, const LoopConfig& cfg) {
    validate(cfg);
    // Constant-determinant loops invert exactly through the adjugate.
    auto det = det_loop(a);
    Cplx c0(0.0);
    double rest = 0.0;
    for (auto& [k, v] : det) {
        if (k == 0) c0 = v;
        else rest = std::max(rest, std::abs(v));
    }
    if (rest <= cfg.tol_det) {
        if (std::abs(c0) < cfg.tol_det) throw SingularLoop("invert: constant det below tol_det");
        return adjugate(a) * (1.0 / c0);
    }

    // General case: pointwise inverse on the circle, coefficients refit on a
    // window covering the adjugate range plus the configured degree headroom.
    const int wlo = -a.hi() - cfg.degree;
    const int whi = -a.lo() + cfg.degree;
    const int n = next_pow2(std::max(cfg.sample_count, 2 * (whi - wlo + 1)));
    auto s = a.samples(n);
    std::vector<Mat2> inv(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const Mat2& m = (*s)[static_cast<size_t>(j)];
        Cplx d = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        if (std::abs(d) < cfg.tol_det) throw SingularLoop("invert: |det| below tol_det on the circle");
        Mat2 adj;
        adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
        inv[static_cast<size_t>(j)] = adj / d;
    }
    TruncatedLoop result = trimmed(loop_from_samples(inv, wlo, whi));
    // Residual check of the re-truncation.
    TruncatedLoop probe = compose(a, result) - TruncatedLoop::identity();
    double resid = max_coeff_norm(probe);
    if (resid > cfg.tol_residual) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "invert: residual %.3e above tol_residual", resid);
        throw TruncationError(buf);
    }
    return result;
}

TruncatedLoop apply_C_inverse(const TruncatedLoop& a) {
    return conj_by_D(transpose(star(a)));
}

TruncatedLoop apply_C(const TruncatedLoop& a, const LoopConfig& cfg) {
    return invert(apply_C_inverse(a), cfg);
}

TruncatedLoop apply_sigma(const TruncatedLoop& a) {
    std::vector<Mat2> c(a.width());
    for (int k = a.lo(); k <= a.hi(); ++k) {
        const Mat2& m = a.coeffs()[static_cast<size_t>(k - a.lo())];
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        Mat2 out;
        out << m(0, 0), -m(0, 1), -m(1, 0), m(1, 1);
        c[static_cast<size_t>(k - a.lo())] = sign * out;
    }
    return TruncatedLoop(a.lo(), std::move(c));
}

TruncatedLoop lambda_derivative(const TruncatedLoop& a) {
    if (a.width() == 1 && a.lo() == 0) return TruncatedLoop::constant(zero2());
    std::vector<Mat2> c(a.width(), zero2());
    for (int k = a.lo(); k <= a.hi(); ++k) {
        if (k == 0) continue;
        c[static_cast<size_t>(k - a.lo())] = static_cast<double>(k) * a.coeff(k);
    }
    return trimmed(TruncatedLoop(a.lo() - 1, std::move(c)), 0.0);
}

TruncatedLoop lambda_substitute(const TruncatedLoop& a, Cplx eps) {
    std::vector<Mat2> c(a.width());
    for (int k = a.lo(); k <= a.hi(); ++k)
        c[static_cast<size_t>(k - a.lo())] = a.coeff(k) * std::pow(eps, k);
    return TruncatedLoop(a.lo(), std::move(c));
}

TruncatedLoop conjugate_by_d(const TruncatedLoop& a, Cplx eps) {
    std::vector<Mat2> c(a.width());
    for (int i = 0; i < a.width(); ++i) {
        const Mat2& m = a.coeffs()[static_cast<size_t>(i)];
        Mat2 out;
        out << m(0, 0), m(0, 1) * eps, m(1, 0) / eps, m(1, 1);
        c[static_cast<size_t>(i)] = out;
    }
    return TruncatedLoop(a.lo(), std::move(c));
}

double max_coeff_norm(const TruncatedLoop& a) {
    double m = 0.0;
    for (const auto& c : a.coeffs()) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
}

double sup_norm(const TruncatedLoop& a) {
    const int n = next_pow2(std::max(16, 2 * a.width()));
    auto s = a.samples(n);
    double m = 0.0;
    for (const auto& v : *s) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
}

bool is_twisted(const TruncatedLoop& a, double tol) {
    for (int k = a.lo(); k <= a.hi(); ++k) {
        const Mat2 m = a.coeff(k);
        if (k % 2 == 0) {
            if (std::abs(m(0, 1)) > tol || std::abs(m(1, 0)) > tol) return false;
        } else {
            if (std::abs(m(0, 0)) > tol || std::abs(m(1, 1)) > tol) return false;
        }
    }
    return true;
}

bool is_unimodular(const TruncatedLoop& a, const LoopConfig& cfg) {
    for (auto& [k, v] : det_loop(a)) {
        Cplx target = (k == 0) ? Cplx(1.0) : Cplx(0.0);
        if (std::abs(v - target) > cfg.tol_det) return false;
    }
    return true;
}

}  // namespace ttstar::loops
