#include "ttstar/geometry.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "ttstar/qc_frames.hpp"

namespace ttstar::geometry {

using factorization::iwasawa_su11;
using loops::compose;
using loops::TruncatedLoop;

SymResult sym_bobenko(const TruncatedLoop& F, Orbit orbit, double H, double defect_tol) {
    if (H == 0.0) throw DomainError("sym_bobenko: H must be nonzero");
    TruncatedLoop Fw = (orbit == Orbit::W) ? compose(F, loops::orbit_w()) : F;

    // Conjugate by diag(1, i): entrywise m12 -> -i m12, m21 -> i m21.
    const Cplx iu(0.0, 1.0);
    std::vector<Mat2> c(static_cast<size_t>(Fw.width()));
    for (int idx = 0; idx < Fw.width(); ++idx) {
        const Mat2& m = Fw.coeffs()[static_cast<size_t>(idx)];
        Mat2 h;
        h << m(0, 0), -iu * m(0, 1), iu * m(1, 0), m(1, 1);
        c[static_cast<size_t>(idx)] = h;
    }
    TruncatedLoop Fh(Fw.lo(), std::move(c));

    const Mat2 f1 = Fh.evaluate(1.0);
    const Mat2 df1 = loops::lambda_derivative(Fh).evaluate(1.0);
    const Cplx det = f1(0, 0) * f1(1, 1) - f1(0, 1) * f1(1, 0);
    if (std::abs(det) < 1e-14) throw SingularLoop("sym_bobenko: frame singular at lambda = 1");
    Mat2 f1inv;
    f1inv << f1(1, 1), -f1(0, 1), -f1(1, 0), f1(0, 0);
    f1inv /= det;

    const Mat2 M = (-iu / (2.0 * H)) * (f1 * loops::matD() * f1inv + 2.0 * df1 * f1inv);

    // su(1,1) membership: [[i c, b], [conj(b), -i c]], c real.
    double defect = std::abs(M(0, 0).real());
    defect = std::max(defect, std::abs(M(1, 1).real()));
    defect = std::max(defect, std::abs(M(0, 0) + M(1, 1)));
    defect = std::max(defect, std::abs(M(1, 0) - std::conj(M(0, 1))));
    if (defect > defect_tol)
        throw NotInRealForm("sym_bobenko: su(1,1) defect " + std::to_string(defect));

    SymResult out;
    out.su11_defect = defect;
    out.point = {M(0, 1).real(), M(0, 1).imag(), M(0, 0).imag()};
    return out;
}

SurfaceSample surface_point(double a, Cplx z, const LoopConfig& cfg, double H) {
    SurfaceSample s;
    s.z = z;
    s.H = H;
    s.Q = 2.0 / (z * H);
    auto p = qc_frames::FramePoint::from_z(z, a);
    IwasawaFactors iw = iwasawa_su11(qc_frames::dressed_frame(p), cfg);
    s.k = iw.k;
    s.orbit = iw.orbit;
    s.u = std::log(iw.k * iw.k / H);
    s.residual = iw.diag.birkhoff_residual;
    SymResult sym = sym_bobenko(iw.F, iw.orbit, H);
    s.point = sym.point;
    s.su11_defect = sym.su11_defect;
    return s;
}

double gauss_codazzi_residual(std::span<const double> u, double r_min, double dr, double H) {
    if (u.size() < 5) throw GridTooCoarse("gauss_codazzi_residual: need at least 5 radial points");
    if (!(dr > 0.0) || !(r_min > 0.0)) throw DomainError("gauss_codazzi_residual: invalid grid");
    double worst = 0.0;
    for (size_t i = 1; i + 1 < u.size(); ++i) {
        const double r = r_min + dr * static_cast<double>(i);
        const double urr = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dr * dr);
        const double ur = (u[i + 1] - u[i - 1]) / (2.0 * dr);
        const double e2u = std::exp(2.0 * u[i]);
        const double res = 0.25 * (urr + ur / r) - H * H * e2u + 1.0 / (e2u * H * H * r * r);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

SurfaceMesh build_mesh(double a, const GridSpec& grid, const LoopConfig& cfg, double H, int threads) {
    if (!(grid.r_min > 0.0) || grid.r_min >= grid.r_max)
        throw DomainError("build_mesh: need 0 < r_min < r_max");
    if (grid.nr < 2 || grid.ntheta < 2) throw DomainError("build_mesh: need nr, ntheta >= 2");

    SurfaceMesh mesh;
    mesh.grid = grid;
    const int nv = grid.nr * grid.ntheta;
    mesh.vertices.assign(static_cast<size_t>(nv), SurfaceSample{});

    const double pi = std::numbers::pi;
    const double th_lo = -pi + grid.theta_clip;
    const double th_hi = pi - grid.theta_clip;

    auto vertex_z = [&](int i, int j) {
        const double r = grid.r_min + (grid.r_max - grid.r_min) * static_cast<double>(i) /
                                          static_cast<double>(grid.nr - 1);
        const double th = th_lo + (th_hi - th_lo) * static_cast<double>(j) / static_cast<double>(grid.ntheta - 1);
        return std::polar(r, th);
    };

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = std::min(nthreads, nv);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int idx = next.fetch_add(1);
            if (idx >= nv) return;
            const int i = idx / grid.ntheta;
            const int j = idx % grid.ntheta;
            SurfaceSample& s = mesh.vertices[static_cast<size_t>(idx)];
            try {
                s = surface_point(a, vertex_z(i, j), cfg, H);
            } catch (const Error& e) {
                s.z = vertex_z(i, j);
                s.H = H;
                s.singular = true;
                s.error = e.what();
            }
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nthreads));
        for (int tix = 0; tix < nthreads; ++tix) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // The open-orbit boundary passes between grid cells whose corners carry
    // different orbit flags; those cells span a genuine surface singularity.
    auto at = [&](int i, int j) -> SurfaceSample& {
        return mesh.vertices[static_cast<size_t>(i * grid.ntheta + j)];
    };
    for (int i = 0; i + 1 < grid.nr; ++i) {
        for (int j = 0; j + 1 < grid.ntheta; ++j) {
            std::array<int, 4> q{i * grid.ntheta + j, i * grid.ntheta + j + 1, (i + 1) * grid.ntheta + j + 1,
                                 (i + 1) * grid.ntheta + j};
            bool bad = false;
            for (int v : q) bad = bad || mesh.vertices[static_cast<size_t>(v)].singular;
            Orbit o0 = at(i, j).orbit;
            bool straddle = false;
            for (int v : q) straddle = straddle || (mesh.vertices[static_cast<size_t>(v)].orbit != o0);
            if (straddle) {
                for (int v : q) mesh.vertices[static_cast<size_t>(v)].orbit_boundary = true;
            }
            if (bad || straddle) {
                ++mesh.dropped_faces;
            } else {
                mesh.faces.push_back(q);
            }
        }
    }
    for (const auto& v : mesh.vertices) {
        if (v.singular) ++mesh.singular_count;
        if (v.orbit_boundary) ++mesh.orbit_boundary_count;
    }
    return mesh;
}

SlitLength slit_curve_length(double a, double t0, double T, const LoopConfig& cfg) {
    if (!(T > t0)) throw DomainError("slit_curve_length: need T > t0");

    // 8-point Gauss-Legendre nodes/weights on [-1, 1].
    static const double xs[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                 -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double ws[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

    auto integrand = [&](double t) {
        auto p = qc_frames::FramePoint::from_z(std::exp(-t), a);
        IwasawaFactors iw = iwasawa_su11(qc_frames::dressed_frame(p), cfg);
        const double e_u = 2.0 * iw.k * iw.k;  // e^u = k^2 / H at H = 1/2
        return 2.0 * std::exp(-t) * e_u;
    };
    auto quad = [&](double lo, double hi) {
        const int panels = std::max(1, static_cast<int>(std::ceil(hi - lo)));
        double total = 0.0;
        for (int pidx = 0; pidx < panels; ++pidx) {
            const double pa = lo + (hi - lo) * static_cast<double>(pidx) / panels;
            const double pb = lo + (hi - lo) * static_cast<double>(pidx + 1) / panels;
            const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
            for (int q = 0; q < 8; ++q) total += ws[q] * half * integrand(mid + half * xs[q]);
        }
        return total;
    };

    SlitLength out;
    out.length = quad(t0, T);
    out.tail = std::abs(quad(T, t0 + 2.0 * (T - t0)));
    return out;
}

}  // namespace ttstar::geometry
