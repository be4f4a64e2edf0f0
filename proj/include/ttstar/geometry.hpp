#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ttstar/factorization.hpp"

namespace ttstar::geometry {

using factorization::IwasawaFactors;
using factorization::Orbit;
using loops::TruncatedLoop;

/// One immersion sample.  Chart: the su(1,1) matrix
/// [[i*x3, x1 + i*x2], [x1 - i*x2, -i*x3]] carries the Minkowski form
/// <M,M> = x1^2 + x2^2 - x3^2 = -det M (x3 timelike).
struct SurfaceSample {
    Cplx z;
    std::array<double, 3> point{0.0, 0.0, 0.0};
    double u = 0.0;  // metric exponent, g = 4 e^{2u} |dz|^2
    double k = 1.0;
    Orbit orbit = Orbit::Identity;
    double H = 0.5;
    Cplx Q;                       // Hopf coefficient 2/(zH)
    double residual = 0.0;        // factorization residual
    double su11_defect = 0.0;     // Sym matrix reality defect
    bool singular = false;        // factorization failed here
    bool orbit_boundary = false;  // adjacent cell straddles the open orbits
    std::string error;            // what failed, when singular
};

struct SymResult {
    std::array<double, 3> point;
    double su11_defect;
};

/// Sym-Bobenko immersion at lambda = 1 of the dressed frame
/// diag(1,i) F w diag(1,i)^{-1}; throws NotInRealForm when the su(1,1)
/// projection defect exceeds defect_tol.
SymResult sym_bobenko(const TruncatedLoop& F, Orbit orbit, double H, double defect_tol = 1e-8);

/// Full single-point pipeline: dressed frame -> Iwasawa -> metric/immersion.
SurfaceSample surface_point(double a, Cplx z, const LoopConfig& cfg = {}, double H = 0.5);

/// Max abs residual of (1/4)(u_rr + u_r/r) - H^2 e^{2u} + e^{-2u}/(H^2 r^2)
/// over the interior of a uniform radial grid, 2nd-order central differences.
/// Throws GridTooCoarse below 5 points.
double gauss_codazzi_residual(std::span<const double> u, double r_min, double dr, double H);

struct GridSpec {
    double r_min = 0.01;
    double r_max = 0.5;
    int nr = 100;
    int ntheta = 64;
    double theta_clip = 1e-3;  // distance kept from the slit at +-pi
};

struct SurfaceMesh {
    GridSpec grid;
    std::vector<SurfaceSample> vertices;        // row-major, nr x ntheta
    std::vector<std::array<int, 4>> faces;      // quads, ccw, 0-indexed
    int singular_count = 0;
    int orbit_boundary_count = 0;
    int dropped_faces = 0;
};

/// Polar-grid mesh of the immersion.  Per-vertex factorization failures are
/// flagged, faces touching flagged or orbit-straddling corners are dropped;
/// nothing aborts the mesh.  threads <= 0 picks the hardware count.
SurfaceMesh build_mesh(double a, const GridSpec& grid, const LoopConfig& cfg = {}, double H = 0.5,
                       int threads = 0);

struct SlitLength {
    double length = 0.0;  // over (t0, T)
    double tail = 0.0;    // change when the horizon doubles to t0 + 2(T - t0)
};

/// Arc length of the image of the ray (e^{-t}, 0), t in (t0, T), length
/// element 2 e^u |dz|.  Composite Gauss-Legendre; e^u from the factorization.
SlitLength slit_curve_length(double a, double t0, double T, const LoopConfig& cfg = {});

}  // namespace ttstar::geometry
