#pragma once

#include <stdexcept>
#include <string>

namespace ttstar {

// Base class for every numerical failure the library reports.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// |det| fell below tol_det at a circle sample; pointwise inversion impossible.
struct SingularLoop : Error {
    using Error::Error;
};

// A re-truncation dropped coefficient mass above tol_residual.
struct TruncationError : Error {
    using Error::Error;
};

// Birkhoff solve rejected: condition > 1e12 or residual > tol_residual after
// the degree-doubling retry.  Signals proximity to a lower stratum.
struct OffBigCell : Error {
    using Error::Error;
};

// Input loop violates the sigma-twisting required by the SU(1,1) Iwasawa step.
struct NotTwisted : Error {
    using Error::Error;
};

// Computed frame F failed the reality check C(F) = F beyond tolerance.
struct NonRealResult : Error {
    using Error::Error;
};

// Closed-form model factorization evaluated at a + t + tbar = 0.
struct OrbitBoundary : Error {
    using Error::Error;
};

// Sym matrix failed the su(1,1) membership check.
struct NotInRealForm : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

// Requested lambda-power budget cannot hold the series truncation.
struct BudgetExceeded : Error {
    using Error::Error;
};

struct SeedOutOfRegime : Error {
    using Error::Error;
};

struct ToleranceUnachievable : Error {
    using Error::Error;
};

struct GridTooCoarse : Error {
    using Error::Error;
};

}  // namespace ttstar
