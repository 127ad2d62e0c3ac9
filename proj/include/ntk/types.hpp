#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ntk {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// A matrix-valued function that can be sampled pointwise.
template <typename Real>
using MatrixFunction = std::function<CMatrix<Real>(Complex<Real>)>;

using Index = Eigen::Index;

enum class ErrorKind {
    DimensionMismatch,
    InvalidParameter,
    SingularEvaluation,
    Unstable,
    NotMinimal,
    NotConvergent,
    IndefiniteGramian,
    BoundaryDegenerate,
    IllConditioned,
    CrossCheckFailure,
    NotOnCircle,
    BlockSingular,
    GridTooCoarse,
    GridSingular,
    NotSchurOnCircle,
    PoleNotCancelled,
    RadiusTooLarge,
    EvaluationAtPole,
    NotSolvable,
    DenominatorSingularEverywhere,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidParameter: return "InvalidParameter";
        case ErrorKind::SingularEvaluation: return "SingularEvaluation";
        case ErrorKind::Unstable: return "Unstable";
        case ErrorKind::NotMinimal: return "NotMinimal";
        case ErrorKind::NotConvergent: return "NotConvergent";
        case ErrorKind::IndefiniteGramian: return "IndefiniteGramian";
        case ErrorKind::BoundaryDegenerate: return "BoundaryDegenerate";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::CrossCheckFailure: return "CrossCheckFailure";
        case ErrorKind::NotOnCircle: return "NotOnCircle";
        case ErrorKind::BlockSingular: return "BlockSingular";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::GridSingular: return "GridSingular";
        case ErrorKind::NotSchurOnCircle: return "NotSchurOnCircle";
        case ErrorKind::PoleNotCancelled: return "PoleNotCancelled";
        case ErrorKind::RadiusTooLarge: return "RadiusTooLarge";
        case ErrorKind::EvaluationAtPole: return "EvaluationAtPole";
        case ErrorKind::NotSolvable: return "NotSolvable";
        case ErrorKind::DenominatorSingularEverywhere: return "DenominatorSingularEverywhere";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

/// Numerical thresholds shared by the library. Every report echoes the values it used.
struct Tolerances {
    double rank = 1e-10;              // σ_i > rank·σ_max counts toward numerical rank
    double inertia = 1e-9;            // relative width of the band around zero rejected as degenerate
    double stability_margin = 1e-12;  // ρ(A) ≥ 1 − margin is rejected
    double stein_update = 1e-14;
    int stein_max_doublings = 60;
    double stein_residual = 1e-10;
    double max_condition = 1e12;      // refusal threshold for P and Λ
    double singular_rcond = 1e-13;    // evaluation refused when rcond(zI − A) is below this
    double pick_cross_check = 1e-8;
    double hankel_rank = 1e-6;
    double sup_norm = 1e-7;
    double circle = 1e-12;            // ||μ| − 1| allowed for circle-only operations
};

}  // namespace ntk
