#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hvar/forms.hpp"

namespace hvar {

struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd vector; // coefficients on free dofs, M-normalized
    int index = 0;          // 1-based mode number
    double residual = 0.0;  // ||K v - lambda M v|| / ||K v||
};

struct Spectrum {
    std::vector<EigenPair> pairs; // ascending
    bool shift_applied = false;

    double gap() const; // lambda_2 - lambda_1; requires >= 2 modes
};

struct SolveOptions {
    int modes = 5;
    double residual_tol = 1e-10;
    int max_iterations = 400;
    /// Dense Cholesky-reduction eigensolve below this many free dofs,
    /// shift-invert subspace iteration above.
    int dense_threshold = 3000;
    std::uint64_t seed = 0x5eedULL;
};

/// Lowest-k eigenpairs of the pencil (K, M) on free dofs, M-orthonormal and
/// residual-certified. When the forms carry the K + M coercivity shift the
/// reported eigenvalues are already un-shifted (lambda = lambda_tilde - 1).
Spectrum solve_lowest(const AssembledForms& forms, const SolveOptions& opts = {});

struct GapReport {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double gap = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Spectral-gap check standing in for simplicity of the first eigenvalue.
GapReport simplicity_gap(const Spectrum& s, double rel_threshold = 1e-6);

/// Solves the deflated corrector system
///   (K - lambda M) w = -(Adot - lambda Bdot - lambda_dot M) phi,
///   w^T M phi = 0
/// through a bordered symmetric solve. The result represents gamma(phi).
Eigen::VectorXd corrector_solve(const AssembledForms& forms, const VariationScalars& scalars,
                                double lambda, double lambda_dot, const Eigen::VectorXd& phi);

} // namespace hvar
