#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hvar/deform.hpp"
#include "hvar/eig.hpp"
#include "hvar/forms.hpp"
#include "hvar/mesh.hpp"

namespace hvar {

/// A fully specified eigenvalue problem: tagged mesh, deformation family and
/// the numerical knobs. Everything downstream (variations, FD oracle, sweeps,
/// verification) consumes one of these.
struct Problem {
    Mesh2D mesh;
    DeformationFamily family;
    QuadratureRule quad = QuadratureRule::triangle_degree4();
    SolveOptions solve;
    double gap_rel_threshold = 1e-6;
};

/// Pulled-back solve at parameter t.
Spectrum solve_at(const Problem& p, double t, AssembledForms* forms_out = nullptr);

/// The four variation scalars of the problem's family at parameter t,
/// evaluated at the eigenfunction phi. Dispatches on family and flow category.
/// General families are defined by their t = 0 expansion and reject t != 0.
VariationScalars variations_at(const Problem& p, double t, const AssembledForms& forms,
                               const Eigen::VectorXd& phi);

/// First Hadamard variation: lambda_dot = Adot - lambda Bdot.
double first_variation(const VariationScalars& s, double lambda);

/// First-mode upper bound lambda_ddot <= Addot - lambda Bddot
/// - 2 lambda_dot Bdot; valid for the first mode only.
double second_variation_bound(const VariationScalars& s, double lambda, double lambda_dot,
                              int mode_index = 1);

/// Exact second variation: the bound minus twice the corrector energy
/// w^T (K - lambda M) w.
double second_variation_exact(const VariationScalars& s, double lambda, double lambda_dot,
                              const Eigen::VectorXd& corrector, const AssembledForms& forms);

/// d^2/dt^2 (1/lambda) = (2 lambda_dot^2 - lambda lambda_ddot) / lambda^3.
double harmonic_second_derivative(double lambda, double lambda_dot, double lambda_ddot);

/// Sufficient convexity certificate: 2 Adot^2 + lambda^2 Bddot >=
/// lambda (Addot + 2 Adot Bdot), with a small relative slack.
bool convexity_certificate(const VariationScalars& s, double lambda, double rel_tol = 1e-12);

struct FdDerivatives {
    double lambda_dot = 0.0;
    double lambda_ddot = 0.0;
    double err_dot = 0.0;  // Richardson step-halving estimate
    double err_ddot = 0.0; // Richardson step-halving estimate
};

/// Central differences of lambda_1(t) on the same mesh and dof ordering as
/// the formula path, so discretization bias cancels.
FdDerivatives fd_oracle(const Problem& p, double t, double h);

struct VariationReport {
    double t = 0.0;
    double lambda = 0.0;
    double lambda_dot = 0.0;
    double lambda_ddot_exact = 0.0;
    double lambda_ddot_bound = 0.0;
    double inv_lambda_ddot = 0.0;
    double corrector_energy = 0.0; // w^T (K - lambda M) w
    double gap = 0.0;
    bool certificate_12 = false;

    double Adot = 0.0, Addot = 0.0, Bdot = 0.0, Bddot = 0.0;

    std::optional<FdDerivatives> fd;
    /// The rejected mass-term reading of the exact formula, emitted only in
    /// debug mode (it fails the scaling closed form lambda_ddot = 6 lambda).
    std::optional<double> lambda_ddot_mass_reading;
};

struct VariationOptions {
    bool with_fd = false;
    double fd_step = 1e-3;
    bool debug_both_readings = false;
};

/// Full first/second variation report at parameter t (first mode).
VariationReport variation_report(const Problem& p, double t, const VariationOptions& opts = {});

struct SweepPoint {
    double t = 0.0;
    std::vector<double> lambdas;
    double inv_lambda1 = 0.0;
    Eigen::VectorXd first_vector; // sign-continuous across the grid
    std::optional<VariationReport> report;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    /// Second divided differences of 1/lambda_1, defined on interior grid
    /// points (same indexing as points; endpoints unset).
    std::vector<std::optional<double>> d2_inv_lambda1;
    std::optional<double> truncated_at; // offending t of a fold, if any
    std::string truncation_message;

    double max_abs_inv_lambda1() const;
};

/// Eigenvalue sweep over a parameter grid with sign-continuous eigenvectors.
/// A fold (NonPositiveJacobian) truncates the sweep at the offending t.
SweepResult sweep(const Problem& p, const std::vector<double>& grid);

} // namespace hvar
