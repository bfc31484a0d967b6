#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hvar/deform.hpp"
#include "hvar/mesh.hpp"

namespace hvar {

/// Stiffness/mass pair of the pulled-back forms on the P1 space, with
/// Dirichlet dofs eliminated. When the Dirichlet set is empty the stiffness
/// is shifted to K + M so the pencil stays coercive; eigenvalues then come
/// back as lambda = lambda_shifted - 1.
struct AssembledForms {
    Eigen::SparseMatrix<double> K;
    Eigen::SparseMatrix<double> M;
    std::vector<int> free_dofs;     // vertex index of each free dof
    std::vector<int> dof_of_vertex; // -1 for eliminated vertices
    bool shift_applied = false;
    int n_vertices = 0;

    int n_free() const { return static_cast<int>(free_dofs.size()); }

    /// Expands a free-dof coefficient vector to all vertices (zeros on
    /// Dirichlet vertices).
    Eigen::VectorXd expand(const Eigen::VectorXd& free_values) const;
};

AssembledForms assemble_pulled_back(const Mesh2D& mesh, const DeformationFamily& d, double t,
                                    const QuadratureRule& quad = QuadratureRule::triangle_degree4());

/// First/second parameter derivatives of the forms evaluated at one
/// eigenfunction, plus the derivative matrices needed by the corrector solve.
/// All matrices live on free dofs in the same ordering as AssembledForms.
struct VariationScalars {
    double Adot = 0.0;
    double Addot = 0.0;
    double Bdot = 0.0;
    double Bddot = 0.0;
    Eigen::SparseMatrix<double> Adot_mat;
    Eigen::SparseMatrix<double> Bdot_mat;
};

/// Variation forms for T_t = I + tS + (t^2/2) R at t = 0.
VariationScalars assemble_general_variations(
    const Mesh2D& mesh, const AssembledForms& forms, const VectorField2& S, const VectorField2& R,
    const Eigen::VectorXd& phi_free, const QuadratureRule& quad = QuadratureRule::triangle_degree4());

/// Variation forms along a flow at parameter t. The t = 0 case coincides with
/// the general assembly for (S, R) = (v, (v.grad)v); for t != 0 the group
/// property recenters the t = 0 kernels at the mapped points.
VariationScalars assemble_flow_variations(
    const Mesh2D& mesh, const AssembledForms& forms, const FlowDeformation& flow, double t,
    const Eigen::VectorXd& phi_free, const QuadratureRule& quad = QuadratureRule::triangle_degree4());

/// Divergence-free specialization: Bdot = Bddot = 0 by construction.
VariationScalars assemble_solenoidal_variations(
    const Mesh2D& mesh, const AssembledForms& forms, const FlowDeformation& flow,
    const Eigen::VectorXd& phi_free, const QuadratureRule& quad = QuadratureRule::triangle_degree4());

/// Gradient-field specialization in the Hessians H = hess(mu) and
/// K = hess(|grad mu|^2).
VariationScalars assemble_gradient_variations(
    const Mesh2D& mesh, const AssembledForms& forms, const FlowDeformation& flow,
    const Eigen::VectorXd& phi_free, const QuadratureRule& quad = QuadratureRule::triangle_degree4());

/// Conformal blends in two dimensions: the stiffness is t-independent, so
/// Adot = Addot = 0 and only the mass weight varies (analytic derivatives).
VariationScalars assemble_conformal_variations(
    const Mesh2D& mesh, const AssembledForms& forms, const ConformalBlend& blend, double t,
    const Eigen::VectorXd& phi_free, const QuadratureRule& quad = QuadratureRule::triangle_degree4());

/// Coordinate text export (row col value per line, zero-based).
void write_matrix_coo(const Eigen::SparseMatrix<double>& m, std::ostream& out);

} // namespace hvar
