#include "hvar/forms.hpp"

#include <Eigen/LU>

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "hvar/errors.hpp"

namespace hvar {

namespace {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Element geometry shared by every assembly loop: constant P1 gradients and
/// the triangle area.
struct ElementGeometry {
    std::array<Vec2, 3> grad;
    double area;
    std::array<Vec2, 3> corner;
};

ElementGeometry element_geometry(const Mesh2D& mesh, int tri) {
    const auto& t = mesh.triangles[tri];
    ElementGeometry g;
    for (int k = 0; k < 3; ++k) g.corner[k] = mesh.vertices[t[k]];
    Vec2 e1 = g.corner[1] - g.corner[0];
    Vec2 e2 = g.corner[2] - g.corner[0];
    double det = e1.x() * e2.y() - e1.y() * e2.x();
    g.area = 0.5 * det;
    // grad of barycentric coordinate k: rotated opposite edge / (2 area)
    g.grad[0] = Vec2(g.corner[1].y() - g.corner[2].y(), g.corner[2].x() - g.corner[1].x()) / det;
    g.grad[1] = Vec2(g.corner[2].y() - g.corner[0].y(), g.corner[0].x() - g.corner[2].x()) / det;
    g.grad[2] = Vec2(g.corner[0].y() - g.corner[1].y(), g.corner[1].x() - g.corner[0].x()) / det;
    return g;
}

Vec2 physical_point(const ElementGeometry& g, const std::array<double, 3>& bary) {
    return bary[0] * g.corner[0] + bary[1] * g.corner[1] + bary[2] * g.corner[2];
}

std::vector<int> free_dof_map(const Mesh2D& mesh, std::vector<int>& free_dofs) {
    std::vector<bool> dirichlet = mesh.dirichlet_vertex_mask();
    std::vector<int> dof_of_vertex(mesh.num_vertices(), -1);
    free_dofs.clear();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!dirichlet[v]) {
            dof_of_vertex[v] = static_cast<int>(free_dofs.size());
            free_dofs.push_back(v);
        }
    }
    return dof_of_vertex;
}

/// Accumulates a symmetric 3x3 element block into the triplet list, skipping
/// eliminated dofs. The local block must already be symmetric.
void scatter_local(Triplets& trips, const std::array<int, 3>& dofs,
                   const Eigen::Matrix3d& local) {
    for (int i = 0; i < 3; ++i) {
        if (dofs[i] < 0) continue;
        for (int j = 0; j < 3; ++j) {
            if (dofs[j] < 0) continue;
            trips.emplace_back(dofs[i], dofs[j], local(i, j));
        }
    }
}

/// Generic assembly of a pair (gradient form with matrix kernel G(x),
/// mass form with scalar kernel b(x)) over the mesh. Returns matrices on
/// free dofs; also accumulates the quadratic forms at phi when given.
struct KernelAssembly {
    Eigen::SparseMatrix<double> Kmat;
    Eigen::SparseMatrix<double> Mmat;
};

KernelAssembly assemble_kernels(
    const Mesh2D& mesh, const std::vector<int>& dof_of_vertex, int n_free,
    const QuadratureRule& quad,
    const std::function<void(const Vec2&, Mat2&, double&)>& kernel) {
    Triplets ktrips, mtrips;
    ktrips.reserve(mesh.num_triangles() * 9);
    mtrips.reserve(mesh.num_triangles() * 9);

    Mat2 G;
    double b;
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        ElementGeometry g = element_geometry(mesh, tri);
        Eigen::Matrix3d kloc = Eigen::Matrix3d::Zero();
        Eigen::Matrix3d mloc = Eigen::Matrix3d::Zero();
        for (size_t q = 0; q < quad.points.size(); ++q) {
            Vec2 x = physical_point(g, quad.points[q]);
            kernel(x, G, b);
            double w = quad.weights[q] * g.area;
            for (int i = 0; i < 3; ++i) {
                for (int j = i; j < 3; ++j) {
                    double kij = w * g.grad[i].dot(G * g.grad[j]);
                    double mij = w * b * quad.points[q][i] * quad.points[q][j];
                    kloc(i, j) += kij;
                    mloc(i, j) += mij;
                }
            }
        }
        // mirror the computed upper triangle so the block is exactly symmetric
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < i; ++j) {
                kloc(i, j) = kloc(j, i);
                mloc(i, j) = mloc(j, i);
            }
        std::array<int, 3> dofs = {dof_of_vertex[mesh.triangles[tri][0]],
                                   dof_of_vertex[mesh.triangles[tri][1]],
                                   dof_of_vertex[mesh.triangles[tri][2]]};
        scatter_local(ktrips, dofs, kloc);
        scatter_local(mtrips, dofs, mloc);
    }

    KernelAssembly out;
    out.Kmat.resize(n_free, n_free);
    out.Mmat.resize(n_free, n_free);
    out.Kmat.setFromTriplets(ktrips.begin(), ktrips.end());
    out.Mmat.setFromTriplets(mtrips.begin(), mtrips.end());
    return out;
}

double quadratic_form(const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& v) {
    return v.dot(m * v);
}

/// Shared skeleton of the four variation assemblies: the caller provides the
/// pointwise kernels for (Adot, Addot) matrices and (Bdot, Bddot) weights.
VariationScalars assemble_variation_kernels(
    const Mesh2D& mesh, const AssembledForms& forms, const Eigen::VectorXd& phi_free,
    const QuadratureRule& quad,
    const std::function<void(const Vec2&, Mat2&, double&)>& first,
    const std::function<void(const Vec2&, Mat2&, double&)>& second) {
    KernelAssembly a1 =
        assemble_kernels(mesh, forms.dof_of_vertex, forms.n_free(), quad, first);
    KernelAssembly a2 =
        assemble_kernels(mesh, forms.dof_of_vertex, forms.n_free(), quad, second);

    VariationScalars out;
    out.Adot_mat = a1.Kmat;
    out.Bdot_mat = a1.Mmat;
    out.Adot = quadratic_form(a1.Kmat, phi_free);
    out.Bdot = quadratic_form(a1.Mmat, phi_free);
    out.Addot = quadratic_form(a2.Kmat, phi_free);
    out.Bddot = quadratic_form(a2.Mmat, phi_free);
    return out;
}

/// First/second variation kernels from the expansion fields at
/// a point. `first` fills G1 = -(DS^T + DS) + (div S) E and b1 = div S;
/// `second` fills
///   G2 = (2 (DS)^2 - DR)^T + (2 (DS)^2 - DR) + 2 DS DS^T
///        - 2 (div S)(DS^T + DS) + (div R + (div S)^2 - DS^T:DS) E
/// and b2 = div R + (div S)^2 - DS^T:DS,
/// where DS^T:DS = tr((DS)^2). The cross term carries the product-rule
/// factor 2; the scaling family (lambda(t) = lambda (1+t)^-2) pins it.
struct ExpansionKernels {
    static void first(const Mat2& DS, Mat2& G, double& b) {
        double divS = DS.trace();
        G = -(DS.transpose() + DS) + divS * Mat2::Identity();
        b = divS;
    }
    static void second(const Mat2& DS, const Mat2& DR, Mat2& G, double& b) {
        double divS = DS.trace();
        double divR = DR.trace();
        double dsds = (DS * DS).trace(); // DS^T : DS contraction
        Mat2 core = 2.0 * DS * DS - DR;
        b = divR + divS * divS - dsds;
        G = core.transpose() + core + 2.0 * DS * DS.transpose() -
            2.0 * divS * (DS.transpose() + DS) + b * Mat2::Identity();
    }
};

} // namespace

Eigen::VectorXd AssembledForms::expand(const Eigen::VectorXd& free_values) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n_vertices);
    for (size_t i = 0; i < free_dofs.size(); ++i) full[free_dofs[i]] = free_values[i];
    return full;
}

AssembledForms assemble_pulled_back(const Mesh2D& mesh, const DeformationFamily& d, double t,
                                    const QuadratureRule& quad) {
    AssembledForms forms;
    forms.n_vertices = mesh.num_vertices();
    forms.dof_of_vertex = free_dof_map(mesh, forms.free_dofs);

    const bool conformal = std::holds_alternative<ConformalBlend>(d);
    auto kernel = [&](const Vec2& x, Mat2& G, double& b) {
        JacobianData jd = eval_jacobian(d, t, x);
        b = jd.a;
        if (conformal) {
            // In two dimensions Q_t a_t is the identity for conformal maps;
            // using it verbatim keeps the assembled stiffness t-independent
            // to the last bit.
            G = Mat2::Identity();
        } else {
            G = jd.Q * jd.a;
        }
    };

    KernelAssembly ka = assemble_kernels(mesh, forms.dof_of_vertex, forms.n_free(), quad, kernel);
    forms.K = ka.Kmat;
    forms.M = ka.Mmat;

    for (int i = 0; i < forms.n_free(); ++i)
        if (!(forms.M.coeff(i, i) > 0.0))
            throw SingularMass("mass matrix has a non-positive diagonal entry at dof " +
                               std::to_string(i));

    if (!mesh.has_dirichlet_edges()) {
        forms.K = forms.K + forms.M;
        forms.shift_applied = true;
    }
    return forms;
}

VariationScalars assemble_general_variations(const Mesh2D& mesh, const AssembledForms& forms,
                                             const VectorField2& S, const VectorField2& R,
                                             const Eigen::VectorXd& phi_free,
                                             const QuadratureRule& quad) {
    auto first = [&](const Vec2& x, Mat2& G, double& b) {
        ExpansionKernels::first(S.jacobian(x), G, b);
    };
    auto second = [&](const Vec2& x, Mat2& G, double& b) {
        ExpansionKernels::second(S.jacobian(x), R.jacobian(x), G, b);
    };
    return assemble_variation_kernels(mesh, forms, phi_free, quad, first, second);
}

VariationScalars assemble_flow_variations(const Mesh2D& mesh, const AssembledForms& forms,
                                          const FlowDeformation& flow, double t,
                                          const Eigen::VectorXd& phi_free,
                                          const QuadratureRule& quad) {
    VectorField2 S = flow.v;
    VectorField2 R = flow.v.advected();
    if (t == 0.0) return assemble_general_variations(mesh, forms, S, R, phi_free, quad);

    // Group property: T_{t+s} = T_s o T_t, so the s-derivatives of the
    // pulled-back kernels at parameter t are the t = 0 kernels evaluated at
    // the mapped point, conjugated back by DT_t and scaled by a_t.
    auto transported = [&](const Vec2& x, bool second_order, Mat2& G, double& b) {
        FlowMapResult fm = flow_map(flow, t, x);
        double a = fm.DT.determinant();
        if (!(a > 0.0)) throw NonPositiveJacobian(t, a, x.x(), x.y());
        Mat2 inv = fm.DT.inverse();
        Mat2 G0;
        double b0;
        if (second_order)
            ExpansionKernels::second(S.jacobian(fm.image), R.jacobian(fm.image), G0, b0);
        else
            ExpansionKernels::first(S.jacobian(fm.image), G0, b0);
        G = a * (inv * G0 * inv.transpose());
        b = a * b0;
    };
    auto first = [&](const Vec2& x, Mat2& G, double& b) { transported(x, false, G, b); };
    auto second = [&](const Vec2& x, Mat2& G, double& b) { transported(x, true, G, b); };
    return assemble_variation_kernels(mesh, forms, phi_free, quad, first, second);
}

VariationScalars assemble_solenoidal_variations(const Mesh2D& mesh, const AssembledForms& forms,
                                                const FlowDeformation& flow,
                                                const Eigen::VectorXd& phi_free,
                                                const QuadratureRule& quad) {
    constexpr double kTol = 1e-10;
    VectorField2 R = flow.v.advected();
    auto first = [&](const Vec2& x, Mat2& G, double& b) {
        double divv = flow.v.divergence(x);
        if (std::abs(divv) > kTol)
            throw CategoryMismatch("solenoidal variation assembly on a field with div v = " +
                                   std::to_string(divv));
        Mat2 DS = flow.v.jacobian(x);
        G = -(DS.transpose() + DS);
        b = 0.0;
    };
    auto second = [&](const Vec2& x, Mat2& G, double& b) {
        Mat2 DS = flow.v.jacobian(x);
        Mat2 core = 2.0 * DS * DS - R.jacobian(x);
        G = core.transpose() + core + 2.0 * DS * DS.transpose();
        b = 0.0;
    };
    return assemble_variation_kernels(mesh, forms, phi_free, quad, first, second);
}

VariationScalars assemble_gradient_variations(const Mesh2D& mesh, const AssembledForms& forms,
                                              const FlowDeformation& flow,
                                              const Eigen::VectorXd& phi_free,
                                              const QuadratureRule& quad) {
    if (flow.category != FlowCategory::Gradient || !flow.mu)
        throw CategoryMismatch("gradient variation assembly requires a gradient flow");

    auto first = [&](const Vec2& x, Mat2& G, double& b) {
        GradientFlowData gd = gradient_flow_data(flow, x);
        G = -2.0 * gd.H + gd.trH * Mat2::Identity();
        b = gd.trH;
    };
    auto second = [&](const Vec2& x, Mat2& G, double& b) {
        GradientFlowData gd = gradient_flow_data(flow, x);
        b = gd.trH * gd.trH + 0.5 * gd.trK - gd.H_sq;
        G = 6.0 * gd.H * gd.H - gd.K - 4.0 * gd.trH * gd.H + b * Mat2::Identity();
    };
    return assemble_variation_kernels(mesh, forms, phi_free, quad, first, second);
}

VariationScalars assemble_conformal_variations(const Mesh2D& mesh, const AssembledForms& forms,
                                               const ConformalBlend& blend, double t,
                                               const Eigen::VectorXd& phi_free,
                                               const QuadratureRule& quad) {
    auto first = [&](const Vec2& x, Mat2& G, double& b) {
        std::complex<double> z(x.x(), x.y());
        if (!(blend.weight(z, t) > 0.0))
            throw NonPositiveJacobian(t, blend.weight(z, t), x.x(), x.y());
        G = Mat2::Zero();
        b = blend.weight_dt(z, t);
    };
    auto second = [&](const Vec2& x, Mat2& G, double& b) {
        std::complex<double> z(x.x(), x.y());
        G = Mat2::Zero();
        b = blend.weight_dtt(z);
    };
    return assemble_variation_kernels(mesh, forms, phi_free, quad, first, second);
}

void write_matrix_coo(const Eigen::SparseMatrix<double>& m, std::ostream& out) {
    char buf[96];
    out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n", static_cast<long>(it.row()),
                          static_cast<long>(it.col()), it.value());
            out << buf;
        }
}

} // namespace hvar
