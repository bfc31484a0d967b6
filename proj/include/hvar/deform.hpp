#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace hvar {

/// Bivariate polynomial sum c_ij x^i y^j with exact derivative algebra.
/// Degrees stay small (catalog fields are at most degree 4), so a dense
/// coefficient grid is fine.
class Poly2 {
public:
    Poly2() : deg_(0), c_(1, 0.0) {}
    explicit Poly2(int degree) : deg_(degree), c_((degree + 1) * (degree + 1), 0.0) {}

    static Poly2 constant(double c);
    static Poly2 monomial(int i, int j, double c);

    int degree() const { return deg_; }
    double coeff(int i, int j) const;
    void set_coeff(int i, int j, double c);

    double operator()(const Eigen::Vector2d& p) const;

    Poly2 dx() const;
    Poly2 dy() const;

    Poly2 operator+(const Poly2& o) const;
    Poly2 operator-(const Poly2& o) const;
    Poly2 operator*(const Poly2& o) const;
    Poly2 scaled(double s) const;

    bool is_zero() const;

private:
    int deg_;
    std::vector<double> c_; // row-major (deg+1) x (deg+1), index i*(deg+1)+j
};

/// Polynomial plane vector field with exact Jacobian evaluation.
struct VectorField2 {
    Poly2 x, y;

    Eigen::Vector2d value(const Eigen::Vector2d& p) const;
    Eigen::Matrix2d jacobian(const Eigen::Vector2d& p) const;
    double divergence(const Eigen::Vector2d& p) const;

    /// (w . grad) w, computed in polynomial algebra.
    VectorField2 advected() const;

    static VectorField2 zero();
    static VectorField2 scaling();                    // (x, y)
    static VectorField2 rotation();                   // (-y, x)
    static VectorField2 translation(double cx, double cy);
    static VectorField2 gradient_of(const Poly2& mu); // grad mu
};

enum class MapKind { Identity, Cos, Exp, PowerSeries };

/// Holomorphic map from a small fixed catalog, evaluable with its complex
/// derivative. Power series coefficients a_0..a_N require a_1 real.
class HolomorphicMap {
public:
    HolomorphicMap() : kind_(MapKind::Identity) {}
    static HolomorphicMap identity();
    static HolomorphicMap cosine();
    static HolomorphicMap exponential();
    static HolomorphicMap power_series(std::vector<std::complex<double>> coeffs);

    MapKind kind() const { return kind_; }
    std::string name() const;

    std::complex<double> value(std::complex<double> z) const;
    std::complex<double> derivative(std::complex<double> z) const;

    /// Taylor coefficient of z^1 (real by construction for series maps).
    double a1() const;
    /// Taylor coefficients a_0..a_n about 0.
    std::vector<std::complex<double>> series_coefficients(int n) const;
    bool univalent_on_disk() const; // catalog knowledge: cos is not

private:
    MapKind kind_;
    std::vector<std::complex<double>> coeffs_;
};

enum class FlowCategory { Generic, Solenoidal, Gradient };

/// Deformation described by its t-expansion fields: T_t = I + tS + (t^2/2)R.
struct GeneralDeformation {
    VectorField2 S;
    VectorField2 R;
};

/// Dynamical deformation T_t x = X(t), dX/dt = v(X).
struct FlowDeformation {
    VectorField2 v;
    FlowCategory category = FlowCategory::Generic;
    std::optional<Poly2> mu; // scalar potential, gradient category only

    static FlowDeformation generic(VectorField2 field);
    static FlowDeformation solenoidal(VectorField2 field);
    static FlowDeformation gradient(Poly2 potential);
};

/// Conformal blend g_t(z) = (1-t) z + t f(z).
struct ConformalBlend {
    HolomorphicMap f;

    std::complex<double> map(std::complex<double> z, double t) const;
    std::complex<double> map_derivative(std::complex<double> z, double t) const;
    double weight(std::complex<double> z, double t) const;    // a_t = |g_t'|^2
    double weight_dt(std::complex<double> z, double t) const; // analytic d a_t / dt
    double weight_dtt(std::complex<double> z) const;          // analytic d^2 a_t / dt^2
};

using DeformationFamily = std::variant<GeneralDeformation, FlowDeformation, ConformalBlend>;

/// Jacobian data of a deformation at one point: DT, a = det DT and
/// Q = (DT)^-1 (DT)^-T, plus analytic t-derivatives of a for conformal
/// families.
struct JacobianData {
    Eigen::Matrix2d DT = Eigen::Matrix2d::Identity();
    double a = 1.0;
    Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
    std::optional<double> da_dt;
    std::optional<double> d2a_dt2;
};

struct FlowMapResult {
    Eigen::Vector2d image;
    Eigen::Matrix2d DT;
};

struct FlowIntegrationOptions {
    int steps_per_unit_t = 64;
    double escape_radius = 8.0;
};

/// Jacobian data of the family at parameter t and point x.
/// Throws NonPositiveJacobian when det DT_t <= 0 (fold).
JacobianData eval_jacobian(const DeformationFamily& d, double t, const Eigen::Vector2d& x,
                           const FlowIntegrationOptions& opts = {});

/// Integrates dX/dt = v(X) together with the variational equation
/// dJ/dt = Dv(X) J from (x, E) with fixed-step RK4.
FlowMapResult flow_map(const FlowDeformation& flow, double t, const Eigen::Vector2d& x,
                       const FlowIntegrationOptions& opts = {});

/// The fields (S, R) of the t = 0 expansion T_t = I + tS + (t^2/2) R + o(t^2).
/// For flows S = v and R = (v . grad) v. Unsupported for conformal blends.
std::pair<VectorField2, VectorField2> expansion_fields(const DeformationFamily& d);

/// Hessian data of a gradient flow at a point: H = hess(mu),
/// K = hess(|grad mu|^2) and the derived scalars.
struct GradientFlowData {
    Eigen::Matrix2d H;
    Eigen::Matrix2d K;
    double trH = 0.0;
    double trK = 0.0;
    double H_sq = 0.0; // Frobenius inner product H:H
};

GradientFlowData gradient_flow_data(const FlowDeformation& flow, const Eigen::Vector2d& x);

} // namespace hvar
