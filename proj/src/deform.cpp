#include "hvar/deform.hpp"

#include <Eigen/LU>

#include <cmath>
#include <utility>

#include "hvar/errors.hpp"

namespace hvar {

namespace {

using complexd = std::complex<double>;

constexpr double kDivergenceTol = 1e-12;
constexpr double kGradientTol = 1e-12;

/// Fixed evaluation points in the closed unit disk used for construction-time
/// category checks (deterministic low-discrepancy spiral).
std::vector<Eigen::Vector2d> category_sample_points() {
    std::vector<Eigen::Vector2d> pts;
    const int n = 64;
    for (int i = 0; i < n; ++i) {
        double r = std::sqrt((i + 0.5) / n);
        double theta = 2.39996322972865332 * i; // golden angle
        pts.emplace_back(r * std::cos(theta), r * std::sin(theta));
    }
    return pts;
}

} // namespace

// ---------------------------------------------------------------------------
// Poly2

Poly2 Poly2::constant(double c) {
    Poly2 p(0);
    p.c_[0] = c;
    return p;
}

Poly2 Poly2::monomial(int i, int j, double c) {
    Poly2 p(i > j ? i : j);
    p.set_coeff(i, j, c);
    return p;
}

double Poly2::coeff(int i, int j) const {
    if (i < 0 || j < 0 || i > deg_ || j > deg_) return 0.0;
    return c_[i * (deg_ + 1) + j];
}

void Poly2::set_coeff(int i, int j, double c) {
    c_[i * (deg_ + 1) + j] = c;
}

double Poly2::operator()(const Eigen::Vector2d& p) const {
    // Horner in x, inner Horner in y.
    double acc = 0.0;
    for (int i = deg_; i >= 0; --i) {
        double row = 0.0;
        for (int j = deg_; j >= 0; --j) row = row * p.y() + c_[i * (deg_ + 1) + j];
        acc = acc * p.x() + row;
    }
    return acc;
}

Poly2 Poly2::dx() const {
    if (deg_ == 0) return Poly2();
    // keep the full grid: differentiating x^i y^j lowers i but leaves j,
    // which may be as large as deg_
    Poly2 out(deg_);
    for (int i = 1; i <= deg_; ++i)
        for (int j = 0; j <= deg_; ++j) out.set_coeff(i - 1, j, i * coeff(i, j));
    return out;
}

Poly2 Poly2::dy() const {
    if (deg_ == 0) return Poly2();
    Poly2 out(deg_);
    for (int i = 0; i <= deg_; ++i)
        for (int j = 1; j <= deg_; ++j) out.set_coeff(i, j - 1, j * coeff(i, j));
    return out;
}

Poly2 Poly2::operator+(const Poly2& o) const {
    Poly2 out(deg_ > o.deg_ ? deg_ : o.deg_);
    for (int i = 0; i <= out.deg_; ++i)
        for (int j = 0; j <= out.deg_; ++j) out.set_coeff(i, j, coeff(i, j) + o.coeff(i, j));
    return out;
}

Poly2 Poly2::operator-(const Poly2& o) const {
    return *this + o.scaled(-1.0);
}

Poly2 Poly2::operator*(const Poly2& o) const {
    Poly2 out(deg_ + o.deg_);
    for (int i = 0; i <= deg_; ++i)
        for (int j = 0; j <= deg_; ++j) {
            double cij = coeff(i, j);
            if (cij == 0.0) continue;
            for (int k = 0; k <= o.deg_; ++k)
                for (int l = 0; l <= o.deg_; ++l) {
                    double v = o.coeff(k, l);
                    if (v == 0.0) continue;
                    out.set_coeff(i + k, j + l, out.coeff(i + k, j + l) + cij * v);
                }
        }
    return out;
}

Poly2 Poly2::scaled(double s) const {
    Poly2 out = *this;
    for (double& v : out.c_) v *= s;
    return out;
}

bool Poly2::is_zero() const {
    for (double v : c_)
        if (v != 0.0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// VectorField2

Eigen::Vector2d VectorField2::value(const Eigen::Vector2d& p) const {
    return {x(p), y(p)};
}

Eigen::Matrix2d VectorField2::jacobian(const Eigen::Vector2d& p) const {
    Eigen::Matrix2d J;
    J << x.dx()(p), x.dy()(p), y.dx()(p), y.dy()(p);
    return J;
}

double VectorField2::divergence(const Eigen::Vector2d& p) const {
    return x.dx()(p) + y.dy()(p);
}

VectorField2 VectorField2::advected() const {
    VectorField2 out;
    out.x = x * x.dx() + y * x.dy();
    out.y = x * y.dx() + y * y.dy();
    return out;
}

VectorField2 VectorField2::zero() {
    return {Poly2(), Poly2()};
}

VectorField2 VectorField2::scaling() {
    return {Poly2::monomial(1, 0, 1.0), Poly2::monomial(0, 1, 1.0)};
}

VectorField2 VectorField2::rotation() {
    return {Poly2::monomial(0, 1, -1.0), Poly2::monomial(1, 0, 1.0)};
}

VectorField2 VectorField2::translation(double cx, double cy) {
    return {Poly2::constant(cx), Poly2::constant(cy)};
}

VectorField2 VectorField2::gradient_of(const Poly2& mu) {
    return {mu.dx(), mu.dy()};
}

// ---------------------------------------------------------------------------
// HolomorphicMap

HolomorphicMap HolomorphicMap::identity() {
    HolomorphicMap m;
    m.kind_ = MapKind::Identity;
    return m;
}

HolomorphicMap HolomorphicMap::cosine() {
    HolomorphicMap m;
    m.kind_ = MapKind::Cos;
    return m;
}

HolomorphicMap HolomorphicMap::exponential() {
    HolomorphicMap m;
    m.kind_ = MapKind::Exp;
    return m;
}

HolomorphicMap HolomorphicMap::power_series(std::vector<complexd> coeffs) {
    if (coeffs.size() < 2) throw ConfigError("power series map needs coefficients a_0, a_1");
    if (std::abs(coeffs[1].imag()) > 0.0)
        throw ConfigError("power series coefficient a_1 must be real");
    HolomorphicMap m;
    m.kind_ = MapKind::PowerSeries;
    m.coeffs_ = std::move(coeffs);
    return m;
}

std::string HolomorphicMap::name() const {
    switch (kind_) {
        case MapKind::Identity: return "identity";
        case MapKind::Cos: return "cos";
        case MapKind::Exp: return "exp";
        case MapKind::PowerSeries: return "power_series";
    }
    return "?";
}

complexd HolomorphicMap::value(complexd z) const {
    switch (kind_) {
        case MapKind::Identity: return z;
        case MapKind::Cos: return std::cos(z);
        case MapKind::Exp: return std::exp(z);
        case MapKind::PowerSeries: {
            complexd acc = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
            return acc;
        }
    }
    return z;
}

complexd HolomorphicMap::derivative(complexd z) const {
    switch (kind_) {
        case MapKind::Identity: return 1.0;
        case MapKind::Cos: return -std::sin(z);
        case MapKind::Exp: return std::exp(z);
        case MapKind::PowerSeries: {
            complexd acc = 0.0;
            for (size_t n = coeffs_.size() - 1; n >= 1; --n)
                acc = acc * z + static_cast<double>(n) * coeffs_[n];
            return acc;
        }
    }
    return 1.0;
}

double HolomorphicMap::a1() const {
    switch (kind_) {
        case MapKind::Identity: return 1.0;
        case MapKind::Cos: return 0.0;
        case MapKind::Exp: return 1.0;
        case MapKind::PowerSeries: return coeffs_[1].real();
    }
    return 1.0;
}

std::vector<complexd> HolomorphicMap::series_coefficients(int n) const {
    std::vector<complexd> out(static_cast<size_t>(n) + 1, 0.0);
    switch (kind_) {
        case MapKind::Identity:
            if (n >= 1) out[1] = 1.0;
            break;
        case MapKind::Cos: {
            // cos z = sum (-1)^m z^(2m) / (2m)!
            double fact = 1.0;
            int sign = 1;
            for (int k = 0; k <= n; ++k) {
                if (k > 0) fact *= k;
                if (k % 2 == 0) {
                    out[k] = sign / fact;
                    sign = -sign;
                }
            }
            break;
        }
        case MapKind::Exp: {
            double fact = 1.0;
            for (int k = 0; k <= n; ++k) {
                if (k > 0) fact *= k;
                out[k] = 1.0 / fact;
            }
            break;
        }
        case MapKind::PowerSeries:
            for (size_t k = 0; k < coeffs_.size() && k <= static_cast<size_t>(n); ++k)
                out[k] = coeffs_[k];
            break;
    }
    return out;
}

bool HolomorphicMap::univalent_on_disk() const {
    switch (kind_) {
        case MapKind::Identity: return true;
        case MapKind::Cos: return false; // even map, not injective on D
        case MapKind::Exp: return true;
        case MapKind::PowerSeries: return true; // caller's responsibility for exotic series
    }
    return true;
}

// ---------------------------------------------------------------------------
// FlowDeformation

FlowDeformation FlowDeformation::generic(VectorField2 field) {
    FlowDeformation f;
    f.v = std::move(field);
    f.category = FlowCategory::Generic;
    return f;
}

FlowDeformation FlowDeformation::solenoidal(VectorField2 field) {
    FlowDeformation f;
    f.v = std::move(field);
    f.category = FlowCategory::Solenoidal;
    for (const auto& p : category_sample_points())
        if (std::abs(f.v.divergence(p)) > kDivergenceTol)
            throw CategoryMismatch("field is not divergence-free (div v = " +
                                   std::to_string(f.v.divergence(p)) + " at a sample point)");
    return f;
}

FlowDeformation FlowDeformation::gradient(Poly2 potential) {
    FlowDeformation f;
    f.mu = std::move(potential);
    f.v = VectorField2::gradient_of(*f.mu);
    f.category = FlowCategory::Gradient;
    for (const auto& p : category_sample_points()) {
        Eigen::Vector2d diff = f.v.value(p) - VectorField2::gradient_of(*f.mu).value(p);
        if (diff.norm() > kGradientTol)
            throw CategoryMismatch("field does not match grad mu at a sample point");
    }
    return f;
}

// ---------------------------------------------------------------------------
// ConformalBlend

complexd ConformalBlend::map(complexd z, double t) const {
    return (1.0 - t) * z + t * f.value(z);
}

complexd ConformalBlend::map_derivative(complexd z, double t) const {
    return (1.0 - t) + t * f.derivative(z);
}

double ConformalBlend::weight(complexd z, double t) const {
    return std::norm(map_derivative(z, t));
}

double ConformalBlend::weight_dt(complexd z, double t) const {
    complexd d = f.derivative(z) - 1.0;
    return 2.0 * d.real() + 2.0 * t * std::norm(d);
}

double ConformalBlend::weight_dtt(complexd z) const {
    return 2.0 * std::norm(f.derivative(z) - 1.0);
}

// ---------------------------------------------------------------------------
// Operations

FlowMapResult flow_map(const FlowDeformation& flow, double t, const Eigen::Vector2d& x,
                       const FlowIntegrationOptions& opts) {
    FlowMapResult r{x, Eigen::Matrix2d::Identity()};
    if (t == 0.0) return r;

    int steps = std::max(1, static_cast<int>(std::ceil(opts.steps_per_unit_t * std::abs(t))));
    double h = t / steps;
    for (int s = 0; s < steps; ++s) {
        // RK4 on the coupled system (X, J).
        Eigen::Vector2d k1x = flow.v.value(r.image);
        Eigen::Matrix2d k1j = flow.v.jacobian(r.image) * r.DT;

        Eigen::Vector2d x2 = r.image + 0.5 * h * k1x;
        Eigen::Vector2d k2x = flow.v.value(x2);
        Eigen::Matrix2d k2j = flow.v.jacobian(x2) * (r.DT + 0.5 * h * k1j);

        Eigen::Vector2d x3 = r.image + 0.5 * h * k2x;
        Eigen::Vector2d k3x = flow.v.value(x3);
        Eigen::Matrix2d k3j = flow.v.jacobian(x3) * (r.DT + 0.5 * h * k2j);

        Eigen::Vector2d x4 = r.image + h * k3x;
        Eigen::Vector2d k4x = flow.v.value(x4);
        Eigen::Matrix2d k4j = flow.v.jacobian(x4) * (r.DT + h * k3j);

        r.image += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        r.DT += (h / 6.0) * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);

        if (r.image.norm() > opts.escape_radius)
            throw TrajectoryEscape("flow trajectory left the evaluation domain at t=" +
                                   std::to_string(h * (s + 1)));
    }
    return r;
}

JacobianData eval_jacobian(const DeformationFamily& d, double t, const Eigen::Vector2d& x,
                           const FlowIntegrationOptions& opts) {
    JacobianData out;

    if (const auto* g = std::get_if<GeneralDeformation>(&d)) {
        out.DT = Eigen::Matrix2d::Identity() + t * g->S.jacobian(x) +
                 0.5 * t * t * g->R.jacobian(x);
    } else if (const auto* fl = std::get_if<FlowDeformation>(&d)) {
        out.DT = flow_map(*fl, t, x, opts).DT;
    } else {
        const auto& blend = std::get<ConformalBlend>(d);
        complexd z(x.x(), x.y());
        complexd gp = blend.map_derivative(z, t);
        out.DT << gp.real(), -gp.imag(), gp.imag(), gp.real();
        out.da_dt = blend.weight_dt(z, t);
        out.d2a_dt2 = blend.weight_dtt(z);
    }

    out.a = out.DT.determinant();
    // Conformal determinants are squares; treat a vanishing weight as a fold too.
    constexpr double kFoldTol = 1e-14;
    if (!(out.a > kFoldTol)) throw NonPositiveJacobian(t, out.a, x.x(), x.y());

    Eigen::Matrix2d inv = out.DT.inverse();
    out.Q = inv * inv.transpose();
    return out;
}

std::pair<VectorField2, VectorField2> expansion_fields(const DeformationFamily& d) {
    if (const auto* g = std::get_if<GeneralDeformation>(&d)) return {g->S, g->R};
    if (const auto* fl = std::get_if<FlowDeformation>(&d)) return {fl->v, fl->v.advected()};
    throw UnsupportedFamily(
        "conformal blends have no (S, R) expansion fields; their variations are "
        "assembled from the analytic weight derivatives");
}

GradientFlowData gradient_flow_data(const FlowDeformation& flow, const Eigen::Vector2d& x) {
    if (flow.category != FlowCategory::Gradient || !flow.mu)
        throw CategoryMismatch("gradient_flow_data requires a gradient flow");

    const Poly2& mu = *flow.mu;
    GradientFlowData out;
    Poly2 mx = mu.dx(), my = mu.dy();
    out.H << mx.dx()(x), mx.dy()(x), my.dx()(x), my.dy()(x);

    Poly2 speed2 = mx * mx + my * my; // |grad mu|^2
    Poly2 sx = speed2.dx(), sy = speed2.dy();
    out.K << sx.dx()(x), sx.dy()(x), sy.dx()(x), sy.dy()(x);

    out.trH = out.H.trace();
    out.trK = out.K.trace();
    out.H_sq = out.H.squaredNorm();
    return out;
}

} // namespace hvar
