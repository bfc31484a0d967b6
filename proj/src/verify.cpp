#include "hvar/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <ostream>

#include "hvar/errors.hpp"

namespace hvar {

namespace {

using complexd = std::complex<double>;
using Vec2 = Eigen::Vector2d;

/// Quadrature sum of fn(x, interpolated phi value) over the mesh.
template <class F>
double integrate(const Mesh2D& mesh, const QuadratureRule& quad, const Eigen::VectorXd& nodal,
                 F&& fn) {
    double acc = 0.0;
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
        const auto& tv = mesh.triangles[tri];
        Vec2 p0 = mesh.vertices[tv[0]], p1 = mesh.vertices[tv[1]], p2 = mesh.vertices[tv[2]];
        double area = 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                             (p2.x() - p0.x()) * (p1.y() - p0.y()));
        for (size_t q = 0; q < quad.points.size(); ++q) {
            const auto& b = quad.points[q];
            Vec2 x = b[0] * p0 + b[1] * p1 + b[2] * p2;
            double val = b[0] * nodal[tv[0]] + b[1] * nodal[tv[1]] + b[2] * nodal[tv[2]];
            acc += quad.weights[q] * area * fn(x, val);
        }
    }
    return acc;
}

/// Projection of a nodal field onto the angular mode-0 component: vertices of
/// the structured disk mesh group into concentric rings, and the projection
/// replaces each value by its ring average.
Eigen::VectorXd radial_projection(const Mesh2D& mesh, const Eigen::VectorXd& nodal) {
    constexpr double kRadiusTol = 1e-9;
    std::map<long long, std::pair<double, int>> rings; // quantized radius -> (sum, count)
    auto key_of = [&](double r) { return static_cast<long long>(std::llround(r / kRadiusTol)); };
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        auto& slot = rings[key_of(mesh.vertices[v].norm())];
        slot.first += nodal[v];
        slot.second += 1;
    }
    Eigen::VectorXd out(nodal.size());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto& slot = rings[key_of(mesh.vertices[v].norm())];
        out[v] = slot.first / slot.second;
    }
    return out;
}

std::string univalence_annotation(const ConformalBlend& blend) {
    if (!blend.f.univalent_on_disk())
        return blend.f.name() + " is not univalent on the disk";
    return {};
}

void mark_univalence(CheckReport& r, const ConformalBlend& blend) {
    std::string note = univalence_annotation(blend);
    if (!note.empty()) {
        r.hypothesis_violated = true;
        r.annotation = r.annotation.empty() ? note : r.annotation + "; " + note;
    }
}

} // namespace

CheckReport make_check(std::string name, double lhs, double rhs, double tolerance,
                       std::string annotation) {
    CheckReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = lhs - rhs;
    r.tolerance = tolerance;
    r.pass = r.margin >= -tolerance;
    r.annotation = std::move(annotation);
    return r;
}

CheckReport check_harmonic_convexity(const SweepResult& sw, const ConformalBlend& blend,
                                     const Mesh2D& mesh, const QuadratureRule& quad,
                                     double rel_tol) {
    // Hypothesis: d^2 a_t / dt^2 >= 0 in Omega. For blends it is a squared
    // modulus, but evaluate the minimum over quadrature points anyway.
    double min_dtt = std::numeric_limits<double>::infinity();
    Eigen::VectorXd dummy = Eigen::VectorXd::Zero(mesh.num_vertices());
    integrate(mesh, quad, dummy, [&](const Vec2& x, double) {
        min_dtt = std::min(min_dtt, blend.weight_dtt(complexd(x.x(), x.y())));
        return 0.0;
    });

    double worst = std::numeric_limits<double>::infinity();
    for (const auto& dd : sw.d2_inv_lambda1)
        if (dd) worst = std::min(worst, *dd);
    double scale = sw.max_abs_inv_lambda1();
    double tol = rel_tol * scale;

    std::string note;
    if (sw.truncated_at) note = "sweep truncated at t = " + std::to_string(*sw.truncated_at);

    if (!std::isfinite(worst)) // fewer than three sweep points
        return make_check("harmonic_convexity", 0.0, 0.0, tol, "too few sweep points");
    CheckReport r = make_check("harmonic_convexity", worst, 0.0, tol, note);
    if (min_dtt < -1e-14) {
        r.hypothesis_violated = true;
        r.annotation = "min d2a/dt2 = " + std::to_string(min_dtt) +
                       (r.annotation.empty() ? "" : "; " + r.annotation);
    }
    return r;
}

CheckReport check_inequality_34(const Mesh2D& mesh, const ConformalBlend& blend,
                                const Spectrum& disk_spectrum, const AssembledForms& disk_forms,
                                const Spectrum& image_spectrum, const QuadratureRule& quad) {
    Eigen::VectorXd phi = disk_forms.expand(disk_spectrum.pairs[0].vector);
    double integral = integrate(mesh, quad, phi, [&](const Vec2& x, double v) {
        return v * v * blend.f.derivative(complexd(x.x(), x.y())).real();
    });
    double lhs = disk_spectrum.pairs[0].lambda;
    double rhs = image_spectrum.pairs[0].lambda * (2.0 * integral - 1.0);
    double tol = 1e-10 * std::max(std::abs(lhs), std::abs(rhs));
    CheckReport r = make_check("inequality_34", lhs, rhs, tol);
    mark_univalence(r, blend);
    return r;
}

CheckReport check_inequality_37(const Mesh2D& mesh, const ConformalBlend& blend,
                                const Spectrum& disk_spectrum, const AssembledForms& disk_forms,
                                const Spectrum& image_spectrum) {
    if (mesh.has_neumann_edges())
        throw ConfigError("inequality_37 requires pure Dirichlet tagging");

    // Radial-symmetry gate: >= 99.9% of the M-norm in the angular mode 0.
    const Eigen::VectorXd& phi_free = disk_spectrum.pairs[0].vector;
    Eigen::VectorXd phi = disk_forms.expand(phi_free);
    Eigen::VectorXd proj_full = radial_projection(mesh, phi);
    Eigen::VectorXd proj_free(phi_free.size());
    for (int i = 0; i < disk_forms.n_free(); ++i) proj_free[i] = proj_full[disk_forms.free_dofs[i]];
    double total = phi_free.dot(disk_forms.M * phi_free);
    double radial = proj_free.dot(disk_forms.M * proj_free);
    if (radial < 0.999 * total)
        throw RadialSymmetryViolated("first mode carries only " + std::to_string(radial / total) +
                                     " of its mass in the radial component");

    double a1 = blend.f.a1();
    double lhs = disk_spectrum.pairs[0].lambda;
    double rhs = image_spectrum.pairs[0].lambda * (2.0 * a1 - 1.0);
    double tol = 1e-10 * std::max(std::abs(lhs), std::abs(rhs));

    // Area-preserving maps additionally satisfy 2 Re a_1 - 1 <= 1.
    std::string note;
    auto coeffs = blend.f.series_coefficients(16);
    double series_area = 0.0;
    for (size_t n = 1; n < coeffs.size(); ++n) series_area += n * std::norm(coeffs[n]);
    if (std::abs(series_area - 1.0) < 1e-12)
        note = "area preserving: 2 Re a1 - 1 = " + std::to_string(2.0 * a1 - 1.0) + " <= 1";
    CheckReport r = make_check("inequality_37", lhs, rhs, tol, note);
    mark_univalence(r, blend);
    return r;
}

CheckReport check_inequality_thm9(const Mesh2D& mesh, const ConformalBlend& blend,
                                  const Spectrum& disk_spectrum, const Spectrum& image_spectrum,
                                  const AssembledForms& image_forms, const QuadratureRule& quad) {
    // The pulled-back eigenvector at t = 1 is phi~_1 = phi-hat_1 o f on D,
    // already normalized by int_D phi~^2 |f'|^2 dx = 1.
    Eigen::VectorXd phi = image_forms.expand(image_spectrum.pairs[0].vector);
    double integral = integrate(mesh, quad, phi, [&](const Vec2& x, double v) {
        return v * v * blend.f.derivative(complexd(x.x(), x.y())).real();
    });
    double normalization = integrate(mesh, quad, phi, [&](const Vec2& x, double v) {
        return v * v * std::norm(blend.f.derivative(complexd(x.x(), x.y())));
    });

    double lhs = image_spectrum.pairs[0].lambda;
    double rhs = disk_spectrum.pairs[0].lambda * (2.0 * integral - 1.0);
    double tol = 1e-10 * std::max(std::abs(lhs), std::abs(rhs));
    std::string note;
    if (std::abs(normalization - 1.0) > 1e-6)
        note = "normalization identity off by " + std::to_string(normalization - 1.0);
    CheckReport r = make_check("inequality_thm9", lhs, rhs, tol, note);
    mark_univalence(r, blend);
    return r;
}

CheckReport check_mean_value(const Mesh2D& fine_mesh,
                             const std::function<double(double)>& phi_radial,
                             const HolomorphicMap& h, const QuadratureRule& quad, double rel_tol,
                             const std::string& label) {
    Eigen::VectorXd dummy = Eigen::VectorXd::Zero(fine_mesh.num_vertices());
    double re = integrate(fine_mesh, quad, dummy, [&](const Vec2& x, double) {
        double w = phi_radial(x.norm());
        return w * w * h.value(complexd(x.x(), x.y())).real();
    });
    double im = integrate(fine_mesh, quad, dummy, [&](const Vec2& x, double) {
        double w = phi_radial(x.norm());
        return w * w * h.value(complexd(x.x(), x.y())).imag();
    });
    double phi_mass = integrate(fine_mesh, quad, dummy, [&](const Vec2& x, double) {
        double w = phi_radial(x.norm());
        return w * w;
    });
    complexd lhs(re, im);
    complexd rhs = h.value(0.0) * phi_mass;

    double diff = std::abs(lhs - rhs);
    double scale = std::max(std::abs(rhs), phi_mass);
    std::string note = "int phi^2 h = (" + std::to_string(re) + ", " + std::to_string(im) +
                       "), h(0) int phi^2 = " + std::to_string(rhs.real());
    std::string name = "mean_value_" + h.name();
    if (!label.empty()) name += "_" + label;
    return make_check(name, rel_tol, diff / scale, 0.0, note);
}

CheckReport check_area_identity(const HolomorphicMap& f, int truncation, const Mesh2D& fine_mesh,
                                const QuadratureRule& quad, double rel_tol) {
    Eigen::VectorXd dummy = Eigen::VectorXd::Zero(fine_mesh.num_vertices());
    double area_quad = integrate(fine_mesh, quad, dummy, [&](const Vec2& x, double) {
        return std::norm(f.derivative(complexd(x.x(), x.y())));
    });

    auto coeffs = f.series_coefficients(truncation);
    double series = 0.0;
    for (size_t n = 1; n < coeffs.size(); ++n) series += n * std::norm(coeffs[n]);
    double area_series = M_PI * series;

    double diff = std::abs(area_quad - area_series) / std::max(area_series, 1e-30);
    std::string note = "quadrature area " + std::to_string(area_quad) + " vs pi*sum = " +
                       std::to_string(area_series) + " (truncation N=" +
                       std::to_string(truncation) + ")";
    return make_check("area_identity_" + f.name(), rel_tol, diff, 0.0, note);
}

bool VerifySuite::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass && !c.hypothesis_violated) return false;
    return true;
}

VerifySuite run_standard_verification(const Problem& disk_problem, const ConformalBlend& blend,
                                      const std::vector<double>& sweep_grid, int fine_level) {
    VerifySuite suite;

    Problem p = disk_problem;
    p.family = blend;

    SweepResult sw = sweep(p, sweep_grid);
    suite.checks.push_back(check_harmonic_convexity(sw, blend, p.mesh, p.quad));

    AssembledForms disk_forms, image_forms;
    Problem ident = p;
    ident.family = ConformalBlend{HolomorphicMap::identity()};
    Spectrum disk_spec = solve_at(ident, 0.0, &disk_forms);
    Spectrum image_spec = solve_at(p, 1.0, &image_forms);

    suite.checks.push_back(
        check_inequality_34(p.mesh, blend, disk_spec, disk_forms, image_spec, p.quad));
    if (!p.mesh.has_neumann_edges())
        suite.checks.push_back(
            check_inequality_37(p.mesh, blend, disk_spec, disk_forms, image_spec));
    suite.checks.push_back(
        check_inequality_thm9(p.mesh, blend, disk_spec, image_spec, image_forms, p.quad));

    Mesh2D fine = generate_disk_mesh(fine_level);
    auto one = [](double) { return 1.0; };
    auto bump = [](double r) { return 1.0 - r * r; };
    for (const auto& h : {HolomorphicMap::identity(), HolomorphicMap::exponential()}) {
        double tol = h.kind() == MapKind::Exp ? 1e-6 : 1e-12;
        suite.checks.push_back(check_mean_value(fine, one, h, p.quad, tol, "const"));
        suite.checks.push_back(check_mean_value(fine, bump, h, p.quad, tol, "bump"));
    }
    suite.checks.push_back(check_area_identity(blend.f, 16, fine, p.quad));
    return suite;
}

void print_suite(const VerifySuite& suite, std::ostream& out) {
    char buf[256];
    out << "check                          lhs             rhs             margin      pass\n";
    for (const auto& c : suite.checks) {
        std::snprintf(buf, sizeof(buf), "%-28s %15.8g %15.8g %11.3e  %s%s%s\n", c.name.c_str(),
                      c.lhs, c.rhs, c.margin, c.pass ? "PASS" : "FAIL",
                      c.annotation.empty() ? "" : "  # ", c.annotation.c_str());
        out << buf;
    }
}

} // namespace hvar
