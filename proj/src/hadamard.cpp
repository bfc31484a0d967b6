#include "hvar/hadamard.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "hvar/errors.hpp"

namespace hvar {

namespace {

double lambda1_at(const Problem& p, double t) {
    Problem q = p;
    q.solve.modes = 2;
    AssembledForms forms = assemble_pulled_back(p.mesh, p.family, t, p.quad);
    Spectrum s = solve_lowest(forms, q.solve);
    return s.pairs[0].lambda;
}

double corrector_energy(const AssembledForms& forms, double lambda, const Eigen::VectorXd& w) {
    double lambda_pencil = forms.shift_applied ? lambda + 1.0 : lambda;
    Eigen::VectorXd cw = forms.K * w - lambda_pencil * (forms.M * w);
    return w.dot(cw);
}

/// Everything past the eigensolve: variation scalars, corrector, first and
/// second variations, certificate. Shared by variation_report and sweep.
VariationReport build_report(const Problem& p, double t, const AssembledForms& forms,
                             const Spectrum& spec) {
    const Eigen::VectorXd& phi = spec.pairs[0].vector;
    double lambda = spec.pairs[0].lambda;
    VariationScalars scalars = variations_at(p, t, forms, phi);

    VariationReport r;
    r.t = t;
    r.lambda = lambda;
    r.gap = spec.gap();
    r.Adot = scalars.Adot;
    r.Addot = scalars.Addot;
    r.Bdot = scalars.Bdot;
    r.Bddot = scalars.Bddot;
    r.lambda_dot = first_variation(scalars, lambda);
    Eigen::VectorXd w = corrector_solve(forms, scalars, lambda, r.lambda_dot, phi);
    r.corrector_energy = corrector_energy(forms, lambda, w);
    r.lambda_ddot_bound = second_variation_bound(scalars, lambda, r.lambda_dot, 1);
    r.lambda_ddot_exact = r.lambda_ddot_bound - 2.0 * r.corrector_energy;
    r.inv_lambda_ddot = harmonic_second_derivative(lambda, r.lambda_dot, r.lambda_ddot_exact);
    r.certificate_12 = convexity_certificate(scalars, lambda);
    return r;
}

} // namespace

Spectrum solve_at(const Problem& p, double t, AssembledForms* forms_out) {
    AssembledForms forms = assemble_pulled_back(p.mesh, p.family, t, p.quad);
    Spectrum s = solve_lowest(forms, p.solve);
    if (forms_out) *forms_out = std::move(forms);
    return s;
}

VariationScalars variations_at(const Problem& p, double t, const AssembledForms& forms,
                               const Eigen::VectorXd& phi) {
    if (const auto* g = std::get_if<GeneralDeformation>(&p.family)) {
        if (t != 0.0)
            throw UnsupportedFamily("general deformations define variations at t = 0 only");
        return assemble_general_variations(p.mesh, forms, g->S, g->R, phi, p.quad);
    }
    if (const auto* fl = std::get_if<FlowDeformation>(&p.family)) {
        if (t == 0.0) {
            switch (fl->category) {
                case FlowCategory::Solenoidal:
                    return assemble_solenoidal_variations(p.mesh, forms, *fl, phi, p.quad);
                case FlowCategory::Gradient:
                    return assemble_gradient_variations(p.mesh, forms, *fl, phi, p.quad);
                case FlowCategory::Generic:
                    break;
            }
        }
        return assemble_flow_variations(p.mesh, forms, *fl, t, phi, p.quad);
    }
    const auto& blend = std::get<ConformalBlend>(p.family);
    return assemble_conformal_variations(p.mesh, forms, blend, t, phi, p.quad);
}

double first_variation(const VariationScalars& s, double lambda) {
    return s.Adot - lambda * s.Bdot;
}

double second_variation_bound(const VariationScalars& s, double lambda, double lambda_dot,
                              int mode_index) {
    if (mode_index != 1)
        throw ModeMismatch("the second-variation bound holds for the first mode only");
    return s.Addot - lambda * s.Bddot - 2.0 * lambda_dot * s.Bdot;
}

double second_variation_exact(const VariationScalars& s, double lambda, double lambda_dot,
                              const Eigen::VectorXd& corrector, const AssembledForms& forms) {
    double bound = s.Addot - lambda * s.Bddot - 2.0 * lambda_dot * s.Bdot;
    return bound - 2.0 * corrector_energy(forms, lambda, corrector);
}

double harmonic_second_derivative(double lambda, double lambda_dot, double lambda_ddot) {
    return (2.0 * lambda_dot * lambda_dot - lambda * lambda_ddot) / (lambda * lambda * lambda);
}

bool convexity_certificate(const VariationScalars& s, double lambda, double rel_tol) {
    double lhs = 2.0 * s.Adot * s.Adot + lambda * lambda * s.Bddot;
    double rhs = lambda * (s.Addot + 2.0 * s.Adot * s.Bdot);
    double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    return lhs >= rhs - rel_tol * scale;
}

FdDerivatives fd_oracle(const Problem& p, double t, double h) {
    if (!(h > 0.0)) throw ConfigError("FD step must be positive");

    auto central = [&](double step) {
        double lp = lambda1_at(p, t + step);
        double lm = lambda1_at(p, t - step);
        double l0 = lambda1_at(p, t);
        return std::pair<double, double>{(lp - lm) / (2.0 * step),
                                         (lp - 2.0 * l0 + lm) / (step * step)};
    };

    auto [d1, d2] = central(h);
    auto [d1h, d2h] = central(0.5 * h);

    FdDerivatives out;
    out.lambda_dot = d1;
    out.lambda_ddot = d2;
    // O(h^2) differences: halving the step divides the truncation error by 4,
    // so the error of the returned step-h values is 4/3 of the step difference.
    out.err_dot = 4.0 / 3.0 * std::abs(d1h - d1);
    out.err_ddot = 4.0 / 3.0 * std::abs(d2h - d2);
    return out;
}

VariationReport variation_report(const Problem& p, double t, const VariationOptions& opts) {
    Problem q = p;
    q.solve.modes = std::max(p.solve.modes, 2);
    AssembledForms forms;
    Spectrum spec = solve_at(q, t, &forms);
    GapReport gap = simplicity_gap(spec, p.gap_rel_threshold);
    if (!gap.pass)
        throw NumericalError("simplicity gap " + std::to_string(gap.gap) +
                             " below threshold; variation formulas need a simple first mode");

    VariationReport r = build_report(p, t, forms, spec);
    if (opts.debug_both_readings) {
        // Mass-term reading of the second variation: -2 lambda_dot B(phi,phi)
        // in place of -2 lambda_dot Bdot; kept for inspection only, it fails
        // the scaling regression lambda_ddot = 6 lambda.
        r.lambda_ddot_mass_reading = r.Addot - r.lambda * r.Bddot - 2.0 * r.lambda_dot -
                                     2.0 * r.corrector_energy;
    }
    if (opts.with_fd) r.fd = fd_oracle(p, t, opts.fd_step);
    return r;
}

double SweepResult::max_abs_inv_lambda1() const {
    double m = 0.0;
    for (const auto& pt : points) m = std::max(m, std::abs(pt.inv_lambda1));
    return m;
}

SweepResult sweep(const Problem& p, const std::vector<double>& grid) {
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ConfigError("sweep grid must be strictly increasing");

    const bool general = std::holds_alternative<GeneralDeformation>(p.family);

    struct PointResult {
        SweepPoint point;
        Eigen::SparseMatrix<double> M;
        bool folded = false;
        std::string error;
    };

    auto compute_point = [&](double t) {
        PointResult r;
        r.point.t = t;
        try {
            AssembledForms forms;
            Problem q = p;
            q.solve.modes = std::max(p.solve.modes, 2);
            Spectrum spec = solve_at(q, t, &forms);
            for (const auto& pair : spec.pairs) r.point.lambdas.push_back(pair.lambda);
            r.point.inv_lambda1 = 1.0 / spec.pairs[0].lambda;
            r.point.first_vector = spec.pairs[0].vector;
            r.M = forms.M;
            if (!general || t == 0.0) r.point.report = build_report(p, t, forms, spec);
        } catch (const NonPositiveJacobian& e) {
            r.folded = true;
            r.error = e.what();
        }
        return r;
    };

    // Sweep points are independent jobs; dispatch to a worker pool and keep
    // results in grid order. The sign-continuity pass below is sequential.
    unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                       static_cast<unsigned>(grid.size())));
    std::vector<PointResult> results(grid.size());
    if (workers <= 1 || grid.size() <= 1) {
        for (size_t i = 0; i < grid.size(); ++i) results[i] = compute_point(grid[i]);
    } else {
        std::vector<std::future<PointResult>> futures;
        futures.reserve(grid.size());
        for (double t : grid)
            futures.push_back(std::async(std::launch::async, compute_point, t));
        for (size_t i = 0; i < grid.size(); ++i) results[i] = futures[i].get();
    }

    SweepResult out;
    for (size_t i = 0; i < results.size(); ++i) {
        if (results[i].folded) {
            out.truncated_at = grid[i];
            out.truncation_message = results[i].error;
            break;
        }
        out.points.push_back(std::move(results[i].point));
    }

    for (size_t i = 1; i < out.points.size(); ++i) {
        double overlap =
            out.points[i].first_vector.dot(results[i].M * out.points[i - 1].first_vector);
        if (overlap < 0.0) out.points[i].first_vector = -out.points[i].first_vector;
    }

    out.d2_inv_lambda1.assign(out.points.size(), std::nullopt);
    for (size_t i = 1; i + 1 < out.points.size(); ++i) {
        double t0 = out.points[i - 1].t, t1 = out.points[i].t, t2 = out.points[i + 1].t;
        double f0 = out.points[i - 1].inv_lambda1, f1 = out.points[i].inv_lambda1,
               f2 = out.points[i + 1].inv_lambda1;
        out.d2_inv_lambda1[i] = 2.0 * ((f2 - f1) / (t2 - t1) - (f1 - f0) / (t1 - t0)) / (t2 - t0);
    }
    return out;
}

} // namespace hvar
