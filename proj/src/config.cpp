#include "hvar/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hvar/errors.hpp"

namespace hvar {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError(std::string("invalid JSON in ") + what);
    return j;
}

Poly2 poly_from_json(const json& terms, int max_total_degree) {
    // [[i, j, coefficient], ...]
    Poly2 p;
    if (!terms.is_array()) throw ConfigError("polynomial must be an array of [i, j, c] terms");
    for (const auto& term : terms) {
        if (!term.is_array() || term.size() != 3)
            throw ConfigError("polynomial term must be [i, j, c]");
        int i = term[0].get<int>();
        int jj = term[1].get<int>();
        double c = term[2].get<double>();
        if (i < 0 || jj < 0 || i + jj > max_total_degree)
            throw ConfigError("polynomial exponents must be >= 0 with total degree <= " +
                              std::to_string(max_total_degree));
        p = p + Poly2::monomial(i, jj, c);
    }
    return p;
}

VectorField2 field_from_json(const json& spec) {
    if (spec.is_string()) {
        std::string name = spec.get<std::string>();
        if (name == "scaling") return VectorField2::scaling();
        if (name == "rotation") return VectorField2::rotation();
        if (name == "zero") return VectorField2::zero();
        throw ConfigError("unknown field name '" + name + "'");
    }
    if (spec.contains("translation")) {
        auto c = spec["translation"];
        return VectorField2::translation(c.at(0).get<double>(), c.at(1).get<double>());
    }
    if (spec.contains("polynomial")) {
        // catalog limit: user-supplied component polynomials up to degree 4
        const auto& poly = spec["polynomial"];
        VectorField2 f;
        f.x = poly_from_json(poly.at("x"), 4);
        f.y = poly_from_json(poly.at("y"), 4);
        return f;
    }
    throw ConfigError("unrecognized field specification");
}

Poly2 potential_from_json(const json& spec) {
    if (spec.is_string()) {
        std::string name = spec.get<std::string>();
        if (name == "half_r2") // |x|^2 / 2
            return Poly2::monomial(2, 0, 0.5) + Poly2::monomial(0, 2, 0.5);
        if (name == "harmonic_quadratic") // (x^2 - y^2) / 2
            return Poly2::monomial(2, 0, 0.5) + Poly2::monomial(0, 2, -0.5);
        throw ConfigError("unknown potential name '" + name + "'");
    }
    if (spec.is_object() && spec.contains("linear")) {
        auto c = spec["linear"];
        return Poly2::monomial(1, 0, c.at(0).get<double>()) +
               Poly2::monomial(0, 1, c.at(1).get<double>());
    }
    if (spec.is_object() && spec.contains("polynomial"))
        return poly_from_json(spec["polynomial"], 6);
    throw ConfigError("unrecognized potential specification");
}

HolomorphicMap map_from_json(const json& spec) {
    if (spec.is_string()) {
        std::string name = spec.get<std::string>();
        if (name == "identity") return HolomorphicMap::identity();
        if (name == "cos") return HolomorphicMap::cosine();
        if (name == "exp") return HolomorphicMap::exponential();
        throw ConfigError("unknown map name '" + name + "'");
    }
    if (spec.is_object() && spec.contains("power_series")) {
        std::vector<std::complex<double>> coeffs;
        for (const auto& c : spec["power_series"]) {
            if (c.is_number())
                coeffs.emplace_back(c.get<double>(), 0.0);
            else
                coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
        }
        return HolomorphicMap::power_series(std::move(coeffs));
    }
    throw ConfigError("unrecognized map specification");
}

} // namespace

DeformationFamily parse_deformation(const std::string& json_text) {
    json j = parse_json(json_text, "deformation");
    std::string family = j.value("family", "");
    if (family == "conformal") {
        ConformalBlend blend;
        blend.f = map_from_json(j.at("map"));
        return blend;
    }
    if (family == "flow") {
        std::string category = j.value("category", "generic");
        if (category == "gradient") return FlowDeformation::gradient(potential_from_json(j.at("mu")));
        VectorField2 v = field_from_json(j.at("field"));
        if (category == "solenoidal") return FlowDeformation::solenoidal(std::move(v));
        if (category != "generic") throw ConfigError("unknown flow category '" + category + "'");
        return FlowDeformation::generic(std::move(v));
    }
    if (family == "general") {
        GeneralDeformation g;
        g.S = field_from_json(j.at("S"));
        g.R = j.contains("R") ? field_from_json(j.at("R")) : VectorField2::zero();
        return g;
    }
    throw ConfigError("deformation family must be conformal, flow or general");
}

void RunConfig::validate() const {
    if (mesh_level < 0 || mesh_level > 8) throw ConfigError("mesh level must be in [0, 8]");
    if (grid_count < 1) throw ConfigError("grid count must be >= 1");
    if (grid_count > 1 && !(grid_stop > grid_start))
        throw ConfigError("grid must be strictly increasing (stop > start)");
    if (modes < 1) throw ConfigError("mode count must be >= 1");
    for (double tol : {eig_residual_tol, gap_rel_threshold, fd_step, sweep_convexity_rel})
        if (!(tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (quadrature_degree < 1 || quadrature_degree > 4)
        throw ConfigError("quadrature degree must be in [1, 4]");
    if (dense_threshold < 1) throw ConfigError("dense threshold must be >= 1");
    if (max_iterations < 1) throw ConfigError("iteration budget must be >= 1");
    parse_deformation(deformation_json); // catalog errors surface before compute
}

std::vector<double> RunConfig::grid() const {
    std::vector<double> g;
    if (grid_count == 1) {
        g.push_back(grid_start);
        return g;
    }
    for (int i = 0; i < grid_count; ++i)
        g.push_back(grid_start + (grid_stop - grid_start) * i / (grid_count - 1));
    return g;
}

DeformationFamily RunConfig::deformation() const {
    return parse_deformation(deformation_json);
}

Problem RunConfig::problem() const {
    Problem p;
    p.mesh = tag_boundary(generate_disk_mesh(mesh_level), neumann_arcs);
    p.family = deformation();
    p.quad = QuadratureRule::of_degree(quadrature_degree);
    p.solve.modes = modes;
    p.solve.residual_tol = eig_residual_tol;
    p.solve.max_iterations = max_iterations;
    p.solve.dense_threshold = dense_threshold;
    p.solve.seed = seed;
    p.gap_rel_threshold = gap_rel_threshold;
    return p;
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j = parse_json(text, "config");
    RunConfig c;
    if (j.contains("mesh")) {
        const auto& m = j["mesh"];
        c.mesh_level = m.value("level", c.mesh_level);
        if (m.contains("neumann_arcs"))
            for (const auto& arc : m["neumann_arcs"])
                c.neumann_arcs.push_back({arc.at(0).get<double>(), arc.at(1).get<double>()});
    }
    if (j.contains("deformation")) c.deformation_json = j["deformation"].dump();
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        c.grid_start = g.value("start", c.grid_start);
        c.grid_stop = g.value("stop", c.grid_stop);
        c.grid_count = g.value("count", c.grid_count);
    }
    c.modes = j.value("modes", c.modes);
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        c.eig_residual_tol = t.value("eig_residual", c.eig_residual_tol);
        c.gap_rel_threshold = t.value("gap_rel", c.gap_rel_threshold);
        c.fd_step = t.value("fd_step", c.fd_step);
        c.sweep_convexity_rel = t.value("sweep_convexity_rel", c.sweep_convexity_rel);
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        c.dense_threshold = s.value("dense_threshold", c.dense_threshold);
        c.max_iterations = s.value("max_iterations", c.max_iterations);
    }
    c.quadrature_degree = j.value("quadrature_degree", c.quadrature_degree);
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string RunConfig::to_json_text() const {
    json j;
    j["mesh"]["level"] = mesh_level;
    json arcs = json::array();
    for (const auto& a : neumann_arcs) arcs.push_back({a.begin, a.length});
    j["mesh"]["neumann_arcs"] = arcs;
    j["deformation"] = parse_json(deformation_json, "deformation");
    j["grid"]["start"] = grid_start;
    j["grid"]["stop"] = grid_stop;
    j["grid"]["count"] = grid_count;
    j["modes"] = modes;
    j["tolerances"]["eig_residual"] = eig_residual_tol;
    j["tolerances"]["gap_rel"] = gap_rel_threshold;
    j["tolerances"]["fd_step"] = fd_step;
    j["tolerances"]["sweep_convexity_rel"] = sweep_convexity_rel;
    j["solver"]["dense_threshold"] = dense_threshold;
    j["solver"]["max_iterations"] = max_iterations;
    j["quadrature_degree"] = quadrature_degree;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    return j.dump(2) + "\n";
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file '" + path + "'");
    out << to_json_text();
}

} // namespace hvar
