#include "hvar/reproduce.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include <json.hpp>

#include "hvar/output.hpp"

namespace hvar {

namespace {

Table1Row make_row(std::string domain, const Spectrum& spec,
                   const std::array<double, 5>& reference) {
    Table1Row row;
    row.domain = std::move(domain);
    for (const auto& p : spec.pairs) row.computed.push_back(p.lambda);
    row.reference.assign(reference.begin(), reference.end());
    for (size_t i = 0; i < row.reference.size() && i < row.computed.size(); ++i) {
        double dev = std::abs(row.computed[i] - row.reference[i]) / row.reference[i];
        row.rel_deviation.push_back(dev);
        row.max_rel_deviation = std::max(row.max_rel_deviation, dev);
    }
    return row;
}

/// Boundary polygon of the mesh in circular order (single loop).
std::vector<Eigen::Vector2d> boundary_polygon(const Mesh2D& mesh) {
    std::map<int, int> next;
    for (const auto& e : mesh.boundary_edges) next[e.a] = e.b;
    std::vector<Eigen::Vector2d> poly;
    if (next.empty()) return poly;
    int start = next.begin()->first;
    int v = start;
    do {
        poly.push_back(mesh.vertices[v]);
        v = next.at(v);
    } while (v != start && poly.size() <= next.size());
    return poly;
}

} // namespace

Table1Result reproduce_table1(int level, const SolveOptions& solve, int image_rings) {
    Problem p;
    p.mesh = generate_disk_mesh(level);
    p.quad = QuadratureRule::triangle_degree4();
    p.solve = solve;
    p.solve.modes = 5;

    Table1Result result;
    result.level = level;

    p.family = ConformalBlend{HolomorphicMap::identity()};
    result.disk = make_row("D", solve_at(p, 0.0), kReferenceDiskEigenvalues);
    result.disk.rings = 1 << level;

    p.mesh = generate_disk_mesh_rings(image_rings);
    p.family = ConformalBlend{HolomorphicMap::exponential()};
    result.image = make_row("g1(D)", solve_at(p, 1.0), kReferenceExpImageEigenvalues);
    result.image.rings = image_rings;

    result.within_tolerance = result.disk.max_rel_deviation <= kReferenceRelTol &&
                              result.image.max_rel_deviation <= kReferenceRelTol;
    return result;
}

std::string table1_json(const Table1Result& r) {
    nlohmann::json j;
    j["level"] = r.level;
    j["tolerance_rel"] = kReferenceRelTol;
    for (const Table1Row* row : {&r.disk, &r.image}) {
        nlohmann::json rj;
        rj["rings"] = row->rings;
        rj["computed"] = row->computed;
        rj["reference"] = row->reference;
        rj["rel_deviation"] = row->rel_deviation;
        rj["max_rel_deviation"] = row->max_rel_deviation;
        j["rows"][row->domain] = rj;
    }
    j["within_tolerance"] = r.within_tolerance;
    return j.dump(2) + "\n";
}

void write_table1_csv(const Table1Result& r, std::ostream& out) {
    out << "domain,index,computed,reference,rel_deviation\n";
    for (const Table1Row* row : {&r.disk, &r.image})
        for (size_t i = 0; i < row->computed.size(); ++i)
            out << row->domain << ',' << i + 1 << ',' << format_double(row->computed[i]) << ','
                << format_double(row->reference[i]) << ','
                << format_double(row->rel_deviation[i]) << '\n';
}

Figure2Result reproduce_figure2(int level, int points, double t_min, double t_max,
                                const SolveOptions& solve) {
    Problem p;
    p.mesh = generate_disk_mesh(level);
    p.family = ConformalBlend{HolomorphicMap::cosine()};
    p.solve = solve;
    p.solve.modes = std::max(2, solve.modes);

    std::vector<double> grid;
    for (int i = 0; i < points; ++i)
        grid.push_back(t_min + (t_max - t_min) * i / (points - 1));

    Figure2Result out;
    out.sweep = sweep(p, grid);
    out.convexity = check_harmonic_convexity(out.sweep, std::get<ConformalBlend>(p.family),
                                             p.mesh, p.quad);
    return out;
}

Figure1Result reproduce_figure1(int level) {
    Figure1Result out;
    out.t_step = 0.04;
    out.note = "11 frames: t from -0.2 to 0.2 in steps of 0.04";
    Mesh2D mesh = generate_disk_mesh(level);
    ConformalBlend blend{HolomorphicMap::cosine()};
    std::vector<Eigen::Vector2d> base = boundary_polygon(mesh);
    for (int i = 0; i < 11; ++i) {
        double t = -0.2 + out.t_step * i;
        out.ts.push_back(t);
        std::vector<Eigen::Vector2d> poly;
        poly.reserve(base.size());
        for (const auto& v : base) {
            std::complex<double> w = blend.map({v.x(), v.y()}, t);
            poly.emplace_back(w.real(), w.imag());
        }
        out.outlines.push_back(std::move(poly));
    }
    return out;
}

} // namespace hvar
