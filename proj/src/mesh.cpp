#include "hvar/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "hvar/errors.hpp"

namespace hvar {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_angle(double theta) {
    double u = std::fmod(theta, kTwoPi);
    if (u < 0.0) u += kTwoPi;
    return u;
}

std::pair<int, int> sorted_edge(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

} // namespace

bool AngularInterval::contains(double theta) const {
    if (length <= 0.0) return false;
    if (length >= kTwoPi) return true;
    double u = wrap_angle(theta - begin);
    return u < length; // closed at begin, open at end
}

double Mesh2D::signed_area(int tri) const {
    const auto& t = triangles[tri];
    const Eigen::Vector2d& p0 = vertices[t[0]];
    const Eigen::Vector2d& p1 = vertices[t[1]];
    const Eigen::Vector2d& p2 = vertices[t[2]];
    return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                  (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

double Mesh2D::total_area() const {
    double area = 0.0;
    for (int t = 0; t < num_triangles(); ++t) area += signed_area(t);
    return area;
}

std::vector<bool> Mesh2D::boundary_vertex_mask() const {
    std::vector<bool> mask(vertices.size(), false);
    for (const auto& e : boundary_edges) {
        mask[e.a] = true;
        mask[e.b] = true;
    }
    return mask;
}

std::vector<bool> Mesh2D::dirichlet_vertex_mask() const {
    std::vector<bool> mask(vertices.size(), false);
    for (const auto& e : boundary_edges) {
        if (e.tag == BoundaryTag::Dirichlet) {
            mask[e.a] = true;
            mask[e.b] = true;
        }
    }
    return mask;
}

bool Mesh2D::has_dirichlet_edges() const {
    return std::any_of(boundary_edges.begin(), boundary_edges.end(),
                       [](const BoundaryEdge& e) { return e.tag == BoundaryTag::Dirichlet; });
}

bool Mesh2D::has_neumann_edges() const {
    return std::any_of(boundary_edges.begin(), boundary_edges.end(),
                       [](const BoundaryEdge& e) { return e.tag == BoundaryTag::Neumann; });
}

void Mesh2D::validate() const {
    for (int t = 0; t < num_triangles(); ++t) {
        if (!(signed_area(t) > 0.0))
            throw ConfigError("mesh triangle " + std::to_string(t) + " has non-positive area");
        for (int k = 0; k < 3; ++k) {
            int v = triangles[t][k];
            if (v < 0 || v >= num_vertices())
                throw ConfigError("mesh triangle references invalid vertex");
        }
    }

    // Edges incident to exactly one triangle must coincide with the tagged set.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : triangles)
        for (int k = 0; k < 3; ++k)
            edge_count[sorted_edge(t[k], t[(k + 1) % 3])]++;

    std::map<std::pair<int, int>, int> tagged;
    for (const auto& e : boundary_edges) {
        auto key = sorted_edge(e.a, e.b);
        if (++tagged[key] > 1)
            throw ConfigError("boundary edge tagged more than once");
    }

    std::map<int, int> boundary_degree;
    for (const auto& [key, n] : edge_count) {
        if (n > 2) throw ConfigError("mesh edge shared by more than two triangles");
        if (n == 1) {
            if (tagged.find(key) == tagged.end())
                throw ConfigError("topological boundary edge missing from tagged set");
            boundary_degree[key.first]++;
            boundary_degree[key.second]++;
        }
    }
    if (tagged.size() != static_cast<size_t>(std::count_if(
            edge_count.begin(), edge_count.end(),
            [](const auto& kv) { return kv.second == 1; })))
        throw ConfigError("tagged edge set does not match the topological boundary");

    // Closed loops: every boundary vertex has exactly two incident boundary edges.
    for (const auto& [v, deg] : boundary_degree)
        if (deg != 2)
            throw ConfigError("boundary is not a union of closed loops at vertex " +
                              std::to_string(v));
}

QuadratureRule QuadratureRule::triangle_degree1() {
    QuadratureRule q;
    q.degree = 1;
    q.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    q.weights = {1.0};
    return q;
}

QuadratureRule QuadratureRule::triangle_degree2() {
    QuadratureRule q;
    q.degree = 2;
    q.points = {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
                {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
                {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}};
    q.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return q;
}

QuadratureRule QuadratureRule::triangle_degree4() {
    // Six-point symmetric rule (two orbits), exact through degree 4.
    const double a1 = 0.108103018168070, b1 = 0.445948490915965;
    const double w1 = 0.223381589678011;
    const double a2 = 0.816847572980459, b2 = 0.091576213509771;
    const double w2 = 0.109951743655322;
    QuadratureRule q;
    q.degree = 4;
    q.points = {{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
    q.weights = {w1, w1, w1, w2, w2, w2};
    return q;
}

QuadratureRule QuadratureRule::of_degree(int degree) {
    if (degree <= 1) return triangle_degree1();
    if (degree <= 2) return triangle_degree2();
    if (degree <= 4) return triangle_degree4();
    throw ConfigError("no triangle quadrature rule of degree " + std::to_string(degree));
}

Mesh2D generate_disk_mesh(int level) {
    if (level < 0) throw ConfigError("mesh level must be >= 0");
    constexpr int kMaxLevel = 8;
    if (level > kMaxLevel)
        throw ConfigError("mesh level " + std::to_string(level) + " exceeds maximum " +
                          std::to_string(kMaxLevel));

    Mesh2D mesh;
    mesh.unit_disk = true;
    mesh.refinement_level = 0;
    mesh.vertices.emplace_back(0.0, 0.0);
    // Hexagonal fan: exact coordinates keep the mesh symmetric to rounding.
    const double s = std::sqrt(3.0) / 2.0;
    const double ring[6][2] = {{1.0, 0.0}, {0.5, s}, {-0.5, s}, {-1.0, 0.0}, {-0.5, -s}, {0.5, -s}};
    for (const auto& p : ring) mesh.vertices.emplace_back(p[0], p[1]);
    for (int k = 0; k < 6; ++k) {
        int a = 1 + k, b = 1 + (k + 1) % 6;
        mesh.triangles.push_back({0, a, b});
        mesh.boundary_edges.push_back({a, b, BoundaryTag::Dirichlet});
    }

    for (int l = 0; l < level; ++l) mesh = refine(mesh);
    return mesh;
}

Mesh2D generate_disk_mesh_rings(int rings) {
    if (rings < 1) throw ConfigError("ring count must be >= 1");
    constexpr int kMaxRings = 256;
    if (rings > kMaxRings)
        throw ConfigError("ring count " + std::to_string(rings) + " exceeds maximum " +
                          std::to_string(kMaxRings));

    Mesh2D mesh;
    mesh.unit_disk = true;
    mesh.vertices.emplace_back(0.0, 0.0);
    std::vector<int> ring_start(rings + 1, 0);
    for (int i = 1; i <= rings; ++i) {
        ring_start[i] = mesh.num_vertices();
        int n = 6 * i;
        double r = static_cast<double>(i) / rings;
        for (int k = 0; k < n; ++k) {
            double theta = kTwoPi * k / n;
            mesh.vertices.emplace_back(r * std::cos(theta), r * std::sin(theta));
        }
    }

    for (int k = 0; k < 6; ++k)
        mesh.triangles.push_back({ring_start[1] + k, ring_start[1] + (k + 1) % 6, 0});
    for (int i = 2; i <= rings; ++i) {
        int no = 6 * i, ni = 6 * (i - 1);
        int oi = ring_start[i], ii = ring_start[i - 1];
        for (int s = 0; s < 6; ++s) {
            for (int j = 0; j < i; ++j)
                mesh.triangles.push_back({oi + (s * i + j) % no, oi + (s * i + j + 1) % no,
                                          ii + (s * (i - 1) + j) % ni});
            for (int j = 0; j + 1 < i; ++j)
                mesh.triangles.push_back({ii + (s * (i - 1) + j) % ni, oi + (s * i + j + 1) % no,
                                          ii + (s * (i - 1) + j + 1) % ni});
        }
    }

    int outer = ring_start[rings];
    int n_outer = 6 * rings;
    for (int k = 0; k < n_outer; ++k)
        mesh.boundary_edges.push_back(
            {outer + k, outer + (k + 1) % n_outer, BoundaryTag::Dirichlet});
    return mesh;
}

Mesh2D refine(const Mesh2D& mesh) {
    Mesh2D out;
    out.vertices = mesh.vertices;
    out.refinement_level = mesh.refinement_level + 1;
    out.unit_disk = mesh.unit_disk;

    std::map<std::pair<int, int>, int> midpoint;
    auto midpoint_of = [&](int a, int b) {
        auto key = sorted_edge(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        int idx = static_cast<int>(out.vertices.size());
        out.vertices.emplace_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
        midpoint.emplace(key, idx);
        return idx;
    };

    out.triangles.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
        int m01 = midpoint_of(t[0], t[1]);
        int m12 = midpoint_of(t[1], t[2]);
        int m20 = midpoint_of(t[2], t[0]);
        out.triangles.push_back({t[0], m01, m20});
        out.triangles.push_back({t[1], m12, m01});
        out.triangles.push_back({t[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }

    out.boundary_edges.reserve(mesh.boundary_edges.size() * 2);
    for (const auto& e : mesh.boundary_edges) {
        int m = midpoint_of(e.a, e.b);
        if (out.unit_disk) {
            double r = out.vertices[m].norm();
            if (r > 0.0) out.vertices[m] /= r; // snap back to |x| = 1
        }
        out.boundary_edges.push_back({e.a, m, e.tag});
        out.boundary_edges.push_back({m, e.b, e.tag});
    }
    return out;
}

Mesh2D tag_boundary(const Mesh2D& mesh, const std::vector<AngularInterval>& neumann_arcs) {
    for (size_t i = 0; i < neumann_arcs.size(); ++i) {
        if (neumann_arcs[i].length <= 0.0)
            throw ConfigError("Neumann arc with non-positive length");
        for (size_t j = i + 1; j < neumann_arcs.size(); ++j) {
            // Disjointness: neither begin point may fall in the other arc.
            if (neumann_arcs[i].contains(neumann_arcs[j].begin) ||
                neumann_arcs[j].contains(neumann_arcs[i].begin))
                throw ConfigError("Neumann arcs overlap");
        }
    }

    Mesh2D out = mesh;
    for (auto& e : out.boundary_edges) {
        Eigen::Vector2d mid = 0.5 * (out.vertices[e.a] + out.vertices[e.b]);
        double theta = wrap_angle(std::atan2(mid.y(), mid.x()));
        bool neumann = std::any_of(neumann_arcs.begin(), neumann_arcs.end(),
                                   [&](const AngularInterval& arc) { return arc.contains(theta); });
        e.tag = neumann ? BoundaryTag::Neumann : BoundaryTag::Dirichlet;
    }
    return out;
}

void write_mesh(const Mesh2D& mesh, std::ostream& out) {
    char buf[128];
    out << "hvar-mesh 1 " << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' '
        << mesh.boundary_edges.size() << ' ' << mesh.refinement_level << ' '
        << (mesh.unit_disk ? 1 : 0) << '\n';
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g\n", v.x(), v.y());
        out << buf;
    }
    for (const auto& t : mesh.triangles)
        out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& e : mesh.boundary_edges)
        out << "e " << e.a << ' ' << e.b << ' '
            << (e.tag == BoundaryTag::Dirichlet ? 'D' : 'N') << '\n';
}

Mesh2D read_mesh(std::istream& in) {
    std::string magic;
    int version = 0, nv = 0, nt = 0, ne = 0, level = 0, disk = 0;
    in >> magic >> version >> nv >> nt >> ne >> level >> disk;
    if (!in || magic != "hvar-mesh" || version != 1)
        throw ConfigError("not an hvar mesh file");

    Mesh2D mesh;
    mesh.refinement_level = level;
    mesh.unit_disk = disk != 0;
    mesh.vertices.reserve(nv);
    mesh.triangles.reserve(nt);
    mesh.boundary_edges.reserve(ne);
    std::string kind;
    for (int i = 0; i < nv; ++i) {
        double x, y;
        in >> kind >> x >> y;
        if (!in || kind != "v") throw ConfigError("malformed vertex line in mesh file");
        mesh.vertices.emplace_back(x, y);
    }
    for (int i = 0; i < nt; ++i) {
        int a, b, c;
        in >> kind >> a >> b >> c;
        if (!in || kind != "t") throw ConfigError("malformed triangle line in mesh file");
        mesh.triangles.push_back({a, b, c});
    }
    for (int i = 0; i < ne; ++i) {
        int a, b;
        char tag;
        in >> kind >> a >> b >> tag;
        if (!in || kind != "e" || (tag != 'D' && tag != 'N'))
            throw ConfigError("malformed edge line in mesh file");
        mesh.boundary_edges.push_back(
            {a, b, tag == 'D' ? BoundaryTag::Dirichlet : BoundaryTag::Neumann});
    }
    mesh.validate();
    return mesh;
}

} // namespace hvar
