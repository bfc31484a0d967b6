#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace hvar {

enum class BoundaryTag : std::uint8_t { Dirichlet, Neumann };

struct BoundaryEdge {
    int a = -1;
    int b = -1;
    BoundaryTag tag = BoundaryTag::Dirichlet;
};

/// Half-open angular arc [begin, begin+length) in radians, measured
/// counterclockwise from the positive x axis. May wrap through 2*pi.
struct AngularInterval {
    double begin = 0.0;
    double length = 0.0;

    bool contains(double theta) const;
};

/// Triangulated reference domain with tagged boundary edges.
///
/// Invariants (see validate()):
///  - every triangle has positive signed area,
///  - boundary edges are exactly the edges shared by one triangle and form
///    closed loops,
///  - the Dirichlet and Neumann edge sets partition the boundary.
struct Mesh2D {
    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    int refinement_level = 0;
    bool unit_disk = false; // boundary vertices snap to |x|=1 on refine

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }

    double signed_area(int tri) const;
    double total_area() const;

    /// True for vertices incident to at least one boundary edge.
    std::vector<bool> boundary_vertex_mask() const;
    /// True for vertices incident to at least one Dirichlet edge.
    std::vector<bool> dirichlet_vertex_mask() const;

    bool has_dirichlet_edges() const;
    bool has_neumann_edges() const;

    /// Checks all structural invariants; throws ConfigError on violation.
    void validate() const;
};

/// Quadrature rule on the reference triangle in barycentric coordinates.
/// Weights are relative to the triangle area and sum to 1.
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0;

    static QuadratureRule triangle_degree1();
    static QuadratureRule triangle_degree2();
    /// Six-point symmetric rule, exact through degree 4. Project default.
    static QuadratureRule triangle_degree4();
    static QuadratureRule of_degree(int degree);
};

/// Structured concentric triangulation of the unit disk, refined `level`
/// times from a 6-triangle hexagonal fan. All boundary edges Dirichlet.
Mesh2D generate_disk_mesh(int level);

/// Structured concentric disk mesh with an arbitrary ring count (ring i
/// carries 6i vertices at radius i/rings; 6 rings^2 triangles). Gives finer
/// resolution control than the dyadic refinement ladder.
Mesh2D generate_disk_mesh_rings(int rings);

/// Uniform quadrisection; tags inherited, boundary re-snapped for disk meshes.
Mesh2D refine(const Mesh2D& mesh);

/// Retags boundary edges: an edge is Neumann iff its midpoint angle lies in
/// one of the (disjoint) arcs; everything else is Dirichlet.
Mesh2D tag_boundary(const Mesh2D& mesh, const std::vector<AngularInterval>& neumann_arcs);

/// Plain-text serialization (vertex / triangle / tagged-edge lines).
void write_mesh(const Mesh2D& mesh, std::ostream& out);
Mesh2D read_mesh(std::istream& in);

} // namespace hvar
