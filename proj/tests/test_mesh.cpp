#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hvar/errors.hpp"
#include "hvar/mesh.hpp"

using namespace hvar;

namespace {

constexpr double kPi = 3.14159265358979323846;

int count_tag(const Mesh2D& m, BoundaryTag tag) {
    int n = 0;
    for (const auto& e : m.boundary_edges)
        if (e.tag == tag) ++n;
    return n;
}

/// Exact integral of the barycentric monomial l0^a l1^b l2^c over a triangle
/// of given area: 2 area a! b! c! / (a + b + c + 2)!.
double bary_monomial_integral(int a, int b, int c, double area) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    return 2.0 * area * fact(a) * fact(b) * fact(c) / fact(a + b + c + 2);
}

} // namespace

TEST_SUITE_BEGIN("mesh");

TEST_CASE("level-0 disk mesh is a hexagonal fan on the unit circle") {
    Mesh2D m = generate_disk_mesh(0);
    m.validate();
    CHECK(m.num_triangles() >= 6);
    CHECK(m.num_triangles() == 6);
    CHECK(m.boundary_edges.size() == 6);
    for (const auto& mask = m.boundary_vertex_mask(); const auto& e : m.boundary_edges) {
        CHECK(mask[e.a]);
        CHECK(m.vertices[e.a].norm() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(m.vertices[e.b].norm() == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(count_tag(m, BoundaryTag::Dirichlet) == 6);
}

TEST_CASE("refinement quadruples triangles and snaps boundary midpoints") {
    Mesh2D m = generate_disk_mesh(0);
    for (int level = 1; level <= 3; ++level) {
        m = refine(m);
        m.validate();
        CHECK(m.num_triangles() == 6 * (1 << (2 * level)));
        for (const auto& e : m.boundary_edges) {
            CHECK(m.vertices[e.a].norm() == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(m.vertices[e.b].norm() == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    CHECK(generate_disk_mesh(3).num_triangles() == m.num_triangles());
}

TEST_CASE("all triangles keep positive signed area after every operation") {
    Mesh2D m = generate_disk_mesh(4);
    for (int t = 0; t < m.num_triangles(); ++t) CHECK(m.signed_area(t) > 0.0);
    Mesh2D tagged = tag_boundary(m, {{0.0, kPi}});
    for (int t = 0; t < tagged.num_triangles(); ++t) CHECK(tagged.signed_area(t) > 0.0);
}

TEST_CASE("disk area converges to pi at second order") {
    std::vector<double> errors;
    for (int level : {2, 3, 4}) {
        Mesh2D m = generate_disk_mesh(level);
        errors.push_back(std::abs(m.total_area() - kPi));
    }
    CHECK(errors[1] / kPi < 1e-2); // relative error well under 1e-2 from level 3 on
    for (size_t i = 1; i < errors.size(); ++i) {
        double ratio = errors[i - 1] / errors[i];
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.0);
    }
}

TEST_CASE("tag partition always covers the boundary") {
    Mesh2D m = generate_disk_mesh(3);

    SUBCASE("empty arc list gives pure Dirichlet") {
        Mesh2D t = tag_boundary(m, {});
        CHECK(count_tag(t, BoundaryTag::Neumann) == 0);
        CHECK(count_tag(t, BoundaryTag::Dirichlet) == (int)t.boundary_edges.size());
        CHECK(t.has_dirichlet_edges());
    }

    SUBCASE("full circle gives pure Neumann, flagged via has_dirichlet_edges") {
        Mesh2D t = tag_boundary(m, {{0.0, 2.0 * kPi}});
        CHECK(count_tag(t, BoundaryTag::Dirichlet) == 0);
        CHECK(!t.has_dirichlet_edges());
        CHECK(t.has_neumann_edges());
    }

    SUBCASE("upper half circle splits by midpoint angle") {
        Mesh2D t = tag_boundary(m, {{0.0, kPi}});
        int nn = count_tag(t, BoundaryTag::Neumann);
        int nd = count_tag(t, BoundaryTag::Dirichlet);
        CHECK(nn + nd == (int)t.boundary_edges.size());
        CHECK(nn == nd); // symmetric mesh, half the midpoints in the upper arc
        for (const auto& e : t.boundary_edges) {
            Eigen::Vector2d mid = 0.5 * (t.vertices[e.a] + t.vertices[e.b]);
            bool upper = std::atan2(mid.y(), mid.x()) >= 0.0;
            CHECK((e.tag == BoundaryTag::Neumann) == upper);
        }
        t.validate();
    }

    SUBCASE("overlapping arcs are rejected") {
        CHECK_THROWS_AS(tag_boundary(m, {{0.0, kPi}, {kPi / 2, kPi}}), ConfigError);
    }

    SUBCASE("wrapping arc crosses the positive x axis") {
        Mesh2D t = tag_boundary(m, {{1.5 * kPi, kPi}}); // covers [3pi/2, 2pi) + [0, pi/2)
        for (const auto& e : t.boundary_edges) {
            Eigen::Vector2d mid = 0.5 * (t.vertices[e.a] + t.vertices[e.b]);
            bool right = mid.x() > 0.0;
            CHECK((e.tag == BoundaryTag::Neumann) == right);
        }
    }
}

TEST_CASE("refinement inherits tags") {
    Mesh2D m = tag_boundary(generate_disk_mesh(2), {{0.0, kPi}});
    int nn = count_tag(m, BoundaryTag::Neumann);
    Mesh2D r = refine(m);
    CHECK(count_tag(r, BoundaryTag::Neumann) == 2 * nn);
    r.validate();
}

TEST_CASE("quadrature rules are exact to their declared degree") {
    for (int degree : {1, 2, 4}) {
        QuadratureRule q = QuadratureRule::of_degree(degree);
        double wsum = 0.0;
        for (double w : q.weights) {
            CHECK(w > 0.0);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));

        // exactness on the reference triangle (area 1/2)
        for (int a = 0; a + 0 <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) {
                double quad = 0.0;
                for (size_t i = 0; i < q.points.size(); ++i)
                    quad += 0.5 * q.weights[i] * std::pow(q.points[i][0], a) *
                            std::pow(q.points[i][1], b);
                double exact = bary_monomial_integral(a, b, 0, 0.5);
                CHECK(quad == doctest::Approx(exact).epsilon(1e-13));
            }
    }
}

TEST_CASE("mesh serialization round-trips") {
    Mesh2D m = tag_boundary(generate_disk_mesh(2), {{0.5, 1.25}});
    std::stringstream ss;
    write_mesh(m, ss);
    Mesh2D back = read_mesh(ss);
    REQUIRE(back.num_vertices() == m.num_vertices());
    REQUIRE(back.num_triangles() == m.num_triangles());
    REQUIRE(back.boundary_edges.size() == m.boundary_edges.size());
    for (int v = 0; v < m.num_vertices(); ++v) {
        CHECK(back.vertices[v].x() == m.vertices[v].x());
        CHECK(back.vertices[v].y() == m.vertices[v].y());
    }
    for (size_t e = 0; e < m.boundary_edges.size(); ++e)
        CHECK(back.boundary_edges[e].tag == m.boundary_edges[e].tag);
    CHECK(back.refinement_level == m.refinement_level);
    CHECK(back.unit_disk == m.unit_disk);
}

TEST_CASE("level bounds are configuration errors") {
    CHECK_THROWS_AS(generate_disk_mesh(-1), ConfigError);
    CHECK_THROWS_AS(generate_disk_mesh(9), ConfigError);
}

TEST_SUITE_END();
