#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/LU>

#include "hvar/deform.hpp"
#include "hvar/errors.hpp"
#include "hvar/mesh.hpp"

using namespace hvar;
using complexd = std::complex<double>;

namespace {

std::vector<Eigen::Vector2d> seeded_disk_points(int n, std::uint64_t seed = 20240811ULL) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Eigen::Vector2d> pts;
    while ((int)pts.size() < n) {
        Eigen::Vector2d p(u(rng), u(rng));
        if (p.norm() < 0.95) pts.push_back(p);
    }
    return pts;
}

/// Richardson-extrapolated central difference of a holomorphic map along the
/// real direction.
complexd central_derivative(const HolomorphicMap& f, complexd z) {
    double h = 1e-3;
    auto diff = [&](double step) { return (f.value(z + step) - f.value(z - step)) / (2.0 * step); };
    complexd d1 = diff(h), d2 = diff(h / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace

TEST_SUITE_BEGIN("deform");

TEST_CASE("Poly2 evaluates, differentiates and multiplies exactly") {
    // p = 3 + 2 x y - x^2 y^3
    Poly2 p = Poly2::constant(3.0) + Poly2::monomial(1, 1, 2.0) + Poly2::monomial(2, 3, -1.0);
    Eigen::Vector2d at(0.5, -2.0);
    CHECK(p(at) == doctest::Approx(3.0 + 2.0 * 0.5 * -2.0 - 0.25 * -8.0).epsilon(1e-15));
    CHECK(p.dx()(at) == doctest::Approx(2.0 * -2.0 - 2.0 * 0.5 * -8.0).epsilon(1e-15));
    CHECK(p.dy()(at) == doctest::Approx(2.0 * 0.5 - 0.25 * 3.0 * 4.0).epsilon(1e-15));

    Poly2 q = Poly2::monomial(1, 0, 1.0) - Poly2::monomial(0, 1, 4.0);
    Eigen::Vector2d at2(-1.25, 0.75);
    CHECK((p * q)(at2) == doctest::Approx(p(at2) * q(at2)).epsilon(1e-14));
}

TEST_CASE("catalog fields and their advected fields") {
    Eigen::Vector2d x(0.3, -0.7);

    SUBCASE("scaling: (v.grad)v = v") {
        VectorField2 v = VectorField2::scaling();
        VectorField2 r = v.advected();
        CHECK((r.value(x) - x).norm() == 0.0);
        CHECK((v.jacobian(x) - Eigen::Matrix2d::Identity()).norm() == 0.0);
    }

    SUBCASE("rotation: (v.grad)v = -x and the Jacobian is antisymmetric") {
        VectorField2 v = VectorField2::rotation();
        VectorField2 r = v.advected();
        CHECK((r.value(x) + x).norm() == 0.0);
        Eigen::Matrix2d J = v.jacobian(x);
        CHECK((J + J.transpose()).norm() == 0.0);
        CHECK(v.divergence(x) == 0.0);
        // the contraction DS^T : DS = tr((DS)^2) is -2 for a rotation
        CHECK((J * J).trace() == doctest::Approx(-2.0));
    }

    SUBCASE("translation: zero Jacobian") {
        VectorField2 v = VectorField2::translation(0.4, -1.0);
        CHECK(v.jacobian(x).norm() == 0.0);
        CHECK(v.advected().value(x).norm() == 0.0);
    }
}

TEST_CASE("holomorphic derivative agrees with a central difference at 100 points") {
    auto maps = {HolomorphicMap::identity(), HolomorphicMap::cosine(),
                 HolomorphicMap::exponential(),
                 HolomorphicMap::power_series({{0.0, 0.0}, {1.0, 0.0}, {0.25, 0.1}, {-0.05, 0.02}})};
    auto pts = seeded_disk_points(100);
    for (const auto& f : maps) {
        for (const auto& p : pts) {
            complexd z(p.x(), p.y());
            complexd fd = central_derivative(f, z);
            CHECK(std::abs(f.derivative(z) - fd) <= 1e-8);
        }
    }
}

TEST_CASE("power series coefficient a_1 must be real") {
    CHECK_THROWS_AS(HolomorphicMap::power_series({{0.0, 0.0}, {1.0, 0.5}}), ConfigError);
    CHECK(HolomorphicMap::power_series({{0.0, 0.0}, {0.8, 0.0}}).a1() == doctest::Approx(0.8));
    CHECK(HolomorphicMap::exponential().a1() == doctest::Approx(1.0));
    CHECK(HolomorphicMap::cosine().a1() == doctest::Approx(0.0));
}

TEST_CASE("series coefficients match the catalog expansions") {
    auto ce = HolomorphicMap::exponential().series_coefficients(6);
    double fact = 1.0;
    for (int k = 0; k <= 6; ++k) {
        if (k > 0) fact *= k;
        CHECK(ce[k].real() == doctest::Approx(1.0 / fact).epsilon(1e-15));
    }
    auto cc = HolomorphicMap::cosine().series_coefficients(6);
    CHECK(cc[0].real() == doctest::Approx(1.0));
    CHECK(cc[1].real() == 0.0);
    CHECK(cc[2].real() == doctest::Approx(-0.5));
    CHECK(cc[4].real() == doctest::Approx(1.0 / 24.0));
    CHECK(cc[6].real() == doctest::Approx(-1.0 / 720.0));
}

TEST_CASE("identity family Jacobian data is exactly the identity") {
    DeformationFamily d = ConformalBlend{HolomorphicMap::identity()};
    for (double t : {-0.5, 0.0, 0.7}) {
        JacobianData j = eval_jacobian(d, t, {0.3, 0.4});
        CHECK((j.DT - Eigen::Matrix2d::Identity()).norm() == 0.0);
        CHECK(j.a == 1.0);
        CHECK((j.Q - Eigen::Matrix2d::Identity()).norm() == 0.0);
    }
}

TEST_CASE("conformal exp blend at t=1 has weight e^{2 Re z}") {
    DeformationFamily d = ConformalBlend{HolomorphicMap::exponential()};
    for (const auto& p : seeded_disk_points(20)) {
        JacobianData j = eval_jacobian(d, 1.0, p);
        CHECK(j.a == doctest::Approx(std::exp(2.0 * p.x())).epsilon(1e-13));
        // conformal consistency Q = a^{-1} E
        CHECK((j.Q * j.a - Eigen::Matrix2d::Identity()).norm() < 1e-13);
        REQUIRE(j.da_dt.has_value());
        REQUIRE(j.d2a_dt2.has_value());
    }
}

TEST_CASE("conformal cos blend second weight derivative is 2|f'-1|^2") {
    ConformalBlend blend{HolomorphicMap::cosine()};
    for (const auto& p : seeded_disk_points(20)) {
        complexd z(p.x(), p.y());
        double expected = 2.0 * std::norm(-std::sin(z) - 1.0);
        CHECK(blend.weight_dtt(z) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(blend.weight_dtt(z) >= 0.0);
    }
}

TEST_CASE("weight derivatives match finite differences of the weight in t") {
    ConformalBlend blend{HolomorphicMap::cosine()};
    complexd z(0.35, -0.2);
    double t = 0.1, h = 1e-5;
    double fd1 = (blend.weight(z, t + h) - blend.weight(z, t - h)) / (2 * h);
    double fd2 =
        (blend.weight(z, t + h) - 2 * blend.weight(z, t) + blend.weight(z, t - h)) / (h * h);
    CHECK(blend.weight_dt(z, t) == doctest::Approx(fd1).epsilon(1e-9));
    CHECK(blend.weight_dtt(z) == doctest::Approx(fd2).epsilon(1e-5));
}

TEST_CASE("general family det/Q consistency at random points") {
    VectorField2 S;
    S.x = Poly2::monomial(1, 0, 0.3) + Poly2::monomial(0, 2, -0.2);
    S.y = Poly2::monomial(1, 1, 0.5) + Poly2::monomial(0, 1, 0.1);
    VectorField2 R;
    R.x = Poly2::monomial(2, 0, 0.4);
    R.y = Poly2::monomial(1, 0, -0.3);
    DeformationFamily d = GeneralDeformation{S, R};
    for (const auto& p : seeded_disk_points(30)) {
        JacobianData j = eval_jacobian(d, 0.23, p);
        CHECK(j.a == doctest::Approx(j.DT.determinant()).epsilon(1e-14));
        CHECK((j.Q * (j.DT.transpose() * j.DT) - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    }
}

TEST_CASE("folding deformation raises NonPositiveJacobian") {
    VectorField2 S;
    S.x = Poly2::monomial(1, 0, -1.0); // T_t = ((1-t) x, y)
    S.y = Poly2();
    DeformationFamily d = GeneralDeformation{S, VectorField2::zero()};
    CHECK_NOTHROW(eval_jacobian(d, 0.5, {0.2, 0.2}));
    CHECK_THROWS_AS(eval_jacobian(d, 1.5, {0.2, 0.2}), NonPositiveJacobian);
}

TEST_CASE("flow map closed forms") {
    Eigen::Vector2d x(0.4, -0.1);

    SUBCASE("zero field is the identity") {
        FlowDeformation f = FlowDeformation::generic(VectorField2::zero());
        FlowMapResult r = flow_map(f, 0.8, x);
        CHECK((r.image - x).norm() == 0.0);
        CHECK((r.DT - Eigen::Matrix2d::Identity()).norm() == 0.0);
    }

    SUBCASE("scaling field integrates to e^t x") {
        FlowDeformation f = FlowDeformation::generic(VectorField2::scaling());
        double t = 0.5;
        FlowMapResult r = flow_map(f, t, x);
        CHECK((r.image - std::exp(t) * x).norm() < 5e-9);
        CHECK((r.DT - std::exp(t) * Eigen::Matrix2d::Identity()).norm() < 5e-9);
    }

    SUBCASE("rotation field integrates to a rotation matrix with unit determinant") {
        FlowDeformation f = FlowDeformation::solenoidal(VectorField2::rotation());
        double t = 0.3;
        FlowMapResult r = flow_map(f, t, x);
        Eigen::Matrix2d rot;
        rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        CHECK((r.image - rot * x).norm() < 5e-9);
        CHECK((r.DT - rot).norm() < 5e-9);
        CHECK(r.DT.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("group property T_t o T_s = T_{t+s}") {
        VectorField2 v;
        v.x = Poly2::monomial(0, 1, 1.0) + Poly2::monomial(2, 0, -0.4);
        v.y = Poly2::monomial(1, 0, -0.6) + Poly2::monomial(1, 1, 0.2);
        FlowDeformation f = FlowDeformation::generic(v);
        double t = 0.22, s = 0.13;
        Eigen::Vector2d once = flow_map(f, t + s, x).image;
        Eigen::Vector2d twice = flow_map(f, s, flow_map(f, t, x).image).image;
        CHECK((once - twice).norm() < 1e-9);
    }

    SUBCASE("escaping trajectory is detected") {
        VectorField2 v;
        v.x = Poly2::monomial(1, 0, 10.0);
        v.y = Poly2::monomial(0, 1, 10.0);
        FlowDeformation f = FlowDeformation::generic(v);
        CHECK_THROWS_AS(flow_map(f, 1.0, {0.5, 0.5}), TrajectoryEscape);
    }
}

TEST_CASE("expansion fields") {
    SUBCASE("general family returns its own fields") {
        GeneralDeformation g{VectorField2::scaling(), VectorField2::rotation()};
        auto [S, R] = expansion_fields(DeformationFamily{g});
        Eigen::Vector2d x(0.2, 0.9);
        CHECK((S.value(x) - x).norm() == 0.0);
        CHECK((R.value(x) - Eigen::Vector2d(-0.9, 0.2)).norm() == 0.0);
    }

    SUBCASE("scaling flow has R = x") {
        auto [S, R] =
            expansion_fields(DeformationFamily{FlowDeformation::generic(VectorField2::scaling())});
        Eigen::Vector2d x(-0.4, 0.25);
        CHECK((S.value(x) - x).norm() == 0.0);
        CHECK((R.value(x) - x).norm() == 0.0);
    }

    SUBCASE("rotation flow has R = -x") {
        auto [S, R] = expansion_fields(
            DeformationFamily{FlowDeformation::solenoidal(VectorField2::rotation())});
        Eigen::Vector2d x(0.7, 0.1);
        CHECK((R.value(x) + x).norm() == 0.0);
    }

    SUBCASE("conformal blends are unsupported") {
        CHECK_THROWS_AS(
            expansion_fields(DeformationFamily{ConformalBlend{HolomorphicMap::cosine()}}),
            UnsupportedFamily);
    }
}

TEST_CASE("solenoidal construction rejects fields with divergence") {
    CHECK_THROWS_AS(FlowDeformation::solenoidal(VectorField2::scaling()), CategoryMismatch);
    // stream-function field (x^2 - y^2, -2xy) is exactly divergence free
    VectorField2 v;
    v.x = Poly2::monomial(2, 0, 1.0) + Poly2::monomial(0, 2, -1.0);
    v.y = Poly2::monomial(1, 1, -2.0);
    CHECK_NOTHROW(FlowDeformation::solenoidal(v));
}

TEST_CASE("gradient flow Hessian data") {
    SUBCASE("mu = |x|^2/2") {
        Poly2 mu = Poly2::monomial(2, 0, 0.5) + Poly2::monomial(0, 2, 0.5);
        FlowDeformation f = FlowDeformation::gradient(mu);
        GradientFlowData g = gradient_flow_data(f, {0.3, -0.6});
        CHECK((g.H - Eigen::Matrix2d::Identity()).norm() == 0.0);
        CHECK(g.trH == doctest::Approx(2.0));
        CHECK((g.K - 2.0 * Eigen::Matrix2d::Identity()).norm() == 0.0);
        CHECK(g.trK == doctest::Approx(4.0));
        CHECK(0.5 * g.trK - g.H_sq == doctest::Approx(0.0));
    }

    SUBCASE("harmonic quadratic: tr H = 0 and tr K / 2 = |H|^2") {
        Poly2 mu = Poly2::monomial(2, 0, 0.5) + Poly2::monomial(0, 2, -0.5);
        FlowDeformation f = FlowDeformation::gradient(mu);
        for (const auto& p : seeded_disk_points(10)) {
            GradientFlowData g = gradient_flow_data(f, p);
            CHECK(g.trH == doctest::Approx(0.0));
            CHECK(0.5 * g.trK == doctest::Approx(g.H_sq).epsilon(1e-14));
        }
    }

    SUBCASE("linear potential: everything vanishes") {
        Poly2 mu = Poly2::monomial(1, 0, 1.7);
        GradientFlowData g = gradient_flow_data(FlowDeformation::gradient(mu), {0.1, 0.2});
        CHECK(g.H.norm() == 0.0);
        CHECK(g.K.norm() == 0.0);
    }

    SUBCASE("pointwise identity (v.grad)(div v) = tr K / 2 - |H|^2") {
        Poly2 mu = Poly2::monomial(3, 1, 0.4) + Poly2::monomial(2, 2, -0.25) +
                   Poly2::monomial(1, 0, 0.3) + Poly2::monomial(0, 4, 0.15);
        FlowDeformation f = FlowDeformation::gradient(mu);
        Poly2 divv = mu.dx().dx() + mu.dy().dy();
        for (const auto& p : seeded_disk_points(25)) {
            GradientFlowData g = gradient_flow_data(f, p);
            double advected_div = mu.dx()(p) * divv.dx()(p) + mu.dy()(p) * divv.dy()(p);
            CHECK(advected_div == doctest::Approx(0.5 * g.trK - g.H_sq).epsilon(1e-12));
        }
    }
}

TEST_CASE("rings mesh construction is valid at non-dyadic resolutions") {
    Mesh2D m = generate_disk_mesh_rings(10);
    m.validate();
    CHECK(m.num_triangles() == 600);
    CHECK(m.boundary_edges.size() == 60);
    CHECK(std::abs(m.total_area() - 3.14159265358979) < 2e-2);
}

TEST_SUITE_END();
