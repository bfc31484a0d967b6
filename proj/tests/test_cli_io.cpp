#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hvar/output.hpp"
#include "hvar/reproduce.hpp"

using namespace hvar;

namespace {

Problem small_disk(DeformationFamily family) {
    Problem p;
    p.mesh = generate_disk_mesh(2);
    p.family = std::move(family);
    p.solve.modes = 2;
    return p;
}

} // namespace

TEST_SUITE_BEGIN("cli_io");

TEST_CASE("spectrum CSV carries the documented columns and repeated runs are byte-identical") {
    Problem p = small_disk(ConformalBlend{HolomorphicMap::identity()});
    Spectrum s1 = solve_at(p, 0.0);
    Spectrum s2 = solve_at(p, 0.0);
    std::ostringstream a, b;
    write_spectrum_csv(s1, 0.0, a);
    write_spectrum_csv(s2, 0.0, b);
    std::string csv = a.str();
    CHECK(csv == b.str());
    CHECK(csv.rfind("t,index,lambda,residual,gap\n", 0) == 0);
    // two rows plus header
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("sweep CSV layout") {
    Problem p = small_disk(ConformalBlend{HolomorphicMap::cosine()});
    SweepResult sw = sweep(p, {-0.1, 0.0, 0.1});
    std::ostringstream out;
    write_sweep_csv(sw, out);
    std::string header;
    std::istringstream in(out.str());
    std::getline(in, header);
    CHECK(header ==
          "t,lambda_1,lambda_2,inv_lambda_1,d2_inv_lambda_1,lambda_dot,lambda_ddot_exact,"
          "lambda_ddot_bound,certificate");
    std::string row;
    std::getline(in, row);
    // endpoint rows carry an empty second-difference cell
    CHECK(row.find(",,") != std::string::npos);
}

TEST_CASE("variation report JSON includes the FD block when present") {
    Problem p = small_disk(ConformalBlend{HolomorphicMap::cosine()});
    VariationOptions opts;
    opts.with_fd = true;
    opts.fd_step = 1e-3;
    VariationReport r = variation_report(p, 0.0, opts);
    std::string j = variation_report_json(r);
    CHECK(j.find("\"fd\"") != std::string::npos);
    CHECK(j.find("lambda_ddot_bound") != std::string::npos);
    CHECK(j.find("certificate_12") != std::string::npos);
}

TEST_CASE("suite JSON flags the aggregate") {
    VerifySuite suite;
    suite.checks.push_back(make_check("demo", 1.0, 0.0, 0.0));
    std::string j = suite_json(suite);
    CHECK(j.find("\"all_pass\": true") != std::string::npos);
}

TEST_CASE("SVG plot output is self-contained") {
    std::vector<double> x = {0.0, 0.5, 1.0};
    SvgSeries s;
    s.label = "demo";
    s.y = {1.0, 0.5, 2.0};
    std::ostringstream out;
    write_svg_plot(x, {s}, "demo plot", out);
    std::string svg = out.str();
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos); // no external references
}

TEST_CASE("table1 reproduction stays within the documented tolerance") {
    SolveOptions solve;
    solve.dense_threshold = 200; // iterative path keeps this test quick
    Table1Result r = reproduce_table1(4, solve);
    CHECK(r.within_tolerance);
    CHECK(r.disk.max_rel_deviation <= kReferenceRelTol);
    CHECK(r.image.max_rel_deviation <= kReferenceRelTol);
    REQUIRE(r.disk.computed.size() == 5);
    REQUIRE(r.image.computed.size() == 5);
    CHECK(r.disk.rings == 16);
    CHECK(r.image.rings == kReferenceMatchedRings);

    std::ostringstream csv;
    write_table1_csv(r, csv);
    std::string table = csv.str();
    CHECK(std::count(table.begin(), table.end(), '\n') == 11);
    std::string j = table1_json(r);
    CHECK(j.find("\"within_tolerance\": true") != std::string::npos);
}

TEST_CASE("table1 deviations shrink monotonically over coarse refinement levels") {
    SolveOptions solve;
    solve.dense_threshold = 200;
    double prev = 1e9;
    for (int level : {2, 3, 4}) {
        Table1Result r = reproduce_table1(level, solve);
        CHECK(r.disk.max_rel_deviation < prev);
        prev = r.disk.max_rel_deviation;
    }
}

TEST_CASE("figure1 outlines: 11 frames at 0.04 spacing") {
    Figure1Result r = reproduce_figure1(2);
    REQUIRE(r.ts.size() == 11);
    REQUIRE(r.outlines.size() == 11);
    CHECK(r.ts.front() == doctest::Approx(-0.2));
    CHECK(r.ts.back() == doctest::Approx(0.2));
    for (size_t i = 1; i < r.ts.size(); ++i)
        CHECK(r.ts[i] - r.ts[i - 1] == doctest::Approx(0.04));
    // the middle frame is the unit circle itself
    for (const auto& v : r.outlines[5]) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    std::ostringstream svg;
    write_svg_outline(r.outlines[0], "t=-0.2", svg);
    CHECK(svg.str().find("polygon") != std::string::npos);
}

TEST_CASE("figure2 sweep certifies convexity on a coarse mesh") {
    Figure2Result r = reproduce_figure2(2, 7, -0.2, 0.2);
    CHECK(r.convexity.pass);
    CHECK(!r.sweep.truncated_at);
    REQUIRE(r.sweep.points.size() == 7);
}

TEST_SUITE_END();
