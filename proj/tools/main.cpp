#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hvar/config.hpp"
#include "hvar/errors.hpp"
#include "hvar/output.hpp"
#include "hvar/reproduce.hpp"
#include "hvar/verify.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hvar;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    int level = -1;
    int modes = -1;
    double fd_step = -1.0;
    bool debug_variation = false;
};

RunConfig load_config(const CliOptions& cli) {
    RunConfig cfg = cli.config_path.empty() ? RunConfig{} : RunConfig::load(cli.config_path);
    if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
    if (cli.level >= 0) cfg.mesh_level = cli.level;
    if (cli.modes >= 1) cfg.modes = cli.modes;
    if (cli.fd_step > 0.0) cfg.fd_step = cli.fd_step;
    cfg.validate();
    return cfg;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

int cmd_mesh(const CliOptions& cli) {
    RunConfig cfg = load_config(cli);
    fs::path dir = ensure_out_dir(cfg);
    Mesh2D mesh = tag_boundary(generate_disk_mesh(cfg.mesh_level), cfg.neumann_arcs);
    mesh.validate();
    std::ofstream out(dir / "mesh.txt", std::ios::binary);
    write_mesh(mesh, out);
    std::cout << "mesh: level " << cfg.mesh_level << ", " << mesh.num_vertices() << " vertices, "
              << mesh.num_triangles() << " triangles, area " << mesh.total_area() << "\n"
              << "wrote " << (dir / "mesh.txt").string() << "\n";
    return kExitOk;
}

int cmd_solve(const CliOptions& cli) {
    RunConfig cfg = load_config(cli);
    fs::path dir = ensure_out_dir(cfg);
    Problem p = cfg.problem();
    for (double t : cfg.grid()) {
        Spectrum s = solve_at(p, t);
        std::string stem = "spectrum_t" + format_double(t);
        std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
        write_spectrum_csv(s, t, csv);
        write_file(dir / (stem + ".json"), spectrum_json(s, t));
        std::cout << "t = " << t << ":";
        for (const auto& pr : s.pairs) std::cout << ' ' << pr.lambda;
        std::cout << '\n';
    }
    return kExitOk;
}

int cmd_sweep(const CliOptions& cli) {
    RunConfig cfg = load_config(cli);
    fs::path dir = ensure_out_dir(cfg);
    Problem p = cfg.problem();
    SweepResult sw = sweep(p, cfg.grid());

    std::ofstream csv(dir / "sweep.csv", std::ios::binary);
    write_sweep_csv(sw, csv);

    std::vector<double> ts, l1, inv;
    for (const auto& pt : sw.points) {
        ts.push_back(pt.t);
        l1.push_back(pt.lambdas.at(0));
        inv.push_back(pt.inv_lambda1);
    }
    bool certified = !sw.points.empty();
    for (const auto& pt : sw.points)
        certified = certified && pt.report && pt.report->certificate_12;
    {
        std::ofstream svg(dir / "sweep_lambda1.svg", std::ios::binary);
        write_svg_plot(ts, {{"lambda_1(t)", "#1f6fb2", l1}}, "first eigenvalue", svg);
        std::ofstream svg2(dir / "sweep_inv_lambda1.svg", std::ios::binary);
        write_svg_plot(ts, {{"1/lambda_1(t)", "#b23a1f", inv}},
                       std::string("reciprocal of the first eigenvalue") +
                           (certified ? " [certificate: convex]" : ""),
                       svg2);
    }

    if (sw.truncated_at) {
        std::cerr << "sweep truncated at t = " << *sw.truncated_at << ": "
                  << sw.truncation_message << "\n";
        return kExitNumericalError;
    }
    std::cout << "sweep: " << sw.points.size() << " points written to "
              << (dir / "sweep.csv").string() << "\n";
    return kExitOk;
}

int cmd_variation(const CliOptions& cli) {
    RunConfig cfg = load_config(cli);
    fs::path dir = ensure_out_dir(cfg);
    Problem p = cfg.problem();
    VariationOptions opts;
    opts.with_fd = true;
    opts.fd_step = cfg.fd_step;
    opts.debug_both_readings = cli.debug_variation;
    VariationReport r = variation_report(p, cfg.grid_count == 1 ? cfg.grid_start : 0.0, opts);
    std::string json = variation_report_json(r);
    write_file(dir / "variation.json", json);
    std::cout << json;
    return kExitOk;
}

int cmd_verify(const CliOptions& cli) {
    RunConfig cfg = load_config(cli);
    fs::path dir = ensure_out_dir(cfg);
    Problem p = cfg.problem();
    const auto* blend = std::get_if<ConformalBlend>(&p.family);
    if (!blend)
        throw ConfigError("verification suite expects a conformal deformation");
    VerifySuite suite = run_standard_verification(p, *blend, cfg.grid());
    write_file(dir / "verify.json", suite_json(suite));
    print_suite(suite, std::cout);
    return suite.all_pass() ? kExitOk : kExitCheckFailure;
}

int cmd_reproduce(const CliOptions& cli, const std::string& name) {
    RunConfig cfg = load_config(cli);
    fs::path dir = ensure_out_dir(cfg);
    if (name == "table1") {
        SolveOptions solve;
        solve.seed = cfg.seed;
        Table1Result r = reproduce_table1(cfg.mesh_level, solve);
        write_file(dir / "table1.json", table1_json(r));
        std::ofstream csv(dir / "table1.csv", std::ios::binary);
        write_table1_csv(r, csv);
        std::cout << table1_json(r);
        return r.within_tolerance ? kExitOk : kExitCheckFailure;
    }
    if (name == "figure2") {
        Figure2Result r = reproduce_figure2(cfg.mesh_level);
        std::ofstream csv(dir / "figure2_sweep.csv", std::ios::binary);
        write_sweep_csv(r.sweep, csv);
        std::vector<double> ts, l1, inv;
        for (const auto& pt : r.sweep.points) {
            ts.push_back(pt.t);
            l1.push_back(pt.lambdas.at(0));
            inv.push_back(pt.inv_lambda1);
        }
        std::ofstream svg(dir / "figure2_lambda1.svg", std::ios::binary);
        write_svg_plot(ts, {{"lambda_1(t)", "#1f6fb2", l1}}, "first eigenvalue, cos blend", svg);
        std::ofstream svg2(dir / "figure2_inv_lambda1.svg", std::ios::binary);
        write_svg_plot(ts, {{"1/lambda_1(t)", "#b23a1f", inv}},
                       std::string("reciprocal [convexity check: ") +
                           (r.convexity.pass ? "PASS]" : "FAIL]"),
                       svg2);
        std::cout << "figure2: worst interior second difference " << r.convexity.lhs
                  << " (tolerance " << -r.convexity.tolerance << ")\n";
        return r.convexity.pass ? kExitOk : kExitCheckFailure;
    }
    if (name == "figure1") {
        Figure1Result r = reproduce_figure1(cfg.mesh_level);
        for (size_t i = 0; i < r.ts.size(); ++i) {
            char label[64];
            std::snprintf(label, sizeof(label), "t = %+.2f", r.ts[i]);
            char fname[64];
            std::snprintf(fname, sizeof(fname), "figure1_%02zu.svg", i);
            std::ofstream svg(dir / fname, std::ios::binary);
            write_svg_outline(r.outlines[i], label, svg);
        }
        std::cout << "figure1: " << r.ts.size() << " outlines (" << r.note << ") in "
                  << dir.string() << "\n";
        return kExitOk;
    }
    throw ConfigError("unknown reproduction target '" + name +
                      "' (expected table1, figure2 or figure1)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-element laboratory for eigenvalue variations under domain deformations"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions cli;
    app.add_option("--config", cli.config_path, "config file (JSON)");
    app.add_option("--out", cli.out_dir, "output directory override");
    app.add_option("--level", cli.level, "mesh refinement level override");
    app.add_option("--modes", cli.modes, "mode count override");
    app.add_option("--fd-step", cli.fd_step, "finite-difference step override");
    app.add_flag("--debug-variation", cli.debug_variation,
                 "emit both readings of the second-variation formula");

    auto* mesh_cmd = app.add_subcommand("mesh", "generate and export the tagged mesh");
    auto* solve_cmd = app.add_subcommand("solve", "solve the spectrum on the parameter grid");
    auto* sweep_cmd = app.add_subcommand("sweep", "eigenvalue sweep with plots");
    auto* variation_cmd = app.add_subcommand("variation", "variation report with FD oracle");
    auto* verify_cmd = app.add_subcommand("verify", "run the verification checks");
    auto* reproduce_cmd = app.add_subcommand("reproduce", "regenerate a bundled experiment");
    std::string target;
    reproduce_cmd->add_option("name", target, "table1 | figure2 | figure1")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (mesh_cmd->parsed()) return cmd_mesh(cli);
        if (solve_cmd->parsed()) return cmd_solve(cli);
        if (sweep_cmd->parsed()) return cmd_sweep(cli);
        if (variation_cmd->parsed()) return cmd_variation(cli);
        if (verify_cmd->parsed()) return cmd_verify(cli);
        if (reproduce_cmd->parsed()) return cmd_reproduce(cli, target);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalError;
    }
    return kExitConfigError;
}
