#pragma once

#include <string>
#include <vector>

#include "hvar/hadamard.hpp"

namespace hvar {

/// One experiment, fully described: mesh, deformation, parameter grid and
/// numerical knobs. Serializes losslessly to and from JSON.
struct RunConfig {
    int mesh_level = 4;
    std::vector<AngularInterval> neumann_arcs;

    /// Deformation catalog entry, e.g. {"family":"conformal","map":"cos"};
    /// kept as the parsed JSON text so configs round-trip byte-exactly.
    std::string deformation_json = R"({"family":"conformal","map":"identity"})";

    double grid_start = -0.2;
    double grid_stop = 0.2;
    int grid_count = 11;

    int modes = 5;
    double eig_residual_tol = 1e-10;
    double gap_rel_threshold = 1e-6;
    double fd_step = 1e-3;
    double sweep_convexity_rel = 1e-6;
    int quadrature_degree = 4;
    int dense_threshold = 3000;
    int max_iterations = 400;
    std::uint64_t seed = 0x5eedULL;
    std::string out_dir = "out";

    void validate() const;

    std::vector<double> grid() const;
    DeformationFamily deformation() const;
    Problem problem() const;

    static RunConfig from_json_text(const std::string& text);
    static RunConfig load(const std::string& path);
    std::string to_json_text() const;
    void save(const std::string& path) const;
};

/// Parses one deformation catalog entry (JSON object text).
DeformationFamily parse_deformation(const std::string& json_text);

} // namespace hvar
