#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hvar/eig.hpp"
#include "hvar/hadamard.hpp"
#include "hvar/verify.hpp"

namespace hvar {

void write_spectrum_csv(const Spectrum& s, double t, std::ostream& out);
std::string spectrum_json(const Spectrum& s, double t);

void write_sweep_csv(const SweepResult& sw, std::ostream& out);

std::string variation_report_json(const VariationReport& r);
std::string suite_json(const VerifySuite& suite);

/// Minimal self-contained SVG line plot: one or more polylines over a common
/// x grid, with axes and tick labels.
struct SvgSeries {
    std::string label;
    std::string color = "#1f6fb2";
    std::vector<double> y;
};

void write_svg_plot(const std::vector<double>& x, const std::vector<SvgSeries>& series,
                    const std::string& title, std::ostream& out);

/// Closed-outline SVG of a mapped boundary polygon (deformed domain image).
void write_svg_outline(const std::vector<Eigen::Vector2d>& polygon, const std::string& title,
                       std::ostream& out);

/// Formats a double with round-trip precision (shared by the CSV writers).
std::string format_double(double v);

} // namespace hvar
