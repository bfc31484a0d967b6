#include "hvar/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace hvar {

namespace {

using nlohmann::json;

json variation_report_to_json(const VariationReport& r) {
    json j;
    j["t"] = r.t;
    j["lambda"] = r.lambda;
    j["lambda_dot"] = r.lambda_dot;
    j["lambda_ddot_exact"] = r.lambda_ddot_exact;
    j["lambda_ddot_bound"] = r.lambda_ddot_bound;
    j["inv_lambda_ddot"] = r.inv_lambda_ddot;
    j["corrector_energy"] = r.corrector_energy;
    j["gap"] = r.gap;
    j["certificate_12"] = r.certificate_12;
    j["scalars"] = {{"Adot", r.Adot}, {"Addot", r.Addot}, {"Bdot", r.Bdot}, {"Bddot", r.Bddot}};
    if (r.fd) {
        j["fd"] = {{"lambda_dot", r.fd->lambda_dot},
                   {"lambda_ddot", r.fd->lambda_ddot},
                   {"err_dot", r.fd->err_dot},
                   {"err_ddot", r.fd->err_ddot}};
    }
    if (r.lambda_ddot_mass_reading)
        j["lambda_ddot_mass_reading"] = *r.lambda_ddot_mass_reading;
    return j;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_spectrum_csv(const Spectrum& s, double t, std::ostream& out) {
    out << "t,index,lambda,residual,gap\n";
    double gap = s.pairs.size() >= 2 ? s.gap() : std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : s.pairs)
        out << format_double(t) << ',' << p.index << ',' << format_double(p.lambda) << ','
            << format_double(p.residual) << ',' << format_double(gap) << '\n';
}

std::string spectrum_json(const Spectrum& s, double t) {
    json j;
    j["t"] = t;
    j["shift_applied"] = s.shift_applied;
    json pairs = json::array();
    for (const auto& p : s.pairs)
        pairs.push_back({{"index", p.index}, {"lambda", p.lambda}, {"residual", p.residual}});
    j["pairs"] = pairs;
    if (s.pairs.size() >= 2) j["gap"] = s.gap();
    return j.dump(2) + "\n";
}

void write_sweep_csv(const SweepResult& sw, std::ostream& out) {
    size_t k = 0;
    for (const auto& p : sw.points) k = std::max(k, p.lambdas.size());
    out << "t";
    for (size_t i = 1; i <= k; ++i) out << ",lambda_" << i;
    out << ",inv_lambda_1,d2_inv_lambda_1,lambda_dot,lambda_ddot_exact,lambda_ddot_bound,"
           "certificate\n";
    for (size_t i = 0; i < sw.points.size(); ++i) {
        const auto& p = sw.points[i];
        out << format_double(p.t);
        for (size_t m = 0; m < k; ++m)
            out << ',' << (m < p.lambdas.size() ? format_double(p.lambdas[m]) : "");
        out << ',' << format_double(p.inv_lambda1);
        out << ',' << (sw.d2_inv_lambda1[i] ? format_double(*sw.d2_inv_lambda1[i]) : "");
        if (p.report) {
            out << ',' << format_double(p.report->lambda_dot) << ','
                << format_double(p.report->lambda_ddot_exact) << ','
                << format_double(p.report->lambda_ddot_bound) << ','
                << (p.report->certificate_12 ? 1 : 0);
        } else {
            out << ",,,,";
        }
        out << '\n';
    }
}

std::string variation_report_json(const VariationReport& r) {
    return variation_report_to_json(r).dump(2) + "\n";
}

std::string suite_json(const VerifySuite& suite) {
    json j;
    json checks = json::array();
    for (const auto& c : suite.checks) {
        json cj;
        cj["name"] = c.name;
        cj["lhs"] = c.lhs;
        cj["rhs"] = c.rhs;
        cj["margin"] = c.margin;
        cj["tolerance"] = c.tolerance;
        cj["pass"] = c.pass;
        cj["hypothesis_violated"] = c.hypothesis_violated;
        if (!c.annotation.empty()) cj["annotation"] = c.annotation;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    j["all_pass"] = suite.all_pass();
    return j.dump(2) + "\n";
}

namespace {

struct PlotFrame {
    double x0, x1, y0, y1;
    static constexpr double width = 640.0, height = 420.0;
    static constexpr double ml = 70.0, mr = 20.0, mt = 36.0, mb = 46.0;

    double px(double x) const {
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr);
    }
    double py(double y) const {
        return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb);
    }
};

void svg_header(std::ostream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << PlotFrame::width
        << "\" height=\"" << PlotFrame::height << "\" viewBox=\"0 0 " << PlotFrame::width << ' '
        << PlotFrame::height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << PlotFrame::width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

void write_svg_plot(const std::vector<double>& x, const std::vector<SvgSeries>& series,
                    const std::string& title, std::ostream& out) {
    PlotFrame f{};
    f.x0 = *std::min_element(x.begin(), x.end());
    f.x1 = *std::max_element(x.begin(), x.end());
    f.y0 = std::numeric_limits<double>::infinity();
    f.y1 = -std::numeric_limits<double>::infinity();
    for (const auto& s : series)
        for (double v : s.y) {
            f.y0 = std::min(f.y0, v);
            f.y1 = std::max(f.y1, v);
        }
    if (f.x1 == f.x0) f.x1 = f.x0 + 1.0;
    double pad = (f.y1 - f.y0) * 0.08;
    if (pad == 0.0) pad = std::max(1e-12, std::abs(f.y0) * 0.1 + 1e-12);
    f.y0 -= pad;
    f.y1 += pad;

    svg_header(out, title);
    char buf[256];

    // axes and ticks
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n",
                  f.px(f.x0), f.py(f.y0), f.px(f.x1), f.py(f.y0));
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n",
                  f.px(f.x0), f.py(f.y0), f.px(f.x0), f.py(f.y1));
    out << buf;
    const int nticks = 5;
    for (int i = 0; i <= nticks; ++i) {
        double tx = f.x0 + (f.x1 - f.x0) * i / nticks;
        double ty = f.y0 + (f.y1 - f.y0) * i / nticks;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>"
                      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" "
                      "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                      f.px(tx), f.py(f.y0), f.px(tx), f.py(f.y0) + 5.0, f.px(tx),
                      f.py(f.y0) + 18.0, fmt_tick(tx).c_str());
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>"
                      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" "
                      "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                      f.px(f.x0) - 5.0, f.py(ty), f.px(f.x0), f.py(ty), f.px(f.x0) - 8.0,
                      f.py(ty) + 4.0, fmt_tick(ty).c_str());
        out << buf;
    }

    double ly = PlotFrame::mt + 6.0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\" points=\"";
        for (size_t i = 0; i < x.size() && i < s.y.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", f.px(x[i]), f.py(s.y[i]));
            out << buf;
        }
        out << "\"/>\n";
        if (!s.label.empty()) {
            std::snprintf(buf, sizeof(buf),
                          "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" "
                          "font-size=\"12\" fill=\"%s\">%s</text>\n",
                          PlotFrame::width - PlotFrame::mr - 150.0, ly, s.color.c_str(),
                          s.label.c_str());
            out << buf;
            ly += 16.0;
        }
    }
    out << "</svg>\n";
}

void write_svg_outline(const std::vector<Eigen::Vector2d>& polygon, const std::string& title,
                       std::ostream& out) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& p : polygon) {
        x0 = std::min(x0, p.x());
        x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y());
        y1 = std::max(y1, p.y());
    }
    double span = std::max(x1 - x0, y1 - y0);
    if (span <= 0.0) span = 1.0;
    double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    const double size = 240.0, margin = 20.0;
    auto px = [&](double x) { return margin + (x - cx + 0.55 * span) / (1.1 * span) * size; };
    auto py = [&](double y) { return margin + size - (y - cy + 0.55 * span) / (1.1 * span) * size; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin
        << "\" height=\"" << size + 2 * margin + 18 << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    char buf[64];
    out << "<polygon fill=\"#dce9f5\" stroke=\"#1f6fb2\" stroke-width=\"1.2\" points=\"";
    for (const auto& p : polygon) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(p.x()), py(p.y()));
        out << buf;
    }
    out << "\"/>\n<text x=\"" << margin + size / 2 << "\" y=\"" << size + 2 * margin + 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << title
        << "</text>\n</svg>\n";
}

} // namespace hvar
