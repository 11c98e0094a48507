#include "srilab/lab_io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "srilab/errors.hpp"

namespace srilab {

std::string fmt_double(double v) {
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw IoError("fmt_double: conversion failed");
    return std::string(buf, ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + target.parent_path().string());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path);
}

std::string trajectory_csv(const Trajectory& traj) {
    const std::size_t d = traj.dim;
    std::string out;
    out.reserve(64 * traj.x.size());
    out += "n,t";
    for (std::size_t i = 0; i < d; ++i) out += ",x_" + std::to_string(i);
    for (std::size_t i = 0; i < d; ++i) out += ",y_" + std::to_string(i);
    for (std::size_t i = 0; i < d; ++i) out += ",M_" + std::to_string(i);
    out += ",a\n";
    for (std::size_t n = 0; n < traj.x.size(); ++n) {
        out += std::to_string(n);
        out += ',';
        out += fmt_double(traj.t[n]);
        for (std::size_t i = 0; i < d; ++i) {
            out += ',';
            out += fmt_double(traj.x[n][i]);
        }
        const bool has_step = n < traj.steps();
        for (std::size_t i = 0; i < d; ++i) {
            out += ',';
            if (has_step) out += fmt_double(traj.y[n][i]);
        }
        for (std::size_t i = 0; i < d; ++i) {
            out += ',';
            if (has_step) out += fmt_double(traj.M[n][i]);
        }
        out += ',';
        if (has_step) out += fmt_double(traj.a[n]);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

double parse_number(std::string_view s, std::size_t line_no) {
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw ValidationError("trajectory table: bad number at line " + std::to_string(line_no));
    return v;
}

}  // namespace

Trajectory parse_trajectory_csv(const std::string& content, std::size_t dim) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("trajectory table: empty file");
    // tolerate a trailing \r from foreign editors
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::string expected = "n,t";
    for (std::size_t i = 0; i < dim; ++i) expected += ",x_" + std::to_string(i);
    for (std::size_t i = 0; i < dim; ++i) expected += ",y_" + std::to_string(i);
    for (std::size_t i = 0; i < dim; ++i) expected += ",M_" + std::to_string(i);
    expected += ",a";
    if (line != expected)
        throw ValidationError("trajectory table: header mismatch, expected '" + expected + "'");

    Trajectory traj;
    traj.dim = dim;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2 + 3 * dim + 1)
            throw ValidationError("trajectory table: wrong column count at line " +
                                  std::to_string(line_no));
        if (parse_number(fields[0], line_no) != static_cast<double>(traj.x.size()))
            throw ValidationError("trajectory table: row index out of sequence at line " +
                                  std::to_string(line_no));
        traj.t.push_back(parse_number(fields[1], line_no));
        Vec x(dim);
        for (std::size_t i = 0; i < dim; ++i) x[i] = parse_number(fields[2 + i], line_no);
        traj.x.push_back(std::move(x));
        const bool has_step = !fields[2 + 3 * dim].empty();
        if (has_step) {
            Vec y(dim), m(dim);
            for (std::size_t i = 0; i < dim; ++i) y[i] = parse_number(fields[2 + dim + i], line_no);
            for (std::size_t i = 0; i < dim; ++i)
                m[i] = parse_number(fields[2 + 2 * dim + i], line_no);
            traj.y.push_back(std::move(y));
            traj.M.push_back(std::move(m));
            traj.a.push_back(parse_number(fields[2 + 3 * dim], line_no));
        }
    }
    if (traj.x.empty()) throw ValidationError("trajectory table: no rows");
    if (traj.x.size() != traj.y.size() + 1)
        throw ValidationError("trajectory table: exactly the final row must leave the step empty");
    return traj;
}

std::string flow_csv(const FlowTrajectory& traj, std::size_t dim) {
    std::string out = "k,t";
    for (std::size_t i = 0; i < dim; ++i) out += ",x_" + std::to_string(i);
    for (std::size_t i = 0; i < dim; ++i) out += ",y_" + std::to_string(i);
    out += ",diverged\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += fmt_double(traj.times[k]);
        for (std::size_t i = 0; i < dim; ++i) {
            out += ',';
            out += fmt_double(traj.states[k][i]);
        }
        const bool has_sel = k < traj.selections.size();
        for (std::size_t i = 0; i < dim; ++i) {
            out += ',';
            if (has_sel) out += fmt_double(traj.selections[k][i]);
        }
        // the flag marks the truncated final row of a diverging run
        out += traj.diverged && k + 1 == traj.states.size() ? ",1\n" : ",0\n";
    }
    return out;
}

ordered_json report_to_json(const RescalingReport& report, const RunSummary& summary) {
    ordered_json j;
    j["scenario"] = summary.scenario;
    j["seed"] = summary.seed;
    j["verdict"] = to_string(report.verdict);
    j["rationale"] = report.rationale;
    j["summary"] = {
        {"sup_norm", summary.sup_norm},
        {"sup_r", summary.sup_r},
        {"final_distance", summary.final_distance},
        {"tail_distance", summary.tail_distance},
        {"wall_seconds", summary.wall_seconds},
    };
    j["window"] = {
        {"T", report.T},
        {"T_auto", report.T_auto},
        {"radius_a", report.radius_a},
        {"delta_chain", report.deltas},
    };
    j["thresholds"] = {
        {"stable_sup_r", report.thresholds.stable_sup_r},
        {"divergence_r", report.thresholds.divergence_r},
    };
    ordered_json windows = ordered_json::array();
    const auto& rs = report.rescaling;
    for (std::size_t n = 0; n < rs.windows(); ++n) {
        ordered_json w;
        w["n"] = n;
        w["T_n"] = report.anchors.T_n[n];
        w["m"] = report.anchors.m[n];
        w["r"] = rs.r[n];
        if (n < report.contraction.ratios.size()) {
            w["ratio"] = report.contraction.ratios[n];
            w["tested"] = static_cast<bool>(report.contraction.tested[n]);
            w["passed"] = static_cast<bool>(report.contraction.passed[n]);
        }
        windows.push_back(std::move(w));
    }
    j["windows"] = std::move(windows);
    j["R0_estimate"] = report.contraction.R0_estimate;
    j["K_omega"] = report.K_omega;
    j["M_omega"] = report.zeta.m_omega;
    j["zeta_cauchy"] = report.zeta.cauchy_stat;
    j["aux_gap"] = report.zeta.aux_gap;
    j["bound_K"] = report.bound_K;
    j["overflow"] = report.overflow;
    j["warnings"] = report.warnings;
    j["note"] = "verdicts are empirical evidence from one run, not proofs";
    return j;
}

ordered_json property_report_to_json(const PropertyReport& rep) {
    ordered_json j;
    j["property"] = rep.property;
    j["verdict"] = rep.verdict == Verdict::Corroborated ? "corroborated" : "falsified";
    j["samples_tested"] = rep.samples_tested;
    j["tolerance"] = rep.tolerance;
    if (rep.witness) {
        ordered_json w;
        w["x"] = rep.witness->x;
        if (rep.witness->y) w["y"] = *rep.witness->y;
        w["measured"] = rep.witness->measured;
        j["witness"] = std::move(w);
    }
    j["note"] = rep.note;
    return j;
}

namespace {

std::string svg_polyline(const std::vector<std::pair<double, double>>& pts, double x0, double y0,
                         double w, double h, const char* color) {
    if (pts.empty()) return {};
    double xmin = pts[0].first, xmax = xmin, ymin = pts[0].second, ymax = ymin;
    for (const auto& [x, y] : pts) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    std::string s = "<polyline fill=\"none\" stroke=\"";
    s += color;
    s += "\" stroke-width=\"1\" points=\"";
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 2000);
    for (std::size_t i = 0; i < pts.size(); i += stride) {
        const double px = x0 + (pts[i].first - xmin) / (xmax - xmin) * w;
        const double py = y0 + h - (pts[i].second - ymin) / (ymax - ymin) * h;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px, py);
        s += buf;
    }
    s += "\"/>";
    return s;
}

}  // namespace

std::string run_svg(const Trajectory& traj, const RescalingReport& report) {
    std::vector<std::pair<double, double>> norms;
    norms.reserve(traj.x.size());
    for (std::size_t n = 0; n < traj.x.size(); ++n) norms.emplace_back(traj.t[n], norm(traj.x[n]));
    std::vector<std::pair<double, double>> rs;
    for (std::size_t n = 0; n < report.rescaling.windows(); ++n)
        rs.emplace_back(static_cast<double>(n), report.rescaling.r[n]);

    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
        "viewBox=\"0 0 640 480\">\n"
        "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n"
        "<text x=\"20\" y=\"20\" font-size=\"12\">||x_n|| vs t</text>\n"
        "<text x=\"20\" y=\"260\" font-size=\"12\">r(n) vs window</text>\n";
    svg += svg_polyline(norms, 20, 30, 600, 180, "#1f77b4");
    svg += "\n";
    svg += svg_polyline(rs, 20, 270, 600, 180, "#d62728");
    svg += "\n</svg>\n";
    return svg;
}

}  // namespace srilab
