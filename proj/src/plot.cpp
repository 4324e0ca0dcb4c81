#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "bandit/harness.hpp"

namespace bandit {

namespace {

struct SeriesPoint {
    double t;
    double mean;
    double band; // one standard error of the mean across runs
};

[[noreturn]] void csv_fail(std::size_t line, const std::string& msg) {
    throw std::runtime_error("csv:" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_field_double(const std::string& s, std::size_t line, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        csv_fail(line, std::string("bad ") + what + " value '" + s + "'");
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

} // namespace

std::string render_plot_svg(const std::string& csv_text, bool log_y) {
    std::istringstream in(csv_text);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) csv_fail(1, "empty input");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "algo,run,t,simple_regret,stderr,rounds_to_threshold")
        csv_fail(lineno, "unexpected header '" + line + "'");

    // algo -> t -> regrets across runs
    std::map<std::string, std::map<double, std::vector<double>>> grouped;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 6) csv_fail(lineno, "expected 6 fields, got " + std::to_string(f.size()));
        if (f[0].empty()) csv_fail(lineno, "empty algo name");
        parse_field_double(f[1], lineno, "run");
        const double t = parse_field_double(f[2], lineno, "t");
        const double regret = parse_field_double(f[3], lineno, "simple_regret");
        if (!f[4].empty()) parse_field_double(f[4], lineno, "stderr");
        if (!f[5].empty()) parse_field_double(f[5], lineno, "rounds_to_threshold");
        grouped[f[0]][t].push_back(regret);
    }
    if (grouped.empty()) csv_fail(lineno + 1, "no data rows");

    std::map<std::string, std::vector<SeriesPoint>> series;
    double t_min = 1e300, t_max = -1e300, y_min = 1e300, y_max = -1e300;
    double positive_floor = 1e300;
    for (const auto& [algo, by_t] : grouped) {
        std::vector<SeriesPoint>& pts = series[algo];
        for (const auto& [t, vals] : by_t) {
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            const double se = vals.size() > 1
                                  ? std::sqrt(var / static_cast<double>(vals.size() - 1) /
                                              static_cast<double>(vals.size()))
                                  : 0.0;
            pts.push_back(SeriesPoint{t, mean, se});
            t_min = std::min(t_min, t);
            t_max = std::max(t_max, t);
            y_min = std::min(y_min, mean - se);
            y_max = std::max(y_max, mean + se);
            if (mean > 0.0) positive_floor = std::min(positive_floor, mean);
        }
    }
    if (t_max <= t_min) t_max = t_min + 1.0;
    if (log_y) {
        if (positive_floor > 1e299) positive_floor = 1e-12;
        y_min = std::log10(std::max(positive_floor / 10.0, 1e-300));
        double top = y_max > 0.0 ? y_max : positive_floor;
        y_max = std::log10(top * 1.1);
        if (y_max <= y_min) y_max = y_min + 1.0;
    } else {
        y_min = std::min(0.0, y_min);
        if (y_max <= y_min) y_max = y_min + 1.0;
        y_max += 0.05 * (y_max - y_min);
    }

    const double W = 720, H = 480, ml = 70, mr = 20, mt = 30, mb = 50;
    auto sx = [&](double t) { return ml + (t - t_min) / (t_max - t_min) * (W - ml - mr); };
    auto sy = [&](double y) {
        const double v = log_y ? std::log10(std::max(y, std::pow(10.0, y_min))) : y;
        return H - mb - (v - y_min) / (y_max - y_min) * (H - mt - mb);
    };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" +
           fmt(H) + "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) +
           "\" fill=\"white\"/>\n";
    // axes
    svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(H - mb) + "\" x2=\"" + fmt(W - mr) +
           "\" y2=\"" + fmt(H - mb) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(ml) + "\" y2=\"" +
           fmt(H - mb) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = t_min + (t_max - t_min) * i / 5.0;
        const double x = sx(t);
        svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(H - mb) + "\" x2=\"" + fmt(x) +
               "\" y2=\"" + fmt(H - mb + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(H - mb + 20) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + fmt(t) + "</text>\n";
        const double yv = y_min + (y_max - y_min) * i / 5.0;
        const double y = H - mb - (yv - y_min) / (y_max - y_min) * (H - mt - mb);
        svg += "<line x1=\"" + fmt(ml - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(ml) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"black\"/>\n";
        const double label = log_y ? std::pow(10.0, yv) : yv;
        svg += "<text x=\"" + fmt(ml - 8) + "\" y=\"" + fmt(y + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + fmt(label) + "</text>\n";
    }
    svg += "<text x=\"" + fmt((ml + W - mr) / 2) + "\" y=\"" + fmt(H - 10) +
           "\" font-size=\"13\" text-anchor=\"middle\">t</text>\n";
    svg += "<text x=\"15\" y=\"" + fmt((mt + H - mb) / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
           fmt((mt + H - mb) / 2) + ")\">simple regret</text>\n";

    std::size_t color_idx = 0;
    for (const auto& [algo, pts] : series) {
        const std::string color = kPalette[color_idx % 8];
        ++color_idx;
        if (pts.size() > 1) {
            std::string band = "<path d=\"M";
            for (const SeriesPoint& p : pts)
                band += fmt(sx(p.t)) + " " + fmt(sy(p.mean + p.band)) + " L";
            band.pop_back();
            for (auto it = pts.rbegin(); it != pts.rend(); ++it)
                band += "L" + fmt(sx(it->t)) + " " + fmt(sy(std::max(it->mean - it->band,
                                                                     log_y ? 1e-300 : -1e300))) +
                        " ";
            band += "Z\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
            svg += band;
        }
        std::string poly = "<polyline fill=\"none\" stroke=\"" + color +
                           "\" stroke-width=\"1.5\" points=\"";
        for (const SeriesPoint& p : pts) poly += fmt(sx(p.t)) + "," + fmt(sy(p.mean)) + " ";
        poly += "\"/>\n";
        svg += poly;
    }

    // legend, algo name order
    double ly = mt + 8;
    color_idx = 0;
    for (const auto& [algo, pts] : series) {
        (void)pts;
        const std::string color = kPalette[color_idx % 8];
        ++color_idx;
        svg += "<line x1=\"" + fmt(W - mr - 150) + "\" y1=\"" + fmt(ly) + "\" x2=\"" +
               fmt(W - mr - 125) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(W - mr - 118) + "\" y=\"" + fmt(ly + 4) +
               "\" font-size=\"12\">" + xml_escape(algo) + "</text>\n";
        ly += 18;
    }
    svg += "</svg>\n";
    return svg;
}

void emit_plot(const std::string& csv_path, const std::string& out_path, bool log_y) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw std::runtime_error("emit_plot: cannot open " + csv_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string svg = render_plot_svg(buf.str(), log_y);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_plot: cannot open " + out_path);
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!out) throw std::runtime_error("emit_plot: write failed for " + out_path);
}

} // namespace bandit
