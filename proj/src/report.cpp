/*
    Copyright (C) 2026 The streamcost Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <streamcost/report.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace streamcost {

namespace {

const std::vector<std::string> kValueColumns = {"q50", "q95", "accuracy", "median_speedup"};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct CellRow {
    std::vector<std::string> path;
    const json* cell;
};

void collect(const json& j, std::vector<std::string>& path, std::vector<CellRow>& out) {
    if (j.is_object()) {
        if (j.contains("n") && j.at("n").is_number()) {
            out.push_back({path, &j});
            return;
        }
        for (const auto& [k, v] : j.items()) {
            path.push_back(k);
            collect(v, path, out);
            path.pop_back();
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            path.push_back(std::to_string(i));
            collect(j[i], path, out);
            path.pop_back();
        }
    }
}

std::string join(const std::vector<std::string>& parts, std::size_t from, std::size_t to, char sep) {
    std::string s;
    for (std::size_t i = from; i < to; ++i) {
        if (i > from) s += sep;
        s += parts[i];
    }
    return s;
}

}  // namespace

std::string cells_csv(const json& report) {
    std::vector<CellRow> rows;
    std::vector<std::string> path;
    collect(report, path, rows);
    std::ostringstream os;
    os << "path,n";
    for (const auto& c : kValueColumns) os << ',' << c;
    os << '\n';
    for (const auto& r : rows) {
        os << csv_field(join(r.path, 0, r.path.size(), '/')) << ',' << r.cell->at("n").get<std::size_t>();
        for (const auto& c : kValueColumns) {
            os << ',';
            if (r.cell->contains(c) && r.cell->at(c).is_number()) os << num(r.cell->at(c).get<double>());
        }
        os << '\n';
    }
    return os.str();
}

std::string bar_chart_svg(const std::string& title, const std::vector<std::pair<std::string, double>>& bars,
                          const std::string& y_label, bool log_scale) {
    constexpr double kLeft = 70, kTop = 40, kPlotH = 260, kBarW = 28, kGap = 10, kBottom = 160;
    const double plot_w = std::max(200.0, static_cast<double>(bars.size()) * (kBarW + kGap) + kGap);
    const double width = kLeft + plot_w + 20, height = kTop + kPlotH + kBottom;

    auto scaled = [&](double v) { return log_scale ? std::log10(std::max(v, 1e-12)) : v; };
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& [_, v] : bars) {
        if (!std::isfinite(v)) continue;
        const double s = scaled(v);
        if (first) lo = hi = s, first = false;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    lo = std::min(lo, 0.0);
    if (hi <= lo) hi = lo + 1.0;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
       << "</text>\n";
    os << "<text x=\"14\" y=\"" << num(kTop + kPlotH / 2) << "\" transform=\"rotate(-90 14 " << num(kTop + kPlotH / 2)
       << ")\" text-anchor=\"middle\">" << xml_escape(y_label + (log_scale ? " (log10)" : "")) << "</text>\n";
    const double base_y = kTop + kPlotH * (hi / (hi - lo));
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(base_y) << "\" x2=\"" << num(kLeft + plot_w) << "\" y2=\""
       << num(base_y) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
       << num(kTop + kPlotH) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double s = lo + (hi - lo) * t / 4.0;
        const double y = kTop + kPlotH * (hi - s) / (hi - lo);
        os << "<text x=\"" << num(kLeft - 4) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
           << num(log_scale ? std::pow(10.0, s) : s) << "</text>\n";
    }
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double x = kLeft + kGap + static_cast<double>(i) * (kBarW + kGap);
        const double v = bars[i].second;
        if (std::isfinite(v)) {
            const double s = scaled(v);
            const double y = kTop + kPlotH * (hi - std::max(s, 0.0)) / (hi - lo);
            const double h = kPlotH * std::abs(s) / (hi - lo);
            os << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(kBarW) << "\" height=\""
               << num(h) << "\" fill=\"#4a78b5\"><title>" << xml_escape(bars[i].first) << ": " << num(v)
               << "</title></rect>\n";
        }
        const double lx = x + kBarW / 2, ly = kTop + kPlotH + 8;
        os << "<text x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" transform=\"rotate(60 " << num(lx) << ' '
           << num(ly) << ")\">" << xml_escape(bars[i].first) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_report_bundle(const std::filesystem::path& dir, const std::string& stem, const json& report) {
    std::filesystem::create_directories(dir);
    write_json_file(dir / (stem + ".json"), report);
    write_text_file(dir / (stem + ".csv"), cells_csv(report));

    std::vector<CellRow> rows;
    std::vector<std::string> path;
    collect(report, path, rows);
    // One chart per trailing key (metric name) for q50 cells, one for speed-ups.
    std::map<std::string, std::vector<std::pair<std::string, double>>> charts;
    for (const auto& r : rows) {
        if (r.path.empty()) continue;
        if (r.cell->contains("q50")) {
            charts[r.path.back()].emplace_back(join(r.path, 0, r.path.size() - 1, '/'), r.cell->at("q50").get<double>());
        } else if (r.cell->contains("median_speedup") && r.cell->at("median_speedup").is_number()) {
            charts["speedup"].emplace_back(join(r.path, 0, r.path.size(), '/'),
                                           r.cell->at("median_speedup").get<double>());
        }
    }
    for (const auto& [key, bars] : charts) {
        std::string file = key;
        std::replace_if(file.begin(), file.end(), [](char c) { return !std::isalnum(static_cast<unsigned char>(c)); }, '_');
        const bool speed = key == "speedup";
        write_text_file(dir / (stem + "_" + file + ".svg"),
                        bar_chart_svg(stem + ": " + key, bars, speed ? "median speed-up" : "Q50 q-error", !speed));
    }
}

}  // namespace streamcost
