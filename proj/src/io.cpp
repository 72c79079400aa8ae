#include "io.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace bm::io {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
    out << body;
    if (!out) fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

void write_csv(const std::string& path, const std::vector<Column>& columns) {
    std::ostringstream os;
    std::size_t rows = 0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        os << (c ? "," : "") << columns[c].name;
        rows = std::max(rows, columns[c].values.size());
    }
    os << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) os << ",";
            const auto& v = columns[c].values;
            if (r < v.size()) os << fmt(v[r]);
        }
        os << "\n";
    }
    write_text(path, os.str());
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

bool CsvData::has(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvData::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorCode::kInvalidArgument, "CSV has no column '" + name + "'");
    const auto idx = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[idx]);
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open CSV '" + path + "'");
    CsvData data;
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::kInvalidArgument, "CSV '" + path + "' is empty");
    data.header = split(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        std::vector<double> row(data.header.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t c = 0; c < cells.size() && c < row.size(); ++c) {
            if (cells[c].empty()) continue;
            try {
                std::size_t used = 0;
                row[c] = std::stod(cells[c], &used);
                if (used != cells[c].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                fail(ErrorCode::kInvalidArgument,
                     "CSV '" + path + "' line " + std::to_string(line_no) + ": bad number '" + cells[c] + "'");
            }
        }
        data.rows.push_back(std::move(row));
    }
    return data;
}

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            const double d = std::max(0.5, 0.05 * std::abs(hi));
            lo -= d;
            hi += d;
        } else {
            const double d = 0.05 * (hi - lo);
            lo -= d;
            hi += d;
        }
    }
};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
    const double width = 640, height = 420;
    const double left = 70, right = 20, top = 40, bottom = 55;
    const double pw = width - left - right, ph = height - top - bottom;

    Range rx, ry;
    for (const auto& s : plot.series) {
        for (double v : s.x) rx.add(v);
        for (double v : s.y) ry.add(v);
    }
    rx.pad();
    ry.pad();
    auto sx = [&](double v) { return left + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto sy = [&](double v) { return top + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
       << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"15\">"
       << escape(plot.title) << "</text>\n";
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\""
       << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double vx = rx.lo + (rx.hi - rx.lo) * i / ticks;
        const double vy = ry.lo + (ry.hi - ry.lo) * i / ticks;
        char lx[32], ly[32];
        std::snprintf(lx, sizeof lx, "%.3g", vx);
        std::snprintf(ly, sizeof ly, "%.3g", vy);
        os << "<line x1=\"" << fmt(sx(vx)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(sx(vx))
           << "\" y2=\"" << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(sx(vx)) << "\" y=\"" << fmt(top + ph + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << lx << "</text>\n";
        os << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(sy(vy)) << "\" x2=\"" << fmt(left) << "\" y2=\""
           << fmt(sy(vy)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(sy(vy) + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << ly << "</text>\n";
    }
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(height - 12)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(plot.x_label)
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"13\" transform=\"rotate(-90 16 "
       << fmt(top + ph / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\""
           << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << (i ? " " : "") << fmt(std::round(sx(s.x[i]) * 100) / 100) << ","
               << fmt(std::round(sy(s.y[i]) * 100) / 100);
        }
        os << "\"/>\n";
        const double ly = top + 16 + 16 * static_cast<double>(k);
        os << "<line x1=\"" << fmt(left + pw - 150) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + pw - 126)
           << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
           << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        os << "<text x=\"" << fmt(left + pw - 120) << "\" y=\"" << fmt(ly + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace bm::io
