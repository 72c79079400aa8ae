#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace bm::io {

/// Shortest "%.12g" rendering; the same value always prints the same way.
std::string fmt(double v);

struct Column {
    std::string name;
    std::vector<double> values;
};

void write_csv(const std::string& path, const std::vector<Column>& columns);
void write_text(const std::string& path, const std::string& body);
void write_json(const std::string& path, const nlohmann::json& j);

/// Header row plus numeric rows; missing cells become NaN.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const;
    bool has(const std::string& name) const;
};

CsvData read_csv(const std::string& path);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

std::string render_svg(const PlotSpec& plot);

void ensure_dir(const std::string& dir);
std::string join(const std::string& dir, const std::string& file);

}  // namespace bm::io
