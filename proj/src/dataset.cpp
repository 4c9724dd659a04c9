#include "atml/dataset.hpp"
#include "atml/documents.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace atml {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col,
                  const std::filesystem::path& path) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DatasetError(path.string() + ": non-numeric or non-finite cell '" + cell +
                           "' at row " + std::to_string(row) + ", column " +
                           std::to_string(col));
    }
    return v;
}

int parse_label(const std::string& cell, std::size_t row, std::size_t col,
                const std::filesystem::path& path) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw DatasetError(path.string() + ": label must be an integer, got '" + cell +
                           "' at row " + std::to_string(row) + ", column " +
                           std::to_string(col));
    }
    return v;
}

} // namespace

std::vector<double> Dataset::feature_column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows());
    for (std::size_t i = 0; i < rows(); ++i) out.push_back(at(i, j));
    return out;
}

std::map<std::string, std::filesystem::path> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open manifest " + path.string());
    std::map<std::string, std::filesystem::path> entries;
    const std::filesystem::path base = path.parent_path();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw DatasetError(path.string() + ": malformed manifest line " +
                               std::to_string(line_no) + " (expected id=path)");
        }
        std::string id = trim(t.substr(0, eq));
        std::string rel = trim(t.substr(eq + 1));
        if (id.empty() || rel.empty()) {
            throw DatasetError(path.string() + ": malformed manifest line " +
                               std::to_string(line_no) + " (empty id or path)");
        }
        if (entries.contains(id)) {
            throw DatasetError(path.string() + ": duplicate manifest id '" + id + "'");
        }
        entries.emplace(std::move(id), base / rel);
    }
    return entries;
}

DatasetRegistry DatasetRegistry::load(const std::filesystem::path& manifest_path) {
    DatasetRegistry registry;
    registry.entries_ = load_manifest(manifest_path);
    return registry;
}

Dataset DatasetRegistry::resolve(const std::string& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw DatasetNotFound(id);
    return read_csv(it->second, id);
}

Dataset read_csv(const std::filesystem::path& path, const std::string& id) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open CSV " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DatasetError(path.string() + ": missing header row");
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2) {
        throw DatasetError(path.string() + ": need at least one feature column plus a label");
    }

    Dataset data;
    data.id = id;
    data.n_features = header.size() - 1;
    data.feature_names.assign(header.begin(), header.end() - 1);

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DatasetError(path.string() + ": row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
        }
        for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
            data.values.push_back(parse_cell(cells[j], row, j + 1, path));
        }
        data.labels.push_back(parse_label(cells.back(), row, cells.size(), path));
    }
    if (data.labels.empty()) throw DatasetError(path.string() + ": dataset has no rows");
    return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot write CSV " + path.string());
    for (std::size_t j = 0; j < data.n_features; ++j) {
        out << (j < data.feature_names.size() ? data.feature_names[j]
                                              : "f" + std::to_string(j + 1))
            << ',';
    }
    out << "label\n";
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < data.n_features; ++j) {
            out << format_real(data.at(i, j)) << ',';
        }
        out << data.labels[i] << '\n';
    }
}

} // namespace atml
