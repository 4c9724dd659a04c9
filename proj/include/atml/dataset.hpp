#ifndef ATML_DATASET_HPP
#define ATML_DATASET_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atml {

/// Tabular classification dataset: row-major real features plus integer labels.
struct Dataset {
    std::string id;
    std::size_t n_features = 0;
    std::vector<double> values; // rows() * n_features, row-major
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    std::size_t rows() const { return labels.size(); }

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_features, n_features};
    }

    double at(std::size_t i, std::size_t j) const { return values[i * n_features + j]; }

    /// Column j as a contiguous vector.
    std::vector<double> feature_column(std::size_t j) const;

    bool operator==(const Dataset&) const = default;
};

class DatasetNotFound : public std::runtime_error {
public:
    explicit DatasetNotFound(const std::string& id)
        : std::runtime_error("dataset not found: " + id) {}
};

/// Manifest, CSV, or cell-level ingestion failure.
class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Line-based `id=relative/path` manifest with `#` comments; duplicate keys
/// are rejected. Shared by the dataset and model registries.
std::map<std::string, std::filesystem::path> load_manifest(const std::filesystem::path& path);

class DatasetRegistry {
public:
    /// Loads `id=csv-path` entries; paths are resolved relative to the manifest.
    static DatasetRegistry load(const std::filesystem::path& manifest_path);

    /// Parses the CSV backing `id`. Header row gives feature names; the last
    /// column is the integer class label.
    Dataset resolve(const std::string& id) const;

    bool contains(const std::string& id) const { return entries_.contains(id); }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, std::filesystem::path> entries_;
};

Dataset read_csv(const std::filesystem::path& path, const std::string& id);

/// Values are written with shortest round-trip precision so read-back is exact.
void write_csv(const Dataset& data, const std::filesystem::path& path);

} // namespace atml

#endif
