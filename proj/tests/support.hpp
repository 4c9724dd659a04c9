#ifndef ATML_TESTS_SUPPORT_HPP
#define ATML_TESTS_SUPPORT_HPP

#include "atml/dataset.hpp"
#include "atml/documents.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace atml::tests {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline fs::path corpus(const std::string& name) {
    return fs::path(ATML_CORPUS_DIR) / name;
}

inline Document parse_corpus(const std::string& name) {
    return parse_document(read_file(corpus(name)));
}

/// Deterministic uniform in [0,1) from raw mt19937_64 output; avoids the
/// implementation-defined std::distribution adapters.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    double normal() {
        // Box-Muller, one value per pair
        double u1 = uniform();
        double u2 = uniform();
        while (u1 == 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t raw() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

/// Two well-separated Gaussian blobs: class 0 at -3 and class 1 at +3 on the
/// second feature, unit variance; first feature is pure noise.
inline Dataset make_blob_dataset(std::size_t n_rows = 100, std::uint64_t seed = 7) {
    Rng rng(seed);
    Dataset data;
    data.id = "Blob";
    data.n_features = 2;
    data.feature_names = {"x1", "x2"};
    for (std::size_t i = 0; i < n_rows; ++i) {
        const int label = i % 2 == 0 ? 0 : 1;
        const double center = label == 0 ? -3.0 : 3.0;
        data.values.push_back(rng.normal());
        data.values.push_back(center + rng.normal());
        data.labels.push_back(label);
    }
    return data;
}

/// Rows drawn from per-feature N(shift, 1); labels alternate 0/1.
inline Dataset make_gaussian_dataset(std::size_t n_rows, std::size_t n_features,
                                     double shift, std::uint64_t seed,
                                     const std::string& id = "Gaussian") {
    Rng rng(seed);
    Dataset data;
    data.id = id;
    data.n_features = n_features;
    for (std::size_t j = 0; j < n_features; ++j) {
        data.feature_names.push_back("x" + std::to_string(j + 1));
    }
    for (std::size_t i = 0; i < n_rows; ++i) {
        for (std::size_t j = 0; j < n_features; ++j) {
            data.values.push_back(shift + rng.normal());
        }
        data.labels.push_back(static_cast<int>(i % 2));
    }
    return data;
}

class TempDir {
public:
    explicit TempDir(const std::string& prefix) {
        path_ = fs::temp_directory_path() /
                (prefix + "_" + std::to_string(std::random_device{}()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

    fs::path write(const std::string& name, const std::string& content) const {
        fs::path p = path_ / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }

private:
    fs::path path_;
};

} // namespace atml::tests

#endif
