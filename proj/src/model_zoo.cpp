#include "atml/model_zoo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

namespace atml {

double sigmoid(double z) {
    return 1.0 / (1.0 + std::exp(-z));
}

void ModelSpec::check() const {
    if (kind == ModelKind::LogisticRegression) {
        if (!(learning_rate > 0.0)) throw ModelError("learning_rate must be > 0");
        if (epochs < 1) throw ModelError("epochs must be >= 1");
    } else {
        if (k < 1) throw ModelError("k must be >= 1");
    }
}

TrainedModel train(const ModelSpec& spec, const Dataset& data) {
    spec.check();
    TrainedModel model;
    model.spec_ = spec;
    model.n_features_ = data.n_features;

    std::set<int> distinct(data.labels.begin(), data.labels.end());
    model.classes_.assign(distinct.begin(), distinct.end());

    if (spec.kind == ModelKind::LogisticRegression) {
        if (data.rows() < 2) throw ModelError("logistic regression needs at least 2 rows");
        for (int label : data.labels) {
            if (label != 0 && label != 1) {
                throw ModelError("logistic regression supports labels {0,1} only, got " +
                                 std::to_string(label));
            }
        }
        if (distinct.size() != 2) {
            throw ModelError("logistic regression training set must contain both classes");
        }

        const std::size_t n = data.rows();
        const std::size_t f = data.n_features;
        model.weights_.assign(f, 0.0);
        model.bias_ = 0.0;
        std::vector<double> grad(f);
        for (int epoch = 0; epoch < spec.epochs; ++epoch) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_bias = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                std::span<const double> x = data.row(i);
                double z = model.bias_;
                for (std::size_t j = 0; j < f; ++j) z += model.weights_[j] * x[j];
                double residual = sigmoid(z) - data.labels[i];
                for (std::size_t j = 0; j < f; ++j) grad[j] += residual * x[j];
                grad_bias += residual;
            }
            const double scale = spec.learning_rate / static_cast<double>(n);
            for (std::size_t j = 0; j < f; ++j) model.weights_[j] -= scale * grad[j];
            model.bias_ -= scale * grad_bias;
        }
    } else {
        if (static_cast<std::size_t>(spec.k) > data.rows()) {
            throw ModelError("k=" + std::to_string(spec.k) + " exceeds training set size " +
                             std::to_string(data.rows()));
        }
        model.train_values_ = data.values;
        model.train_labels_ = data.labels;
    }
    return model;
}

TrainedModel TrainedModel::make_logistic(std::vector<double> weights, double bias) {
    TrainedModel model;
    model.spec_.kind = ModelKind::LogisticRegression;
    model.n_features_ = weights.size();
    model.weights_ = std::move(weights);
    model.bias_ = bias;
    model.classes_ = {0, 1};
    return model;
}

int TrainedModel::predict(std::span<const double> x) const {
    if (x.size() != n_features_) {
        throw ModelError("input width " + std::to_string(x.size()) + " does not match " +
                         std::to_string(n_features_) + " features");
    }
    if (spec_.kind == ModelKind::LogisticRegression) {
        double z = bias_;
        for (std::size_t j = 0; j < n_features_; ++j) z += weights_[j] * x[j];
        return z >= 0.0 ? 1 : 0; // sigma(z) >= 0.5, ties predict label 1
    }

    const std::size_t n = train_labels_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < n_features_; ++j) {
            double diff = train_values_[i * n_features_ + j] - x[j];
            d2 += diff * diff;
        }
        dist[i] = d2;
    }
    const std::size_t k = static_cast<std::size_t>(spec_.k);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
                      });
    std::map<int, std::size_t> votes;
    for (std::size_t i = 0; i < k; ++i) ++votes[train_labels_[order[i]]];
    int best_label = 0;
    std::size_t best_votes = 0;
    for (const auto& [label, count] : votes) {
        if (count > best_votes) { // map order breaks ties toward the smaller label
            best_votes = count;
            best_label = label;
        }
    }
    return best_label;
}

std::vector<double> TrainedModel::input_gradient(std::span<const double> x, int label) const {
    if (!differentiable()) throw NonDifferentiableError();
    if (x.size() != n_features_) {
        throw ModelError("input width " + std::to_string(x.size()) + " does not match " +
                         std::to_string(n_features_) + " features");
    }
    double z = bias_;
    for (std::size_t j = 0; j < n_features_; ++j) z += weights_[j] * x[j];
    const double residual = sigmoid(z) - label;
    std::vector<double> grad(n_features_);
    for (std::size_t j = 0; j < n_features_; ++j) grad[j] = residual * weights_[j];
    return grad;
}

double TrainedModel::loss(std::span<const double> x, int label) const {
    if (!differentiable()) throw NonDifferentiableError();
    double z = bias_;
    for (std::size_t j = 0; j < n_features_; ++j) z += weights_[j] * x[j];
    // numerically stable -[y log p + (1-y) log(1-p)]
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return softplus - label * z;
}

ModelRegistry ModelRegistry::load(const std::filesystem::path& manifest_path) {
    ModelRegistry registry;
    registry.entries_ = load_manifest(manifest_path);
    return registry;
}

ModelSpec ModelRegistry::resolve(const std::string& uut_id) const {
    auto it = entries_.find(uut_id);
    if (it == entries_.end()) throw ModelError("model not found: " + uut_id);
    return read_model_spec(it->second, uut_id);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_spec_real(const std::string& value, const std::string& key,
                       const std::filesystem::path& path) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ModelError(path.string() + ": '" + key + "' must be numeric, got '" + value + "'");
    }
    return v;
}

int parse_spec_int(const std::string& value, const std::string& key,
                   const std::filesystem::path& path) {
    double v = parse_spec_real(value, key, path);
    if (v != std::floor(v)) {
        throw ModelError(path.string() + ": '" + key + "' must be integer-valued");
    }
    return static_cast<int>(v);
}

} // namespace

ModelSpec read_model_spec(const std::filesystem::path& path, const std::string& uut_id) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model spec " + path.string());
    ModelSpec spec;
    spec.uut_id = uut_id;
    bool have_kind = false;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ModelError(path.string() + ": malformed line '" + t + "'");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key == "kind") {
            if (value == "logistic_regression") {
                spec.kind = ModelKind::LogisticRegression;
            } else if (value == "knn") {
                spec.kind = ModelKind::Knn;
            } else {
                throw ModelError(path.string() + ": unknown model kind '" + value + "'");
            }
            have_kind = true;
        } else if (key == "learning_rate") {
            spec.learning_rate = parse_spec_real(value, key, path);
        } else if (key == "epochs") {
            spec.epochs = parse_spec_int(value, key, path);
        } else if (key == "k") {
            spec.k = parse_spec_int(value, key, path);
        } else {
            throw ModelError(path.string() + ": unknown key '" + key + "'");
        }
    }
    if (!have_kind) throw ModelError(path.string() + ": missing 'kind' line");
    spec.check();
    return spec;
}

} // namespace atml
