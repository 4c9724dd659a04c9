#ifndef ATML_MODEL_ZOO_HPP
#define ATML_MODEL_ZOO_HPP

#include "atml/dataset.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atml {

enum class ModelKind { LogisticRegression, Knn };

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The adversarial executor turns this into an Error status, not Failed.
class NonDifferentiableError : public ModelError {
public:
    NonDifferentiableError() : ModelError("non-differentiable UUT") {}
};

struct ModelSpec {
    std::string uut_id;
    ModelKind kind = ModelKind::LogisticRegression;
    double learning_rate = 0.1;
    int epochs = 500;
    int k = 3;

    void check() const; // throws ModelError on out-of-range hyperparameters
};

/// Immutable trained UUT. Logistic regression carries weights + bias; k-NN
/// keeps a copy of its training set.
class TrainedModel {
public:
    const ModelSpec& spec() const { return spec_; }
    std::size_t n_features() const { return n_features_; }
    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    const std::vector<int>& classes() const { return classes_; }
    bool differentiable() const { return spec_.kind == ModelKind::LogisticRegression; }

    int predict(std::span<const double> x) const;

    /// Gradient of the cross-entropy loss with respect to the input:
    /// (sigma(w.x + b) - y) * w. Throws NonDifferentiableError for k-NN.
    std::vector<double> input_gradient(std::span<const double> x, int label) const;

    /// Cross-entropy loss of a single example; logistic regression only.
    double loss(std::span<const double> x, int label) const;

    /// In-memory logistic model with given parameters (classes {0,1}).
    static TrainedModel make_logistic(std::vector<double> weights, double bias);

    friend TrainedModel train(const ModelSpec& spec, const Dataset& data);

private:
    ModelSpec spec_;
    std::size_t n_features_ = 0;
    std::vector<double> weights_; // LR
    double bias_ = 0.0;           // LR
    std::vector<double> train_values_; // k-NN, row-major
    std::vector<int> train_labels_;    // k-NN
    std::vector<int> classes_;
};

/// Full-batch gradient descent (LR, zero-initialized, fixed epochs) or
/// training-set storage (k-NN). Deterministic.
TrainedModel train(const ModelSpec& spec, const Dataset& data);

double sigmoid(double z);

/// Maps UUT identifiers to `key=value` model-spec files via a manifest.
class ModelRegistry {
public:
    static ModelRegistry load(const std::filesystem::path& manifest_path);

    ModelSpec resolve(const std::string& uut_id) const;

    bool contains(const std::string& uut_id) const { return entries_.contains(uut_id); }

private:
    std::map<std::string, std::filesystem::path> entries_;
};

/// Reads `kind=logistic_regression|knn` plus hyperparameter lines; missing
/// hyperparameters fall back to the defaults above.
ModelSpec read_model_spec(const std::filesystem::path& path, const std::string& uut_id);

} // namespace atml

#endif
