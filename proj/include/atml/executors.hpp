#ifndef ATML_EXECUTORS_HPP
#define ATML_EXECUTORS_HPP

#include "atml/dataset.hpp"
#include "atml/documents.hpp"
#include "atml/model_zoo.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace atml {

class ExecutorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Deterministic Fisher-Yates permutation of [0, n); independent of any
/// library shuffle so runs reproduce across platforms.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// Contiguous fold sizes: the first n mod k folds get one extra row.
std::vector<std::size_t> cv_fold_sizes(std::size_t n, std::size_t k);

struct CvConfig {
    int folds = 5;
    std::uint64_t seed = 0;
    std::string dataset_id;
};

/// Seeded shuffle, k contiguous folds (the first n mod k folds get one extra
/// row), fold i validates against a model trained on the rest. Returns the
/// mean of the fold accuracies.
double run_cross_validation(const CvConfig& config, const ModelSpec& spec, const Dataset& data);

enum class AttackMethod { Fgsm };

struct AttackConfig {
    double epsilon = 0.1;
    AttackMethod method = AttackMethod::Fgsm;
    std::string dataset_id;
    bool clip01 = false;
};

/// x + epsilon * sign(grad_x L(theta, x, y)), with sign(0) = 0.
std::vector<double> fgsm_perturb(const TrainedModel& model, std::span<const double> x, int label,
                                 double epsilon, bool clip01 = false);

/// Seeded shuffle, first 80% trains, last 20% evaluates. Every evaluation row
/// is perturbed with its true label; the score is the fraction still
/// classified correctly, counted over all evaluation rows.
double run_adversarial_test(const AttackConfig& config, const ModelSpec& spec,
                            const Dataset& data, std::uint64_t seed);

struct GaussianReference {
    std::vector<double> mean;
    std::vector<double> variance;
};

struct DriftConfig {
    std::string dataset_id; // current data
    std::optional<std::string> reference_dataset_id;
    std::optional<GaussianReference> gaussian;
    double z_threshold = 3.0;
    double ks_threshold = 0.2;
};

struct DriftStatistics {
    bool empirical = false;          // true: KS D per feature; false: z per feature
    std::vector<double> per_feature; // z_j or D_j
};

/// Gaussian mode: z_j = (mean_j - mu_j) / sqrt(var_j / n).
/// Empirical mode: two-sample Kolmogorov-Smirnov D_j per feature.
/// A supplied reference dataset takes precedence over Gaussian properties.
DriftStatistics drift_statistics(const Dataset& current, const DriftConfig& config,
                                 const Dataset* reference_data);

/// sup over all sample points of |F_a(x) - F_b(x)|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct StepOutcome {
    std::string step_id;
    Status status = Status::Passed;
};

struct DriftReport {
    DriftStatistics statistics;
    bool drifted = false;
    std::vector<std::size_t> offending_features; // 0-based indices
    StepOutcome comparison_step;
    StepOutcome threshold_step;
};

DriftReport run_drift_test(const DriftConfig& config, const Dataset& current,
                           const Dataset* reference_data,
                           const std::string& comparison_step_id = "Step_1",
                           const std::string& threshold_step_id = "Step_2");

} // namespace atml

#endif
