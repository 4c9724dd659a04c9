#include "atml/executors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace atml {

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

namespace {

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.id = data.id;
    out.n_features = data.n_features;
    out.feature_names = data.feature_names;
    out.values.reserve(rows.size() * data.n_features);
    out.labels.reserve(rows.size());
    for (std::size_t i : rows) {
        std::span<const double> r = data.row(i);
        out.values.insert(out.values.end(), r.begin(), r.end());
        out.labels.push_back(data.labels[i]);
    }
    return out;
}

void require_both_classes(const Dataset& training, const std::string& context) {
    std::set<int> classes(training.labels.begin(), training.labels.end());
    if (classes.size() < 2) {
        throw ExecutorError("degenerate training fold (" + context +
                            "): only one class present");
    }
}

} // namespace

std::vector<std::size_t> cv_fold_sizes(std::size_t n, std::size_t k) {
    std::vector<std::size_t> sizes(k, n / k);
    for (std::size_t i = 0; i < n % k; ++i) ++sizes[i];
    return sizes;
}

double run_cross_validation(const CvConfig& config, const ModelSpec& spec, const Dataset& data) {
    const std::size_t n = data.rows();
    if (config.folds < 2) throw ExecutorError("cross-validation needs folds >= 2");
    const std::size_t k = static_cast<std::size_t>(config.folds);
    if (k > n) {
        throw ExecutorError("folds " + std::to_string(k) + " exceeds dataset size " +
                            std::to_string(n));
    }

    const std::vector<std::size_t> order = seeded_permutation(n, config.seed);
    const std::vector<std::size_t> sizes = cv_fold_sizes(n, k);

    double accuracy_sum = 0.0;
    std::size_t offset = 0;
    for (std::size_t fold = 0; fold < k; ++fold) {
        const std::size_t size = sizes[fold];
        std::vector<std::size_t> validation(order.begin() + offset,
                                            order.begin() + offset + size);
        std::vector<std::size_t> training;
        training.reserve(n - size);
        training.insert(training.end(), order.begin(), order.begin() + offset);
        training.insert(training.end(), order.begin() + offset + size, order.end());
        offset += size;

        const Dataset train_set = subset(data, training);
        require_both_classes(train_set, "fold " + std::to_string(fold + 1));
        TrainedModel model = train(spec, train_set);

        std::size_t correct = 0;
        for (std::size_t i : validation) {
            if (model.predict(data.row(i)) == data.labels[i]) ++correct;
        }
        accuracy_sum += static_cast<double>(correct) / static_cast<double>(size);
    }
    return accuracy_sum / static_cast<double>(k);
}

std::vector<double> fgsm_perturb(const TrainedModel& model, std::span<const double> x, int label,
                                 double epsilon, bool clip01) {
    std::vector<double> grad = model.input_gradient(x, label);
    std::vector<double> adv(x.begin(), x.end());
    for (std::size_t j = 0; j < adv.size(); ++j) {
        double s = grad[j] > 0.0 ? 1.0 : (grad[j] < 0.0 ? -1.0 : 0.0);
        adv[j] += epsilon * s;
        if (clip01) adv[j] = std::clamp(adv[j], 0.0, 1.0);
    }
    return adv;
}

double run_adversarial_test(const AttackConfig& config, const ModelSpec& spec,
                            const Dataset& data, std::uint64_t seed) {
    const std::size_t n = data.rows();
    if (n < 5) throw ExecutorError("adversarial test needs at least 5 rows");

    const std::vector<std::size_t> order = seeded_permutation(n, seed);
    const std::size_t n_train = n * 4 / 5;
    std::vector<std::size_t> training(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> evaluation(order.begin() + n_train, order.end());

    const Dataset train_set = subset(data, training);
    require_both_classes(train_set, "80% training split");
    TrainedModel model = train(spec, train_set);

    std::size_t correct = 0;
    for (std::size_t i : evaluation) {
        const int label = data.labels[i];
        std::vector<double> adv =
            fgsm_perturb(model, data.row(i), label, config.epsilon, config.clip01);
        if (model.predict(adv) == label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(evaluation.size());
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (i < a.size() && (j >= b.size() || a[i] <= b[j]))
            x = a[i];
        else
            x = b[j];
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

DriftStatistics drift_statistics(const Dataset& current, const DriftConfig& config,
                                 const Dataset* reference_data) {
    DriftStatistics stats;
    const std::size_t f = current.n_features;
    if (reference_data) {
        if (reference_data->n_features != f) {
            throw ExecutorError("feature count mismatch: current has " + std::to_string(f) +
                                ", reference has " +
                                std::to_string(reference_data->n_features));
        }
        stats.empirical = true;
        for (std::size_t j = 0; j < f; ++j) {
            stats.per_feature.push_back(
                ks_statistic(current.feature_column(j), reference_data->feature_column(j)));
        }
        return stats;
    }

    if (!config.gaussian) {
        throw ExecutorError("drift test needs a reference dataset or Gaussian properties");
    }
    const GaussianReference& ref = *config.gaussian;
    if (ref.mean.size() != f || ref.variance.size() != f) {
        throw ExecutorError("Gaussian reference covers " + std::to_string(ref.mean.size()) +
                            " feature(s), dataset has " + std::to_string(f));
    }
    stats.empirical = false;
    const double n = static_cast<double>(current.rows());
    for (std::size_t j = 0; j < f; ++j) {
        if (!(ref.variance[j] > 0.0)) {
            throw ExecutorError("reference variance for feature " + std::to_string(j + 1) +
                                " must be > 0");
        }
        double mean = 0.0;
        for (std::size_t i = 0; i < current.rows(); ++i) mean += current.at(i, j);
        mean /= n;
        stats.per_feature.push_back((mean - ref.mean[j]) / std::sqrt(ref.variance[j] / n));
    }
    return stats;
}

DriftReport run_drift_test(const DriftConfig& config, const Dataset& current,
                           const Dataset* reference_data, const std::string& comparison_step_id,
                           const std::string& threshold_step_id) {
    if (!(config.z_threshold > 0.0) || !(config.ks_threshold > 0.0)) {
        throw ExecutorError("drift thresholds must be > 0");
    }
    DriftReport report;
    report.statistics = drift_statistics(current, config, reference_data);
    report.comparison_step = {comparison_step_id, Status::Passed};

    const double threshold =
        report.statistics.empirical ? config.ks_threshold : config.z_threshold;
    for (std::size_t j = 0; j < report.statistics.per_feature.size(); ++j) {
        if (std::abs(report.statistics.per_feature[j]) > threshold) {
            report.offending_features.push_back(j);
        }
    }
    report.drifted = !report.offending_features.empty();
    report.threshold_step = {threshold_step_id,
                             report.drifted ? Status::Failed : Status::Passed};
    return report;
}

} // namespace atml
