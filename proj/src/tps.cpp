#include "atml/tps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace atml {

namespace {

std::string fixed4(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

std::string require_dataset_id(const TestCase& test) {
    const TestRequirement* req = test.requirement("Dataset ID");
    if (!req) throw ExecutorError("missing \"Dataset ID\" requirement");
    const auto* id = std::get_if<std::string>(&req->value);
    if (!id || id->empty()) {
        throw ExecutorError("\"Dataset ID\" requirement must carry a dataset identifier");
    }
    return *id;
}

double numeric_requirement(const TestRequirement& req) {
    if (const auto* d = std::get_if<double>(&req.value)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&req.value)) return static_cast<double>(*i);
    throw ExecutorError("requirement \"" + req.name + "\" must be numeric");
}

std::string result_name_or(const TestCase& test, std::size_t index,
                           const std::string& fallback) {
    if (index < test.expected_results.size()) return test.expected_results[index].result_name;
    return fallback;
}

const double* step_property(const TestCase& test, const std::string& name) {
    if (!test.sequence) return nullptr;
    for (const TestStep& step : *test.sequence) {
        for (const PropertyEntry& prop : step.properties) {
            if (prop.name == name) {
                if (const auto* d = std::get_if<double>(&prop.value)) return d;
            }
        }
    }
    return nullptr;
}

DriftConfig build_drift_config(const TestCase& test, std::size_t n_features) {
    DriftConfig config;
    config.dataset_id = require_dataset_id(test);

    const TestRequirement* ref_req = test.requirement("Reference Dataset ID");
    if (!ref_req && test.sequence) {
        for (const TestStep& step : *test.sequence) {
            for (const TestRequirement& req : step.requirements) {
                if (req.name == "Reference Dataset ID") ref_req = &req;
            }
        }
    }
    if (ref_req) {
        const auto* id = std::get_if<std::string>(&ref_req->value);
        if (!id || id->empty()) {
            throw ExecutorError("\"Reference Dataset ID\" must carry a dataset identifier");
        }
        config.reference_dataset_id = *id;
    }

    // Mean_<j>/Variance_<j> step properties, 1-based feature index
    std::map<std::size_t, double> means;
    std::map<std::size_t, double> variances;
    if (test.sequence) {
        for (const TestStep& step : *test.sequence) {
            for (const PropertyEntry& prop : step.properties) {
                const auto* d = std::get_if<double>(&prop.value);
                if (!d) continue;
                std::size_t index = 0;
                if (std::sscanf(prop.name.c_str(), "Mean_%zu", &index) == 1 && index >= 1) {
                    means[index - 1] = *d;
                } else if (std::sscanf(prop.name.c_str(), "Variance_%zu", &index) == 1 &&
                           index >= 1) {
                    variances[index - 1] = *d;
                }
            }
        }
    }
    if (!means.empty()) {
        GaussianReference ref;
        ref.mean.assign(n_features, 0.0);
        ref.variance.assign(n_features, 0.0);
        for (std::size_t j = 0; j < n_features; ++j) {
            auto m = means.find(j);
            auto v = variances.find(j);
            if (m == means.end() || v == variances.end()) {
                throw ExecutorError("Gaussian reference is missing Mean_" +
                                    std::to_string(j + 1) + " or Variance_" +
                                    std::to_string(j + 1));
            }
            ref.mean[j] = m->second;
            ref.variance[j] = v->second;
        }
        config.gaussian = std::move(ref);
    }

    if (const double* z = step_property(test, "Z_Threshold")) config.z_threshold = *z;
    if (const double* ks = step_property(test, "KS_Threshold")) config.ks_threshold = *ks;
    return config;
}

struct Execution {
    std::vector<MeasuredValue> measured;
    std::vector<std::string> failure_diagnostics;
};

void evaluate_expected(const TestCase& test, Execution& exec) {
    for (const ExpectedResult& expected : test.expected_results) {
        const MeasuredValue* found = nullptr;
        for (const MeasuredValue& m : exec.measured) {
            if (m.result_name == expected.result_name) found = &m;
        }
        if (!found) {
            throw ExecutorError("no measured value for expected result \"" +
                                expected.result_name + "\"");
        }
        if (!std::isfinite(found->value)) {
            throw ExecutorError("measured value for \"" + expected.result_name +
                                "\" is not finite");
        }
        if (evaluate_limit(found->value, expected.limit) == Status::Failed) {
            exec.failure_diagnostics.push_back(
                emit_failure_diagnostic(test, expected.result_name, found->value,
                                        expected.limit));
        }
    }
}

Execution execute_test(const TestCase& test, const RunContext& ctx, std::uint64_t seed) {
    Execution exec;
    switch (test.kind) {
        case TestKind::CrossValidation: {
            const TestRequirement* folds = test.requirement("Folds");
            if (!folds) throw ExecutorError("missing \"Folds\" requirement");
            CvConfig config;
            config.folds = static_cast<int>(numeric_requirement(*folds));
            config.seed = seed;
            config.dataset_id = require_dataset_id(test);
            Dataset data = ctx.datasets->resolve(config.dataset_id);
            if (ctx.adapter) data = apply_preprocessing(*ctx.adapter, data);
            ModelSpec spec = ctx.models->resolve(ctx.uut.uut_identifier);
            double score = run_cross_validation(config, spec, data);
            exec.measured.push_back({result_name_or(test, 0, "ValidationScore"), score});
            break;
        }
        case TestKind::Adversarial: {
            Dataset data = ctx.datasets->resolve(require_dataset_id(test));
            if (ctx.adapter) data = apply_preprocessing(*ctx.adapter, data);
            ModelSpec spec = ctx.models->resolve(ctx.uut.uut_identifier);
            std::size_t attack = 0;
            for (const TestRequirement& req : test.requirements) {
                if (req.name != "Epsilon") continue;
                AttackConfig config;
                config.epsilon = numeric_requirement(req);
                config.dataset_id = data.id;
                config.clip01 = ctx.clip01;
                double score = run_adversarial_test(config, spec, data, seed);
                exec.measured.push_back(
                    {result_name_or(test, attack, "RobustnessScore"), score});
                ++attack;
            }
            if (attack == 0) throw ExecutorError("missing \"Epsilon\" requirement");
            break;
        }
        case TestKind::Drift: {
            Dataset current = ctx.datasets->resolve(require_dataset_id(test));
            if (ctx.adapter) current = apply_preprocessing(*ctx.adapter, current);
            DriftConfig config = build_drift_config(test, current.n_features);
            std::optional<Dataset> reference;
            if (config.reference_dataset_id) {
                reference = ctx.datasets->resolve(*config.reference_dataset_id);
                if (ctx.adapter) reference = apply_preprocessing(*ctx.adapter, *reference);
            }
            std::string step1 = "Step_1";
            std::string step2 = "Step_2";
            if (test.sequence && test.sequence->size() >= 2) {
                step1 = (*test.sequence)[0].step_id;
                step2 = (*test.sequence)[1].step_id;
            }
            DriftReport report = run_drift_test(config, current,
                                                reference ? &*reference : nullptr, step1, step2);
            const char* prefix = report.statistics.empirical ? "KS_D_" : "Z_";
            for (std::size_t j = 0; j < report.statistics.per_feature.size(); ++j) {
                exec.measured.push_back(
                    {prefix + std::to_string(j + 1), report.statistics.per_feature[j]});
            }
            if (report.drifted) {
                std::ostringstream msg;
                msg << "drift detected in features:";
                for (std::size_t j : report.offending_features) {
                    msg << ' '
                        << (j < current.feature_names.size() ? current.feature_names[j]
                                                             : std::to_string(j + 1));
                    msg << " (" << (report.statistics.empirical ? "D=" : "z=")
                        << fixed4(report.statistics.per_feature[j]) << ")";
                }
                msg << "; threshold "
                    << fixed4(report.statistics.empirical ? config.ks_threshold
                                                          : config.z_threshold);
                exec.failure_diagnostics.push_back(msg.str());
            }
            break;
        }
        case TestKind::Generic:
            throw ExecutorError("no executor for test kind Generic");
    }
    evaluate_expected(test, exec);
    return exec;
}

} // namespace

Dataset apply_preprocessing(const EnvironmentDescriptor& adapter, const Dataset& data) {
    if (adapter.kind != EnvironmentKind::Adapter) {
        throw ExecutorError("preprocessing requires an Adapter descriptor");
    }
    Dataset out = data;
    const std::size_t n = out.rows();
    for (PreprocessingStep step : adapter.preprocessing) {
        if (step == PreprocessingStep::None) continue;
        for (std::size_t j = 0; j < out.n_features; ++j) {
            if (step == PreprocessingStep::Standardize) {
                double mean = 0.0;
                for (std::size_t i = 0; i < n; ++i) mean += out.at(i, j);
                mean /= static_cast<double>(n);
                double var = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = out.at(i, j) - mean;
                    var += d * d;
                }
                var /= static_cast<double>(n);
                const double sd = std::sqrt(var);
                for (std::size_t i = 0; i < n; ++i) {
                    double& v = out.values[i * out.n_features + j];
                    v = sd > 0.0 ? (v - mean) / sd : 0.0;
                }
            } else { // MinMax
                double lo = out.at(0, j);
                double hi = lo;
                for (std::size_t i = 1; i < n; ++i) {
                    lo = std::min(lo, out.at(i, j));
                    hi = std::max(hi, out.at(i, j));
                }
                const double range = hi - lo;
                for (std::size_t i = 0; i < n; ++i) {
                    double& v = out.values[i * out.n_features + j];
                    v = range > 0.0 ? (v - lo) / range : 0.0;
                }
            }
        }
    }
    return out;
}

std::string emit_failure_diagnostic(const TestCase& test, const std::string& result_name,
                                    double value, const NumericLimit& limit) {
    std::ostringstream msg;
    if (value < limit.low) {
        if (test.kind == TestKind::CrossValidation) {
            msg << "failure is associated with a low cross-validation score: ";
        }
        msg << result_name << " value " << fixed4(value) << " is below the Low limit "
            << fixed4(limit.low);
    } else {
        msg << result_name << " value " << fixed4(value) << " is above the High limit "
            << fixed4(limit.high);
    }
    return msg.str();
}

TestResultsDocument run_tps(const TestProgramSet& tps,
                            std::span<const TestDescription> descriptions,
                            const RunContext& ctx) {
    // all-or-nothing resolution before any test runs
    std::vector<const TestCase*> resolved;
    resolved.reserve(tps.test_refs.size());
    for (const std::string& ref : tps.test_refs) {
        const TestCase* found = nullptr;
        for (const TestDescription& desc : descriptions) {
            if (const TestCase* test = desc.test_by_id(ref)) {
                if (found) {
                    throw ResolutionError("TestRef '" + ref +
                                          "' resolves to multiple test descriptions");
                }
                found = test;
            }
        }
        if (!found) {
            throw ResolutionError("TestRef '" + ref +
                                  "' does not resolve to any supplied test description");
        }
        resolved.push_back(found);
    }

    TestResultsDocument results;
    if (ctx.station || ctx.adapter) {
        results.environment = RunEnvironment{ctx.station, ctx.adapter};
    }

    for (std::size_t i = 0; i < resolved.size(); ++i) {
        const TestCase& test = *resolved[i];
        TestResultEntry entry;
        entry.unique_id = test.unique_id;
        try {
            Execution exec = execute_test(test, ctx, ctx.seed + i);
            entry.measured = std::move(exec.measured);
            if (exec.failure_diagnostics.empty()) {
                entry.status = Status::Passed;
            } else {
                entry.status = Status::Failed;
                std::string joined;
                for (const std::string& d : exec.failure_diagnostics) {
                    if (!joined.empty()) joined += "; ";
                    joined += d;
                }
                entry.diagnostic = std::move(joined);
            }
        } catch (const std::exception& e) {
            entry.status = Status::Error;
            entry.diagnostic = e.what();
        }
        entry.timestamp = ctx.clock();
        results.entries.push_back(std::move(entry));
    }
    return results;
}

} // namespace atml
