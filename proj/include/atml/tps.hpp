#ifndef ATML_TPS_HPP
#define ATML_TPS_HPP

#include "atml/dataset.hpp"
#include "atml/documents.hpp"
#include "atml/executors.hpp"
#include "atml/model_zoo.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace atml {

/// Raised before any execution when a TestRef does not resolve to exactly
/// one test (all-or-nothing resolution).
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunContext {
    const DatasetRegistry* datasets = nullptr;
    const ModelRegistry* models = nullptr;
    UutDescriptor uut;
    std::optional<EnvironmentDescriptor> station;
    std::optional<EnvironmentDescriptor> adapter;
    std::uint64_t seed = 0;
    bool clip01 = false;
    std::function<UtcTimestamp()> clock = [] { return UtcTimestamp::now(); };
};

/// Executes the set strictly in TestRef order; test i runs with derived seed
/// ctx.seed + i. A failing test never halts the run.
TestResultsDocument run_tps(const TestProgramSet& tps,
                            std::span<const TestDescription> descriptions,
                            const RunContext& ctx);

/// Applies the adapter's declared steps in order. Standardize uses the
/// population standard deviation; constant features map to 0 in both modes.
Dataset apply_preprocessing(const EnvironmentDescriptor& adapter, const Dataset& data);

/// Deterministic limit-violation message; values use fixed 4 decimal places.
std::string emit_failure_diagnostic(const TestCase& test, const std::string& result_name,
                                    double value, const NumericLimit& limit);

} // namespace atml

#endif
