#pragma once

#include "aicarbon/lca.h"
#include "aicarbon/telemetry.h"
#include "aicarbon/timeutil.h"

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace aicarbon::workload {

struct MachineInterval
{
    std::string machine_id;
    EpochSeconds interval_start = 0;
    double power_w = 0.0;
    double duty_cycle = 0.0;
};

enum class RunStatus
{
    Complete,
    Incomplete,
};

/// A training job pinned to a fixed set of machines.
struct WorkloadRun
{
    std::string run_id;
    std::string workload;
    std::string platform_id;
    std::vector<std::string> machines;
    double step_time_s = 0.0;
    double flops_per_step = 0.0;
    RunStatus status = RunStatus::Complete;
    std::vector<MachineInterval> intervals;

    void validate() const;
};

struct OnDutyPower
{
    /// Mean power per machine over on-duty intervals.
    double mean_power_w = 0.0;
    std::size_t included_intervals = 0;
    std::size_t excluded_intervals = 0;
};

inline constexpr double kDefaultOnDutyThreshold = 0.8;

/// An interval counts only when every machine of the run reports a duty cycle
/// at or above the threshold. Throws when nothing qualifies.
OnDutyPower on_duty_power(const WorkloadRun& run, double threshold = kDefaultOnDutyThreshold);

struct StepOptions
{
    double factor_g_per_kwh = 0.0;
    double pue = 1.0;
    bool apply_pue = false;
    double threshold = kDefaultOnDutyThreshold;
};

struct StepEmissions
{
    double operational_g = 0.0;
    double embodied_g = 0.0;
    double power_w = 0.0;

    double total_g() const noexcept { return operational_g + embodied_g; }
};

/// Per machine-step. Operational: P x t x f / 3.6e6 (x PUE when requested).
/// Embodied: machine manufacturing + transport spread evenly over the
/// lifetime in seconds, times the step time. A null inventory throws.
StepEmissions emissions_per_step(const WorkloadRun& run, const lca::MachineInventory* inventory,
                                 const telemetry::PlatformSpec& spec, const StepOptions& options);

/// gCO2e per ExaFLOP for a step of known FLOP count.
double workload_cci(const StepEmissions& step, double flopsPerStep);

/// Runs flagged incomplete need a manual decision before use.
struct RunValidation
{
    std::set<std::string> accept;
    std::set<std::string> reject;
};

struct RunSet
{
    std::vector<WorkloadRun> runs;
    std::vector<std::string> skipped; // "run_id: reason"
};

/// Manifest JSON plus per-interval JSONL. Unaccepted incomplete runs and
/// rejected runs are moved to skipped.
RunSet load_runs(std::istream& manifest, std::istream& intervals);
RunSet load_runs(const std::filesystem::path& manifest, const std::filesystem::path& intervals);

/// Mean over runs of one (workload, platform) pair.
struct WorkloadSummary
{
    std::string workload;
    std::string platform_id;
    std::size_t runs = 0;
    double step_time_s = 0.0;
    double power_w = 0.0;
    double operational_g = 0.0;
    double embodied_g = 0.0;
    double flops_per_step = 0.0;
    double cci = 0.0;

    double total_g() const noexcept { return operational_g + embodied_g; }
};

std::vector<WorkloadSummary> summarize(const RunSet& runs, const telemetry::PlatformCatalog& catalog,
                                       const std::map<std::string, lca::MachineInventory>& inventories, const StepOptions& options);

}
