#pragma once

#include "aicarbon/cci.h"
#include "aicarbon/config.h"
#include "aicarbon/lca.h"
#include "aicarbon/table.h"
#include "aicarbon/telemetry.h"
#include "aicarbon/weighting.h"
#include "aicarbon/workload.h"

#include <optional>
#include <string>
#include <vector>

namespace aicarbon::report {

/// Everything measured and inventoried for one platform.
struct PlatformResult
{
    telemetry::PlatformSpec spec;
    telemetry::FleetWindow window;
    lca::EmbodiedBreakdown embodied;
    double kwh_per_exaflop = 0.0;
    double lifetime_exaflops = 0.0;
    double lifetime_energy_kwh_per_chip = 0.0;

    cci::CciReport cci(const config::ResolvedFactor& factor) const;
    /// Lifetime operational emissions per chip, kg.
    double operational_kg(double factorGPerKwh) const;
};

struct FleetEvaluation
{
    telemetry::FleetDataset dataset;
    telemetry::CompletenessFilter filter;
    std::vector<PlatformResult> platforms;
    std::vector<std::string> warnings;

    const PlatformResult& at(const std::string& platformId) const;
};

telemetry::FleetDataset load_telemetry(const config::RunConfig& config);

/// Excludes incomplete samples, aggregates every configured platform with
/// data and attaches its embodied breakdown. Throws "empty window" when no
/// platform has usable samples.
FleetEvaluation evaluate_fleet(const config::RunConfig& config, telemetry::FleetDataset dataset);

/// Per-platform rows: power, energy per ExaFLOP, lifetime emissions and CCI.
Table platform_table(const FleetEvaluation& fleet, const config::RunConfig& config, const std::string& standard);
/// Per life-cycle stage CCI, chart-ready.
Table stage_table(const FleetEvaluation& fleet, const config::RunConfig& config, const std::string& standard);
/// Manufacturing emissions per chip by tray role and component category.
Table category_table(const FleetEvaluation& fleet, const config::RunConfig& config);

Table cci_table(const FleetEvaluation& fleet, const config::RunConfig& config, const std::string& standard,
                std::optional<double> workloadFlops);

Table ingest_table(const FleetEvaluation& fleet);
Table rejection_table(const telemetry::FleetDataset& dataset);

/// LCA-amortized and corporate yearly views for every inventoried platform.
Table lca_table(const config::RunConfig& config, int deploymentYear);

struct ScenarioResult
{
    std::string scenario;
    std::string platform_id;
    std::string baseline_standard;
    double baseline_total_cci = 0.0;
    double manufacturing_reduction = 0.0;
    double embodied_cci = 0.0;
    double operational_cci = 0.0;
    double ratio_vs_baseline = 0.0;
    std::string reference;
    double ratio_vs_reference = 0.0;

    double total_cci() const noexcept { return embodied_cci + operational_cci; }
};

/// Scenario total CCI from an embodied CCI and an energy intensity. With
/// manufacturing CFE enabled the whole embodied CCI shrinks by the
/// manufacturing reduction.
double scenario_embodied_cci(double embodiedCci, const factors::ScenarioSpec& scenario);

std::vector<ScenarioResult> evaluate_scenario(const FleetEvaluation& fleet, const config::RunConfig& config, const std::string& scenario,
                                              const std::string& baselineStandard, const std::string& referencePlatform,
                                              std::vector<std::string>* warnings = nullptr);

Table scenario_table(const std::vector<ScenarioResult>& results);

Table workload_table(const std::vector<workload::WorkloadSummary>& rows);

/// Machine-interval observations for the given generations (all when empty).
std::vector<weighting::Observation> observations(const telemetry::FleetDataset& dataset, const telemetry::PlatformCatalog& catalog,
                                                 const std::vector<std::string>& generations);

/// Absolute and baseline-relative metrics, unweighted and weighted.
Table comparison_table(const weighting::Comparison& comparison);
Table exclusion_table(const weighting::Comparison& comparison);

}
