#pragma once

#include "aicarbon/factors.h"
#include "aicarbon/lca.h"
#include "aicarbon/telemetry.h"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aicarbon::config {

inline constexpr double kDefaultPue = 1.10;

struct WorkloadSettings
{
    std::optional<std::filesystem::path> manifest;
    std::optional<std::filesystem::path> intervals;
    double factor_g_per_kwh = 122.5;
    bool apply_pue = false;
    double on_duty_threshold = 0.8;
};

struct WeightingSettings
{
    int buckets = 10;
    std::string baseline;
    /// Empty means every platform present in the telemetry.
    std::vector<std::string> generations;
    std::string standard = "market";
};

struct RunConfig
{
    std::filesystem::path base_dir;
    telemetry::PlatformCatalog platforms;
    /// Platform ids in declaration order.
    std::vector<std::string> platform_order;
    std::map<std::string, lca::MachineInventory> inventories;
    lca::GwpTable gwp;
    std::optional<std::filesystem::path> telemetry;
    double pue = kDefaultPue;

    std::optional<factors::EmissionFactorSet> annual;
    std::optional<double> hourly247_factor;
    std::map<std::string, factors::ScenarioSpec> scenarios;

    WorkloadSettings workload;
    WeightingSettings weighting;

    /// Inventory for a platform, following inventory_ref. Null when absent.
    const lca::MachineInventory* inventory_for(const telemetry::PlatformSpec& spec) const;
};

/// Paths inside the document resolve against baseDir. Section values may be
/// inline objects or paths to separate JSON files.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& baseDir);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);

telemetry::PlatformCatalog parse_platforms(const nlohmann::json& doc);
lca::GwpTable parse_gwp(const nlohmann::json& doc);
/// Components may give kg_co2e directly or a {gas: mass_kg} map converted
/// with the GWP table.
std::map<std::string, lca::MachineInventory> parse_inventories(const nlohmann::json& doc, const lca::GwpTable& gwp);
factors::ScenarioSpec parse_scenario(const std::string& name, const nlohmann::json& doc);

/// Accounting standards: location, market, hourly247, scenario:<name>.
struct ResolvedFactor
{
    std::string standard;
    double g_per_kwh = 0.0;
    const factors::ScenarioSpec* scenario = nullptr;
};

ResolvedFactor resolve_factor(const RunConfig& config, const std::string& standard);

}
