#pragma once

#include "aicarbon/timeutil.h"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aicarbon::factors {

/// Location-based minus CFE impact. Throws ComputationError when the impact
/// exceeds the location-based factor or either input is negative.
double mb_factor(double lbFactor, double cfeImpact);

/// Annual electricity emission factors, gCO2e/kWh.
class EmissionFactorSet
{
public:
    EmissionFactorSet(int year, double lbFactor, double cfeImpact, std::string label = {});

    int year() const noexcept { return _year; }
    double lb_factor() const noexcept { return _lb; }
    double cfe_impact() const noexcept { return _cfeImpact; }
    double mb_factor() const noexcept { return _mb; }
    const std::string& label() const noexcept { return _label; }

private:
    int _year;
    double _lb;
    double _cfeImpact;
    double _mb;
    std::string _label;
};

struct HourlyRecord
{
    EpochSeconds hour_start = 0;
    double load_kwh = 0.0;
    double cfe_kwh = 0.0;
    double grid_factor = 0.0; // gCO2e/kWh
};

/// Load, procured CFE and grid intensity for one grid, hour by hour.
struct HourlyGridSeries
{
    std::string grid_id;
    std::vector<HourlyRecord> hours;

    /// Throws ComputationError on negative quantities or non-contiguous hours.
    void validate() const;
};

struct Hourly247Result
{
    double emissions_g = 0.0;
    double total_load_kwh = 0.0;
    double matched_cfe_kwh = 0.0;

    /// Throws ComputationError when the total load is zero.
    double factor() const;
    double cfe_share() const;
};

/// Hour-by-hour, grid-by-grid CFE matching. Surplus CFE in one hour is
/// discarded and never offsets another hour or another grid.
Hourly247Result hourly_247_emissions(const HourlyGridSeries& series);
Hourly247Result hourly_247_emissions(const std::vector<HourlyGridSeries>& grids);

/// Annual (volume-matched) accounting over the same data: the location-based
/// factor is the load-weighted grid factor, and procured CFE is credited at
/// the grid factor of the hour it was generated, capped at the location-based
/// emissions.
EmissionFactorSet annual_factors(const std::vector<HourlyGridSeries>& grids, int year, std::string label = {});

/// Reads grid_id,hour_start,load_kwh,cfe_kwh,grid_factor. One series per
/// grid_id, in order of first appearance, hours sorted.
std::vector<HourlyGridSeries> read_hourly_csv(std::istream& input);
std::vector<HourlyGridSeries> read_hourly_csv(const std::filesystem::path& path);

/// gCO2e for a quantity of electricity.
double operational_emissions(double energyKwh, double factorGPerKwh);

struct ScenarioSpec
{
    std::string name;
    double target_cfe_fraction = 0.0;
    double operations_factor_g_per_kwh = 0.0;
    /// When false the scenario only changes the operational factor.
    bool manufacturing_cfe = false;
    double manufacturing_electricity_share = 0.0;
    double manufacturing_baseline_factor = 0.0;
    double manufacturing_target_factor = 0.0;

    void validate() const;
};

struct ManufacturingReduction
{
    double fraction = 0.0;
    std::optional<std::string> warning;
};

/// Share of manufacturing emissions removed when the electricity part of
/// manufacturing moves from the baseline to the target factor.
ManufacturingReduction scenario_manufacturing_reduction(const ScenarioSpec& spec);

}
