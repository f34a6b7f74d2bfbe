#include "aicarbon/factors.h"

#include "aicarbon/csv.h"
#include "aicarbon/error.h"
#include "aicarbon/numeric.h"

#include <algorithm>
#include <fstream>

namespace aicarbon::factors {

double mb_factor(double lbFactor, double cfeImpact)
{
    if (!(lbFactor >= 0.0)) {
        throw ComputationError("location-based factor must be >= 0, got {}", lbFactor);
    }
    if (!(cfeImpact >= 0.0)) {
        throw ComputationError("CFE impact must be >= 0, got {}", cfeImpact);
    }
    if (cfeImpact > lbFactor) {
        throw ComputationError("over-procurement not representable under MB (impact {} > LB {})", cfeImpact, lbFactor);
    }
    return lbFactor - cfeImpact;
}

EmissionFactorSet::EmissionFactorSet(int year, double lbFactor, double cfeImpact, std::string label)
: _year(year)
, _lb(lbFactor)
, _cfeImpact(cfeImpact)
, _mb(factors::mb_factor(lbFactor, cfeImpact))
, _label(std::move(label))
{
}

void HourlyGridSeries::validate() const
{
    for (std::size_t i = 0; i < hours.size(); ++i) {
        const auto& h = hours[i];
        if (!(h.load_kwh >= 0.0) || !(h.cfe_kwh >= 0.0) || !(h.grid_factor >= 0.0)) {
            throw ComputationError("grid '{}' hour {}: quantities must be >= 0", grid_id, format_rfc3339(h.hour_start));
        }
        if (i > 0 && h.hour_start != hours[i - 1].hour_start + 3600) {
            throw ComputationError("grid '{}': hours are not contiguous at {}", grid_id, format_rfc3339(h.hour_start));
        }
    }
}

double Hourly247Result::factor() const
{
    if (!(total_load_kwh > 0.0)) {
        throw ComputationError("zero total load: 24/7 factor undefined");
    }
    return emissions_g / total_load_kwh;
}

double Hourly247Result::cfe_share() const
{
    if (!(total_load_kwh > 0.0)) {
        throw ComputationError("zero total load: CFE share undefined");
    }
    return matched_cfe_kwh / total_load_kwh;
}

namespace {

struct HourlySums
{
    ExactSum emissions;
    ExactSum load;
    ExactSum matched;
};

void accumulate_247(const HourlyGridSeries& series, HourlySums& sums)
{
    series.validate();
    for (const auto& h : series.hours) {
        const double matched = std::min(h.load_kwh, h.cfe_kwh);
        sums.emissions += (h.load_kwh - matched) * h.grid_factor;
        sums.load += h.load_kwh;
        sums.matched += matched;
    }
}

Hourly247Result finish(const HourlySums& sums)
{
    return {sums.emissions.value(), sums.load.value(), sums.matched.value()};
}

}

Hourly247Result hourly_247_emissions(const HourlyGridSeries& series)
{
    if (series.hours.empty()) {
        throw ComputationError("grid '{}': empty hourly series", series.grid_id);
    }
    HourlySums sums;
    accumulate_247(series, sums);
    return finish(sums);
}

Hourly247Result hourly_247_emissions(const std::vector<HourlyGridSeries>& grids)
{
    HourlySums sums;
    bool any = false;
    for (const auto& g : grids) {
        any = any || !g.hours.empty();
        accumulate_247(g, sums);
    }
    if (!any) {
        throw ComputationError("empty hourly series");
    }
    return finish(sums);
}

EmissionFactorSet annual_factors(const std::vector<HourlyGridSeries>& grids, int year, std::string label)
{
    ExactSum lbEmissions;
    ExactSum load;
    ExactSum credited;
    for (const auto& g : grids) {
        g.validate();
        for (const auto& h : g.hours) {
            lbEmissions += h.load_kwh * h.grid_factor;
            load += h.load_kwh;
            credited += h.cfe_kwh * h.grid_factor;
        }
    }
    if (!(load.value() > 0.0)) {
        throw ComputationError("zero total load: annual factors undefined");
    }
    const double lb = lbEmissions.value() / load.value();
    const double impact = std::min(lb, credited.value() / load.value());
    return EmissionFactorSet(year, lb, impact, std::move(label));
}

std::vector<HourlyGridSeries> read_hourly_csv(std::istream& input)
{
    csv::Reader reader(input);
    std::vector<HourlyGridSeries> grids;
    if (reader.header().empty()) {
        return grids;
    }

    const char* names[] = {"grid_id", "hour_start", "load_kwh", "cfe_kwh", "grid_factor"};
    std::size_t index[5];
    for (int i = 0; i < 5; ++i) {
        auto col = reader.column(names[i]);
        if (!col) {
            throw IngestError("hourly CSV is missing column '{}'", names[i]);
        }
        index[i] = *col;
    }

    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != reader.header().size()) {
            throw IngestError("hourly CSV line {}: expected {} fields", reader.line_number(), reader.header().size());
        }
        auto number = [&](int c) {
            auto v = csv::parse_double(fields[index[c]]);
            if (!v) {
                throw IngestError("hourly CSV line {}: unparseable {}", reader.line_number(), names[c]);
            }
            return *v;
        };
        auto gridId = csv::trim(fields[index[0]]);
        auto hour = parse_rfc3339(csv::trim(fields[index[1]]));
        if (gridId.empty() || !hour) {
            throw IngestError("hourly CSV line {}: bad grid_id or hour_start", reader.line_number());
        }

        auto iter = std::find_if(grids.begin(), grids.end(), [&](const auto& g) { return g.grid_id == gridId; });
        if (iter == grids.end()) {
            grids.push_back({gridId, {}});
            iter = std::prev(grids.end());
        }
        iter->hours.push_back({*hour, number(2), number(3), number(4)});
    }

    for (auto& g : grids) {
        std::sort(g.hours.begin(), g.hours.end(), [](const auto& a, const auto& b) { return a.hour_start < b.hour_start; });
    }
    return grids;
}

std::vector<HourlyGridSeries> read_hourly_csv(const std::filesystem::path& path)
{
    std::ifstream input(path);
    if (!input) {
        throw IngestError("cannot open hourly series '{}'", path.string());
    }
    return read_hourly_csv(input);
}

double operational_emissions(double energyKwh, double factorGPerKwh)
{
    if (!(energyKwh >= 0.0) || !(factorGPerKwh >= 0.0)) {
        throw ComputationError("operational emissions need non-negative energy and factor");
    }
    return energyKwh * factorGPerKwh;
}

void ScenarioSpec::validate() const
{
    auto fraction = [&](double v, const char* what) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError("scenario '{}': {} must be in [0, 1]", name, what);
        }
    };
    fraction(target_cfe_fraction, "target_cfe_fraction");
    fraction(manufacturing_electricity_share, "manufacturing_electricity_share");
    if (!(operations_factor_g_per_kwh >= 0.0)) {
        throw ConfigError("scenario '{}': negative operations factor", name);
    }
    if (manufacturing_cfe && (!(manufacturing_baseline_factor > 0.0) || !(manufacturing_target_factor >= 0.0))) {
        throw ConfigError("scenario '{}': manufacturing factors must be baseline > 0, target >= 0", name);
    }
}

ManufacturingReduction scenario_manufacturing_reduction(const ScenarioSpec& spec)
{
    if (!(spec.manufacturing_baseline_factor > 0.0)) {
        throw ComputationError("scenario '{}': manufacturing baseline factor must be > 0", spec.name);
    }
    ManufacturingReduction result;
    result.fraction = spec.manufacturing_electricity_share * (1.0 - spec.manufacturing_target_factor / spec.manufacturing_baseline_factor);
    if (result.fraction < 0.0) {
        result.warning = fmt::format("scenario '{}' raises manufacturing emissions by {:.1f}%", spec.name, -100.0 * result.fraction);
    }
    return result;
}

}
