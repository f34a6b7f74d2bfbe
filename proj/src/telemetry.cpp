#include "aicarbon/telemetry.h"

#include "aicarbon/csv.h"
#include "aicarbon/error.h"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aicarbon::telemetry {

using json = nlohmann::json;

void PlatformSpec::validate() const
{
    if (platform_id.empty()) {
        throw ConfigError("platform without platform_id");
    }
    if (chips_per_machine < 1) {
        throw ConfigError("platform '{}': chips_per_machine must be >= 1", platform_id);
    }
    if (trays_per_machine < 1) {
        throw ConfigError("platform '{}': trays_per_machine must be >= 1", platform_id);
    }
    if (!(lifetime_years > 0.0)) {
        throw ConfigError("platform '{}': lifetime_years must be > 0", platform_id);
    }
    if (!(rectifier_overhead >= 0.0)) {
        throw ConfigError("platform '{}': rectifier_overhead must be >= 0", platform_id);
    }
    if (!(peak_flops_per_s >= 0.0)) {
        throw ConfigError("platform '{}': peak_flops_per_s must be >= 0", platform_id);
    }
}

void PlatformCatalog::add(PlatformSpec spec)
{
    spec.validate();
    auto id = spec.platform_id;
    if (!_platforms.emplace(id, std::move(spec)).second) {
        throw ConfigError("duplicate platform '{}'", id);
    }
}

const PlatformSpec* PlatformCatalog::find(const std::string& platformId) const
{
    auto iter = _platforms.find(platformId);
    return iter == _platforms.end() ? nullptr : &iter->second;
}

const PlatformSpec& PlatformCatalog::at(const std::string& platformId) const
{
    if (auto* spec = find(platformId)) {
        return *spec;
    }
    throw ConfigError("unknown platform '{}'", platformId);
}

namespace {

/// Thrown while decoding a single record; becomes a Rejection.
struct RowError
{
    std::string reason;
};

struct RawRecord
{
    std::optional<std::string> machineId;
    std::optional<std::string> platformId;
    std::optional<std::string> intervalStart;
    std::optional<std::vector<double>> trayPower;
    std::optional<double> dutyCycle;
    std::optional<double> flops;
};

double parse_number(std::string_view field, std::string_view column)
{
    auto value = csv::parse_double(field);
    if (!value) {
        throw RowError{fmt::format("unparseable {} '{}'", column, csv::trim(field))};
    }
    return *value;
}

std::vector<double> parse_tray_list(std::string_view field)
{
    std::vector<double> result;
    std::size_t start = 0;
    while (start <= field.size()) {
        auto end = field.find(';', start);
        if (end == std::string_view::npos) {
            end = field.size();
        }
        result.push_back(parse_number(field.substr(start, end - start), "tray_power_w"));
        start = end + 1;
    }
    return result;
}

TelemetrySample validate_record(const RawRecord& raw, const PlatformCatalog& catalog)
{
    TelemetrySample sample;

    if (!raw.machineId || raw.machineId->empty()) {
        throw RowError{"missing machine_id"};
    }
    sample.machine_id = *raw.machineId;

    if (!raw.platformId || raw.platformId->empty()) {
        throw RowError{"missing platform_id"};
    }
    if (catalog.find(*raw.platformId) == nullptr) {
        throw RowError{fmt::format("unknown platform_id '{}'", *raw.platformId)};
    }
    sample.platform_id = *raw.platformId;

    if (!raw.intervalStart || raw.intervalStart->empty()) {
        throw RowError{"missing interval_start"};
    }
    auto t = parse_rfc3339(*raw.intervalStart);
    if (!t) {
        throw RowError{fmt::format("unparseable interval_start '{}'", *raw.intervalStart)};
    }
    auto snapped = snap_to_grid(*t, static_cast<std::int64_t>(kIntervalSeconds), kSnapToleranceSeconds);
    if (!snapped) {
        throw RowError{fmt::format("interval_start '{}' is off the 300 s grid", *raw.intervalStart)};
    }
    sample.interval_start = *snapped;

    if (raw.trayPower) {
        for (double p : *raw.trayPower) {
            if (!(p >= 0.0)) {
                throw RowError{fmt::format("tray_power_w {} is negative", p)};
            }
        }
        if (!raw.trayPower->empty()) {
            sample.tray_power_w = raw.trayPower;
        }
    }
    if (raw.dutyCycle) {
        if (!(*raw.dutyCycle >= 0.0 && *raw.dutyCycle <= 1.0)) {
            throw RowError{fmt::format("duty_cycle {} outside [0, 1]", *raw.dutyCycle)};
        }
        sample.duty_cycle = raw.dutyCycle;
    }
    if (raw.flops) {
        if (!(*raw.flops >= 0.0)) {
            throw RowError{fmt::format("flops {} is negative", *raw.flops)};
        }
        sample.flops = raw.flops;
    }
    return sample;
}

constexpr std::array<std::string_view, 6> kColumns = {"machine_id", "platform_id", "interval_start", "tray_power_w", "duty_cycle", "flops"};

}

FleetDataset ingest_csv(std::istream& input, const PlatformCatalog& catalog)
{
    FleetDataset dataset;
    csv::Reader reader(input);
    if (reader.header().empty()) {
        return dataset;
    }

    std::array<std::size_t, kColumns.size()> index{};
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
        auto col = reader.column(kColumns[i]);
        if (!col) {
            throw IngestError("telemetry CSV is missing column '{}'", kColumns[i]);
        }
        index[i] = *col;
    }

    std::vector<std::string> fields;
    while (reader.next(fields)) {
        try {
            if (fields.size() != reader.header().size()) {
                throw RowError{fmt::format("expected {} fields, found {}", reader.header().size(), fields.size())};
            }
            auto cell = [&](std::size_t c) -> std::optional<std::string> {
                auto value = csv::trim(fields[index[c]]);
                return value.empty() ? std::nullopt : std::optional<std::string>(std::move(value));
            };

            RawRecord raw;
            raw.machineId = cell(0);
            raw.platformId = cell(1);
            raw.intervalStart = cell(2);
            if (auto trays = cell(3)) {
                raw.trayPower = parse_tray_list(*trays);
            }
            if (auto duty = cell(4)) {
                raw.dutyCycle = parse_number(*duty, "duty_cycle");
            }
            if (auto flops = cell(5)) {
                raw.flops = parse_number(*flops, "flops");
            }
            dataset.samples.push_back(validate_record(raw, catalog));
        } catch (const RowError& e) {
            dataset.rejections.push_back({reader.line_number(), e.reason});
        }
    }
    return dataset;
}

FleetDataset ingest_jsonl(std::istream& input, const PlatformCatalog& catalog)
{
    FleetDataset dataset;
    std::string line;
    std::size_t lineNumber = 0;

    auto optional_string = [](const json& obj, const char* key) -> std::optional<std::string> {
        auto iter = obj.find(key);
        if (iter == obj.end() || iter->is_null()) {
            return std::nullopt;
        }
        if (!iter->is_string()) {
            throw RowError{fmt::format("{} must be a string", key)};
        }
        return iter->get<std::string>();
    };
    auto optional_number = [](const json& obj, const char* key) -> std::optional<double> {
        auto iter = obj.find(key);
        if (iter == obj.end() || iter->is_null()) {
            return std::nullopt;
        }
        if (iter->is_number()) {
            return iter->get<double>();
        }
        if (iter->is_string()) {
            return parse_number(iter->get<std::string>(), key);
        }
        throw RowError{fmt::format("{} must be a number", key)};
    };

    while (std::getline(input, line)) {
        ++lineNumber;
        if (csv::trim(line).empty()) {
            continue;
        }
        try {
            json obj;
            try {
                obj = json::parse(line);
            } catch (const json::parse_error&) {
                throw RowError{"unparseable JSON record"};
            }
            if (!obj.is_object()) {
                throw RowError{"record is not a JSON object"};
            }

            RawRecord raw;
            raw.machineId = optional_string(obj, "machine_id");
            raw.platformId = optional_string(obj, "platform_id");
            raw.intervalStart = optional_string(obj, "interval_start");
            if (auto iter = obj.find("tray_power_w"); iter != obj.end() && !iter->is_null()) {
                if (iter->is_array()) {
                    std::vector<double> trays;
                    for (auto& v : *iter) {
                        if (!v.is_number()) {
                            throw RowError{"tray_power_w entries must be numbers"};
                        }
                        trays.push_back(v.get<double>());
                    }
                    raw.trayPower = std::move(trays);
                } else if (iter->is_string()) {
                    auto text = csv::trim(iter->get<std::string>());
                    if (!text.empty()) {
                        raw.trayPower = parse_tray_list(text);
                    }
                } else if (iter->is_number()) {
                    raw.trayPower = std::vector<double>{iter->get<double>()};
                } else {
                    throw RowError{"tray_power_w must be a list of numbers"};
                }
            }
            raw.dutyCycle = optional_number(obj, "duty_cycle");
            raw.flops = optional_number(obj, "flops");
            dataset.samples.push_back(validate_record(raw, catalog));
        } catch (const RowError& e) {
            dataset.rejections.push_back({lineNumber, e.reason});
        }
    }
    return dataset;
}

FleetDataset ingest_file(const std::filesystem::path& path, const PlatformCatalog& catalog)
{
    std::ifstream input(path);
    if (!input) {
        throw IngestError("cannot open telemetry file '{}'", path.string());
    }
    auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") {
        return ingest_jsonl(input, catalog);
    }
    return ingest_csv(input, catalog);
}

void write_csv(std::ostream& output, const std::vector<TelemetrySample>& samples)
{
    output << "machine_id,platform_id,interval_start,tray_power_w,duty_cycle,flops\n";
    for (const auto& s : samples) {
        std::string trays;
        if (s.tray_power_w) {
            for (std::size_t i = 0; i < s.tray_power_w->size(); ++i) {
                trays += fmt::format("{}{}", i == 0 ? "" : ";", (*s.tray_power_w)[i]);
            }
        }
        output << fmt::format("{},{},{},{},{},{}\n", s.machine_id, s.platform_id, format_rfc3339(s.interval_start), trays,
                              s.duty_cycle ? fmt::format("{}", *s.duty_cycle) : std::string(),
                              s.flops ? fmt::format("{}", *s.flops) : std::string());
    }
}

CompletenessFilter exclude_incomplete(const FleetDataset& dataset)
{
    CompletenessFilter result;
    result.dataset.rejections = dataset.rejections;
    for (const auto& sample : dataset.samples) {
        if (!sample.has_power()) {
            ++result.excluded[kReasonMissingPower];
        } else if (!sample.duty_cycle || !sample.flops) {
            ++result.excluded[kReasonMissingUtilization];
        } else {
            result.dataset.samples.push_back(sample);
        }
    }
    return result;
}

double machine_power(const TelemetrySample& sample, const PlatformSpec& spec)
{
    if (!sample.has_power()) {
        throw ComputationError("no power data for machine '{}'", sample.machine_id);
    }
    ExactSum total;
    for (double p : *sample.tray_power_w) {
        total += p;
    }
    if (spec.readings_include_rectifier) {
        return total.value();
    }
    return total.value() * (1.0 + spec.rectifier_overhead);
}

FleetWindow::FleetWindow(std::string platformId)
: _platformId(std::move(platformId))
{
}

void FleetWindow::add(double machinePowerW, double dutyCycle, double flops)
{
    ++_count;
    _power += machinePowerW;
    _duty += dutyCycle;
    _flops += flops;
}

void FleetWindow::merge(const FleetWindow& other)
{
    _count += other._count;
    _power.merge(other._power);
    _duty.merge(other._duty);
    _flops.merge(other._flops);
}

double FleetWindow::machine_days() const noexcept
{
    return static_cast<double>(_count) * kIntervalSeconds / 86400.0;
}

double FleetWindow::total_energy_kwh() const
{
    return _power.value() * (kIntervalSeconds / kSecondsPerHour) / 1000.0;
}

double FleetWindow::total_flops() const
{
    return _flops.value();
}

double FleetWindow::mean_machine_power_w() const
{
    return _count == 0 ? 0.0 : _power.value() / static_cast<double>(_count);
}

double FleetWindow::mean_duty_cycle() const
{
    return _count == 0 ? 0.0 : _duty.value() / static_cast<double>(_count);
}

FleetWindow aggregate(const FleetDataset& dataset, const PlatformSpec& spec, TimeRange range)
{
    FleetWindow window(spec.platform_id);
    for (const auto& sample : dataset.samples) {
        if (sample.platform_id != spec.platform_id || !range.contains(sample.interval_start)) {
            continue;
        }
        if (!sample.is_complete()) {
            throw ComputationError("sample for machine '{}' is incomplete; run exclude_incomplete first", sample.machine_id);
        }
        window.add(machine_power(sample, spec), *sample.duty_cycle, *sample.flops);
    }
    if (window.sample_count() == 0) {
        throw ComputationError("empty window for platform '{}'", spec.platform_id);
    }
    return window;
}

double lifetime_energy_per_chip(const FleetWindow& window, const PlatformSpec& spec, double pue)
{
    if (spec.chips_per_machine < 1) {
        throw ComputationError("platform '{}' has no chips", spec.platform_id);
    }
    if (!(pue >= 1.0)) {
        throw ComputationError("PUE must be >= 1, got {}", pue);
    }
    return window.mean_machine_power_w() / spec.chips_per_machine * lifetime_hours(spec.lifetime_years) * pue / 1000.0;
}

}
