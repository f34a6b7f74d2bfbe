#pragma once

#include "aicarbon/numeric.h"
#include "aicarbon/timeutil.h"

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aicarbon::telemetry {

/// Static description of one accelerator platform (machine type).
struct PlatformSpec
{
    std::string platform_id;
    int chips_per_machine = 1;
    /// Total trays per machine, host tray included.
    int trays_per_machine = 1;
    double lifetime_years = 6.0;
    double peak_flops_per_s = 0.0;
    double rectifier_overhead = 0.04;
    /// PSU readings already contain the rectifier loss estimate. When false,
    /// machine_power() adds rectifier_overhead on top of the raw readings.
    bool readings_include_rectifier = true;
    std::string inventory_ref;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

class PlatformCatalog
{
public:
    void add(PlatformSpec spec);

    const PlatformSpec* find(const std::string& platformId) const;
    const PlatformSpec& at(const std::string& platformId) const;

    const std::map<std::string, PlatformSpec>& platforms() const noexcept { return _platforms; }
    bool empty() const noexcept { return _platforms.empty(); }

private:
    std::map<std::string, PlatformSpec> _platforms;
};

/// One machine's five-minute interval record. Absent fields are nullopt.
struct TelemetrySample
{
    std::string machine_id;
    std::string platform_id;
    EpochSeconds interval_start = 0;
    std::optional<std::vector<double>> tray_power_w;
    std::optional<double> duty_cycle;
    std::optional<double> flops;

    bool has_power() const noexcept { return tray_power_w.has_value() && !tray_power_w->empty(); }
    bool is_complete() const noexcept { return has_power() && duty_cycle.has_value() && flops.has_value(); }
};

struct Rejection
{
    std::size_t row = 0;
    std::string reason;
};

struct FleetDataset
{
    std::vector<TelemetrySample> samples;
    std::vector<Rejection> rejections;
};

inline constexpr std::int64_t kSnapToleranceSeconds = 5;

FleetDataset ingest_csv(std::istream& input, const PlatformCatalog& catalog);
FleetDataset ingest_jsonl(std::istream& input, const PlatformCatalog& catalog);
/// Dispatches on extension: .jsonl / .json / .ndjson as JSON-lines, anything else as CSV.
FleetDataset ingest_file(const std::filesystem::path& path, const PlatformCatalog& catalog);

void write_csv(std::ostream& output, const std::vector<TelemetrySample>& samples);

inline const std::string kReasonMissingPower = "missing power";
inline const std::string kReasonMissingUtilization = "missing utilization/performance";

struct CompletenessFilter
{
    FleetDataset dataset;
    std::map<std::string, std::size_t> excluded;
};

/// Drops samples lacking power, duty cycle or FLOPs. Rejections carry over.
CompletenessFilter exclude_incomplete(const FleetDataset& dataset);

/// Whole-machine power: sum of tray PSU readings, plus rectifier losses when
/// the platform declares that readings exclude them.
double machine_power(const TelemetrySample& sample, const PlatformSpec& spec);

/// Half-open [begin, end).
struct TimeRange
{
    EpochSeconds begin = std::numeric_limits<EpochSeconds>::min();
    EpochSeconds end = std::numeric_limits<EpochSeconds>::max();

    bool contains(EpochSeconds t) const noexcept { return t >= begin && t < end; }
    static TimeRange all() noexcept { return {}; }
};

/// Energy and compute totals for one platform over a set of intervals.
/// Sums are kept exactly so windows built from disjoint sample sets merge to
/// the same totals as a window built from their union.
class FleetWindow
{
public:
    explicit FleetWindow(std::string platformId = {});

    void add(double machinePowerW, double dutyCycle, double flops);
    void merge(const FleetWindow& other);

    const std::string& platform_id() const noexcept { return _platformId; }
    std::size_t sample_count() const noexcept { return _count; }
    double machine_days() const noexcept;
    double total_energy_kwh() const;
    double total_flops() const;
    double mean_machine_power_w() const;
    double mean_duty_cycle() const;

private:
    std::string _platformId;
    std::size_t _count = 0;
    ExactSum _power;
    ExactSum _duty;
    ExactSum _flops;
};

/// Throws ComputationError("empty window") when no sample of the platform
/// falls in the range. Samples must have passed exclude_incomplete.
FleetWindow aggregate(const FleetDataset& dataset, const PlatformSpec& spec, TimeRange range = TimeRange::all());

/// Per-chip lifetime electricity, data center overhead included:
/// mean machine power / chips x lifetime hours x PUE.
double lifetime_energy_per_chip(const FleetWindow& window, const PlatformSpec& spec, double pue);

}
