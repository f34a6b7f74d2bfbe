#pragma once

#include "aicarbon/factors.h"
#include "aicarbon/telemetry.h"
#include "aicarbon/workload.h"

#include <json.hpp>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace aicarbon::synth {

/// mt19937_64 is fully specified by the standard; the conversions below are
/// done by hand so output does not depend on the library's distributions.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : _engine(seed) {}

    /// [0, 1)
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t categorical(std::span<const double> weights);
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 _engine;
};

struct GenerationSpec
{
    std::string platform_id;
    int chips_per_machine = 8;
    int trays_per_machine = 3;
    int machines = 10;
    /// Machine power at duty cycle 1.
    double active_power_w = 0.0;
    double tdp_w = 0.0;
    /// Utilized FLOP/s per machine at duty cycle 1.
    double flops_per_s_at_full_duty = 0.0;
    /// Idle power as a fraction of active power.
    double idle_fraction = 0.6;
    /// Relative frequency of each duty-cycle level; duty is uniform within a level.
    std::vector<double> duty_levels;
    double power_noise = 0.02;
    double missing_power_fraction = 0.0;
    double missing_flops_fraction = 0.0;

    /// Joules per FLOP at a given duty cycle, noise-free.
    double energy_per_flop(double duty) const;
};

struct SynthScenario
{
    EpochSeconds start = 0;
    int intervals = 288;
    std::string baseline;
    std::vector<GenerationSpec> generations;

    void validate() const;
};

SynthScenario parse_synth_scenario(const nlohmann::json& doc);

struct SynthOutput
{
    std::vector<telemetry::TelemetrySample> samples;
    /// Seed, emitted counts, platform catalog and ground-truth ratios.
    nlohmann::json manifest;
};

SynthOutput generate(const SynthScenario& scenario, std::uint64_t seed);

/// Target fleet aggregates for one platform.
struct CalibrationTarget
{
    telemetry::PlatformSpec spec;
    double mean_power_w = 0.0;
    double kwh_per_exaflop = 0.0;
    double pue = 1.1;
    int machines = 6;
    int intervals = 48;
    double mean_duty = 0.5;
};

/// Noisy telemetry whose mean machine power and PUE-inclusive kWh/ExaFLOP hit
/// the targets up to floating-point rounding.
std::vector<telemetry::TelemetrySample> calibrated_fleet(const CalibrationTarget& target, EpochSeconds start, std::uint64_t seed);

/// Hourly series alternating a daytime block with surplus CFE and a night
/// block with none. Each block covers 12 hours a day, so the location-based
/// factor is the mean of the two grid factors.
factors::HourlyGridSeries two_block_hourly_series(const std::string& gridId, EpochSeconds start, int days, double dayGridFactor,
                                                  double nightGridFactor, double dayCfeRatio);

void write_hourly_csv(std::ostream& out, const std::vector<factors::HourlyGridSeries>& grids);

struct RunTarget
{
    std::string run_id;
    std::string workload;
    std::string platform_id;
    int machines = 4;
    int intervals = 24;
    double on_duty_power_w = 0.0;
    bool incomplete = false;
};

/// Interval records for a run: idle ramp-up and ramp-down around an on-duty
/// plateau whose per-machine mean power is the target.
std::vector<workload::MachineInterval> run_intervals(const RunTarget& target, EpochSeconds start, std::uint64_t seed);

}
