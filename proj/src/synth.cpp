#include "aicarbon/synth.h"

#include "aicarbon/error.h"
#include "aicarbon/numeric.h"

#include <ostream>

namespace aicarbon::synth {

using nlohmann::json;

double Rng::uniform()
{
    return static_cast<double>(_engine() >> 11) * 0x1.0p-53;
}

std::size_t Rng::categorical(std::span<const double> weights)
{
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    const double target = uniform() * total;
    double running = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) {
            continue;
        }
        last = i;
        running += weights[i];
        if (target < running) {
            return i;
        }
    }
    return last;
}

double GenerationSpec::energy_per_flop(double duty) const
{
    return active_power_w * (idle_fraction + (1.0 - idle_fraction) * duty) / (flops_per_s_at_full_duty * duty);
}

void SynthScenario::validate() const
{
    if (intervals < 1) {
        throw ConfigError("synthetic scenario needs at least one interval");
    }
    if (generations.empty()) {
        throw ConfigError("synthetic scenario has no generations");
    }
    bool baselineFound = false;
    for (const auto& g : generations) {
        baselineFound = baselineFound || g.platform_id == baseline;
        if (g.machines < 1 || !(g.active_power_w > 0.0) || !(g.flops_per_s_at_full_duty > 0.0)) {
            throw ConfigError("generation '{}': machines, active_power_w and flops_per_s_at_full_duty must be positive", g.platform_id);
        }
        if (g.duty_levels.empty()) {
            throw ConfigError("generation '{}': duty_levels is empty", g.platform_id);
        }
        double total = 0.0;
        for (double w : g.duty_levels) {
            if (!(w >= 0.0)) {
                throw ConfigError("generation '{}': negative duty level weight", g.platform_id);
            }
            total += w;
        }
        if (!(total > 0.0)) {
            throw ConfigError("generation '{}': duty levels carry no weight", g.platform_id);
        }
        if (!(g.idle_fraction >= 0.0 && g.idle_fraction <= 1.0)) {
            throw ConfigError("generation '{}': idle_fraction outside [0, 1]", g.platform_id);
        }
    }
    if (!baselineFound) {
        throw ConfigError("baseline '{}' is not one of the generations", baseline);
    }
}

SynthScenario parse_synth_scenario(const json& doc)
{
    SynthScenario s;
    try {
        const auto start = parse_rfc3339(doc.value("start", std::string("2024-01-01T00:00:00Z")));
        if (!start) {
            throw ConfigError("synthetic scenario: bad start timestamp");
        }
        s.start = *start;
        s.intervals = doc.value("intervals", s.intervals);
        s.baseline = doc.at("baseline").get<std::string>();
        for (const auto& g : doc.at("generations")) {
            GenerationSpec spec;
            spec.platform_id = g.at("platform_id").get<std::string>();
            spec.chips_per_machine = g.value("chips_per_machine", spec.chips_per_machine);
            spec.trays_per_machine = g.value("trays_per_machine", spec.trays_per_machine);
            spec.machines = g.value("machines", spec.machines);
            spec.active_power_w = g.at("active_power_w").get<double>();
            spec.tdp_w = g.value("tdp_w", 0.0);
            spec.flops_per_s_at_full_duty = g.at("flops_per_s_at_full_duty").get<double>();
            spec.idle_fraction = g.value("idle_fraction", spec.idle_fraction);
            spec.duty_levels = g.at("duty_levels").get<std::vector<double>>();
            spec.power_noise = g.value("power_noise", spec.power_noise);
            spec.missing_power_fraction = g.value("missing_power_fraction", 0.0);
            spec.missing_flops_fraction = g.value("missing_flops_fraction", 0.0);
            s.generations.push_back(std::move(spec));
        }
    } catch (const json::exception& e) {
        throw ConfigError("synthetic scenario: {}", e.what());
    }
    s.validate();
    return s;
}

namespace {

// Accelerator trays draw twice the host tray's power; the host tray comes last.
std::vector<double> split_trays(double machinePower, int trays)
{
    if (trays == 1) {
        return {machinePower};
    }
    const double unit = machinePower / (2.0 * (trays - 1) + 1.0);
    std::vector<double> out(static_cast<std::size_t>(trays - 1), 2.0 * unit);
    out.push_back(unit);
    return out;
}

std::string machine_name(const std::string& prefix, int k)
{
    return fmt::format("{}-m{:03}", prefix, k);
}

}

SynthOutput generate(const SynthScenario& scenario, std::uint64_t seed)
{
    scenario.validate();
    Rng rng(seed);
    SynthOutput out;

    const GenerationSpec* base = nullptr;
    for (const auto& g : scenario.generations) {
        if (g.platform_id == scenario.baseline) {
            base = &g;
        }
    }

    json platforms = json::array();
    json truth = json::object();
    std::size_t total = 0;

    for (const auto& g : scenario.generations) {
        const int levels = static_cast<int>(g.duty_levels.size());
        const double width = 1.0 / levels;
        std::size_t emitted = 0;
        std::size_t missingPower = 0;
        std::size_t missingFlops = 0;
        ExactSum powerSum;
        std::size_t powerCount = 0;

        for (int m = 0; m < g.machines; ++m) {
            const auto machine = machine_name(g.platform_id, m);
            for (int t = 0; t < scenario.intervals; ++t) {
                const auto level = static_cast<double>(rng.categorical(g.duty_levels));
                const double lower = level * width;
                const double upper = level + 1 == levels ? 1.0 : (level + 1) * width;
                const double duty = std::min(upper, lower + (upper - lower) * (1.0 - rng.uniform()));
                const double noise = 1.0 + g.power_noise * rng.uniform(-1.0, 1.0);
                const double power = g.active_power_w * (g.idle_fraction + (1.0 - g.idle_fraction) * duty) * noise;
                const bool dropPower = rng.bernoulli(g.missing_power_fraction);
                const bool dropFlops = rng.bernoulli(g.missing_flops_fraction);

                telemetry::TelemetrySample s;
                s.machine_id = machine;
                s.platform_id = g.platform_id;
                s.interval_start = scenario.start + static_cast<EpochSeconds>(t) * static_cast<EpochSeconds>(kIntervalSeconds);
                s.duty_cycle = duty;
                if (dropPower) {
                    ++missingPower;
                } else {
                    s.tray_power_w = split_trays(power, g.trays_per_machine);
                    powerSum += power;
                    ++powerCount;
                }
                if (dropFlops) {
                    ++missingFlops;
                } else {
                    s.flops = g.flops_per_s_at_full_duty * duty * kIntervalSeconds;
                }
                out.samples.push_back(std::move(s));
                ++emitted;
            }
        }
        total += emitted;

        double expectedDuty = 0.0;
        double weightTotal = 0.0;
        for (int l = 0; l < levels; ++l) {
            const double mid = (l + 0.5) * width;
            expectedDuty += g.duty_levels[static_cast<std::size_t>(l)] * mid;
            weightTotal += g.duty_levels[static_cast<std::size_t>(l)];
        }
        expectedDuty /= weightTotal;

        platforms.push_back({{"platform_id", g.platform_id},
                             {"chips_per_machine", g.chips_per_machine},
                             {"trays_per_machine", g.trays_per_machine},
                             {"lifetime_years", 6.0},
                             {"peak_flops_per_s", g.flops_per_s_at_full_duty},
                             {"inventory_ref", g.platform_id}});
        const double ratio = (g.active_power_w / g.flops_per_s_at_full_duty) / (base->active_power_w / base->flops_per_s_at_full_duty);
        truth[g.platform_id] = {{"samples_emitted", emitted},
                                {"missing_power", missingPower},
                                {"missing_flops", missingFlops},
                                {"expected_mean_duty_cycle", expectedDuty},
                                {"generated_mean_power_w", powerCount ? powerSum.value() / static_cast<double>(powerCount) : 0.0},
                                {"tdp_w", g.tdp_w},
                                {"energy_per_flop_ratio_vs_baseline", ratio}};
    }

    out.manifest = {{"seed", seed},
                    {"baseline", scenario.baseline},
                    {"intervals", scenario.intervals},
                    {"start", format_rfc3339(scenario.start)},
                    {"samples_emitted", total},
                    {"platforms", platforms},
                    {"truth", truth}};
    return out;
}

std::vector<telemetry::TelemetrySample> calibrated_fleet(const CalibrationTarget& target, EpochSeconds start, std::uint64_t seed)
{
    target.spec.validate();
    if (target.machines < 1 || target.intervals < 1 || !(target.mean_power_w > 0.0) || !(target.kwh_per_exaflop > 0.0)) {
        throw ConfigError("calibration target for '{}' must have positive sizes and aggregates", target.spec.platform_id);
    }
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(target.machines) * static_cast<std::size_t>(target.intervals);
    std::vector<double> duty;
    std::vector<double> power;
    duty.reserve(n);
    power.reserve(n);
    const double lo = std::max(0.05, target.mean_duty - 0.35);
    const double hi = std::min(1.0, target.mean_duty + 0.35);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = rng.uniform(lo, hi);
        duty.push_back(d);
        power.push_back(target.mean_power_w * (0.6 + 0.4 * d) * (1.0 + 0.03 * rng.uniform(-1.0, 1.0)));
    }

    const double powerScale = target.mean_power_w * static_cast<double>(n) / exact_sum(power);
    const double energyKwh = target.mean_power_w * static_cast<double>(n) * kIntervalSeconds / kJoulesPerKwh;
    const double targetFlops = energyKwh * target.pue / target.kwh_per_exaflop * kFlopsPerExaflop;
    const double flopsScale = targetFlops / exact_sum(duty);

    std::vector<telemetry::TelemetrySample> samples;
    samples.reserve(n);
    std::size_t i = 0;
    for (int m = 0; m < target.machines; ++m) {
        for (int t = 0; t < target.intervals; ++t, ++i) {
            telemetry::TelemetrySample s;
            s.machine_id = machine_name(target.spec.platform_id, m);
            s.platform_id = target.spec.platform_id;
            s.interval_start = start + static_cast<EpochSeconds>(t) * static_cast<EpochSeconds>(kIntervalSeconds);
            s.tray_power_w = split_trays(power[i] * powerScale, target.spec.trays_per_machine);
            s.duty_cycle = duty[i];
            s.flops = duty[i] * flopsScale;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

factors::HourlyGridSeries two_block_hourly_series(const std::string& gridId, EpochSeconds start, int days, double dayGridFactor,
                                                  double nightGridFactor, double dayCfeRatio)
{
    factors::HourlyGridSeries series;
    series.grid_id = gridId;
    for (int h = 0; h < days * 24; ++h) {
        const int hourOfDay = h % 24;
        const bool day = hourOfDay >= 6 && hourOfDay < 18;
        factors::HourlyRecord r;
        r.hour_start = start + static_cast<EpochSeconds>(h) * 3600;
        r.load_kwh = 1000.0;
        r.cfe_kwh = day ? 1000.0 * dayCfeRatio : 0.0;
        r.grid_factor = day ? dayGridFactor : nightGridFactor;
        series.hours.push_back(r);
    }
    return series;
}

void write_hourly_csv(std::ostream& out, const std::vector<factors::HourlyGridSeries>& grids)
{
    out << "grid_id,hour_start,load_kwh,cfe_kwh,grid_factor\n";
    for (const auto& g : grids) {
        for (const auto& h : g.hours) {
            out << fmt::format("{},{},{},{},{}\n", g.grid_id, format_rfc3339(h.hour_start), h.load_kwh, h.cfe_kwh, h.grid_factor);
        }
    }
}

std::vector<workload::MachineInterval> run_intervals(const RunTarget& target, EpochSeconds start, std::uint64_t seed)
{
    if (target.machines < 1 || target.intervals < 7) {
        throw ConfigError("run '{}': needs >= 1 machine and >= 7 intervals", target.run_id);
    }
    Rng rng(seed);
    const int pairs = (target.intervals - 5) / 2;
    std::vector<workload::MachineInterval> out;
    int t = 0;
    auto emit = [&](int machine, double power, double duty) {
        out.push_back({fmt::format("{}-m{:02}", target.run_id, machine),
                       start + static_cast<EpochSeconds>(t) * static_cast<EpochSeconds>(kIntervalSeconds), power, duty});
    };
    auto idle = [&](int count) {
        for (int i = 0; i < count; ++i, ++t) {
            for (int m = 0; m < target.machines; ++m) {
                const double duty = rng.uniform(0.0, 0.4);
                emit(m, target.on_duty_power_w * (0.6 + 0.4 * duty), duty);
            }
        }
    };

    idle(2);
    for (int p = 0; p < pairs; ++p) {
        if (target.incomplete && p == pairs / 2) {
            return out;
        }
        std::vector<double> delta;
        for (int m = 0; m < target.machines; ++m) {
            delta.push_back(target.on_duty_power_w * 0.05 * rng.uniform(-1.0, 1.0));
        }
        for (int sign : {1, -1}) {
            for (int m = 0; m < target.machines; ++m) {
                emit(m, target.on_duty_power_w + sign * delta[static_cast<std::size_t>(m)], rng.uniform(0.85, 1.0));
            }
            ++t;
        }
        if (p == 0) {
            // one machine stalls; the whole interval drops out
            for (int m = 0; m < target.machines; ++m) {
                emit(m, target.on_duty_power_w * 0.8, m == 0 ? 0.5 : 0.95);
            }
            ++t;
        }
    }
    idle(2);
    return out;
}

}
