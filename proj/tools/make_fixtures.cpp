// Regenerates the bundled telemetry, hourly grid series and workload runs in
// data/ from the hand-written platform and inventory files.

#include "aicarbon/config.h"
#include "aicarbon/error.h"
#include "aicarbon/numeric.h"
#include "aicarbon/synth.h"
#include "aicarbon/workload.h"

#include <fmt/format.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace aicarbon;

namespace {

struct FleetTarget
{
    const char* platform;
    double power_w;
    double kwh_per_exaflop;
    double mean_duty;
};

// Published fleet aggregates: mean machine power and kWh per 10^18 FLOPs.
constexpr FleetTarget kFleet[] = {
    {"v4i", 1184, 2.53, 0.30}, {"v5e", 1171, 2.16, 0.40}, {"v6e", 2173, 0.86, 0.50}, {"v4", 1167, 1.93, 0.45}, {"v5p", 2176, 1.65, 0.50},
};

struct RunSpec
{
    const char* workload;
    const char* platform;
    double step_time_s;
    double power_w;
    double cci;
};

constexpr RunSpec kRuns[] = {
    {"RLHF", "v5e", 0.70, 1386, 309.9},
    {"RLHF", "v6e", 0.24, 2589, 183.8},
    {"SFT", "v5e", 5.67, 1728, 249.4},
    {"SFT", "v6e", 2.31, 3156, 142.0},
};

constexpr double kWorkloadFactor = 122.5;

void write_fleet(const fs::path& dir, const telemetry::PlatformCatalog& catalog)
{
    const auto start = *parse_rfc3339("2024-10-01T00:00:00Z");
    std::vector<telemetry::TelemetrySample> all;
    std::uint64_t seed = 11;
    for (const auto& f : kFleet) {
        synth::CalibrationTarget target;
        target.spec = catalog.at(f.platform);
        target.mean_power_w = f.power_w;
        target.kwh_per_exaflop = f.kwh_per_exaflop;
        target.mean_duty = f.mean_duty;
        auto samples = synth::calibrated_fleet(target, start, seed++);
        all.insert(all.end(), samples.begin(), samples.end());
    }
    std::ofstream out(dir / "telemetry_fleet.csv", std::ios::binary);
    telemetry::write_csv(out, all);
    // Rows the ingest stage must reject or exclude.
    out << "v4i-bad-01,v4i,2024-10-01T00:00:00Z,400;400;384,1.3,1e15\n";
    out << "v9-m000,v9,2024-10-01T00:00:00Z,400;400;384,0.5,1e15\n";
    out << "v4i-bad-02,v4i,yesterday,400;400;384,0.5,1e15\n";
    out << "v4i-bad-03,v4i,2024-10-01T00:02:30Z,400;400;384,0.5,1e15\n";
    out << "v4i-bad-04,v4i,2024-10-01T00:05:00Z,400;400;384,0.5,abc\n";
    out << "v5e-gap-01,v5e,2024-10-01T00:05:03Z,390;390;391,0.4,\n";
    out << "v5e-gap-02,v5e,2024-10-01T00:10:00Z,,0.4,4e15\n";
    out << "v6e-gap-01,v6e,2024-10-01T00:15:00Z,700;700;773,,4e15\n";
}

void write_hourly(const fs::path& dir)
{
    // Day block: grid 308 g/kWh with 1.5x CFE coverage; night: 424 g/kWh, no CFE.
    const auto series = synth::two_block_hourly_series("fleet", *parse_rfc3339("2023-01-01T00:00:00Z"), 365, 308, 424, 1.5);
    std::ofstream out(dir / "grid_hourly_2023.csv", std::ios::binary);
    synth::write_hourly_csv(out, {series});
}

void write_workloads(const fs::path& dir, const config::RunConfig& cfg)
{
    using nlohmann::json;
    json runs = json::array();
    json accept = json::array();
    json reject = json::array();
    std::ofstream intervals(dir / "workload_intervals.jsonl", std::ios::binary);

    auto start = *parse_rfc3339("2024-11-04T00:00:00Z");
    std::uint64_t seed = 101;
    for (const auto& r : kRuns) {
        const auto& spec = cfg.platforms.at(r.platform);
        const auto* inv = cfg.inventory_for(spec);
        const double machineMt = lca::machine_manufacturing(*inv) + lca::machine_transport(*inv);
        const double op = r.power_w * r.step_time_s * kWorkloadFactor / kJoulesPerKwh;
        const double emb = machineMt * kGramsPerKg / lifetime_seconds(spec.lifetime_years) * r.step_time_s;
        const double flopsPerStep = (op + emb) / r.cci * kFlopsPerExaflop;

        struct Variant
        {
            const char* suffix;
            bool incomplete;
            double power_w;
        };
        std::vector<Variant> variants = {{"a", false, r.power_w}, {"b", false, r.power_w}};
        if (std::string(r.workload) == "RLHF" && std::string(r.platform) == "v5e") {
            variants.push_back({"c", true, r.power_w});
            variants.push_back({"d", true, r.power_w * 1.4});
            variants.push_back({"e", false, r.power_w * 0.5});
        }
        for (const auto& v : variants) {
            synth::RunTarget target;
            target.run_id = fmt::format("{}-{}-{}", r.workload, r.platform, v.suffix);
            target.workload = r.workload;
            target.platform_id = r.platform;
            target.on_duty_power_w = v.power_w;
            target.incomplete = v.incomplete;
            const auto records = synth::run_intervals(target, start, seed++);
            start += 86400;

            json machines = json::array();
            for (int m = 0; m < target.machines; ++m) {
                machines.push_back(fmt::format("{}-m{:02}", target.run_id, m));
            }
            runs.push_back({{"run_id", target.run_id},
                            {"workload", r.workload},
                            {"platform_id", r.platform},
                            {"machines", machines},
                            {"step_time_s", r.step_time_s},
                            {"flops_per_step", flopsPerStep},
                            {"status", v.incomplete ? "incomplete" : "complete"}});
            if (std::string(v.suffix) == "c") {
                accept.push_back(target.run_id);
            }
            if (std::string(v.suffix) == "e") {
                reject.push_back(target.run_id);
            }
            for (const auto& iv : records) {
                json line = {{"run_id", target.run_id},
                             {"machine_id", iv.machine_id},
                             {"interval_start", format_rfc3339(iv.interval_start)},
                             {"power_w", iv.power_w},
                             {"duty_cycle", iv.duty_cycle}};
                intervals << line.dump() << "\n";
            }
        }
    }
    json manifest = {{"runs", runs}, {"validation", {{"accept", accept}, {"reject", reject}}}};
    std::ofstream out(dir / "workload_runs.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
}

}

int main(int argc, char** argv)
{
    const fs::path dir = argc > 1 ? argv[1] : "data";
    try {
        config::RunConfig cfg;
        cfg.platforms = config::parse_platforms(config::read_json(dir / "platforms.json"));
        cfg.gwp = config::parse_gwp(config::read_json(dir / "gwp_ar5.json"));
        cfg.inventories = config::parse_inventories(config::read_json(dir / "inventories.json"), cfg.gwp);
        write_fleet(dir, cfg.platforms);
        write_hourly(dir);
        write_workloads(dir, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(exit_code_for(e));
    }
    std::cerr << "fixtures written to " << dir.string() << "\n";
    return 0;
}
