#include "aicarbon/workload.h"

#include "aicarbon/error.h"
#include "aicarbon/numeric.h"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>

namespace aicarbon::workload {

using nlohmann::json;

void WorkloadRun::validate() const
{
    if (run_id.empty()) {
        throw ConfigError("workload run without run_id");
    }
    if (machines.empty()) {
        throw ConfigError("run '{}' lists no machines", run_id);
    }
    if (!(step_time_s > 0.0)) {
        throw ConfigError("run '{}': step_time_s must be > 0", run_id);
    }
    if (!(flops_per_step >= 0.0)) {
        throw ConfigError("run '{}': flops_per_step must be >= 0", run_id);
    }
}

OnDutyPower on_duty_power(const WorkloadRun& run, double threshold)
{
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ConfigError("on-duty threshold {} outside [0, 1]", threshold);
    }
    std::map<EpochSeconds, std::vector<const MachineInterval*>> byTime;
    for (const auto& iv : run.intervals) {
        if (std::find(run.machines.begin(), run.machines.end(), iv.machine_id) == run.machines.end()) {
            continue;
        }
        byTime[iv.interval_start].push_back(&iv);
    }

    OnDutyPower result;
    ExactSum power;
    for (const auto& [start, rows] : byTime) {
        std::set<std::string> seen;
        bool onDuty = true;
        for (const auto* row : rows) {
            seen.insert(row->machine_id);
            onDuty = onDuty && row->duty_cycle >= threshold;
        }
        if (!onDuty || seen.size() != run.machines.size() || rows.size() != run.machines.size()) {
            ++result.excluded_intervals;
            continue;
        }
        ++result.included_intervals;
        for (const auto* row : rows) {
            power += row->power_w;
        }
    }
    if (result.included_intervals == 0) {
        throw ComputationError("run '{}': no on-duty intervals at threshold {}", run.run_id, threshold);
    }
    const double machineIntervals = static_cast<double>(result.included_intervals) * static_cast<double>(run.machines.size());
    result.mean_power_w = power.value() / machineIntervals;
    return result;
}

StepEmissions emissions_per_step(const WorkloadRun& run, const lca::MachineInventory* inventory,
                                 const telemetry::PlatformSpec& spec, const StepOptions& options)
{
    if (inventory == nullptr) {
        throw ComputationError("run '{}': no inventory for platform '{}'", run.run_id, run.platform_id);
    }
    if (options.apply_pue && !(options.pue >= 1.0)) {
        throw ConfigError("PUE must be >= 1, got {}", options.pue);
    }
    const auto duty = on_duty_power(run, options.threshold);

    StepEmissions step;
    step.power_w = duty.mean_power_w;
    const double overhead = options.apply_pue ? options.pue : 1.0;
    step.operational_g = duty.mean_power_w * run.step_time_s * overhead * options.factor_g_per_kwh / kJoulesPerKwh;

    const double machineMtKg = lca::machine_manufacturing(*inventory) + lca::machine_transport(*inventory);
    step.embodied_g = machineMtKg * kGramsPerKg / lifetime_seconds(spec.lifetime_years) * run.step_time_s;
    return step;
}

double workload_cci(const StepEmissions& step, double flopsPerStep)
{
    if (!(flopsPerStep > 0.0)) {
        throw ComputationError("workload CCI needs flops_per_step > 0");
    }
    return step.total_g() / (flopsPerStep / kFlopsPerExaflop);
}

namespace {

RunStatus parse_status(const std::string& text)
{
    if (text == "complete") {
        return RunStatus::Complete;
    }
    if (text == "incomplete") {
        return RunStatus::Incomplete;
    }
    throw ConfigError("unknown run status '{}' (expected complete or incomplete)", text);
}

std::set<std::string> string_set(const json& node, const char* key)
{
    std::set<std::string> out;
    if (node.contains(key)) {
        for (const auto& v : node.at(key)) {
            out.insert(v.get<std::string>());
        }
    }
    return out;
}

}

RunSet load_runs(std::istream& manifest, std::istream& intervals)
{
    json doc;
    try {
        doc = json::parse(manifest);
    } catch (const json::exception& e) {
        throw IngestError("workload manifest: {}", e.what());
    }

    RunValidation validation;
    if (doc.contains("validation")) {
        validation.accept = string_set(doc.at("validation"), "accept");
        validation.reject = string_set(doc.at("validation"), "reject");
    }

    std::vector<WorkloadRun> runs;
    std::map<std::string, std::size_t> index;
    try {
        for (const auto& r : doc.at("runs")) {
            WorkloadRun run;
            run.run_id = r.at("run_id").get<std::string>();
            run.workload = r.at("workload").get<std::string>();
            run.platform_id = r.at("platform_id").get<std::string>();
            run.machines = r.at("machines").get<std::vector<std::string>>();
            run.step_time_s = r.at("step_time_s").get<double>();
            run.flops_per_step = r.value("flops_per_step", 0.0);
            run.status = parse_status(r.value("status", std::string("complete")));
            run.validate();
            if (!index.emplace(run.run_id, runs.size()).second) {
                throw ConfigError("duplicate run_id '{}'", run.run_id);
            }
            runs.push_back(std::move(run));
        }
    } catch (const json::exception& e) {
        throw IngestError("workload manifest: {}", e.what());
    }

    std::string line;
    std::size_t lineNumber = 0;
    while (std::getline(intervals, line)) {
        ++lineNumber;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto rec = json::parse(line);
            const auto runId = rec.at("run_id").get<std::string>();
            auto iter = index.find(runId);
            if (iter == index.end()) {
                throw IngestError("interval line {}: unknown run_id '{}'", lineNumber, runId);
            }
            MachineInterval iv;
            iv.machine_id = rec.at("machine_id").get<std::string>();
            const auto stamp = rec.at("interval_start").get<std::string>();
            const auto start = parse_rfc3339(stamp);
            if (!start) {
                throw IngestError("interval line {}: unparseable timestamp '{}'", lineNumber, stamp);
            }
            iv.interval_start = *start;
            iv.power_w = rec.at("power_w").get<double>();
            iv.duty_cycle = rec.at("duty_cycle").get<double>();
            if (!(iv.power_w >= 0.0) || !(iv.duty_cycle >= 0.0 && iv.duty_cycle <= 1.0)) {
                throw IngestError("interval line {}: power or duty cycle out of range", lineNumber);
            }
            runs[iter->second].intervals.push_back(std::move(iv));
        } catch (const json::exception& e) {
            throw IngestError("interval line {}: {}", lineNumber, e.what());
        }
    }

    RunSet result;
    for (auto& run : runs) {
        if (validation.reject.contains(run.run_id)) {
            result.skipped.push_back(fmt::format("{}: rejected by validation", run.run_id));
        } else if (run.status == RunStatus::Incomplete && !validation.accept.contains(run.run_id)) {
            result.skipped.push_back(fmt::format("{}: incomplete run awaiting manual validation", run.run_id));
        } else {
            result.runs.push_back(std::move(run));
        }
    }
    return result;
}

RunSet load_runs(const std::filesystem::path& manifest, const std::filesystem::path& intervals)
{
    std::ifstream m(manifest);
    if (!m) {
        throw IngestError("cannot open {}", manifest.string());
    }
    std::ifstream i(intervals);
    if (!i) {
        throw IngestError("cannot open {}", intervals.string());
    }
    return load_runs(m, i);
}

std::vector<WorkloadSummary> summarize(const RunSet& runs, const telemetry::PlatformCatalog& catalog,
                                       const std::map<std::string, lca::MachineInventory>& inventories, const StepOptions& options)
{
    struct Acc
    {
        std::size_t n = 0;
        ExactSum step, power, op, emb, flops;
    };
    std::map<std::pair<std::string, std::string>, Acc> groups;
    std::vector<std::pair<std::string, std::string>> order;

    for (const auto& run : runs.runs) {
        const auto& spec = catalog.at(run.platform_id);
        const auto& ref = spec.inventory_ref.empty() ? spec.platform_id : spec.inventory_ref;
        auto inv = inventories.find(ref);
        const auto step = emissions_per_step(run, inv == inventories.end() ? nullptr : &inv->second, spec, options);

        const auto key = std::make_pair(run.workload, run.platform_id);
        if (!groups.contains(key)) {
            order.push_back(key);
        }
        auto& acc = groups[key];
        ++acc.n;
        acc.step += run.step_time_s;
        acc.power += step.power_w;
        acc.op += step.operational_g;
        acc.emb += step.embodied_g;
        acc.flops += run.flops_per_step;
    }

    std::vector<WorkloadSummary> result;
    for (const auto& key : order) {
        const auto& acc = groups.at(key);
        const double n = static_cast<double>(acc.n);
        WorkloadSummary s;
        s.workload = key.first;
        s.platform_id = key.second;
        s.runs = acc.n;
        s.step_time_s = acc.step.value() / n;
        s.power_w = acc.power.value() / n;
        s.operational_g = acc.op.value() / n;
        s.embodied_g = acc.emb.value() / n;
        s.flops_per_step = acc.flops.value() / n;
        if (s.flops_per_step > 0.0) {
            s.cci = workload_cci({s.operational_g, s.embodied_g, s.power_w}, s.flops_per_step);
        }
        result.push_back(s);
    }
    return result;
}

}
