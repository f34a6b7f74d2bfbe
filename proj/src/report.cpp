#include "aicarbon/report.h"

#include "aicarbon/error.h"
#include "aicarbon/numeric.h"

#include <algorithm>
#include <set>

namespace aicarbon::report {

cci::CciReport PlatformResult::cci(const config::ResolvedFactor& factor) const
{
    return cci::make_report(spec.platform_id, factor.standard, kwh_per_exaflop, lifetime_exaflops, embodied.total(), factor.g_per_kwh);
}

double PlatformResult::operational_kg(double factorGPerKwh) const
{
    return factors::operational_emissions(lifetime_energy_kwh_per_chip, factorGPerKwh) / kGramsPerKg;
}

const PlatformResult& FleetEvaluation::at(const std::string& platformId) const
{
    for (const auto& p : platforms) {
        if (p.spec.platform_id == platformId) {
            return p;
        }
    }
    throw ComputationError("empty window for platform '{}': no usable telemetry", platformId);
}

telemetry::FleetDataset load_telemetry(const config::RunConfig& config)
{
    if (!config.telemetry) {
        throw ConfigError("no telemetry file configured");
    }
    return telemetry::ingest_file(*config.telemetry, config.platforms);
}

namespace {

std::vector<std::string> platform_order(const config::RunConfig& config)
{
    if (!config.platform_order.empty()) {
        return config.platform_order;
    }
    std::vector<std::string> ids;
    for (const auto& [id, spec] : config.platforms.platforms()) {
        ids.push_back(id);
    }
    return ids;
}

}

FleetEvaluation evaluate_fleet(const config::RunConfig& config, telemetry::FleetDataset dataset)
{
    FleetEvaluation fleet;
    fleet.dataset = std::move(dataset);
    fleet.filter = telemetry::exclude_incomplete(fleet.dataset);

    std::set<std::string> present;
    for (const auto& s : fleet.filter.dataset.samples) {
        present.insert(s.platform_id);
    }

    for (const auto& id : platform_order(config)) {
        const auto& spec = config.platforms.at(id);
        if (!present.contains(id)) {
            fleet.warnings.push_back(fmt::format("platform '{}' has no usable telemetry; left out", id));
            continue;
        }
        const auto* inv = config.inventory_for(spec);
        if (inv == nullptr) {
            throw ConfigError("platform '{}' has no inventory", id);
        }
        PlatformResult r{spec, telemetry::aggregate(fleet.filter.dataset, spec), lca::per_chip_embodied(*inv, spec), 0.0, 0.0, 0.0};
        r.kwh_per_exaflop = cci::energy_per_exaflop(r.window, config.pue);
        r.lifetime_exaflops = cci::lifetime_exaflops(r.window, spec);
        r.lifetime_energy_kwh_per_chip = telemetry::lifetime_energy_per_chip(r.window, spec, config.pue);
        fleet.platforms.push_back(std::move(r));
    }
    if (fleet.platforms.empty()) {
        throw ComputationError("empty window: no usable telemetry for any configured platform");
    }
    return fleet;
}

Table platform_table(const FleetEvaluation& fleet, const config::RunConfig& config, const std::string& standard)
{
    const auto mb = config::resolve_factor(config, "market");
    const auto lb = config::resolve_factor(config, "location");
    const auto chosen = config::resolve_factor(config, standard);

    Table t("platform_report", {{"platform"},
                                {"chips_per_machine"},
                                {"mean_power_w", 0},
                                {"kwh_per_exaflop", 2},
                                {"embodied_kg", 0},
                                {"dc_construction_kg", 0},
                                {"cpu_mt_kg", 0},
                                {"tpu_mt_kg", 0},
                                {"eol_kg", 0},
                                {"scope1_kg", 0},
                                {"operational_mb_kg", 0},
                                {"operational_lb_kg", 0},
                                {"embodied_cci", 1},
                                {"operational_cci_mb", 1},
                                {"operational_cci_lb", 1},
                                {"standard"},
                                {"operational_cci", 1},
                                {"total_cci", 1},
                                {"lifetime_exaflops", 0}});
    for (const auto& p : fleet.platforms) {
        const auto e = p.embodied;
        const auto report = p.cci(chosen);
        t.add_row({p.spec.platform_id, std::int64_t{p.spec.chips_per_machine}, p.window.mean_machine_power_w(), p.kwh_per_exaflop, e.total(),
                   e.dc_construction, e.cpu_mt, e.tpu_mt, e.eol, e.scope1, p.operational_kg(mb.g_per_kwh), p.operational_kg(lb.g_per_kwh),
                   report.embodied_cci, p.cci(mb).operational_cci, p.cci(lb).operational_cci, standard, report.operational_cci,
                   report.total_cci(), p.lifetime_exaflops});
    }
    return t;
}

Table stage_table(const FleetEvaluation& fleet, const config::RunConfig& config, const std::string& standard)
{
    const auto factor = config::resolve_factor(config, standard);
    Table t("stage_breakdown", {{"platform"}, {"stage"}, {"kg_per_chip", 1}, {"cci", 2}});
    for (const auto& p : fleet.platforms) {
        const auto& e = p.embodied;
        const std::pair<const char*, double> stages[] = {
            {"dc_construction", e.dc_construction},
            {"cpu_mt", e.cpu_mt},
            {"tpu_mt", e.tpu_mt},
            {"eol", e.eol},
            {"scope1", e.scope1},
            {"operational", p.operational_kg(factor.g_per_kwh)},
        };
        for (const auto& [stage, kg] : stages) {
            t.add_row({p.spec.platform_id, std::string(stage), kg, kg * kGramsPerKg / p.lifetime_exaflops});
        }
    }
    return t;
}

Table category_table(const FleetEvaluation& fleet, const config::RunConfig& config)
{
    Table t("manufacturing_categories", {{"platform"}, {"role"}, {"category"}, {"kg_per_chip", 1}, {"share", 3}});
    for (const auto& p : fleet.platforms) {
        const auto* inv = config.inventory_for(p.spec);
        const auto shares = lca::manufacturing_by_category(*inv, p.spec);
        double total = 0.0;
        for (const auto& s : shares) {
            total += s.kg_per_chip;
        }
        for (const auto& s : shares) {
            t.add_row({p.spec.platform_id, std::string(lca::to_string(s.role)), std::string(lca::to_string(s.category)), s.kg_per_chip,
                       total > 0.0 ? s.kg_per_chip / total : 0.0});
        }
    }
    return t;
}

Table cci_table(const FleetEvaluation& fleet, const config::RunConfig& config, const std::string& standard,
                std::optional<double> workloadFlops)
{
    const auto factor = config::resolve_factor(config, standard);
    std::vector<Column> columns = {{"platform"},          {"standard"},        {"factor_g_per_kwh", 1}, {"kwh_per_exaflop", 3},
                                   {"lifetime_exaflops", 0}, {"embodied_cci", 2}, {"operational_cci", 2},  {"total_cci", 2}};
    if (workloadFlops) {
        columns.push_back({"workload_flops"});
        columns.push_back({"workload_embodied_t", 2});
        columns.push_back({"workload_operational_t", 2});
        columns.push_back({"workload_total_t", 2});
    }
    Table t("cci", columns);
    for (const auto& p : fleet.platforms) {
        const auto r = p.cci(factor);
        std::vector<Cell> row = {p.spec.platform_id, standard,          factor.g_per_kwh,     r.energy_per_exaflop_kwh,
                                 r.lifetime_exaflops, r.embodied_cci, r.operational_cci, r.total_cci()};
        if (workloadFlops) {
            const auto est = cci::estimate_workload(*workloadFlops, r);
            constexpr double gPerTonne = 1e6;
            row.push_back(*workloadFlops);
            row.push_back(est.embodied_g / gPerTonne);
            row.push_back(est.operational_g / gPerTonne);
            row.push_back(est.total_g() / gPerTonne);
        }
        t.add_row(row);
    }
    return t;
}

Table ingest_table(const FleetEvaluation& fleet)
{
    Table t("ingest_summary", {{"platform"},
                               {"samples"},
                               {"machine_days", 3},
                               {"energy_kwh", 3},
                               {"total_flops"},
                               {"mean_power_w", 1},
                               {"mean_duty_cycle", 4}});
    for (const auto& p : fleet.platforms) {
        const auto& w = p.window;
        t.add_row({p.spec.platform_id, static_cast<std::int64_t>(w.sample_count()), w.machine_days(), w.total_energy_kwh(), w.total_flops(),
                   w.mean_machine_power_w(), w.mean_duty_cycle()});
    }
    return t;
}

Table rejection_table(const telemetry::FleetDataset& dataset)
{
    Table t("rejections", {{"row"}, {"reason"}});
    for (const auto& r : dataset.rejections) {
        t.add_row({static_cast<std::int64_t>(r.row), r.reason});
    }
    return t;
}

Table lca_table(const config::RunConfig& config, int deploymentYear)
{
    Table t("inventory_views", {{"platform"},
                                {"view"},
                                {"year"},
                                {"cpu_mt_kg", 2},
                                {"tpu_mt_kg", 2},
                                {"dc_construction_kg", 2},
                                {"eol_kg", 2},
                                {"scope1_kg", 2},
                                {"total_kg", 2}});
    for (const auto& id : platform_order(config)) {
        const auto& spec = config.platforms.at(id);
        const auto* inv = config.inventory_for(spec);
        if (inv == nullptr) {
            throw ConfigError("platform '{}' has no inventory", id);
        }
        const auto views = lca::inventory_views(lca::per_chip_embodied(*inv, spec), spec.lifetime_years, deploymentYear);
        for (const auto& [name, series] : {std::pair{"lca", &views.lca_amortized}, std::pair{"corporate", &views.corporate}}) {
            for (const auto& y : *series) {
                t.add_row({id, std::string(name), std::int64_t{y.year}, y.cpu_mt, y.tpu_mt, y.dc_construction, y.eol, y.scope1, y.total()});
            }
        }
    }
    return t;
}

double scenario_embodied_cci(double embodiedCci, const factors::ScenarioSpec& scenario)
{
    if (!scenario.manufacturing_cfe) {
        return embodiedCci;
    }
    return embodiedCci * (1.0 - factors::scenario_manufacturing_reduction(scenario).fraction);
}

std::vector<ScenarioResult> evaluate_scenario(const FleetEvaluation& fleet, const config::RunConfig& config, const std::string& scenario,
                                              const std::string& baselineStandard, const std::string& referencePlatform,
                                              std::vector<std::string>* warnings)
{
    const auto resolved = config::resolve_factor(config, "scenario:" + scenario);
    const auto& spec = *resolved.scenario;
    const auto baseline = config::resolve_factor(config, baselineStandard);
    const auto reference = fleet.at(referencePlatform).cci(baseline);

    double reduction = 0.0;
    if (spec.manufacturing_cfe) {
        const auto r = factors::scenario_manufacturing_reduction(spec);
        reduction = r.fraction;
        if (r.warning && warnings != nullptr) {
            warnings->push_back(*r.warning);
        }
    }

    std::vector<ScenarioResult> results;
    for (const auto& p : fleet.platforms) {
        const auto base = p.cci(baseline);
        const auto under = p.cci(resolved);
        ScenarioResult r;
        r.scenario = scenario;
        r.platform_id = p.spec.platform_id;
        r.baseline_standard = baselineStandard;
        r.baseline_total_cci = base.total_cci();
        r.manufacturing_reduction = reduction;
        r.embodied_cci = scenario_embodied_cci(under.embodied_cci, spec);
        r.operational_cci = under.operational_cci;
        r.ratio_vs_baseline = r.baseline_total_cci / r.total_cci();
        r.reference = fmt::format("{}@{}", referencePlatform, baselineStandard);
        r.ratio_vs_reference = reference.total_cci() / r.total_cci();
        results.push_back(std::move(r));
    }
    return results;
}

Table scenario_table(const std::vector<ScenarioResult>& results)
{
    Table t("scenarios", {{"scenario"},
                          {"platform"},
                          {"baseline_standard"},
                          {"baseline_total_cci", 1},
                          {"manufacturing_reduction", 3},
                          {"embodied_cci", 1},
                          {"operational_cci", 1},
                          {"total_cci", 1},
                          {"ratio_vs_baseline", 2},
                          {"reference"},
                          {"ratio_vs_reference", 2}});
    for (const auto& r : results) {
        t.add_row({r.scenario, r.platform_id, r.baseline_standard, r.baseline_total_cci, r.manufacturing_reduction, r.embodied_cci,
                   r.operational_cci, r.total_cci(), r.ratio_vs_baseline, r.reference, r.ratio_vs_reference});
    }
    return t;
}

Table workload_table(const std::vector<workload::WorkloadSummary>& rows)
{
    Table t("workload_emissions", {{"workload"},
                                   {"platform"},
                                   {"runs"},
                                   {"step_time_s", 2},
                                   {"power_w", 0},
                                   {"operational_g", 4},
                                   {"embodied_g", 4},
                                   {"total_g", 4},
                                   {"flops_per_step"},
                                   {"cci", 1}});
    for (const auto& r : rows) {
        t.add_row({r.workload, r.platform_id, static_cast<std::int64_t>(r.runs), r.step_time_s, r.power_w, r.operational_g, r.embodied_g,
                   r.total_g(), r.flops_per_step, r.cci});
    }
    return t;
}

std::vector<weighting::Observation> observations(const telemetry::FleetDataset& dataset, const telemetry::PlatformCatalog& catalog,
                                                 const std::vector<std::string>& generations)
{
    std::vector<weighting::Observation> out;
    for (const auto& s : dataset.samples) {
        if (!s.is_complete()) {
            continue;
        }
        if (!generations.empty() && std::find(generations.begin(), generations.end(), s.platform_id) == generations.end()) {
            continue;
        }
        weighting::Observation o;
        o.generation = s.platform_id;
        o.duty_cycle = *s.duty_cycle;
        o.metrics[weighting::kPowerW] = telemetry::machine_power(s, catalog.at(s.platform_id));
        o.metrics[weighting::kFlopsPerS] = *s.flops / kIntervalSeconds;
        out.push_back(std::move(o));
    }
    return out;
}

Table comparison_table(const weighting::Comparison& comparison)
{
    Table t("generation_comparison", {{"generation"},
                                      {"weighting"},
                                      {"observations"},
                                      {"duty_cycle", 4},
                                      {"power_w", 1},
                                      {"flops_per_s"},
                                      {"energy_per_exaflop_kwh", 4},
                                      {"carbon_per_exaflop_g", 2},
                                      {"rel_duty_cycle", 3},
                                      {"rel_power", 3},
                                      {"rel_flops_per_s", 3},
                                      {"rel_energy_per_exaflop", 3},
                                      {"rel_carbon_per_exaflop", 3}});
    auto add = [&](const std::vector<weighting::GenerationMetrics>& rows, const char* label) {
        const auto rel = weighting::relative_to(rows, comparison.baseline);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& a = rows[i];
            const auto& r = rel[i];
            t.add_row({a.generation, std::string(label), static_cast<std::int64_t>(a.observations), a.duty_cycle, a.power_w, a.flops_per_s,
                       a.energy_per_exaflop_kwh, a.carbon_per_exaflop_g, r.duty_cycle, r.power_w, r.flops_per_s, r.energy_per_exaflop_kwh,
                       r.carbon_per_exaflop_g});
        }
    };
    add(comparison.unweighted, "unweighted");
    add(comparison.weighted, "weighted");
    return t;
}

Table exclusion_table(const weighting::Comparison& comparison)
{
    Table t("excluded_levels", {{"level"}, {"missing_generations"}, {"observations_dropped"}});
    for (const auto& e : comparison.excluded_buckets) {
        std::string missing;
        for (const auto& g : e.missing_generations) {
            missing += (missing.empty() ? "" : ";") + g;
        }
        t.add_row({std::int64_t{e.bucket}, missing, static_cast<std::int64_t>(e.observations_dropped)});
    }
    for (const auto& g : comparison.no_overlap) {
        t.add_row({std::int64_t{-1}, g, std::int64_t{0}});
    }
    return t;
}

}
