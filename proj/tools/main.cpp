#include "aicarbon/config.h"
#include "aicarbon/error.h"
#include "aicarbon/report.h"
#include "aicarbon/synth.h"
#include "aicarbon/table.h"
#include "aicarbon/workload.h"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace aicarbon;

namespace {

struct GlobalOptions
{
    std::string config_path;
    std::string format = "csv";
    std::string standard;
    std::string output_dir;
    std::optional<double> pue;
    std::string telemetry;
    std::string platforms;
};

config::RunConfig load(const GlobalOptions& opts)
{
    config::RunConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = config::load_config(opts.config_path);
    }
    if (opts.pue) {
        if (!(*opts.pue >= 1.0)) {
            throw ConfigError("--pue must be >= 1, got {}", *opts.pue);
        }
        cfg.pue = *opts.pue;
    }
    if (!opts.telemetry.empty()) {
        cfg.telemetry = opts.telemetry;
    }
    if (!opts.platforms.empty()) {
        const auto doc = config::read_json(opts.platforms);
        cfg.platforms = config::parse_platforms(doc);
        cfg.platform_order.clear();
        for (const auto& p : doc.is_array() ? doc : doc.at("platforms")) {
            cfg.platform_order.push_back(p.at("platform_id").get<std::string>());
        }
    }
    return cfg;
}

std::string standard_or(const GlobalOptions& opts, const std::string& fallback)
{
    return opts.standard.empty() ? fallback : opts.standard;
}

void emit(const GlobalOptions& opts, const std::vector<report::Table>& tables)
{
    const auto format = report::parse_format(opts.format);
    if (opts.output_dir.empty()) {
        report::render(std::cout, tables, format);
        return;
    }
    fs::create_directories(opts.output_dir);
    for (const auto& t : tables) {
        const auto path = fs::path(opts.output_dir) / (t.name() + std::string(report::extension(format)));
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw ConfigError("cannot write {}", path.string());
        }
        report::render(out, t, format);
        std::cerr << "wrote " << path.string() << "\n";
    }
}

void warn(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings) {
        std::cerr << "warning: " << w << "\n";
    }
}

report::FleetEvaluation evaluate(const config::RunConfig& cfg)
{
    auto fleet = report::evaluate_fleet(cfg, report::load_telemetry(cfg));
    warn(fleet.warnings);
    return fleet;
}

}

int main(int argc, char** argv)
{
    CLI::App app{"Life-cycle carbon accounting for AI accelerator fleets"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions opts;
    app.add_option("--config,-c", opts.config_path, "Run configuration (JSON)");
    app.add_option("--format,-f", opts.format, "Output format")->check(CLI::IsMember({"csv", "json", "md"}));
    app.add_option("--standard,-s", opts.standard, "location | market | hourly247 | scenario:<name>");
    app.add_option("--output-dir,-o", opts.output_dir, "Write one file per table instead of stdout");
    app.add_option("--pue", opts.pue, "Override the data center PUE");
    app.add_option("--telemetry", opts.telemetry, "Override the telemetry file (CSV or JSONL)");
    app.add_option("--platforms", opts.platforms, "Override the platform catalog (JSON)");

    auto* ingest = app.add_subcommand("ingest", "Validate telemetry and summarize usable samples");
    std::string normalized;
    ingest->add_option("--normalized", normalized, "Write the complete, validated samples as CSV");

    auto* reportCmd = app.add_subcommand("report", "Platform report, stage breakdown and manufacturing categories");

    auto* cciCmd = app.add_subcommand("cci", "Compute carbon intensity per platform");
    std::optional<double> workloadFlops;
    cciCmd->add_option("--flops", workloadFlops, "Estimate emissions of a job with this many FLOPs");

    auto* lcaCmd = app.add_subcommand("lca", "Yearly LCA-amortized and corporate inventory views");
    int deploymentYear = 2024;
    lcaCmd->add_option("--deployment-year", deploymentYear, "First year of service");

    auto* workloadCmd = app.add_subcommand("workload", "Per-step emissions of benchmark runs");
    std::string manifest;
    std::string intervals;
    std::optional<double> workloadFactor;
    bool applyPue = false;
    std::optional<double> threshold;
    workloadCmd->add_option("--manifest", manifest, "Run manifest (JSON)");
    workloadCmd->add_option("--intervals", intervals, "Per-interval records (JSONL)");
    workloadCmd->add_option("--factor", workloadFactor, "Electricity factor, gCO2e/kWh");
    workloadCmd->add_flag("--apply-pue", applyPue, "Multiply operational emissions by the PUE");
    workloadCmd->add_option("--threshold", threshold, "On-duty duty-cycle threshold");

    auto* scenarioCmd = app.add_subcommand("scenario", "Carbon-free energy scenarios");
    std::vector<std::string> scenarioNames;
    std::string reference;
    scenarioCmd->add_option("--scenario", scenarioNames, "Scenario name (repeatable; default all)");
    scenarioCmd->add_option("--reference", reference, "Reference platform for cross-platform ratios");

    auto* weightCmd = app.add_subcommand("weight", "Duty-cycle balanced cross-generation comparison");
    std::vector<std::string> generations;
    std::string baseline;
    std::optional<int> buckets;
    weightCmd->add_option("--generations", generations, "Generations to compare (default: config or all)");
    weightCmd->add_option("--baseline", baseline, "Baseline generation");
    weightCmd->add_option("--buckets", buckets, "Number of duty-cycle levels");
    std::optional<double> weightFactor;
    weightCmd->add_option("--factor", weightFactor, "Electricity factor, gCO2e/kWh (default: from --standard)");

    auto* synthCmd = app.add_subcommand("synth", "Generate a deterministic synthetic fleet");
    std::string synthScenario;
    std::uint64_t seed = 1;
    std::string synthOut = "synth";
    synthCmd->add_option("--scenario", synthScenario, "Synthetic fleet description (JSON)")->required();
    synthCmd->add_option("--seed", seed, "Random seed");
    synthCmd->add_option("--out", synthOut, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::Usage);
    }

    try {
        if (*ingest) {
            auto cfg = load(opts);
            const auto fleet = evaluate(cfg);
            std::vector<report::Table> tables = {report::ingest_table(fleet), report::rejection_table(fleet.dataset)};
            report::Table excluded("excluded", {{"reason"}, {"samples"}});
            for (const auto& [reason, count] : fleet.filter.excluded) {
                excluded.add_row({reason, static_cast<std::int64_t>(count)});
            }
            tables.push_back(std::move(excluded));
            if (!normalized.empty()) {
                std::ofstream out(normalized, std::ios::binary);
                if (!out) {
                    throw ConfigError("cannot write {}", normalized);
                }
                telemetry::write_csv(out, fleet.filter.dataset.samples);
            }
            emit(opts, tables);
        } else if (*reportCmd) {
            auto cfg = load(opts);
            const auto fleet = evaluate(cfg);
            const auto standard = standard_or(opts, "market");
            emit(opts, {report::platform_table(fleet, cfg, standard), report::stage_table(fleet, cfg, standard),
                        report::category_table(fleet, cfg)});
        } else if (*cciCmd) {
            auto cfg = load(opts);
            const auto fleet = evaluate(cfg);
            emit(opts, {report::cci_table(fleet, cfg, standard_or(opts, "market"), workloadFlops)});
        } else if (*lcaCmd) {
            auto cfg = load(opts);
            emit(opts, {report::lca_table(cfg, deploymentYear)});
        } else if (*workloadCmd) {
            auto cfg = load(opts);
            auto& w = cfg.workload;
            if (!manifest.empty()) {
                w.manifest = manifest;
            }
            if (!intervals.empty()) {
                w.intervals = intervals;
            }
            if (!w.manifest || !w.intervals) {
                throw ConfigError("workload needs a run manifest and interval records");
            }
            workload::StepOptions step;
            step.factor_g_per_kwh = workloadFactor.value_or(w.factor_g_per_kwh);
            step.apply_pue = applyPue || w.apply_pue;
            step.pue = cfg.pue;
            step.threshold = threshold.value_or(w.on_duty_threshold);
            const auto runs = workload::load_runs(*w.manifest, *w.intervals);
            for (const auto& s : runs.skipped) {
                std::cerr << "skipped run " << s << "\n";
            }
            emit(opts, {report::workload_table(workload::summarize(runs, cfg.platforms, cfg.inventories, step))});
        } else if (*scenarioCmd) {
            auto cfg = load(opts);
            const auto fleet = evaluate(cfg);
            if (scenarioNames.empty()) {
                for (const auto& [name, s] : cfg.scenarios) {
                    scenarioNames.push_back(name);
                }
            }
            if (scenarioNames.empty()) {
                throw ConfigError("no scenarios defined in the config");
            }
            const auto ref = reference.empty() ? fleet.platforms.front().spec.platform_id : reference;
            std::vector<report::ScenarioResult> results;
            std::vector<std::string> warnings;
            for (const auto& name : scenarioNames) {
                auto rows = report::evaluate_scenario(fleet, cfg, name, standard_or(opts, "hourly247"), ref, &warnings);
                results.insert(results.end(), rows.begin(), rows.end());
            }
            warn(warnings);
            emit(opts, {report::scenario_table(results)});
        } else if (*weightCmd) {
            auto cfg = load(opts);
            const auto dataset = report::load_telemetry(cfg);
            const auto gens = generations.empty() ? cfg.weighting.generations : generations;
            const auto cohort = report::observations(dataset, cfg.platforms, gens);
            weighting::ComparisonOptions options;
            options.baseline = baseline.empty() ? cfg.weighting.baseline : baseline;
            if (options.baseline.empty()) {
                throw ConfigError("weight needs a baseline generation (--baseline or weighting.baseline)");
            }
            const auto standard = standard_or(opts, cfg.weighting.standard);
            options.factor_g_per_kwh = weightFactor ? *weightFactor : config::resolve_factor(cfg, standard).g_per_kwh;
            options.pue = cfg.pue;
            const auto comparison = weighting::balanced_comparison(cohort, weighting::BucketScheme(buckets.value_or(cfg.weighting.buckets)), options);
            warn(comparison.warnings);
            emit(opts, {report::comparison_table(comparison), report::exclusion_table(comparison)});
        } else if (*synthCmd) {
            const auto scenario = synth::parse_synth_scenario(config::read_json(synthScenario));
            const auto out = synth::generate(scenario, seed);
            fs::create_directories(synthOut);
            const auto csvPath = fs::path(synthOut) / "telemetry.csv";
            const auto manifestPath = fs::path(synthOut) / "manifest.json";
            std::ofstream csv(csvPath, std::ios::binary);
            std::ofstream man(manifestPath, std::ios::binary);
            if (!csv || !man) {
                throw ConfigError("cannot write into {}", synthOut);
            }
            telemetry::write_csv(csv, out.samples);
            man << out.manifest.dump(2) << "\n";
            std::cerr << fmt::format("wrote {} samples to {}\n", out.samples.size(), csvPath.string());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(exit_code_for(e));
    }
    return 0;
}
