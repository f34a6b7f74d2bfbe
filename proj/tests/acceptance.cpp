// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "aicarbon/cci.h"
#include "aicarbon/config.h"
#include "aicarbon/factors.h"
#include "aicarbon/lca.h"
#include "aicarbon/numeric.h"
#include "aicarbon/report.h"
#include "aicarbon/synth.h"
#include "aicarbon/weighting.h"
#include "aicarbon/workload.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using namespace aicarbon;

namespace {

const fs::path kData = AICARBON_DATA_DIR;

/// Collects individual checks for one criterion.
class Checks
{
public:
    void expect(bool ok, std::string what)
    {
        ++_total;
        if (!ok) {
            _failures.push_back(std::move(what));
        }
    }

    void near(double actual, double expected, double tolerance, const std::string& what)
    {
        const double rel = expected == 0.0 ? std::abs(actual) : std::abs(actual - expected) / std::abs(expected);
        expect(rel <= tolerance, fmt::format("{}: got {:.6g}, want {:.6g} within {:.3g}% (off by {:.3g}%)", what, actual, expected,
                                             100 * tolerance, 100 * rel));
    }

    bool passed() const { return _failures.empty(); }
    int total() const { return _total; }
    const std::vector<std::string>& failures() const { return _failures; }

private:
    int _total = 0;
    std::vector<std::string> _failures;
};

struct Published
{
    const char* id;
    double kwh_per_exaflop;
    double embodied_cci;
    double op_cci_mb;
    double op_cci_lb;
    double op_kg_mb;
    double op_kg_lb;
};

// Per-chip fleet figures as published for the five platforms.
constexpr Published kTable[] = {
    {"v4i", 2.53, 114, 346, 929, 1166, 3137},  {"v5e", 2.16, 103, 295, 793, 1154, 3104},   {"v6e", 0.86, 38, 118, 316, 2141, 5759},
    {"v4", 1.93, 79, 263, 709, 2301, 6187},    {"v5p", 1.65, 58, 225, 605, 4288, 11532},
};

const Published& published(const std::string& id)
{
    return *std::find_if(std::begin(kTable), std::end(kTable), [&](const auto& p) { return id == p.id; });
}

struct Context
{
    config::RunConfig cfg;
    report::FleetEvaluation fleet;
};

const Context& context()
{
    static const Context ctx = [] {
        Context c;
        c.cfg = config::load_config(kData / "config.json");
        c.fleet = report::evaluate_fleet(c.cfg, report::load_telemetry(c.cfg));
        return c;
    }();
    return ctx;
}

void factor_identity(Checks& c)
{
    c.expect(factors::mb_factor(366, 231) == 135.0, "mb_factor(366, 231) != 135");
    const auto& cfg = context().cfg;
    c.expect(cfg.annual && std::abs(cfg.annual->mb_factor() - 135.0) < 1e-9, "bundled hourly series does not give MB 135");
}

void operational_reconstruction(Checks& c)
{
    const auto& ctx = context();
    const double mb = config::resolve_factor(ctx.cfg, "market").g_per_kwh;
    const double lb = config::resolve_factor(ctx.cfg, "location").g_per_kwh;
    for (const auto& p : kTable) {
        c.near(cci::operational_cci(p.kwh_per_exaflop, 135), p.op_cci_mb, 0.02, fmt::format("{} MB from published kWh/EF", p.id));
        c.near(cci::operational_cci(p.kwh_per_exaflop, 366), p.op_cci_lb, 0.02, fmt::format("{} LB from published kWh/EF", p.id));
        const auto& r = ctx.fleet.at(p.id);
        c.near(cci::operational_cci(r.kwh_per_exaflop, mb), p.op_cci_mb, 0.02, fmt::format("{} MB from telemetry", p.id));
        c.near(cci::operational_cci(r.kwh_per_exaflop, lb), p.op_cci_lb, 0.02, fmt::format("{} LB from telemetry", p.id));
    }
}

void lifetime_operational(Checks& c)
{
    const auto& ctx = context();
    for (const auto& p : kTable) {
        const auto& r = ctx.fleet.at(p.id);
        c.near(r.operational_kg(135), p.op_kg_mb, 0.02, fmt::format("{} lifetime MB kg", p.id));
        c.near(r.operational_kg(366), p.op_kg_lb, 0.02, fmt::format("{} lifetime LB kg", p.id));
    }
}

void total_and_estimator(Checks& c)
{
    const auto v4 = cci::make_report("v4", "market", 263.0 / 135.0, 693000.0 / 79.0, 693, 135);
    c.expect(std::round(v4.embodied_cci) + std::round(v4.operational_cci) == 342.0, "v4 total from table inputs != 342");
    c.expect(std::abs(v4.total_cci() - 342.0) < 1e-9, "v4 total CCI != 342");

    const auto v5p = cci::make_report("v5p", "market", 225.0 / 135.0, 1101000.0 / 58.0, 1101, 135);
    const auto gpt3v4 = cci::estimate_workload(3.14e23, v4);
    const auto gpt3v5p = cci::estimate_workload(3.14e23, v5p);
    c.near(gpt3v4.total_g() / 1e6, 107, 0.01, "GPT-3 on v4, tonnes");
    c.near(gpt3v5p.total_g() / 1e6, 89, 0.01, "GPT-3 on v5p, tonnes");
    c.near(gpt3v4.embodied_g / 1e6, 25, 0.04, "GPT-3 on v4 embodied, tonnes");
    c.near(gpt3v4.operational_g / 1e6, 82, 0.04, "GPT-3 on v4 operational, tonnes");
}

void v5e_embodied_chain(Checks& c)
{
    const auto& inv = context().cfg.inventories.at("v5e");
    const double manufacturing = lca::machine_manufacturing(inv);
    const double transport = lca::machine_transport(inv);
    c.near(manufacturing, 2277, 0.001, "v5e machine manufacturing kg");
    c.near(transport, 471, 1e-9, "v5e machine transport kg");
    c.near((manufacturing + transport) / 8, 106 + 238, 0.005, "v5e per-chip M+T kg");
}

void cfe_scenarios(Checks& c)
{
    const auto& cfg = context().cfg;
    const double f247 = config::resolve_factor(cfg, "hourly247").g_per_kwh;
    const auto cfe90 = config::resolve_factor(cfg, "scenario:cfe90");
    const auto mfg = config::resolve_factor(cfg, "scenario:cfe90_mfg");
    const auto& v6e = published("v6e");
    const auto& v4i = published("v4i");

    const double v6eOp247 = cci::operational_cci(v6e.kwh_per_exaflop, f247);
    const double v6eOp90 = cci::operational_cci(v6e.kwh_per_exaflop, cfe90.g_per_kwh);
    c.near(v6eOp247, 182, 0.02, "v6e operational CCI at 24/7 factor");
    c.near(v6eOp90, 27, 0.04, "v6e operational CCI at 90% CFE");

    const double reduction = factors::scenario_manufacturing_reduction(*mfg.scenario).fraction;
    c.near(mfg.scenario->manufacturing_electricity_share, 0.5, 0, "manufacturing electricity share");

    const double v6eBase = v6e.embodied_cci + v6eOp247;
    const double v4iBase = v4i.embodied_cci + cci::operational_cci(v4i.kwh_per_exaflop, f247);
    const double v6eCfe = v6e.embodied_cci + v6eOp90;
    const double v6eCfeMfg = v6e.embodied_cci * (1 - reduction) + cci::operational_cci(v6e.kwh_per_exaflop, mfg.g_per_kwh);
    c.near(v6eBase / v6eCfe, 3.3, 0.05, "v6e 24/7 vs v6e 90% CFE");
    c.near(v6eBase / v6eCfeMfg, 4.6, 0.05, "v6e 24/7 vs v6e 90% CFE + manufacturing CFE");
    c.near(v4iBase / v6eCfe, 10, 0.05, "v4i 24/7 vs v6e 90% CFE");
    c.near(v4iBase / v6eCfeMfg, 14, 0.05, "v4i 24/7 vs v6e 90% CFE + manufacturing CFE");
}

void per_step_workload(Checks& c)
{
    struct Cell
    {
        const char* workload;
        const char* platform;
        double operational;
        double embodied;
        double cci;
    };
    const Cell cells[] = {
        {"RLHF", "v5e", 0.033, 0.010, 309.9},
        {"RLHF", "v6e", 0.021, 0.006, 183.8},
        {"SFT", "v5e", 0.335, 0.082, 249.4},
        {"SFT", "v6e", 0.250, 0.057, 142.0},
    };
    const auto& cfg = context().cfg;
    const auto runs = workload::load_runs(*cfg.workload.manifest, *cfg.workload.intervals);
    workload::StepOptions options;
    options.factor_g_per_kwh = 122.5;
    options.pue = cfg.pue;
    const auto rows = workload::summarize(runs, cfg.platforms, cfg.inventories, options);
    for (const auto& cell : cells) {
        const auto row = std::find_if(rows.begin(), rows.end(),
                                      [&](const auto& r) { return r.workload == cell.workload && r.platform_id == cell.platform; });
        if (row == rows.end()) {
            c.expect(false, fmt::format("{} {} missing from the bundled runs", cell.workload, cell.platform));
            continue;
        }
        const auto label = fmt::format("{} {}", cell.workload, cell.platform);
        c.near(row->operational_g, cell.operational, 0.03, label + " operational g/step");
        c.near(row->embodied_g, cell.embodied, 0.03, label + " embodied g/step");
        c.near(row->cci, cell.cci, 1e-12, label + " CCI round trip");
        c.expect(fmt::format("{:.1f}", row->cci) == fmt::format("{:.1f}", cell.cci), label + " CCI does not print as published");
    }
}

void generational_claim(Checks& c)
{
    const auto& v4i = published("v4i");
    const auto& v6e = published("v6e");
    const double ratio = (v4i.embodied_cci + v4i.op_cci_mb) / (v6e.embodied_cci + v6e.op_cci_mb);
    c.expect(ratio >= 2.8 && ratio <= 3.1, fmt::format("published v4i/v6e MB CCI ratio {:.3f} outside [2.8, 3.1]", ratio));

    const auto& ctx = context();
    const auto market = config::resolve_factor(ctx.cfg, "market");
    const double measured = ctx.fleet.at("v4i").cci(market).total_cci() / ctx.fleet.at("v6e").cci(market).total_cci();
    c.expect(measured >= 2.8 && measured <= 3.1, fmt::format("measured v4i/v6e MB CCI ratio {:.3f} outside [2.8, 3.1]", measured));
}

std::vector<weighting::Observation> cohort_from(const synth::SynthOutput& out)
{
    telemetry::FleetDataset ds;
    ds.samples = out.samples;
    return report::observations(telemetry::exclude_incomplete(ds).dataset, config::parse_platforms(out.manifest), {});
}

double stratified(const std::vector<weighting::Observation>& cohort, const weighting::BucketScheme& scheme, const std::string& g,
                  const std::string& metric, const std::vector<bool>& supported)
{
    std::vector<double> total(static_cast<std::size_t>(scheme.count()));
    std::vector<double> sum(total.size());
    std::vector<double> n(total.size());
    for (const auto& o : cohort) {
        const auto b = static_cast<std::size_t>(scheme.bucket_of(o.duty_cycle));
        total[b] += 1;
        if (o.generation == g) {
            sum[b] += o.metric(metric);
            n[b] += 1;
        }
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t b = 0; b < total.size(); ++b) {
        if (supported[b]) {
            num += total[b] * sum[b] / n[b];
            den += total[b];
        }
    }
    return num / den;
}

void weighting_properties(Checks& c)
{
    using namespace weighting;
    const BucketScheme scheme(10);
    const auto generations = synth::parse_synth_scenario(config::read_json(kData / "synth_generations.json"));
    for (std::uint64_t seed : {1, 7, 42}) {
        const auto cohort = cohort_from(synth::generate(generations, seed));
        const auto table = propensity_scores(cohort, scheme);
        const auto w = weights(table, cohort);

        // weighted mass per level equals the pooled count for every generation
        for (int b = 0; b < scheme.count(); ++b) {
            for (const auto& g : table.generations()) {
                if (table.count(b, g) == 0) {
                    continue;
                }
                ExactSum mass;
                for (std::size_t i = 0; i < cohort.size(); ++i) {
                    if (cohort[i].generation == g && scheme.bucket_of(cohort[i].duty_cycle) == b) {
                        mass += w[i];
                    }
                }
                c.near(mass.value(), static_cast<double>(table.bucket_total(b)), 1e-12, fmt::format("seed {} level {} {} mass", seed, b, g));
                c.expect(table.weighted_count(b, g) == table.bucket_total(b), "integer weighted count");
            }
        }

        const auto result = balanced_comparison(cohort, scheme, {generations.baseline, 135, 1.1});
        std::vector<bool> supported(static_cast<std::size_t>(scheme.count()), true);
        for (const auto& ex : result.excluded_buckets) {
            supported[static_cast<std::size_t>(ex.bucket)] = false;
        }
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& m : result.weighted) {
            lo = std::min(lo, m.duty_cycle);
            hi = std::max(hi, m.duty_cycle);
            for (const auto* metric : {&kPowerW, &kFlopsPerS, &kDutyCycle}) {
                const double actual = *metric == kPowerW ? m.power_w : *metric == kFlopsPerS ? m.flops_per_s : m.duty_cycle;
                c.near(actual, stratified(cohort, scheme, m.generation, *metric, supported), 1e-9,
                       fmt::format("seed {} {} {} vs stratified oracle", seed, m.generation, *metric));
            }
        }
        c.expect(hi - lo <= scheme.width(), fmt::format("seed {}: weighted duty means spread {:.4f} > one level", seed, hi - lo));
    }

    const auto truthScenario = synth::parse_synth_scenario(config::read_json(kData / "synth_ground_truth.json"));
    for (std::uint64_t seed : {3, 17}) {
        const auto out = synth::generate(truthScenario, seed);
        const auto result = balanced_comparison(cohort_from(out), scheme, {truthScenario.baseline, 135, 1.1});
        for (const auto& r : relative_to(result.weighted, truthScenario.baseline)) {
            const double truth = out.manifest.at("truth").at(r.generation).at("energy_per_flop_ratio_vs_baseline").get<double>();
            c.near(r.energy_per_exaflop_kwh, truth, 0.02, fmt::format("seed {} {} weighted energy ratio vs truth", seed, r.generation));
        }
    }

    // Identical duty distributions: weighting is a no-op.
    auto base = cohort_from(synth::generate(generations, 9));
    std::vector<Observation> twin;
    for (const auto& o : base) {
        if (o.generation != generations.baseline) {
            continue;
        }
        auto a = o;
        a.generation = "a";
        auto b = o;
        b.generation = "b";
        b.metrics[kPowerW] *= 1.7;
        twin.push_back(a);
        twin.push_back(b);
    }
    const auto same = balanced_comparison(twin, scheme, {"a", 135, 1.1});
    for (std::size_t i = 0; i < same.weighted.size(); ++i) {
        const auto& w = same.weighted[i];
        const auto& u = same.unweighted[i];
        c.near(w.duty_cycle, u.duty_cycle, 1e-12, "identical cohorts duty");
        c.near(w.power_w, u.power_w, 1e-12, "identical cohorts power");
        c.near(w.flops_per_s, u.flops_per_s, 1e-12, "identical cohorts FLOP/s");
        c.near(w.carbon_per_exaflop_g, u.carbon_per_exaflop_g, 1e-12, "identical cohorts carbon");
    }
}

factors::HourlyGridSeries random_series(std::mt19937_64& rng, int hours)
{
    std::uniform_real_distribution<double> load(0, 100);
    std::uniform_real_distribution<double> ratio(0, 2);
    std::uniform_real_distribution<double> grid(0, 900);
    std::bernoulli_distribution none(0.25);
    factors::HourlyGridSeries s{"g", {}};
    for (int h = 0; h < hours; ++h) {
        const double l = load(rng);
        s.hours.push_back({3600 * h, l, none(rng) ? 0.0 : l * ratio(rng), grid(rng)});
    }
    return s;
}

void hourly_engine(Checks& c)
{
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        auto s = random_series(rng, 24 + i % 200);
        const auto annual = factors::annual_factors({s}, 2023);
        const double f247 = factors::hourly_247_emissions(s).factor();
        c.expect(annual.mb_factor() <= f247 * (1 + 1e-12) && f247 <= annual.lb_factor() * (1 + 1e-12),
                 fmt::format("series {}: MB {} <= 24/7 {} <= LB {} violated", i, annual.mb_factor(), f247, annual.lb_factor()));

        if (i % 10 == 0) {
            auto bare = s;
            ExactSum emissions;
            ExactSum load;
            for (auto& h : bare.hours) {
                h.cfe_kwh = 0;
                emissions += h.load_kwh * h.grid_factor;
                load += h.load_kwh;
            }
            const auto r = factors::hourly_247_emissions(bare);
            c.expect(r.emissions_g == emissions.value(), fmt::format("series {}: cfe=0 emissions differ from LB", i));
            c.near(r.factor(), emissions.value() / load.value(), 1e-15, "cfe=0 factor equals load-weighted LB");

            auto covered = s;
            for (auto& h : covered.hours) {
                h.cfe_kwh = h.load_kwh;
            }
            c.expect(factors::hourly_247_emissions(covered).emissions_g == 0.0, fmt::format("series {}: full coverage not zero", i));
        }
    }
}

void amortization_views(Checks& c)
{
    const auto& ctx = context();
    for (const auto& p : ctx.fleet.platforms) {
        const auto views = lca::inventory_views(p.embodied, p.spec.lifetime_years, 2024);
        const double total = p.embodied.total();
        c.expect(lca::InventoryViews::lifetime_total(views.lca_amortized) == total,
                 fmt::format("{}: LCA yearly series does not sum to {}", p.spec.platform_id, total));
        double hardware = 0.0;
        for (const auto& y : views.lca_amortized) {
            hardware += y.hardware();
        }
        c.near(hardware, p.embodied.mt(), 1e-12, p.spec.platform_id + " LCA hardware total");
        c.expect(views.corporate.front().hardware() == p.embodied.mt(),
                 fmt::format("{}: corporate year 1 books {} of {}", p.spec.platform_id, views.corporate.front().hardware(), p.embodied.mt()));
        for (std::size_t i = 1; i < views.corporate.size(); ++i) {
            c.expect(views.corporate[i].hardware() == 0.0, p.spec.platform_id + ": corporate view books hardware after year 1");
        }
    }
}

struct Criterion
{
    int number;
    const char* title;
    std::function<void(Checks&)> run;
};

}

int main()
{
    const Criterion criteria[] = {
        {1, "factor identity: MB = LB - CFE impact", factor_identity},
        {2, "operational CCI reconstruction, MB and LB, five platforms (2%)", operational_reconstruction},
        {3, "lifetime operational emissions, MB and LB, five platforms (2%)", lifetime_operational},
        {4, "total CCI and workload estimator (1% / 4%)", total_and_estimator},
        {5, "v5e embodied chain (0.1% / 0.5%)", v5e_embodied_chain},
        {6, "24/7 and 90% CFE scenarios (2% / 4% / 5%)", cfe_scenarios},
        {7, "per-step workload emissions (3%) and CCI round trip", per_step_workload},
        {8, "v4i to v6e total CCI ratio in [2.8, 3.1]", generational_claim},
        {9, "propensity weighting properties", weighting_properties},
        {10, "24/7 engine properties on 1000 random series", hourly_engine},
        {11, "LCA and corporate amortization views", amortization_views},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Checks checks;
        std::string error;
        try {
            criterion.run(checks);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const bool ok = error.empty() && checks.passed();
        failed += ok ? 0 : 1;
        std::cout << fmt::format("{} {:>2}. {} [{} checks]\n", ok ? "PASS" : "FAIL", criterion.number, criterion.title, checks.total());
        if (!error.empty()) {
            std::cout << "        error: " << error << "\n";
        }
        for (const auto& f : checks.failures()) {
            std::cout << "        " << f << "\n";
        }
    }
    std::cout << fmt::format("{} of {} criteria passed\n", std::size(criteria) - static_cast<std::size_t>(failed), std::size(criteria));
    return failed == 0 ? 0 : 1;
}
