#include "helpers.h"

#include "aicarbon/config.h"
#include "aicarbon/error.h"
#include "aicarbon/report.h"
#include "aicarbon/synth.h"
#include "aicarbon/weighting.h"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace aicarbon;
using namespace aicarbon::weighting;

namespace {

Observation obs(const std::string& g, double duty, double power, double flopsPerS)
{
    return {g, duty, {{kPowerW, power}, {kFlopsPerS, flopsPerS}}};
}

std::vector<Observation> random_cohort(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Observation> cohort;
    const char* gens[] = {"a", "b", "c"};
    for (int i = 0; i < n; ++i) {
        const std::string g = gens[i % 3];
        // skew each generation's duty distribution differently
        const double d = std::pow(u(rng), 0.5 + (i % 3));
        cohort.push_back(obs(g, d, 500 + 1000 * d * (1 + i % 3) + 50 * u(rng), 1e14 * (0.05 + d)));
    }
    return cohort;
}

// Stratified estimate computed directly from per-level means.
double stratified_mean(const std::vector<Observation>& cohort, const BucketScheme& scheme, const std::string& g, const std::string& metric,
                       const std::vector<bool>& supported)
{
    double num = 0.0;
    double den = 0.0;
    for (int b = 0; b < scheme.count(); ++b) {
        if (!supported[static_cast<std::size_t>(b)]) {
            continue;
        }
        double total = 0.0;
        double sum = 0.0;
        double n = 0.0;
        for (const auto& o : cohort) {
            if (scheme.bucket_of(o.duty_cycle) != b) {
                continue;
            }
            total += 1;
            if (o.generation == g) {
                sum += o.metric(metric);
                n += 1;
            }
        }
        num += total * sum / n;
        den += total;
    }
    return num / den;
}

const GenerationMetrics& row(const std::vector<GenerationMetrics>& rows, const std::string& g)
{
    return *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.generation == g; });
}

}

TEST_CASE("bucket scheme")
{
    const BucketScheme s(10);
    CHECK(s.count() == 10);
    CHECK(s.bucket_of(0.0) == 0);
    CHECK(s.bucket_of(0.1) == 0);
    CHECK(s.bucket_of(0.10000001) == 1);
    CHECK(s.bucket_of(0.3) == 2);
    CHECK(s.bucket_of(1.0) == 9);
    CHECK(s.upper(9) == 1.0);
    CHECK(s.lower(0) == 0.0);
    CHECK_THROWS(s.bucket_of(1.01));
    CHECK_THROWS(s.bucket_of(-0.01));
    CHECK_THROWS(BucketScheme(0));
}

TEST_CASE("propensity scores and weights for a 30/70 level")
{
    std::vector<Observation> cohort;
    for (int i = 0; i < 30; ++i) {
        cohort.push_back(obs("a", 0.35, 1, 1));
    }
    for (int i = 0; i < 70; ++i) {
        cohort.push_back(obs("b", 0.35, 1, 1));
    }
    const auto t = propensity_scores(cohort, BucketScheme(10));
    CHECK(*t.score(3, "a") == doctest::Approx(0.3));
    CHECK(*t.score(3, "b") == doctest::Approx(0.7));
    CHECK(t.weight(3, "a") == doctest::Approx(3.3333333333));
    CHECK(t.weight(3, "b") == doctest::Approx(1.4285714286));
    CHECK(t.weighted_count(3, "a") == 100);
    CHECK(t.weighted_count(3, "b") == 100);
    CHECK_FALSE(t.score(0, "a"));

    const auto w = weights(t, cohort);
    CHECK(exact_sum(std::span<const double>(w.data(), 30)) == doctest::Approx(100.0));
    CHECK(exact_sum(std::span<const double>(w.data() + 30, 70)) == doctest::Approx(100.0));
}

TEST_CASE("single generation and even split")
{
    std::vector<Observation> one = {obs("a", 0.5, 1, 1), obs("a", 0.55, 1, 1)};
    const auto t1 = propensity_scores(one, BucketScheme(10));
    CHECK(*t1.score(4, "a") == 1.0);
    CHECK(t1.weight(4, "a") == 1.0);

    std::vector<Observation> even = {obs("a", 0.5, 1, 1), obs("b", 0.5, 1, 1)};
    const auto t2 = propensity_scores(even, BucketScheme(10));
    CHECK(*t2.score(4, "a") == 0.5);
    CHECK(t2.weight(4, "b") == 2.0);
}

TEST_CASE("weighted average")
{
    std::vector<Observation> cohort = {obs("a", 0.5, 10, 1), obs("a", 0.5, 2, 1)};
    const std::vector<double> w = {3, 1};
    CHECK(weighted_average(cohort, w, kPowerW) == 8.0);
    CHECK(weighted_average(cohort, w, kDutyCycle) == 0.5);
    CHECK_THROWS(weighted_average(cohort, w, kPowerW, std::string("z")));
    const std::vector<double> zero = {0, 0};
    CHECK_THROWS(weighted_average(cohort, zero, kPowerW));
    CHECK_THROWS(weighted_average(cohort, w, "missing"));
}

TEST_CASE("weights give every generation the level's full mass")
{
    std::mt19937_64 rng(21);
    const auto cohort = random_cohort(rng, 3000);
    const BucketScheme scheme(10);
    const auto t = propensity_scores(cohort, scheme);
    const auto w = weights(t, cohort);
    for (int b = 0; b < scheme.count(); ++b) {
        for (const auto& g : t.generations()) {
            if (t.count(b, g) == 0) {
                continue;
            }
            ExactSum mass;
            for (std::size_t i = 0; i < cohort.size(); ++i) {
                if (cohort[i].generation == g && scheme.bucket_of(cohort[i].duty_cycle) == b) {
                    mass += w[i];
                }
            }
            CHECK(mass.value() == doctest::Approx(static_cast<double>(t.bucket_total(b))).epsilon(1e-12));
        }
    }
}

TEST_CASE("weighted metrics match a stratified oracle")
{
    std::mt19937_64 rng(77);
    const BucketScheme scheme(10);
    for (int trial = 0; trial < 5; ++trial) {
        const auto cohort = random_cohort(rng, 1500 + 300 * trial);
        const auto result = balanced_comparison(cohort, scheme, {"a", 100, 1.1});

        std::vector<bool> supported(static_cast<std::size_t>(scheme.count()), true);
        for (const auto& ex : result.excluded_buckets) {
            supported[static_cast<std::size_t>(ex.bucket)] = false;
        }
        for (const auto& m : result.weighted) {
            CHECK(testing::within_rel(m.power_w, stratified_mean(cohort, scheme, m.generation, kPowerW, supported), 1e-9));
            CHECK(testing::within_rel(m.flops_per_s, stratified_mean(cohort, scheme, m.generation, kFlopsPerS, supported), 1e-9));
            CHECK(testing::within_rel(m.carbon_per_exaflop_g, m.energy_per_exaflop_kwh * 100, 1e-12));
        }
    }
}

TEST_CASE("weighting leaves identical distributions unchanged")
{
    std::mt19937_64 rng(5);
    auto cohort = random_cohort(rng, 900);
    std::vector<Observation> twin;
    for (auto o : cohort) {
        o.generation = "a";
        twin.push_back(o);
        o.generation = "b";
        o.metrics[kPowerW] *= 2;
        twin.push_back(o);
    }
    const auto result = balanced_comparison(twin, BucketScheme(10), {"a", 1, 1});
    for (std::size_t i = 0; i < result.weighted.size(); ++i) {
        CHECK(testing::within_rel(result.weighted[i].power_w, result.unweighted[i].power_w, 1e-12));
        CHECK(testing::within_rel(result.weighted[i].duty_cycle, result.unweighted[i].duty_cycle, 1e-12));
    }
    const auto rel = relative_to(result.weighted, "a");
    CHECK(row(rel, "b").power_w == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("levels lacking a generation are dropped and reported")
{
    std::vector<Observation> cohort = {obs("a", 0.05, 100, 1e12), obs("a", 0.55, 200, 1e13), obs("b", 0.55, 300, 1e13), obs("b", 0.95, 400, 1e14)};
    const auto result = balanced_comparison(cohort, BucketScheme(10), {"a", 1, 1});
    REQUIRE(result.excluded_buckets.size() == 2);
    CHECK(result.excluded_buckets[0].bucket == 0);
    CHECK(result.excluded_buckets[0].missing_generations == std::vector<std::string>{"b"});
    CHECK(result.excluded_buckets[1].observations_dropped == 1);
    CHECK(row(result.weighted, "a").power_w == 200.0);
    CHECK(row(result.unweighted, "a").power_w == 150.0);
    CHECK(result.no_overlap.empty());
}

TEST_CASE("no overlap")
{
    std::vector<Observation> apart = {obs("a", 0.05, 100, 1e12), obs("b", 0.95, 400, 1e14)};
    CHECK_THROWS_AS(balanced_comparison(apart, BucketScheme(10), {"a", 1, 1}), ComputationError);

    std::vector<Observation> partial = {obs("a", 0.5, 100, 1e12), obs("b", 0.5, 200, 1e12), obs("c", 0.95, 400, 1e14)};
    const auto result = balanced_comparison(partial, BucketScheme(10), {"a", 1, 1});
    CHECK(result.no_overlap == std::vector<std::string>{"c"});
    CHECK(result.weighted.size() == 2);
    CHECK_FALSE(result.warnings.empty());

    CHECK_THROWS_AS(balanced_comparison(partial, BucketScheme(10), {"c", 1, 1}), ComputationError);
    CHECK_THROWS_AS(balanced_comparison(partial, BucketScheme(10), {"zz", 1, 1}), ComputationError);
}

TEST_CASE("comparison does not depend on observation order")
{
    std::mt19937_64 rng(99);
    auto cohort = random_cohort(rng, 1200);
    const auto base = balanced_comparison(cohort, BucketScheme(10), {"a", 50, 1.1});
    for (int i = 0; i < 5; ++i) {
        std::shuffle(cohort.begin(), cohort.end(), rng);
        const auto again = balanced_comparison(cohort, BucketScheme(10), {"a", 50, 1.1});
        for (const auto& m : base.weighted) {
            CHECK(testing::within_rel(row(again.weighted, m.generation).energy_per_exaflop_kwh, m.energy_per_exaflop_kwh, 1e-12));
        }
    }
}

TEST_CASE("weighting recovers the synthetic ground truth")
{
    const auto scenario = synth::parse_synth_scenario(config::read_json(testing::data_path("synth_ground_truth.json")));
    const auto out = synth::generate(scenario, 3);
    const auto catalog = config::parse_platforms(out.manifest);
    telemetry::FleetDataset ds;
    ds.samples = out.samples;
    const auto cohort = report::observations(telemetry::exclude_incomplete(ds).dataset, catalog, {});
    const auto result = balanced_comparison(cohort, BucketScheme(10), {"gen-a", 100, 1.1});
    const auto truth = out.manifest.at("truth").at("gen-b").at("energy_per_flop_ratio_vs_baseline").get<double>();
    CHECK(truth == 2.0);

    const auto weighted = relative_to(result.weighted, "gen-a");
    const auto unweighted = relative_to(result.unweighted, "gen-a");
    CHECK(testing::within_rel(row(weighted, "gen-b").energy_per_exaflop_kwh, truth, 0.02));
    CHECK(std::abs(row(unweighted, "gen-b").energy_per_exaflop_kwh - truth) > std::abs(row(weighted, "gen-b").energy_per_exaflop_kwh - truth));
    CHECK(std::abs(row(result.weighted, "gen-a").duty_cycle - row(result.weighted, "gen-b").duty_cycle) <= BucketScheme(10).width());
}
