#include "aicarbon/weighting.h"

#include "aicarbon/error.h"
#include "aicarbon/numeric.h"

#include <algorithm>
#include <set>

namespace aicarbon::weighting {

double Observation::metric(const std::string& name) const
{
    if (name == kDutyCycle) {
        return duty_cycle;
    }
    auto iter = metrics.find(name);
    if (iter == metrics.end()) {
        throw ComputationError("observation of '{}' has no metric '{}'", generation, name);
    }
    return iter->second;
}

BucketScheme::BucketScheme(int count)
{
    if (count < 1) {
        throw ConfigError("bucket count must be >= 1, got {}", count);
    }
    for (int i = 1; i <= count; ++i) {
        _upper.push_back(static_cast<double>(i) / count);
    }
    _upper.back() = 1.0;
}

double BucketScheme::lower(int bucket) const noexcept
{
    return bucket == 0 ? 0.0 : _upper[static_cast<std::size_t>(bucket - 1)];
}

int BucketScheme::bucket_of(double duty) const
{
    if (!(duty >= 0.0 && duty <= 1.0)) {
        throw ComputationError("duty cycle {} outside [0, 1]", duty);
    }
    auto iter = std::lower_bound(_upper.begin(), _upper.end(), duty);
    return static_cast<int>(iter - _upper.begin());
}

PropensityTable::PropensityTable(BucketScheme scheme, std::vector<std::string> generations)
: _scheme(std::move(scheme))
, _generations(std::move(generations))
, _counts(static_cast<std::size_t>(_scheme.count()), std::vector<std::size_t>(_generations.size(), 0))
{
}

std::size_t PropensityTable::generation_index(const std::string& generation) const
{
    auto iter = std::find(_generations.begin(), _generations.end(), generation);
    if (iter == _generations.end()) {
        throw ComputationError("generation '{}' is not part of the cohort", generation);
    }
    return static_cast<std::size_t>(iter - _generations.begin());
}

void PropensityTable::add(int bucket, const std::string& generation)
{
    ++_counts.at(static_cast<std::size_t>(bucket))[generation_index(generation)];
}

std::size_t PropensityTable::count(int bucket, const std::string& generation) const
{
    return _counts.at(static_cast<std::size_t>(bucket))[generation_index(generation)];
}

std::size_t PropensityTable::bucket_total(int bucket) const
{
    const auto& row = _counts.at(static_cast<std::size_t>(bucket));
    std::size_t total = 0;
    for (auto c : row) {
        total += c;
    }
    return total;
}

std::optional<double> PropensityTable::score(int bucket, const std::string& generation) const
{
    const auto total = bucket_total(bucket);
    if (total == 0) {
        return std::nullopt;
    }
    return static_cast<double>(count(bucket, generation)) / static_cast<double>(total);
}

double PropensityTable::weight(int bucket, const std::string& generation) const
{
    const auto n = count(bucket, generation);
    if (n == 0) {
        throw ComputationError("generation '{}' has no observations in duty-cycle level {}", generation, bucket);
    }
    return static_cast<double>(bucket_total(bucket)) / static_cast<double>(n);
}

std::size_t PropensityTable::weighted_count(int bucket, const std::string& generation) const
{
    const auto n = count(bucket, generation);
    return n == 0 ? 0 : n * bucket_total(bucket) / n;
}

namespace {

std::vector<std::string> generations_of(std::span<const Observation> cohort)
{
    std::set<std::string> unique;
    for (const auto& o : cohort) {
        unique.insert(o.generation);
    }
    return {unique.begin(), unique.end()};
}

}

PropensityTable propensity_scores(std::span<const Observation> cohort, const BucketScheme& scheme)
{
    if (cohort.empty()) {
        throw ComputationError("propensity scores need a non-empty cohort");
    }
    PropensityTable table(scheme, generations_of(cohort));
    for (const auto& o : cohort) {
        table.add(scheme.bucket_of(o.duty_cycle), o.generation);
    }
    return table;
}

std::vector<double> weights(const PropensityTable& table, std::span<const Observation> cohort)
{
    std::vector<double> result;
    result.reserve(cohort.size());
    for (const auto& o : cohort) {
        result.push_back(table.weight(table.scheme().bucket_of(o.duty_cycle), o.generation));
    }
    return result;
}

double weighted_average(std::span<const Observation> cohort, std::span<const double> weights, const std::string& metric,
                        const std::optional<std::string>& generation)
{
    if (cohort.size() != weights.size()) {
        throw ComputationError("{} observations but {} weights", cohort.size(), weights.size());
    }
    ExactSum weighted;
    ExactSum total;
    std::size_t selected = 0;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        if (generation && cohort[i].generation != *generation) {
            continue;
        }
        ++selected;
        weighted += weights[i] * cohort[i].metric(metric);
        total += weights[i];
    }
    if (selected == 0) {
        throw ComputationError("weighted average over an empty selection");
    }
    if (!(total.value() > 0.0)) {
        throw ComputationError("weighted average with zero total weight");
    }
    return weighted.value() / total.value();
}

std::vector<GenerationMetrics> relative_to(const std::vector<GenerationMetrics>& rows, const std::string& baseline)
{
    auto base = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.generation == baseline; });
    if (base == rows.end()) {
        throw ComputationError("baseline generation '{}' not in comparison", baseline);
    }
    std::vector<GenerationMetrics> result;
    for (const auto& r : rows) {
        GenerationMetrics rel = r;
        rel.duty_cycle = r.duty_cycle / base->duty_cycle;
        rel.power_w = r.power_w / base->power_w;
        rel.flops_per_s = r.flops_per_s / base->flops_per_s;
        rel.energy_per_exaflop_kwh = r.energy_per_exaflop_kwh / base->energy_per_exaflop_kwh;
        rel.carbon_per_exaflop_g = r.carbon_per_exaflop_g / base->carbon_per_exaflop_g;
        result.push_back(rel);
    }
    return result;
}

namespace {

GenerationMetrics summarize(std::span<const Observation> cohort, std::span<const double> w, const std::string& generation,
                            const ComparisonOptions& options)
{
    GenerationMetrics m;
    m.generation = generation;
    m.observations = static_cast<std::size_t>(
        std::count_if(cohort.begin(), cohort.end(), [&](const auto& o) { return o.generation == generation; }));
    m.duty_cycle = weighted_average(cohort, w, kDutyCycle, generation);
    m.power_w = weighted_average(cohort, w, kPowerW, generation);
    m.flops_per_s = weighted_average(cohort, w, kFlopsPerS, generation);
    if (!(m.flops_per_s > 0.0)) {
        throw ComputationError("generation '{}' has no utilized compute", generation);
    }
    // W / (FLOP/s) = J/FLOP; x 1e18 FLOP / 3.6e6 J/kWh
    m.energy_per_exaflop_kwh = options.pue * m.power_w / m.flops_per_s * kFlopsPerExaflop / kJoulesPerKwh;
    m.carbon_per_exaflop_g = m.energy_per_exaflop_kwh * options.factor_g_per_kwh;
    return m;
}

}

Comparison balanced_comparison(std::span<const Observation> cohort, const BucketScheme& scheme, const ComparisonOptions& options)
{
    const auto allGenerations = generations_of(cohort);
    if (allGenerations.size() < 2) {
        throw ComputationError("balanced comparison needs at least 2 generations, found {}", allGenerations.size());
    }
    if (std::find(allGenerations.begin(), allGenerations.end(), options.baseline) == allGenerations.end()) {
        throw ComputationError("baseline generation '{}' not in cohort", options.baseline);
    }

    Comparison result;
    result.baseline = options.baseline;

    // Positivity: a generation that never shares a level with any other
    // generation cannot be balanced at all.
    const auto full = propensity_scores(cohort, scheme);
    for (const auto& g : allGenerations) {
        bool overlaps = false;
        for (int b = 0; b < scheme.count() && !overlaps; ++b) {
            const auto n = full.count(b, g);
            overlaps = n > 0 && n < full.bucket_total(b);
        }
        if (!overlaps) {
            result.no_overlap.push_back(g);
            result.warnings.push_back(fmt::format("generation '{}' has no overlap with other generations; left out", g));
        }
    }
    if (std::find(result.no_overlap.begin(), result.no_overlap.end(), options.baseline) != result.no_overlap.end()) {
        throw ComputationError("no overlap: baseline generation '{}' shares no duty-cycle level with other generations", options.baseline);
    }

    std::vector<std::string> kept;
    for (const auto& g : allGenerations) {
        if (std::find(result.no_overlap.begin(), result.no_overlap.end(), g) == result.no_overlap.end()) {
            kept.push_back(g);
        }
    }
    if (kept.size() < 2) {
        throw ComputationError("no overlap: fewer than 2 generations share duty-cycle levels");
    }

    // Common support: keep only levels that every remaining generation populates.
    std::vector<bool> supported(static_cast<std::size_t>(scheme.count()), true);
    for (int b = 0; b < scheme.count(); ++b) {
        BucketExclusion exclusion{b, {}, 0};
        for (const auto& g : kept) {
            if (full.count(b, g) == 0) {
                exclusion.missing_generations.push_back(g);
            }
        }
        if (!exclusion.missing_generations.empty()) {
            supported[static_cast<std::size_t>(b)] = false;
            for (const auto& g : kept) {
                exclusion.observations_dropped += full.count(b, g);
            }
            if (exclusion.observations_dropped > 0) {
                result.warnings.push_back(fmt::format("duty-cycle level {} dropped: {} observation(s), not every generation present",
                                                      b, exclusion.observations_dropped));
                result.excluded_buckets.push_back(std::move(exclusion));
            }
        }
    }

    std::vector<Observation> all;
    std::vector<Observation> balanced;
    for (const auto& o : cohort) {
        if (std::find(kept.begin(), kept.end(), o.generation) == kept.end()) {
            continue;
        }
        all.push_back(o);
        if (supported[static_cast<std::size_t>(scheme.bucket_of(o.duty_cycle))]) {
            balanced.push_back(o);
        }
    }
    if (balanced.empty()) {
        throw ComputationError("no overlap: no duty-cycle level is populated by every generation");
    }

    const std::vector<double> unit(all.size(), 1.0);
    const auto table = propensity_scores(balanced, scheme);
    const auto w = weights(table, balanced);
    for (const auto& g : kept) {
        result.unweighted.push_back(summarize(all, unit, g, options));
        result.weighted.push_back(summarize(balanced, w, g, options));
    }
    return result;
}

}
