#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aicarbon::weighting {

inline const std::string kDutyCycle = "duty_cycle";
inline const std::string kPowerW = "power_w";
inline const std::string kFlopsPerS = "flops_per_s";

/// One machine-interval in a comparison cohort.
struct Observation
{
    std::string generation;
    double duty_cycle = 0.0;
    std::map<std::string, double> metrics;

    /// "duty_cycle" or a key of metrics. Throws when absent.
    double metric(const std::string& name) const;
};

/// Equal-width, right-closed duty-cycle levels over [0, 1]: [0, w], (w, 2w], ...
/// A duty cycle of exactly 0 falls in the first level.
class BucketScheme
{
public:
    explicit BucketScheme(int count = 10);

    int count() const noexcept { return static_cast<int>(_upper.size()); }
    double width() const noexcept { return 1.0 / count(); }
    double lower(int bucket) const noexcept;
    double upper(int bucket) const noexcept { return _upper[static_cast<std::size_t>(bucket)]; }

    /// Throws when duty is outside [0, 1].
    int bucket_of(double duty) const;

private:
    std::vector<double> _upper;
};

/// Per duty-cycle level: how many observations each generation contributes.
class PropensityTable
{
public:
    PropensityTable(BucketScheme scheme, std::vector<std::string> generations);

    void add(int bucket, const std::string& generation);

    const BucketScheme& scheme() const noexcept { return _scheme; }
    const std::vector<std::string>& generations() const noexcept { return _generations; }

    std::size_t count(int bucket, const std::string& generation) const;
    std::size_t bucket_total(int bucket) const;
    bool populated(int bucket) const { return bucket_total(bucket) > 0; }

    /// Share of the level's observations that belong to the generation;
    /// nullopt for an empty level.
    std::optional<double> score(int bucket, const std::string& generation) const;

    /// Inverse propensity weight for an observation of this generation in this
    /// level: bucket_total / count.
    double weight(int bucket, const std::string& generation) const;

    /// Sum of weights of the generation in the level, in exact integer form
    /// (count x bucket_total / count == bucket_total).
    std::size_t weighted_count(int bucket, const std::string& generation) const;

private:
    std::size_t generation_index(const std::string& generation) const;

    BucketScheme _scheme;
    std::vector<std::string> _generations;
    std::vector<std::vector<std::size_t>> _counts; // [bucket][generation]
};

PropensityTable propensity_scores(std::span<const Observation> cohort, const BucketScheme& scheme);

/// One inverse-propensity weight per observation, in cohort order.
std::vector<double> weights(const PropensityTable& table, std::span<const Observation> cohort);

/// sum(w * M) / sum(w), optionally restricted to one generation. Throws when
/// the selection is empty or carries no weight.
double weighted_average(std::span<const Observation> cohort, std::span<const double> weights, const std::string& metric,
                        const std::optional<std::string>& generation = std::nullopt);

struct ComparisonOptions
{
    std::string baseline;
    double factor_g_per_kwh = 0.0;
    double pue = 1.0;
};

struct GenerationMetrics
{
    std::string generation;
    std::size_t observations = 0;
    double duty_cycle = 0.0;
    double power_w = 0.0;
    double flops_per_s = 0.0;
    double energy_per_exaflop_kwh = 0.0;
    double carbon_per_exaflop_g = 0.0;
};

struct BucketExclusion
{
    int bucket = 0;
    std::vector<std::string> missing_generations;
    std::size_t observations_dropped = 0;
};

struct Comparison
{
    std::string baseline;
    std::vector<GenerationMetrics> unweighted;
    std::vector<GenerationMetrics> weighted;
    std::vector<BucketExclusion> excluded_buckets;
    /// Generations that never share a duty-cycle level with another generation.
    std::vector<std::string> no_overlap;
    std::vector<std::string> warnings;
};

/// Rows divided field-wise by the baseline generation's row.
std::vector<GenerationMetrics> relative_to(const std::vector<GenerationMetrics>& rows, const std::string& baseline);

/// Inverse-propensity-weighted cross-generation comparison restricted to the
/// duty-cycle levels every generation populates.
Comparison balanced_comparison(std::span<const Observation> cohort, const BucketScheme& scheme, const ComparisonOptions& options);

}
