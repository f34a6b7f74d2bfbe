#include "helpers.h"

#include "aicarbon/cci.h"
#include "aicarbon/error.h"

#include <doctest.h>

#include <random>

using namespace aicarbon;
using namespace aicarbon::cci;

TEST_CASE("energy per ExaFLOP")
{
    telemetry::FleetWindow w("x");
    w.add(1200, 0.5, 1e17);
    // 1200 W x 300 s = 0.1 kWh for 0.1 EF
    CHECK(energy_per_exaflop(w, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(energy_per_exaflop(w, 1.1) == doctest::Approx(1.1).epsilon(1e-14));

    telemetry::FleetWindow idle("idle");
    idle.add(1200, 0.0, 0.0);
    CHECK_THROWS_AS(energy_per_exaflop(idle, 1.1), ComputationError);
}

TEST_CASE("operational CCI")
{
    CHECK(operational_cci(2.53, 135) == doctest::Approx(341.55));
    CHECK(operational_cci(2.53, 0) == 0.0);
    CHECK_THROWS_AS(operational_cci(-1, 100), ComputationError);
    CHECK_THROWS_AS(operational_cci(1, -100), ComputationError);
}

TEST_CASE("operational CCI equals factor over performance per watt")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> e(0.1, 5);
    std::uniform_real_distribution<double> f(0, 900);
    for (int i = 0; i < 200; ++i) {
        const double kwh = e(rng);
        const double factor = f(rng);
        const double flopsPerJoule = kFlopsPerExaflop / (kwh * kJoulesPerKwh);
        CHECK(operational_cci_from_efficiency(factor, flopsPerJoule) == doctest::Approx(operational_cci(kwh, factor)).epsilon(1e-12));
    }
}

TEST_CASE("lifetime ExaFLOPs and embodied CCI")
{
    telemetry::FleetWindow w("x");
    w.add(1000, 0.5, 2.4e16);
    w.add(1000, 0.5, 2.4e16);
    const auto spec = testing::platform("x", 8, 3);
    // 2.4e16 FLOP per 300 s per machine = 1e13 FLOP/s per chip
    CHECK(lifetime_exaflops(w, spec) == doctest::Approx(1e13 * lifetime_seconds(6) / 1e18).epsilon(1e-14));
    CHECK(lifetime_exaflops(telemetry::FleetWindow("empty"), spec) == 0.0);

    CHECK(embodied_cci(386000, 3386) == doctest::Approx(114.0).epsilon(1e-3));
    CHECK_THROWS_AS(embodied_cci(386000, 0), ComputationError);
}

TEST_CASE("embodied CCI falls as lifetime compute grows")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(1, 10000);
    for (int i = 0; i < 100; ++i) {
        const double g = u(rng) * 100;
        const double ef = u(rng);
        CHECK(embodied_cci(g, 2 * ef) == doctest::Approx(embodied_cci(g, ef) / 2).epsilon(1e-14));
        CHECK(embodied_cci(g, ef + 1) < embodied_cci(g, ef));
    }
}

TEST_CASE("report and workload estimate")
{
    const double lifetimeEf = 693000.0 / 79.0;
    const auto r = make_report("v4", "market", 263.0 / 135.0, lifetimeEf, 693, 135);
    CHECK(r.embodied_cci == doctest::Approx(79.0).epsilon(1e-12));
    CHECK(r.operational_cci == doctest::Approx(263.0).epsilon(1e-12));
    CHECK(r.total_cci() == doctest::Approx(342.0).epsilon(1e-12));

    const auto est = estimate_workload(3.14e23, r);
    CHECK(est.total_g() / 1e6 == doctest::Approx(107.388).epsilon(1e-9));
    CHECK(est.embodied_g / 1e6 == doctest::Approx(24.806).epsilon(1e-9));
    CHECK(est.operational_g / 1e6 == doctest::Approx(82.582).epsilon(1e-9));
    CHECK_THROWS_AS(estimate_workload(-1, r), ComputationError);
}

TEST_CASE("total CCI is additive and linear in the factor")
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.1, 10);
    for (int i = 0; i < 100; ++i) {
        const double kwh = u(rng);
        const double ef = 1000 * u(rng);
        const double kg = 100 * u(rng);
        const double f = 50 * u(rng);
        const auto a = make_report("x", "s", kwh, ef, kg, f);
        const auto b = make_report("x", "s", kwh, ef, kg, 2 * f);
        CHECK(b.operational_cci == doctest::Approx(2 * a.operational_cci).epsilon(1e-14));
        CHECK(b.embodied_cci == a.embodied_cci);
        CHECK(a.total_cci() == a.embodied_cci + a.operational_cci);
    }
}
