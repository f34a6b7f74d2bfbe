#pragma once

#include "aicarbon/telemetry.h"

#include <string>

namespace aicarbon::cci {

/// kWh per 10^18 utilized FLOPs, data center overhead (PUE) included.
double energy_per_exaflop(const telemetry::FleetWindow& window, double pue);

/// gCO2e per ExaFLOP: energy per ExaFLOP x electricity factor.
double operational_cci(double energyPerExaflopKwh, double factorGPerKwh);

/// Same quantity written as factor / (performance per watt).
double operational_cci_from_efficiency(double factorGPerKwh, double flopsPerJoule);

double embodied_cci(double embodiedGPerChip, double lifetimeExaflopsPerChip);

/// Measured utilized FLOP rate per chip extrapolated over the platform lifetime.
double lifetime_exaflops(const telemetry::FleetWindow& window, const telemetry::PlatformSpec& spec);

/// Compute carbon intensity of one platform under one accounting standard.
struct CciReport
{
    std::string platform_id;
    std::string accounting;
    double energy_per_exaflop_kwh = 0.0;
    double lifetime_exaflops = 0.0;
    double embodied_cci = 0.0;
    double operational_cci = 0.0;

    double total_cci() const noexcept { return embodied_cci + operational_cci; }
};

CciReport make_report(std::string platformId, std::string accounting, double energyPerExaflopKwh, double lifetimeExaflopsPerChip,
                      double embodiedKgPerChip, double factorGPerKwh);

struct WorkloadEstimate
{
    double embodied_g = 0.0;
    double operational_g = 0.0;

    double total_g() const noexcept { return embodied_g + operational_g; }
};

/// Ballpark emissions of a job from its FLOP count.
WorkloadEstimate estimate_workload(double flops, const CciReport& report);

}
