#include "aicarbon/cci.h"

#include "aicarbon/error.h"
#include "aicarbon/numeric.h"

namespace aicarbon::cci {

double energy_per_exaflop(const telemetry::FleetWindow& window, double pue)
{
    const double flops = window.total_flops();
    if (!(flops > 0.0)) {
        throw ComputationError("no utilized compute for platform '{}'", window.platform_id());
    }
    return window.total_energy_kwh() * pue / (flops / kFlopsPerExaflop);
}

double operational_cci(double energyPerExaflopKwh, double factorGPerKwh)
{
    if (!(energyPerExaflopKwh >= 0.0) || !(factorGPerKwh >= 0.0)) {
        throw ComputationError("operational CCI needs non-negative inputs");
    }
    return energyPerExaflopKwh * factorGPerKwh;
}

double operational_cci_from_efficiency(double factorGPerKwh, double flopsPerJoule)
{
    if (!(flopsPerJoule > 0.0)) {
        throw ComputationError("FLOPs per joule must be > 0");
    }
    return factorGPerKwh / (flopsPerJoule * kJoulesPerKwh / kFlopsPerExaflop);
}

double embodied_cci(double embodiedGPerChip, double lifetimeExaflopsPerChip)
{
    if (!(lifetimeExaflopsPerChip > 0.0)) {
        throw ComputationError("zero lifetime compute: embodied CCI undefined");
    }
    return embodiedGPerChip / lifetimeExaflopsPerChip;
}

double lifetime_exaflops(const telemetry::FleetWindow& window, const telemetry::PlatformSpec& spec)
{
    if (window.sample_count() == 0) {
        return 0.0;
    }
    const double chipSeconds = static_cast<double>(window.sample_count()) * kIntervalSeconds * spec.chips_per_machine;
    return window.total_flops() / chipSeconds * lifetime_seconds(spec.lifetime_years) / kFlopsPerExaflop;
}

CciReport make_report(std::string platformId, std::string accounting, double energyPerExaflopKwh, double lifetimeExaflopsPerChip,
                      double embodiedKgPerChip, double factorGPerKwh)
{
    CciReport report;
    report.platform_id = std::move(platformId);
    report.accounting = std::move(accounting);
    report.energy_per_exaflop_kwh = energyPerExaflopKwh;
    report.lifetime_exaflops = lifetimeExaflopsPerChip;
    report.embodied_cci = embodied_cci(embodiedKgPerChip * kGramsPerKg, lifetimeExaflopsPerChip);
    report.operational_cci = operational_cci(energyPerExaflopKwh, factorGPerKwh);
    return report;
}

WorkloadEstimate estimate_workload(double flops, const CciReport& report)
{
    if (!(flops >= 0.0)) {
        throw ComputationError("FLOP count must be >= 0");
    }
    const double exaflops = flops / kFlopsPerExaflop;
    return {exaflops * report.embodied_cci, exaflops * report.operational_cci};
}

}
