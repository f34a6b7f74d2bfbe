#include "aicarbon/lca.h"

#include "aicarbon/error.h"
#include "aicarbon/numeric.h"

#include <array>
#include <cmath>
#include <limits>

namespace aicarbon::lca {

namespace {

constexpr std::array<std::pair<Category, std::string_view>, 10> kCategories = {{
    {Category::TpuAsic, "tpu_asic"},
    {Category::Hbm, "hbm"},
    {Category::Cpu, "cpu"},
    {Category::Dram, "dram"},
    {Category::Ssd, "ssd"},
    {Category::Pcba, "pcba"},
    {Category::Thermal, "thermal"},
    {Category::Mechanical, "mechanical"},
    {Category::Nic, "nic"},
    {Category::Misc, "misc"},
}};

}

std::string_view to_string(Category c) noexcept
{
    for (auto& [value, name] : kCategories) {
        if (value == c) {
            return name;
        }
    }
    return "misc";
}

std::string_view to_string(TrayRole r) noexcept
{
    return r == TrayRole::Accelerator ? "accelerator" : "host";
}

std::string_view to_string(TransportMode m) noexcept
{
    switch (m) {
    case TransportMode::Air:
        return "air";
    case TransportMode::Ocean:
        return "ocean";
    case TransportMode::Ground:
        return "ground";
    }
    return "ground";
}

Category parse_category(std::string_view text)
{
    for (auto& [value, name] : kCategories) {
        if (name == text) {
            return value;
        }
    }
    throw ConfigError("unknown component category '{}'", text);
}

TrayRole parse_tray_role(std::string_view text)
{
    if (text == "accelerator") {
        return TrayRole::Accelerator;
    }
    if (text == "host") {
        return TrayRole::Host;
    }
    throw ConfigError("unknown tray role '{}'", text);
}

TransportMode parse_transport_mode(std::string_view text)
{
    if (text == "air") {
        return TransportMode::Air;
    }
    if (text == "ocean") {
        return TransportMode::Ocean;
    }
    if (text == "ground") {
        return TransportMode::Ground;
    }
    throw ConfigError("unknown transport mode '{}'", text);
}

double TransportLeg::kg_co2e() const noexcept
{
    if (auto* direct = std::get_if<DirectEmission>(&quantity)) {
        return direct->kg_co2e;
    }
    const auto& freight = std::get<FreightActivity>(quantity);
    // g/t-km with mass in kg: kg * km * g/(t km) / 1000 (kg->t) / 1000 (g->kg)
    return freight.mass_kg * freight.distance_km * freight.factor_g_per_tonne_km / 1e6;
}

void MachineInventory::validate() const
{
    if (accelerator_trays < 1) {
        throw ConfigError("inventory '{}': accelerator_trays must be >= 1", platform_id);
    }
    for (const auto& c : components) {
        if (!(c.kg_co2e >= 0.0)) {
            throw ConfigError("inventory '{}': component '{}' has negative kgCO2e", platform_id, c.name);
        }
        if (c.electricity_share && !(*c.electricity_share >= 0.0 && *c.electricity_share <= 1.0)) {
            throw ConfigError("inventory '{}': component '{}' electricity_share outside [0, 1]", platform_id, c.name);
        }
    }
    for (const auto& leg : transport) {
        if (!(leg.kg_co2e() >= 0.0)) {
            throw ConfigError("inventory '{}': transport leg '{}' is negative", platform_id, leg.description);
        }
    }
    if (!(eol_credit_fraction >= 0.0 && eol_credit_fraction <= kMaxEolCreditFraction)) {
        throw ConfigError("inventory '{}': eol_credit_fraction must be in [0, {}]", platform_id, kMaxEolCreditFraction);
    }
    if (!(dc_construction_kg_per_chip >= 0.0) || !(scope1_allocation_kg_per_chip >= 0.0)) {
        throw ConfigError("inventory '{}': per-chip allocations must be >= 0", platform_id);
    }
}

void GwpTable::set(std::string gas, double multiplier)
{
    _entries[std::move(gas)] = multiplier;
}

double GwpTable::multiplier(const std::string& gas) const
{
    auto iter = _entries.find(gas);
    if (iter == _entries.end()) {
        std::string known;
        for (auto& [name, _] : _entries) {
            known += known.empty() ? name : ", " + name;
        }
        throw ComputationError("unknown gas '{}' (known: {})", gas, known);
    }
    return iter->second;
}

void GwpTable::validate() const
{
    auto co2 = _entries.find("CO2");
    if (co2 == _entries.end() || co2->second != 1.0) {
        throw ConfigError("GWP table must map CO2 to exactly 1");
    }
    for (auto& [gas, m] : _entries) {
        if (!(m > 0.0)) {
            throw ConfigError("GWP multiplier for '{}' must be > 0", gas);
        }
    }
}

double gwp_convert(const std::string& gas, double massKg, const GwpTable& table)
{
    return massKg * table.multiplier(gas);
}

double machine_manufacturing(const MachineInventory& inv, TrayRole role)
{
    ExactSum perTray;
    for (const auto& c : inv.components) {
        if (c.role == role) {
            perTray += c.kg_co2e;
        }
    }
    return role == TrayRole::Accelerator ? perTray.value() * inv.accelerator_trays : perTray.value();
}

double machine_manufacturing(const MachineInventory& inv)
{
    return machine_manufacturing(inv, TrayRole::Host) + machine_manufacturing(inv, TrayRole::Accelerator);
}

double machine_transport(const MachineInventory& inv, TrayRole role)
{
    ExactSum total;
    for (const auto& leg : inv.transport) {
        if (leg.role == role) {
            total += leg.kg_co2e();
        }
    }
    return total.value();
}

double machine_transport(const MachineInventory& inv)
{
    ExactSum total;
    for (const auto& leg : inv.transport) {
        total += leg.kg_co2e();
    }
    return total.value();
}

double EmbodiedBreakdown::mt() const
{
    ExactSum sum;
    sum += cpu_mt;
    sum += tpu_mt;
    return sum.value();
}

double EmbodiedBreakdown::total() const
{
    ExactSum sum;
    for (double v : {cpu_mt, tpu_mt, dc_construction, eol, scope1}) {
        sum += v;
    }
    return sum.value();
}

EmbodiedBreakdown per_chip_embodied(const MachineInventory& inv, const telemetry::PlatformSpec& spec)
{
    if (spec.chips_per_machine < 1) {
        throw ComputationError("platform '{}' has no chips", spec.platform_id);
    }
    inv.validate();

    const double chips = spec.chips_per_machine;
    EmbodiedBreakdown result;
    result.cpu_mt = (machine_manufacturing(inv, TrayRole::Host) + machine_transport(inv, TrayRole::Host)) / chips;
    result.tpu_mt = (machine_manufacturing(inv, TrayRole::Accelerator) + machine_transport(inv, TrayRole::Accelerator)) / chips;
    result.dc_construction = inv.dc_construction_kg_per_chip;
    result.scope1 = inv.scope1_allocation_kg_per_chip;
    result.eol = inv.eol_credit_fraction == 0.0 ? 0.0 : -inv.eol_credit_fraction * result.mt();
    return result;
}

double dc_construction_per_chip(double totalDcKg, double amortizationYears, double machineShareOfEnergy, int chips,
                                double machineLifetimeYears)
{
    if (!(amortizationYears > 0.0)) {
        throw ComputationError("amortization years must be > 0");
    }
    if (!(machineShareOfEnergy >= 0.0 && machineShareOfEnergy <= 1.0)) {
        throw ComputationError("energy share must be in [0, 1], got {}", machineShareOfEnergy);
    }
    if (chips < 1) {
        throw ComputationError("chips must be >= 1");
    }
    return totalDcKg * machineShareOfEnergy * (machineLifetimeYears / amortizationYears) / chips;
}

double scope1_per_chip(double annualScope1Kg, double machineShareOfEnergy, int chips, double machineLifetimeYears)
{
    if (!(machineShareOfEnergy >= 0.0 && machineShareOfEnergy <= 1.0)) {
        throw ComputationError("energy share must be in [0, 1], got {}", machineShareOfEnergy);
    }
    if (chips < 1) {
        throw ComputationError("chips must be >= 1");
    }
    return annualScope1Kg * machineShareOfEnergy * machineLifetimeYears / chips;
}

double YearEntry::hardware() const
{
    ExactSum sum;
    sum += cpu_mt;
    sum += tpu_mt;
    return sum.value();
}

double YearEntry::total() const
{
    ExactSum sum;
    for (double v : {cpu_mt, tpu_mt, dc_construction, eol, scope1}) {
        sum += v;
    }
    return sum.value();
}

double InventoryViews::lifetime_total(const std::vector<YearEntry>& series)
{
    ExactSum sum;
    for (const auto& y : series) {
        for (double v : {y.cpu_mt, y.tpu_mt, y.dc_construction, y.eol, y.scope1}) {
            sum += v;
        }
    }
    return sum.value();
}

std::vector<double> spread_evenly(double total, int n)
{
    if (n < 1) {
        throw ComputationError("cannot spread over {} years", n);
    }
    if (n == 1 || total == 0.0) {
        return std::vector<double>(static_cast<std::size_t>(n), n == 1 ? total : 0.0);
    }

    // Truncate the share to leave enough spare mantissa bits that (n - 1)
    // shares are representable; the remainder then follows exactly
    // (Sterbenz), so the parts add up to total with no rounding at all.
    int exponent = 0;
    std::frexp(total / n, &exponent);
    const int spareBits = static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
    const double quantum = std::ldexp(1.0, exponent - std::numeric_limits<double>::digits + spareBits);
    const double share = std::trunc(total / n / quantum) * quantum;

    std::vector<double> parts(static_cast<std::size_t>(n), share);
    parts.back() = total - share * (n - 1);
    return parts;
}

namespace {

int whole_years(double lifetimeYears)
{
    const auto years = static_cast<int>(std::lround(lifetimeYears));
    if (years < 1 || std::fabs(lifetimeYears - years) > 1e-9) {
        throw ComputationError("inventory views need a whole number of lifetime years >= 1, got {}", lifetimeYears);
    }
    return years;
}

}

InventoryViews inventory_views(const EmbodiedBreakdown& embodied, double lifetimeYears, int deploymentYear)
{
    const int years = whole_years(lifetimeYears);

    const auto cpu = spread_evenly(embodied.cpu_mt, years);
    const auto tpu = spread_evenly(embodied.tpu_mt, years);
    const auto dc = spread_evenly(embodied.dc_construction, years);
    const auto eol = spread_evenly(embodied.eol, years);
    const auto scope1 = spread_evenly(embodied.scope1, years);

    InventoryViews views;
    for (int i = 0; i < years; ++i) {
        const auto k = static_cast<std::size_t>(i);
        views.lca_amortized.push_back({deploymentYear + i, cpu[k], tpu[k], dc[k], eol[k], scope1[k]});

        YearEntry corp{deploymentYear + i, 0.0, 0.0, dc[k], 0.0, scope1[k]};
        if (i == 0) {
            corp.cpu_mt = embodied.cpu_mt;
            corp.tpu_mt = embodied.tpu_mt;
        }
        if (i == years - 1) {
            corp.eol = embodied.eol;
        }
        views.corporate.push_back(corp);
    }
    return views;
}

std::vector<FleetYear> fleet_hardware_views(const EmbodiedBreakdown& embodied, const std::map<int, double>& chipsDeployed,
                                            double lifetimeYears)
{
    const int years = whole_years(lifetimeYears);
    std::vector<FleetYear> result;
    if (chipsDeployed.empty()) {
        return result;
    }

    const double hardware = embodied.mt();
    const int first = chipsDeployed.begin()->first;
    const int last = chipsDeployed.rbegin()->first + years - 1;
    for (int year = first; year <= last; ++year) {
        ExactSum lca;
        ExactSum corporate;
        for (auto& [deployed, chips] : chipsDeployed) {
            if (year >= deployed && year < deployed + years) {
                lca += chips * hardware / years;
            }
            if (year == deployed) {
                corporate += chips * hardware;
            }
        }
        result.push_back({year, lca.value(), corporate.value()});
    }
    return result;
}

std::vector<CategoryShare> manufacturing_by_category(const MachineInventory& inv, const telemetry::PlatformSpec& spec)
{
    std::vector<CategoryShare> result;
    for (auto role : {TrayRole::Accelerator, TrayRole::Host}) {
        for (auto& [category, _] : kCategories) {
            ExactSum sum;
            bool present = false;
            for (const auto& c : inv.components) {
                if (c.role == role && c.category == category) {
                    sum += c.kg_co2e;
                    present = true;
                }
            }
            if (!present) {
                continue;
            }
            const double trays = role == TrayRole::Accelerator ? inv.accelerator_trays : 1;
            result.push_back({role, category, sum.value() * trays / spec.chips_per_machine});
        }
    }
    return result;
}

}
