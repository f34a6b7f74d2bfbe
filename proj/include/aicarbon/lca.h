#pragma once

#include "aicarbon/telemetry.h"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aicarbon::lca {

enum class Category
{
    TpuAsic,
    Hbm,
    Cpu,
    Dram,
    Ssd,
    Pcba,
    Thermal,
    Mechanical,
    Nic,
    Misc,
};

enum class TrayRole
{
    Accelerator,
    Host,
};

enum class TransportMode
{
    Air,
    Ocean,
    Ground,
};

std::string_view to_string(Category c) noexcept;
std::string_view to_string(TrayRole r) noexcept;
std::string_view to_string(TransportMode m) noexcept;
Category parse_category(std::string_view text);
TrayRole parse_tray_role(std::string_view text);
TransportMode parse_transport_mode(std::string_view text);

/// Cradle-to-gate emissions of one component on one tray instance.
struct ComponentEntry
{
    std::string name;
    Category category = Category::Misc;
    TrayRole role = TrayRole::Host;
    double kg_co2e = 0.0;
    std::optional<double> electricity_share;
};

struct DirectEmission
{
    double kg_co2e = 0.0;
};

/// Freight activity: tray plus packaging mass moved over a distance.
struct FreightActivity
{
    double mass_kg = 0.0;
    double distance_km = 0.0;
    double factor_g_per_tonne_km = 0.0;
};

/// One shipping segment, quantified for the whole machine.
struct TransportLeg
{
    std::string description;
    TransportMode mode = TransportMode::Ground;
    TrayRole role = TrayRole::Accelerator;
    std::variant<DirectEmission, FreightActivity> quantity;

    double kg_co2e() const noexcept;
};

inline constexpr double kMaxEolCreditFraction = 0.04;

struct MachineInventory
{
    std::string platform_id;
    int accelerator_trays = 1;
    std::vector<ComponentEntry> components;
    std::vector<TransportLeg> transport;
    double dc_construction_kg_per_chip = 0.0;
    double scope1_allocation_kg_per_chip = 0.0;
    double eol_credit_fraction = 0.0;

    void validate() const;
};

/// Mass-based GWP100 multipliers (CO2e per unit mass of gas).
class GwpTable
{
public:
    void set(std::string gas, double multiplier);
    double multiplier(const std::string& gas) const;
    const std::map<std::string, double>& entries() const noexcept { return _entries; }

    /// Throws ConfigError unless CO2 is exactly 1 and every multiplier is > 0.
    void validate() const;

private:
    std::map<std::string, double> _entries;
};

/// kgCO2e for a mass of gas. Unknown gases throw, listing the known ones.
double gwp_convert(const std::string& gas, double massKg, const GwpTable& table);

/// Host tray once plus every accelerator tray, kgCO2e per machine.
double machine_manufacturing(const MachineInventory& inv);
double machine_manufacturing(const MachineInventory& inv, TrayRole role);

/// kgCO2e per machine. Freight legs use mass x distance x g/t-km / 1e6.
double machine_transport(const MachineInventory& inv);
double machine_transport(const MachineInventory& inv, TrayRole role);

/// Per-chip embodied emissions by life-cycle stage, kgCO2e.
struct EmbodiedBreakdown
{
    double cpu_mt = 0.0; // host tray manufacturing + transport
    double tpu_mt = 0.0; // accelerator trays manufacturing + transport
    double dc_construction = 0.0;
    double eol = 0.0; // credit, <= 0
    double scope1 = 0.0;

    /// Manufacturing + transport only.
    double mt() const;
    double total() const;
};

EmbodiedBreakdown per_chip_embodied(const MachineInventory& inv, const telemetry::PlatformSpec& spec);

/// Share of a facility's construction footprint allocated to one chip:
/// total x machine energy share x (lifetime / amortization years) / chips.
double dc_construction_per_chip(double totalDcKg, double amortizationYears, double machineShareOfEnergy, int chips,
                                double machineLifetimeYears = 6.0);

/// Scope-1 allocation by the same energy-share rule: annual site emissions x
/// share x lifetime / chips.
double scope1_per_chip(double annualScope1Kg, double machineShareOfEnergy, int chips, double machineLifetimeYears = 6.0);

struct YearEntry
{
    int year = 0;
    double cpu_mt = 0.0;
    double tpu_mt = 0.0;
    double dc_construction = 0.0;
    double eol = 0.0;
    double scope1 = 0.0;

    double hardware() const;
    double total() const;
};

struct InventoryViews
{
    /// Life-cycle view: everything spread evenly over the machine lifetime.
    std::vector<YearEntry> lca_amortized;
    /// Corporate-inventory view: hardware booked in the deployment year,
    /// end-of-life in the final year, recurring terms unchanged.
    std::vector<YearEntry> corporate;

    static double lifetime_total(const std::vector<YearEntry>& series);
};

/// Splits total into n parts whose exact sum is total.
std::vector<double> spread_evenly(double total, int n);

InventoryViews inventory_views(const EmbodiedBreakdown& embodied, double lifetimeYears, int deploymentYear);

struct FleetYear
{
    int year = 0;
    double lca_hardware_kg = 0.0;
    double corporate_hardware_kg = 0.0;
};

/// Calendar-year hardware emissions of a fleet given chips deployed per year.
std::vector<FleetYear> fleet_hardware_views(const EmbodiedBreakdown& embodied, const std::map<int, double>& chipsDeployed,
                                            double lifetimeYears);

struct CategoryShare
{
    TrayRole role = TrayRole::Host;
    Category category = Category::Misc;
    double kg_per_chip = 0.0;
};

/// Manufacturing only, transport excluded, per chip.
std::vector<CategoryShare> manufacturing_by_category(const MachineInventory& inv, const telemetry::PlatformSpec& spec);

}
