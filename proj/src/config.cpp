#include "aicarbon/config.h"

#include "aicarbon/error.h"

#include <fstream>

namespace aicarbon::config {

using nlohmann::json;
namespace fs = std::filesystem;

const lca::MachineInventory* RunConfig::inventory_for(const telemetry::PlatformSpec& spec) const
{
    const auto& ref = spec.inventory_ref.empty() ? spec.platform_id : spec.inventory_ref;
    auto iter = inventories.find(ref);
    return iter == inventories.end() ? nullptr : &iter->second;
}

json read_json(const fs::path& path)
{
    std::ifstream input(path);
    if (!input) {
        throw ConfigError("cannot open {}", path.string());
    }
    try {
        return json::parse(input);
    } catch (const json::parse_error& e) {
        throw ConfigError("{}: {}", path.string(), e.what());
    }
}

namespace {

/// Section given inline or as a path to another JSON file.
json section(const json& doc, const char* key, const fs::path& baseDir)
{
    const auto& node = doc.at(key);
    if (node.is_string()) {
        return read_json(baseDir / node.get<std::string>());
    }
    return node;
}

std::optional<fs::path> optional_path(const json& doc, const char* key, const fs::path& baseDir)
{
    if (!doc.contains(key) || doc.at(key).is_null()) {
        return std::nullopt;
    }
    return baseDir / doc.at(key).get<std::string>();
}

lca::TransportLeg parse_leg(const json& j)
{
    lca::TransportLeg leg;
    leg.description = j.value("description", std::string());
    leg.mode = lca::parse_transport_mode(j.at("mode").get<std::string>());
    leg.role = lca::parse_tray_role(j.at("role").get<std::string>());
    if (j.contains("kg_co2e")) {
        leg.quantity = lca::DirectEmission{j.at("kg_co2e").get<double>()};
    } else {
        leg.quantity = lca::FreightActivity{j.at("mass_kg").get<double>(), j.at("distance_km").get<double>(),
                                            j.at("factor_g_per_tonne_km").get<double>()};
    }
    return leg;
}

lca::ComponentEntry parse_component(const json& j, const lca::GwpTable& gwp)
{
    lca::ComponentEntry c;
    c.name = j.at("name").get<std::string>();
    c.category = lca::parse_category(j.at("category").get<std::string>());
    c.role = lca::parse_tray_role(j.at("role").get<std::string>());
    if (j.contains("kg_co2e")) {
        c.kg_co2e = j.at("kg_co2e").get<double>();
    } else if (j.contains("gases")) {
        double total = 0.0;
        for (const auto& [gas, mass] : j.at("gases").items()) {
            try {
                total += lca::gwp_convert(gas, mass.get<double>(), gwp);
            } catch (const ComputationError& e) {
                throw ConfigError("component '{}': {}", c.name, e.what());
            }
        }
        c.kg_co2e = total;
    } else {
        throw ConfigError("component '{}' needs kg_co2e or gases", c.name);
    }
    if (j.contains("electricity_share")) {
        c.electricity_share = j.at("electricity_share").get<double>();
    }
    return c;
}

}

telemetry::PlatformCatalog parse_platforms(const json& doc)
{
    telemetry::PlatformCatalog catalog;
    const auto& list = doc.is_array() ? doc : doc.at("platforms");
    for (const auto& j : list) {
        telemetry::PlatformSpec spec;
        spec.platform_id = j.at("platform_id").get<std::string>();
        spec.chips_per_machine = j.at("chips_per_machine").get<int>();
        spec.trays_per_machine = j.at("trays_per_machine").get<int>();
        spec.lifetime_years = j.value("lifetime_years", 6.0);
        spec.peak_flops_per_s = j.value("peak_flops_per_s", 0.0);
        spec.rectifier_overhead = j.value("rectifier_overhead", 0.04);
        spec.readings_include_rectifier = j.value("readings_include_rectifier", true);
        spec.inventory_ref = j.value("inventory_ref", std::string());
        catalog.add(std::move(spec));
    }
    return catalog;
}

lca::GwpTable parse_gwp(const json& doc)
{
    lca::GwpTable table;
    for (const auto& [gas, value] : doc.at("gases").items()) {
        table.set(gas, value.get<double>());
    }
    table.validate();
    return table;
}

std::map<std::string, lca::MachineInventory> parse_inventories(const json& doc, const lca::GwpTable& gwp)
{
    std::map<std::string, lca::MachineInventory> result;
    const auto& list = doc.is_array() ? doc : doc.at("inventories");
    for (const auto& j : list) {
        lca::MachineInventory inv;
        inv.platform_id = j.at("platform_id").get<std::string>();
        inv.accelerator_trays = j.at("accelerator_trays").get<int>();
        for (const auto& c : j.at("components")) {
            inv.components.push_back(parse_component(c, gwp));
        }
        if (j.contains("transport")) {
            for (const auto& t : j.at("transport")) {
                inv.transport.push_back(parse_leg(t));
            }
        }
        inv.dc_construction_kg_per_chip = j.value("dc_construction_kg_per_chip", 0.0);
        inv.scope1_allocation_kg_per_chip = j.value("scope1_allocation_kg_per_chip", 0.0);
        inv.eol_credit_fraction = j.value("eol_credit_fraction", 0.0);
        inv.validate();
        const auto id = inv.platform_id;
        if (!result.emplace(id, std::move(inv)).second) {
            throw ConfigError("duplicate inventory '{}'", id);
        }
    }
    return result;
}

factors::ScenarioSpec parse_scenario(const std::string& name, const json& j)
{
    factors::ScenarioSpec s;
    s.name = name;
    s.target_cfe_fraction = j.at("target_cfe_fraction").get<double>();
    s.operations_factor_g_per_kwh = j.at("operations_factor_g_per_kwh").get<double>();
    s.manufacturing_cfe = j.value("manufacturing_cfe", false);
    s.manufacturing_electricity_share = j.value("manufacturing_electricity_share", 0.0);
    s.manufacturing_baseline_factor = j.value("manufacturing_baseline_factor", 0.0);
    s.manufacturing_target_factor = j.value("manufacturing_target_factor", 0.0);
    s.validate();
    return s;
}

RunConfig parse_config(const json& doc, const fs::path& baseDir)
{
    RunConfig cfg;
    cfg.base_dir = baseDir;
    try {
        cfg.pue = doc.value("pue", kDefaultPue);
        if (!(cfg.pue >= 1.0)) {
            throw ConfigError("pue must be >= 1, got {}", cfg.pue);
        }
        if (doc.contains("platforms")) {
            const auto list = section(doc, "platforms", baseDir);
            cfg.platforms = parse_platforms(list);
            for (const auto& p : list.is_array() ? list : list.at("platforms")) {
                cfg.platform_order.push_back(p.at("platform_id").get<std::string>());
            }
        }
        if (doc.contains("gwp")) {
            cfg.gwp = parse_gwp(section(doc, "gwp", baseDir));
        } else {
            cfg.gwp.set("CO2", 1.0);
        }
        if (doc.contains("inventories")) {
            cfg.inventories = parse_inventories(section(doc, "inventories", baseDir), cfg.gwp);
        }
        cfg.telemetry = optional_path(doc, "telemetry", baseDir);

        if (doc.contains("factors")) {
            const auto f = doc.at("factors");
            const int year = f.value("year", 0);
            const auto label = f.value("label", std::string());
            if (auto series = optional_path(f, "hourly_series", baseDir)) {
                const auto grids = factors::read_hourly_csv(*series);
                cfg.annual = factors::annual_factors(grids, year, label);
                cfg.hourly247_factor = factors::hourly_247_emissions(grids).factor();
            }
            if (f.contains("location_based")) {
                cfg.annual = factors::EmissionFactorSet(year, f.at("location_based").get<double>(), f.at("cfe_impact").get<double>(), label);
            }
            if (f.contains("hourly247")) {
                cfg.hourly247_factor = f.at("hourly247").get<double>();
            }
        }
        if (doc.contains("scenarios")) {
            for (const auto& [name, s] : doc.at("scenarios").items()) {
                cfg.scenarios.emplace(name, parse_scenario(name, s));
            }
        }
        if (doc.contains("workload")) {
            const auto& w = doc.at("workload");
            cfg.workload.manifest = optional_path(w, "manifest", baseDir);
            cfg.workload.intervals = optional_path(w, "intervals", baseDir);
            cfg.workload.factor_g_per_kwh = w.value("factor_g_per_kwh", cfg.workload.factor_g_per_kwh);
            cfg.workload.apply_pue = w.value("apply_pue", cfg.workload.apply_pue);
            cfg.workload.on_duty_threshold = w.value("on_duty_threshold", cfg.workload.on_duty_threshold);
        }
        if (doc.contains("weighting")) {
            const auto& w = doc.at("weighting");
            cfg.weighting.buckets = w.value("buckets", cfg.weighting.buckets);
            cfg.weighting.baseline = w.value("baseline", std::string());
            cfg.weighting.generations = w.value("generations", std::vector<std::string>{});
            cfg.weighting.standard = w.value("standard", cfg.weighting.standard);
        }
    } catch (const json::exception& e) {
        throw ConfigError("config: {}", e.what());
    }

    for (const auto& [id, spec] : cfg.platforms.platforms()) {
        if (!cfg.inventories.empty() && cfg.inventory_for(spec) == nullptr) {
            throw ConfigError("platform '{}' has no inventory", id);
        }
    }
    return cfg;
}

RunConfig load_config(const fs::path& path)
{
    return parse_config(read_json(path), path.parent_path());
}

ResolvedFactor resolve_factor(const RunConfig& config, const std::string& standard)
{
    ResolvedFactor r;
    r.standard = standard;
    if (standard == "location" || standard == "market") {
        if (!config.annual) {
            throw ConfigError("standard '{}' needs annual emission factors in the config", standard);
        }
        r.g_per_kwh = standard == "location" ? config.annual->lb_factor() : config.annual->mb_factor();
        return r;
    }
    if (standard == "hourly247") {
        if (!config.hourly247_factor) {
            throw ConfigError("standard 'hourly247' needs an hourly series or a hourly247 factor");
        }
        r.g_per_kwh = *config.hourly247_factor;
        return r;
    }
    constexpr std::string_view prefix = "scenario:";
    if (standard.starts_with(prefix)) {
        const auto name = standard.substr(prefix.size());
        auto iter = config.scenarios.find(name);
        if (iter == config.scenarios.end()) {
            throw ConfigError("unknown scenario '{}'", name);
        }
        r.g_per_kwh = iter->second.operations_factor_g_per_kwh;
        r.scenario = &iter->second;
        return r;
    }
    throw ConfigError("unknown accounting standard '{}' (expected location, market, hourly247 or scenario:<name>)", standard);
}

}
