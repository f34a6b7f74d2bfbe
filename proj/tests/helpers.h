#pragma once

#include "aicarbon/telemetry.h"
#include "aicarbon/timeutil.h"

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

namespace testing {

inline std::filesystem::path data_path(const std::string& name)
{
    return std::filesystem::path(AICARBON_DATA_DIR) / name;
}

inline bool within_rel(double actual, double expected, double tolerance)
{
    if (expected == 0.0) {
        return std::abs(actual) <= tolerance;
    }
    return std::abs(actual - expected) / std::abs(expected) <= tolerance;
}

inline aicarbon::EpochSeconds at(const char* text)
{
    return *aicarbon::parse_rfc3339(text);
}

inline aicarbon::telemetry::PlatformSpec platform(const std::string& id, int chips, int trays)
{
    aicarbon::telemetry::PlatformSpec spec;
    spec.platform_id = id;
    spec.chips_per_machine = chips;
    spec.trays_per_machine = trays;
    spec.inventory_ref = id;
    return spec;
}

inline aicarbon::telemetry::TelemetrySample sample(const std::string& machine, const std::string& platformId, aicarbon::EpochSeconds t,
                                                   std::vector<double> trays, double duty, double flops)
{
    aicarbon::telemetry::TelemetrySample s;
    s.machine_id = machine;
    s.platform_id = platformId;
    s.interval_start = t;
    s.tray_power_w = std::move(trays);
    s.duty_cycle = duty;
    s.flops = flops;
    return s;
}

}
