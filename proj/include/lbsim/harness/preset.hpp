// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lbsim/harness/scenario.hpp"

namespace lbsim {

// One grid point: a label and the scenario JSON it resolves from.
struct PresetPoint {
    std::string label;
    nlohmann::json config;
};

struct Preset {
    std::string name;
    std::string description;
    std::vector<PresetPoint> points;
};

const std::vector<std::string>& preset_names();
bool is_preset(std::string_view name);
// Throws ConfigError for an unknown name.
Preset make_preset(std::string_view name);

// Sweep axis: a scalar key path and the values it takes.
struct SweepAxis {
    std::string path;
    std::vector<nlohmann::json> values;
};

// Parses "path=v1,v2,..."; values are JSON literals, bare words are strings.
SweepAxis parse_axis(std::string_view spec);

// Cross product of the axes over `base`. Throws ConfigError for a non-scalar
// path or an empty value list.
Preset make_sweep(const nlohmann::json& base, const std::vector<SweepAxis>& axes, std::string name = "sweep");

// Parses each point, applying a seed override when given. Every point of
// one preset shares the same seed list so comparisons are paired.
std::vector<std::pair<std::string, Scenario>>
resolve_points(const Preset& p, const std::optional<std::vector<std::uint64_t>>& seeds = std::nullopt);

} // namespace lbsim
