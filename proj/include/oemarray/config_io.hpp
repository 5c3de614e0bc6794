#pragma once

// JSON representation of ArrayConfig.
//
//   {
//     "schema_version": "1.0",
//     "kappa_ref": 1.0,
//     "n_sites": 10,
//     "profile": {"kind": "tanh", "g_bar1": 0.08, "g_bar2": 0.08, "beta": 4.5},
//     "kappa1": 1.0,                        // or {"start": 1.0, "end": 1.5}
//     "kappa2": 1.0,
//     "gamma": 0.0,
//     "n_bar": 0.0,
//     "omega_m": 10.0,                      // optional
//     "loss": {"kappa_l_ratio": 0, "kappa_int": 0, "epsilon": 0, "phase": 0, "delay": 0}
//   }
//
// "profile.kind" is one of "linear", "tanh", "explicit"; explicit profiles
// carry "values": [[g1, g2], ...]. Missing optional fields take the
// ArrayConfig defaults.

#include <string>
#include <string_view>

#include <json.hpp>

#include "oemarray/core.hpp"

namespace oem {

inline constexpr std::string_view kSchemaVersion = "1.0";

// Throws ConfigError; parse failures report line and column.
nlohmann::json parse_json_text(std::string_view text);
nlohmann::json load_json_file(const std::string& path);

ArrayConfig parse_config(std::string_view text);
ArrayConfig load_config(const std::string& path);

ArrayConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ArrayConfig& config);

}  // namespace oem
