#pragma once

#include <string>
#include <vector>

#include "hjlab/integrator/integrator.hpp"

namespace hjlab::integrator {

/// Simulation input, read from JSON:
///   {"N": 16, "h": 0.5, "kappa": 1, "e": 0.5, "m": 1,
///    "packet": {"center": [2, 2], "width": 0.75, "momentum": [0.785, 0],
///               "amplitude": 0.5, "pair": true, "separation": [4, 0]},
///    "a0_mode": "zero" | "expr <text>",
///    "run": {"dt": 0.002, "steps": 1000, "monitor_every": 10},
///    "dt_list": [0.004, 0.002, 0.001]}
/// Every key is optional; missing ones keep the defaults below.
struct SimulationConfig {
  cs::LatticeConfig lattice;
  cs::PacketSpec packet;
  std::string a0_mode = "zero";
  RunConfig run;
  std::vector<double> dt_list{0.004, 0.002, 0.001};
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

SimulationConfig parse_config(const std::string& json_text);
SimulationConfig load_config(const std::string& path);
std::string to_json(const SimulationConfig& cfg);

/// "zero" or "expr <text>", where <text> is an expression in x, y, t
/// (physical coordinates and time). Throws ConfigError.
A0Provider make_a0(const cs::LatticeConfig& lattice, const std::string& mode);

}  // namespace hjlab::integrator
