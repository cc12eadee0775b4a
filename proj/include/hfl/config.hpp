#pragma once

#include <string>
#include <vector>

#include "hfl/simulation.hpp"

namespace hfl {

/// Parses JSON text holding one SweepConfig object or an array of them.
/// Keys mirror the SweepConfig and PopulationModel field names; unknown keys,
/// missing required keys and wrong types throw Error(Config).
std::vector<SweepConfig> parse_sweep_configs(const std::string& json_text);

/// Reads and parses a config file. Unreadable files throw Error(Io).
std::vector<SweepConfig> load_sweep_configs(const std::string& path);

}  // namespace hfl
