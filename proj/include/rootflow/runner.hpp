#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace rootflow::app {

/// pde, linear, hardy, flow, kz, pairing, render
std::vector<std::string> subcommands();

/// Flat JSON object with every key of the subcommand and its default.
/// Throws Config for an unknown subcommand.
nlohmann::json default_config(std::string_view sub);

/// Defaults overlaid with `cfg`, type-checked and validated, derived fields
/// (seeds, x_max, precision) filled in. Idempotent. Throws Config.
nlohmann::json canonicalize(std::string_view sub, const nlohmann::json& cfg);

struct RunOptions {
  unsigned jobs = 1;
  /// Overwrite an existing summary.json.
  bool force = false;
};

/// Runs a subcommand into `out`: its artifacts, config.json (canonical) and
/// summary.json (resolved config, seeds, version, wall-clock seconds). On a
/// library error error.json is written before the error propagates. Returns
/// the summary.
nlohmann::json run(std::string_view sub, const nlohmann::json& cfg, const std::filesystem::path& out,
                   const RunOptions& options = {});

}  // namespace rootflow::app
