// Command-line front end. Talks to the library only through rootflow.h.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/color.h>
#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "rootflow.h"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

const std::vector<std::pair<std::string, std::string>> kSubcommands{
    {"pde", "evolve a radial density under the nonlocal transport equation"},
    {"linear", "energy derivative of the linearized flow over a random corpus"},
    {"hardy", "Hardy-type inequality corpus (lemma or generalized)"},
    {"flow", "roots of repeatedly differentiated polynomials against the PDE"},
    {"kz", "radial root law of random Taylor polynomials"},
    {"pairing", "match roots of p to roots of p' and report the unpaired one"},
    {"render", "render a CSV artifact as SVG"},
};

bool use_color(FILE* f) { return std::getenv("NO_COLOR") == nullptr && isatty(fileno(f)); }

void report_error(const std::string& what) {
  if (use_color(stderr)) fmt::print(stderr, fg(fmt::color::red), "error: ");
  else fmt::print(stderr, "error: ");
  fmt::print(stderr, "{}\n", what);
}

std::string kebab(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

json take_ownership(char* s) {
  json j = json::parse(s);
  rf_string_free(s);
  return j;
}

json defaults_for(const std::string& sub) {
  char* out = nullptr;
  if (rf_default_config(sub.c_str(), &out) != RF_OK) throw std::runtime_error(rf_last_error_message());
  return take_ownership(out);
}

// Command-line text to JSON: JSON literals as written, bare words as strings,
// comma lists for list-valued keys.
json parse_value(const std::string& text, const json& default_value) {
  std::string t = text;
  if (default_value.is_array() && (t.empty() || t.front() != '[')) t = "[" + t + "]";
  try {
    return json::parse(t);
  } catch (const json::parse_error&) {
    if (default_value.is_array()) throw std::invalid_argument("'" + text + "' is not a list");
    return text;
  }
}

void set_dotted(json& cfg, const std::string& key, json value) {
  json* node = &cfg;
  std::size_t pos = 0;
  for (;;) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw std::invalid_argument("empty key in '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (!node->is_object()) *node = json::object();
    pos = dot + 1;
  }
}

std::string one_line(const std::string& sub, const json& s, const std::string& out) {
  std::string detail;
  auto f = [](const json& v) { return v.is_number() ? fmt::format("{:.4g}", v.get<double>()) : v.dump(); };
  if (sub == "pde") detail = fmt::format("mass {}", f(s["mass"]));
  else if (sub == "linear") detail = fmt::format("{} cases, {} contraction violations", s["cases"].dump(), s["contraction_violations"].dump());
  else if (sub == "hardy") detail = fmt::format("{} cases, min slack/rhs {}", s["cases"].dump(), f(s["min_slack_over_rhs"]));
  else if (sub == "flow") detail = fmt::format("{} slices", s["slices"].size());
  else if (sub == "kz") detail = fmt::format("median ks decreasing: {}", s["median_decreasing"].dump());
  else if (sub == "pairing") detail = fmt::format("median pair distance {}", f(s["median_pair_distance"]));
  else if (sub == "render") detail = s["output"].get<std::string>();
  return fmt::format("{}: {} -> {} ({:.2f} s)", sub, detail, out, s["wall_clock_seconds"].get<double>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rootflow: radial root flows of repeatedly differentiated polynomials"};
  app.set_version_flag("--version", std::string(rf_version()));
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd;
    json defaults;
    std::map<std::string, std::string> values;
    std::string config_path, out_dir;
    std::vector<std::string> sets;
    bool force = false;
    unsigned jobs = 1;
  };
  std::map<std::string, Sub> subs;
  bool verbose = false, quiet = false;

  try {
    for (const auto& [name, help] : kSubcommands) {
      Sub& s = subs[name];
      s.defaults = defaults_for(name);
      s.out_dir = "rootflow-" + name;
      s.cmd = app.add_subcommand(name, help);
      s.cmd->add_option("--config", s.config_path, "JSON config file");
      s.cmd->add_option("--out", s.out_dir, "output directory")->capture_default_str();
      s.cmd->add_option("--set", s.sets, "override KEY=VALUE (repeatable)");
      s.cmd->add_flag("--force", s.force, "overwrite an existing summary.json");
      s.cmd->add_option("--jobs", s.jobs, "worker threads, 0 = all")->capture_default_str();
      s.cmd->add_flag("-v,--verbose", verbose, "print the resolved config");
      s.cmd->add_flag("-q,--quiet", quiet, "no summary line");
      for (const auto& [key, value] : s.defaults.items()) {
        s.cmd->add_option("--" + kebab(key), s.values[key], "default " + value.dump());
      }
    }
  } catch (const std::exception& e) {
    report_error(e.what());
    return kExitNumeric;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Sub& s = subs.at(name);

  json cfg = json::object();
  try {
    if (const char* env = std::getenv("ROOTFLOW_SEED"); env && s.defaults.contains("seed")) {
      std::size_t used = 0;
      const unsigned long long seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("ROOTFLOW_SEED must be an integer");
      cfg["seed"] = seed;
    }
    if (!s.config_path.empty()) {
      std::ifstream in(s.config_path);
      if (!in) throw std::invalid_argument("cannot read config " + s.config_path);
      json file;
      try {
        file = json::parse(in);
      } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + s.config_path + " is not valid JSON: " + e.what());
      }
      if (!file.is_object()) throw std::invalid_argument("config " + s.config_path + " must hold a JSON object");
      for (const auto& [key, value] : file.items()) cfg[key] = value;
    }
    for (const auto& kv : s.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects KEY=VALUE, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      set_dotted(cfg, key, parse_value(kv.substr(eq + 1), s.defaults.value(key, json())));
    }
    for (const auto& [key, text] : s.values) {
      if (s.cmd->count("--" + kebab(key)) > 0) cfg[key] = parse_value(text, s.defaults.at(key));
    }
  } catch (const std::exception& e) {
    report_error(e.what());
    return kExitConfig;
  }

  if (verbose) {
    char* canonical = nullptr;
    if (rf_canonicalize_config(name.c_str(), cfg.dump().c_str(), &canonical) == RF_OK) {
      fmt::print(stderr, "{}", canonical);
      rf_string_free(canonical);
    }
  }

  char* summary = nullptr;
  const rf_status st = rf_run(name.c_str(), cfg.dump().c_str(), s.out_dir.c_str(), s.jobs, s.force ? 1 : 0, &summary);
  if (st != RF_OK) {
    report_error(fmt::format("{}: {}", rf_status_name(st), rf_last_error_message()));
    return rf_status_is_config(st) ? kExitConfig : kExitNumeric;
  }
  const json result = take_ownership(summary);
  if (!quiet) {
    if (use_color(stdout)) fmt::print(fg(fmt::color::green), "ok ");
    else fmt::print("ok ");
    fmt::print("{}\n", one_line(name, result, s.out_dir));
  }
  return 0;
}
