#include "rootflow/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "rootflow/empirics.hpp"
#include "rootflow/errors.hpp"
#include "rootflow/linear_stability.hpp"
#include "rootflow/parallel.hpp"
#include "rootflow/radial_pde.hpp"
#include "rootflow/svg.hpp"
#include "rootflow/version.hpp"

namespace rootflow::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Kind { UInt, Float, String, FloatList, UIntList, Pairs };

struct Field {
  const char* key;
  Kind kind;
  json value;
};

const std::vector<Field>& schema(std::string_view sub) {
  static const std::vector<Field> pde{{"init", Kind::String, "indicator"}, {"t", Kind::Float, 0.5},
                                      {"x_max", Kind::Float, 1.2},         {"cells", Kind::UInt, 2000},
                                      {"cfl", Kind::Float, 0.5},           {"eps_vac", Kind::Float, pde::kDefaultVacuum},
                                      {"scheme", Kind::String, "minmod"}};
  static const std::vector<Field> linear{{"cases", Kind::UInt, 1000},
                                         {"seed", Kind::UInt, 23},
                                         {"x_max", Kind::Float, 2.0},
                                         {"cells", Kind::UInt, 4096}};
  static const std::vector<Field> hardy{{"family", Kind::String, "lemma"}, {"cases", Kind::UInt, 1000},
                                        {"seed", Kind::UInt, 7},           {"p", Kind::Float, 2.0},
                                        {"r", Kind::Float, 3.0},           {"x_max", Kind::Float, 2.0},
                                        {"cells", Kind::UInt, 4096}};
  static const std::vector<Field> flow{{"n", Kind::UInt, 256},
                                       {"t_grid", Kind::FloatList, json::array({0.0, 0.25, 0.5})},
                                       {"dist", Kind::String, "taylor"},
                                       {"table", Kind::Pairs, json::array()},
                                       {"seed", Kind::UInt, 1},
                                       {"trials", Kind::UInt, 10},
                                       {"seeds", Kind::UIntList, json::array()},
                                       {"bins", Kind::UInt, 60},
                                       {"x_max", Kind::Float, 0.0},
                                       {"cells", Kind::UInt, 600},
                                       {"cfl", Kind::Float, 0.5},
                                       {"scheme", Kind::String, "minmod"},
                                       {"bits", Kind::UInt, 0},
                                       {"residual_log2", Kind::Float, 0.0},
                                       {"max_iters", Kind::UInt, 400}};
  static const std::vector<Field> kz{{"ns", Kind::UIntList, json::array({64, 128, 256})},
                                     {"seed", Kind::UInt, 1},
                                     {"trials", Kind::UInt, 10},
                                     {"bits", Kind::UInt, 0}};
  static const std::vector<Field> pairing{{"n", Kind::UInt, 128},        {"dist", Kind::String, "taylor_limit"},
                                          {"seed", Kind::UInt, 1},       {"trials", Kind::UInt, 10},
                                          {"seeds", Kind::UIntList, json::array()}, {"bits", Kind::UInt, 0}};
  static const std::vector<Field> render{{"input", Kind::String, ""},
                                         {"kind", Kind::String, "density"},
                                         {"output", Kind::String, ""}};
  if (sub == "pde") return pde;
  if (sub == "linear") return linear;
  if (sub == "hardy") return hardy;
  if (sub == "flow") return flow;
  if (sub == "kz") return kz;
  if (sub == "pairing") return pairing;
  if (sub == "render") return render;
  throw Error(ErrorCode::Config, "unknown subcommand '" + std::string(sub) + "'");
}

Error config_error(const std::string& what, json details = json::object()) {
  return Error(ErrorCode::Config, what, std::move(details));
}

bool is_uint(const json& v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0); }

json coerce(const Field& f, const json& v) {
  auto bad = [&](const char* want) {
    return config_error(fmt::format("config key '{}' must be {}", f.key, want), {{"key", f.key}, {"value", v}});
  };
  switch (f.kind) {
    case Kind::UInt:
      if (!is_uint(v)) throw bad("a nonnegative integer");
      return v.get<std::uint64_t>();
    case Kind::Float:
      if (!v.is_number()) throw bad("a number");
      return v.get<double>();
    case Kind::String:
      if (!v.is_string()) throw bad("a string");
      return v;
    case Kind::FloatList: {
      if (!v.is_array()) throw bad("a list of numbers");
      json out = json::array();
      for (const auto& e : v) {
        if (!e.is_number()) throw bad("a list of numbers");
        out.push_back(e.get<double>());
      }
      return out;
    }
    case Kind::UIntList: {
      if (!v.is_array()) throw bad("a list of nonnegative integers");
      json out = json::array();
      for (const auto& e : v) {
        if (!is_uint(e)) throw bad("a list of nonnegative integers");
        out.push_back(e.get<std::uint64_t>());
      }
      return out;
    }
    case Kind::Pairs: {
      if (!v.is_array()) throw bad("a list of [radius, cdf] pairs");
      json out = json::array();
      for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
          throw bad("a list of [radius, cdf] pairs");
        }
        out.push_back({e[0].get<double>(), e[1].get<double>()});
      }
      return out;
    }
  }
  return v;
}

std::vector<std::uint64_t> resolve_seeds(json& c) {
  auto seeds = c["seeds"].get<std::vector<std::uint64_t>>();
  if (seeds.empty()) {
    const auto base = c["seed"].get<std::uint64_t>();
    const auto trials = c["trials"].get<std::uint64_t>();
    if (trials == 0) throw config_error("trials must be positive");
    for (std::uint64_t k = 0; k < trials; ++k) seeds.push_back(base + k);
  }
  c["seeds"] = seeds;
  c["trials"] = seeds.size();
  return seeds;
}

emp::ExperimentConfig experiment(const json& c) {
  json e = c;
  e.erase("seed");
  e.erase("trials");
  return emp::ExperimentConfig::from_json(e);
}

void require(bool ok, const std::string& what, json details = json::object()) {
  if (!ok) throw config_error(what, std::move(details));
}

// Subcommand-specific checks; fills derived fields.
void validate(std::string_view sub, json& c) {
  if (sub == "pde") {
    const auto names = pde::profile_names();
    require(std::find(names.begin(), names.end(), c["init"].get<std::string>()) != names.end(),
            "unknown init profile", {{"init", c["init"]}});
    const double t = c["t"];
    require(t >= 0.0 && t < 1.0, "t must lie in [0, 1)", {{"t", t}});
    require(c["x_max"].get<double>() > 0.0, "x_max must be positive");
    require(c["cells"].get<std::uint64_t>() >= 3, "cells must be at least 3");
    require(c["cfl"].get<double>() > 0.0 && c["cfl"].get<double>() <= pde::kMaxCfl, "cfl must lie in (0, 0.9]");
    require(c["eps_vac"].get<double>() > 0.0, "eps_vac must be positive");
    pde::scheme_from_name(c["scheme"].get<std::string>());
  } else if (sub == "linear" || sub == "hardy") {
    require(c["cases"].get<std::uint64_t>() >= 1, "cases must be positive");
    require(c["x_max"].get<double>() > 0.0, "x_max must be positive");
    require(c["cells"].get<std::uint64_t>() >= 3, "cells must be at least 3");
    if (sub == "hardy") {
      const auto family = c["family"].get<std::string>();
      require(family == "lemma" || family == "generalized", "family must be lemma or generalized");
      require(c["p"].get<double>() > 1.0 && c["r"].get<double>() > 1.0, "p and r must exceed 1");
    }
  } else if (sub == "flow") {
    resolve_seeds(c);
    const auto e = experiment(c).resolved();
    c["x_max"] = e.x_max;
    c["bits"] = e.policy.bits;
    c["residual_log2"] = e.policy.residual_log2;
  } else if (sub == "kz") {
    require(!c["ns"].empty(), "ns must not be empty");
    for (const auto& n : c["ns"]) require(n.get<std::uint64_t>() >= 16, "every n must be at least 16");
    require(c["trials"].get<std::uint64_t>() >= 1, "trials must be positive");
    const auto bits = c["bits"].get<std::uint64_t>();
    require(bits == 0 || bits >= 64, "bits must be 0 (4n) or at least 64");
  } else if (sub == "pairing") {
    resolve_seeds(c);
    require(c["n"].get<std::uint64_t>() >= 8, "pairing needs n >= 8");
    poly::RadialLaw::named(c["dist"].get<std::string>());
    if (c["bits"].get<std::uint64_t>() == 0) c["bits"] = poly::PrecisionPolicy::for_degree(c["n"]).bits;
    require(c["bits"].get<std::uint64_t>() >= 64, "bits must be at least 64");
  } else if (sub == "render") {
    require(!c["input"].get<std::string>().empty(), "render needs an input artifact");
    const auto kinds = svg::kinds();
    require(std::find(kinds.begin(), kinds.end(), c["kind"].get<std::string>()) != kinds.end(),
            "unknown render kind", {{"kind", c["kind"]}});
  }
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

json run_pde(const json& c, const fs::path& out) {
  const RadialGrid grid(c["x_max"].get<double>(), c["cells"].get<std::size_t>());
  const auto init = c["init"].get<std::string>();
  const auto psi0 = pde::initial_profile(init, grid);
  const double t = c["t"];
  const double eps = c["eps_vac"];
  const auto evo = pde::evolve(psi0, t, c["cfl"].get<double>(), eps, pde::scheme_from_name(c["scheme"].get<std::string>()));

  std::string density = "x,psi\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    density += fmt::format("{},{}\n", num(grid.center(i)), num(evo.density.values[i]));
  }
  write_text(out / "density.csv", density);
  std::string series = "t,mass,origin_flux\n";
  for (const auto& s : evo.series) series += fmt::format("{},{},{}\n", num(s.t), num(s.mass), num(s.origin_flux));
  write_text(out / "series.csv", series);

  json s = {{"t", t},
            {"mass_initial", pde::mass(psi0)},
            {"mass", pde::mass(evo.density)},
            {"steps", evo.series.size() - 1},
            {"artifacts", {"density.csv", "series.csv"}}};
  if (init == "indicator") s["l1_to_exact"] = pde::l1_distance(evo.density, pde::indicator_solution(t, grid));
  return s;
}

json run_linear(const json& c, const fs::path& out, unsigned jobs) {
  const RadialGrid grid(c["x_max"].get<double>(), c["cells"].get<std::size_t>());
  const auto rows = linear::energy_corpus(c["cases"], c["seed"], grid, jobs);
  std::string csv = "case_id,seed,direct,decomposed,norm2\n";
  double worst_direct = -INFINITY, worst_gap = 0.0;
  std::size_t contraction = 0, decomposition = 0;
  json seeds = json::array();
  for (const auto& r : rows) {
    csv += fmt::format("{},{},{},{},{}\n", r.case_id, r.seed, num(r.direct), num(r.decomposed), num(r.norm2));
    worst_direct = std::max(worst_direct, r.direct / r.norm2);
    const double gap = std::fabs(r.direct - r.decomposed) / r.norm2;
    worst_gap = std::max(worst_gap, gap);
    contraction += r.direct > 1e-6 * r.norm2;
    decomposition += gap > 1e-3;
    seeds.push_back(r.seed);
  }
  write_text(out / "energy.csv", csv);
  return {{"cases", rows.size()},
          {"max_direct_over_norm2", worst_direct},
          {"max_gap_over_norm2", worst_gap},
          {"contraction_violations", contraction},
          {"decomposition_violations", decomposition},
          {"seeds", seeds},
          {"artifacts", {"energy.csv"}}};
}

json run_hardy(const json& c, const fs::path& out, unsigned jobs) {
  const RadialGrid grid(c["x_max"].get<double>(), c["cells"].get<std::size_t>());
  const auto rows = linear::hardy_corpus(c["family"], c["cases"], c["seed"], grid, c["p"], c["r"], jobs);
  std::string csv = "case_id,seed,lhs,rhs,slack\n";
  double min_slack = INFINITY, min_ratio = INFINITY;
  std::size_t violations = 0;
  json seeds = json::array();
  for (const auto& r : rows) {
    csv += fmt::format("{},{},{},{},{}\n", r.case_id, r.seed, num(r.lhs), num(r.rhs), num(r.slack));
    min_slack = std::min(min_slack, r.slack);
    if (r.rhs > 0.0) min_ratio = std::min(min_ratio, r.slack / r.rhs);
    violations += r.slack < -1e-8 * r.rhs;
    seeds.push_back(r.seed);
  }
  write_text(out / "hardy.csv", csv);
  return {{"cases", rows.size()},
          {"min_slack", min_slack},
          {"min_slack_over_rhs", min_ratio},
          {"violations", violations},
          {"seeds", seeds},
          {"artifacts", {"hardy.csv"}}};
}

json run_flow(const json& c, const fs::path& out, unsigned jobs) {
  auto s = emp::write_flow_report(emp::run_flow_experiment(experiment(c), jobs), out);
  s.erase("config");
  s.erase("version");
  s.erase("subcommand");
  s["artifacts"] = {"metrics.csv", "hist_t<k>.csv", "trial_<seed>/roots_t<k>.csv", "trial_<seed>/hist_t<k>.csv"};
  return s;
}

json run_kz(const json& c, const fs::path& out, unsigned jobs) {
  const auto ns = c["ns"].get<std::vector<std::size_t>>();
  const auto base = c["seed"].get<std::uint64_t>();
  const auto trials = c["trials"].get<std::size_t>();
  const auto bits = c["bits"].get<long>();
  std::vector<double> ks(ns.size() * trials);
  parallel_for(ks.size(), jobs, [&](std::size_t idx) {
    const std::size_t n = ns[idx / trials];
    poly::PrecisionPolicy policy{0, 0.0, 400};
    if (bits > 0) policy = poly::PrecisionPolicy::with_bits(bits);
    ks[idx] = emp::kz_check(n, base + idx % trials, policy);
  });
  std::string csv = "n,seed,ks\n";
  json medians = json::array();
  bool decreasing = true;
  double previous = INFINITY;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::vector<double> row(ks.begin() + static_cast<std::ptrdiff_t>(i * trials),
                            ks.begin() + static_cast<std::ptrdiff_t>((i + 1) * trials));
    for (std::size_t k = 0; k < trials; ++k) csv += fmt::format("{},{},{}\n", ns[i], base + k, num(row[k]));
    const double m = median(row);
    medians.push_back({{"n", ns[i]}, {"median_ks", m}});
    decreasing = decreasing && m < previous;
    previous = m;
  }
  write_text(out / "kz.csv", csv);
  json seeds = json::array();
  for (std::size_t k = 0; k < trials; ++k) seeds.push_back(base + k);
  return {{"medians", medians}, {"median_decreasing", decreasing}, {"seeds", seeds}, {"artifacts", {"kz.csv"}}};
}

json run_pairing(const json& c, const fs::path& out, unsigned jobs) {
  const auto seeds = c["seeds"].get<std::vector<std::uint64_t>>();
  const auto n = c["n"].get<std::size_t>();
  const auto law = poly::RadialLaw::named(c["dist"].get<std::string>());
  const auto policy = poly::PrecisionPolicy::with_bits(c["bits"].get<long>());
  std::vector<emp::PairingReport> reports(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t i) {
    reports[i] = emp::pairing_check(poly::sample_radial_roots(law, n, seeds[i]), policy);
  });
  std::string pairs = "seed,root,critical,distance,shift_error\n";
  std::string unpaired = "seed,root,re,im,modulus\n";
  std::vector<double> um, rm, pd;
  bool one_unpaired = true;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& r = reports[i];
    for (const auto& p : r.pairs) {
      pairs += fmt::format("{},{},{},{},{}\n", seeds[i], p.root, p.critical, num(p.distance),
                           p.shift_error ? num(*p.shift_error) : std::string("nan"));
    }
    const auto z = r.roots[r.unpaired];
    unpaired += fmt::format("{},{},{},{},{}\n", seeds[i], r.unpaired, num(z.real()), num(z.imag()),
                            num(r.unpaired_modulus));
    one_unpaired = one_unpaired && r.pairs.size() + 1 == n;
    um.push_back(r.unpaired_modulus);
    rm.push_back(r.median_root_modulus);
    pd.push_back(r.median_pair_distance);
  }
  write_text(out / "pairs.csv", pairs);
  write_text(out / "unpaired.csv", unpaired);
  return {{"matching", n <= 256 ? "hungarian" : "greedy"},
          {"exactly_one_unpaired", one_unpaired},
          {"median_unpaired_modulus", median(um)},
          {"median_root_modulus", median(rm)},
          {"median_pair_distance", median(pd)},
          {"seeds", seeds},
          {"artifacts", {"pairs.csv", "unpaired.csv"}}};
}

json run_render(const json& c, const fs::path& out) {
  const fs::path input = c["input"].get<std::string>();
  std::ifstream in(input, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + input.string(), {{"path", input.string()}});
  const auto text = svg::render(c["kind"].get<std::string>(), in);
  fs::path target = c["output"].get<std::string>();
  if (target.empty()) target = out / (input.stem().string() + ".svg");
  write_text(target, text);
  return {{"kind", c["kind"]}, {"input", input.string()}, {"output", target.string()}, {"bytes", text.size()}};
}

}  // namespace

std::vector<std::string> subcommands() { return {"pde", "linear", "hardy", "flow", "kz", "pairing", "render"}; }

nlohmann::json default_config(std::string_view sub) {
  json c = json::object();
  for (const auto& f : schema(sub)) c[f.key] = f.value;
  return c;
}

nlohmann::json canonicalize(std::string_view sub, const nlohmann::json& cfg) {
  if (!cfg.is_object()) throw config_error("config must be a JSON object");
  const auto& fields = schema(sub);
  json c = default_config(sub);
  for (const auto& [key, value] : cfg.items()) {
    const auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return key == f.key; });
    if (it == fields.end()) throw config_error("unknown config key '" + key + "' for " + std::string(sub), {{"key", key}});
    c[key] = coerce(*it, value);
  }
  try {
    validate(sub, c);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    throw Error(ErrorCode::Config, e.what(), e.details());
  }
  return c;
}

nlohmann::json run(std::string_view sub, const nlohmann::json& cfg, const std::filesystem::path& out,
                   const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (fs::exists(out / "summary.json") && !options.force) {
    throw config_error("refusing to overwrite " + (out / "summary.json").string() + " (use --force)",
                       {{"path", (out / "summary.json").string()}});
  }
  try {
    const json c = canonicalize(sub, cfg);
    fs::create_directories(out);
    json s;
    if (sub == "pde") s = run_pde(c, out);
    else if (sub == "linear") s = run_linear(c, out, options.jobs);
    else if (sub == "hardy") s = run_hardy(c, out, options.jobs);
    else if (sub == "flow") s = run_flow(c, out, options.jobs);
    else if (sub == "kz") s = run_kz(c, out, options.jobs);
    else if (sub == "pairing") s = run_pairing(c, out, options.jobs);
    else s = run_render(c, out);
    write_text(out / "config.json", c.dump(2) + "\n");
    s["subcommand"] = sub;
    s["version"] = kVersion;
    s["config"] = c;
    if (!s.contains("seeds")) s["seeds"] = json::array();
    s["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text(out / "summary.json", s.dump(2) + "\n");
    fs::remove(out / "error.json");
    return s;
  } catch (const Error& e) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!ec) {
      json j = e.to_json();
      j["subcommand"] = sub;
      std::ofstream(out / "error.json", std::ios::binary) << j.dump(2) << "\n";
    }
    throw;
  }
}

}  // namespace rootflow::app
