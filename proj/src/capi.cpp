#include "rootflow.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <string>

#include "rootflow/errors.hpp"
#include "rootflow/polyroots.hpp"
#include "rootflow/radial_pde.hpp"
#include "rootflow/runner.hpp"
#include "rootflow/svg.hpp"
#include "rootflow/version.hpp"

using namespace rootflow;

struct rf_density {
  pde::RadialDensity v;
};
struct rf_poly {
  poly::BigPoly v;
};
struct rf_roots {
  poly::RootEnsemble v;
};

namespace {

thread_local std::string last_message;
thread_local std::string last_json = "null";

rf_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return RF_E_INVALID_ARGUMENT;
    case ErrorCode::Config: return RF_E_CONFIG;
    case ErrorCode::Io: return RF_E_IO;
    case ErrorCode::StabilityViolation: return RF_E_STABILITY_VIOLATION;
    case ErrorCode::DomainTooSmall: return RF_E_DOMAIN_TOO_SMALL;
    case ErrorCode::NonIntegrable: return RF_E_NON_INTEGRABLE;
    case ErrorCode::BadExponents: return RF_E_BAD_EXPONENTS;
    case ErrorCode::DegreeUnderflow: return RF_E_DEGREE_UNDERFLOW;
    case ErrorCode::NoConvergence: return RF_E_NO_CONVERGENCE;
    case ErrorCode::BadTable: return RF_E_BAD_TABLE;
    case ErrorCode::PoleHit: return RF_E_POLE_HIT;
    case ErrorCode::SumNearZero: return RF_E_SUM_NEAR_ZERO;
    case ErrorCode::OnCircle: return RF_E_ON_CIRCLE;
    case ErrorCode::SchemaMismatch: return RF_E_SCHEMA_MISMATCH;
  }
  return RF_E_INTERNAL;
}

rf_status fail(rf_status s, const std::string& message, nlohmann::json j) {
  last_message = message;
  last_json = j.dump();
  return s;
}

template <class F>
rf_status guard(F&& f) {
  try {
    f();
    last_message.clear();
    last_json = "null";
    return RF_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what(), e.to_json());
  } catch (const nlohmann::json::exception& e) {
    return fail(RF_E_CONFIG, e.what(), {{"error", "ConfigError"}, {"message", e.what()}, {"details", nlohmann::json::object()}});
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(RF_E_IO, e.what(), {{"error", "IoError"}, {"message", e.what()}, {"details", {{"path", e.path1().string()}}}});
  } catch (const std::bad_alloc&) {
    return fail(RF_E_INTERNAL, "out of memory", {{"error", "Internal"}, {"message", "out of memory"}, {"details", nlohmann::json::object()}});
  } catch (const std::exception& e) {
    return fail(RF_E_INTERNAL, e.what(), {{"error", "Internal"}, {"message", e.what()}, {"details", nlohmann::json::object()}});
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

poly::PrecisionPolicy policy_for(long bits, std::size_t n) {
  return bits == 0 ? poly::PrecisionPolicy::for_degree(n) : poly::PrecisionPolicy::with_bits(bits);
}

nlohmann::json parse_config(const char* text) {
  if (!text || !*text) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

extern "C" {

const char* rf_version(void) { return kVersion; }

const char* rf_status_name(rf_status status) {
  switch (status) {
    case RF_OK: return "Ok";
    case RF_E_INVALID_ARGUMENT: return "InvalidArgument";
    case RF_E_CONFIG: return "ConfigError";
    case RF_E_IO: return "IoError";
    case RF_E_STABILITY_VIOLATION: return "StabilityViolation";
    case RF_E_DOMAIN_TOO_SMALL: return "DomainTooSmall";
    case RF_E_NON_INTEGRABLE: return "NonIntegrable";
    case RF_E_BAD_EXPONENTS: return "BadExponents";
    case RF_E_DEGREE_UNDERFLOW: return "DegreeUnderflow";
    case RF_E_NO_CONVERGENCE: return "NoConvergence";
    case RF_E_BAD_TABLE: return "BadTable";
    case RF_E_POLE_HIT: return "PoleHit";
    case RF_E_SUM_NEAR_ZERO: return "SumNearZero";
    case RF_E_ON_CIRCLE: return "OnCircle";
    case RF_E_SCHEMA_MISMATCH: return "SchemaMismatch";
    case RF_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

int rf_status_is_config(rf_status status) { return status == RF_E_CONFIG || status == RF_E_INVALID_ARGUMENT; }

const char* rf_last_error_message(void) { return last_message.c_str(); }
const char* rf_last_error_json(void) { return last_json.c_str(); }
void rf_string_free(char* s) { delete[] s; }

rf_status rf_density_profile(const char* name, double x_max, size_t cells, rf_density** out) {
  return guard([&] {
    need(name, "name");
    need(out, "out");
    *out = new rf_density{pde::initial_profile(name, RadialGrid(x_max, cells))};
  });
}

rf_status rf_density_from_values(double x_max, const double* values, size_t cells, rf_density** out) {
  return guard([&] {
    need(values, "values");
    need(out, "out");
    *out = new rf_density{pde::RadialDensity(RadialGrid(x_max, cells), std::vector<double>(values, values + cells))};
  });
}

rf_status rf_density_evolve(const rf_density* psi, double t_end, double cfl, rf_density** out) {
  return guard([&] {
    need(psi, "psi");
    need(out, "out");
    *out = new rf_density{pde::evolve(psi->v, t_end, cfl).density};
  });
}

rf_status rf_density_indicator_solution(double t, double x_max, size_t cells, rf_density** out) {
  return guard([&] {
    need(out, "out");
    *out = new rf_density{pde::indicator_solution(t, RadialGrid(x_max, cells))};
  });
}

size_t rf_density_cells(const rf_density* psi) { return psi ? psi->v.values.size() : 0; }
double rf_density_time(const rf_density* psi) { return psi ? psi->v.time : 0.0; }
double rf_density_mass(const rf_density* psi) { return psi ? pde::mass(psi->v) : 0.0; }

size_t rf_density_values(const rf_density* psi, double* buffer, size_t cap) {
  if (!psi || !buffer) return 0;
  const size_t n = std::min(cap, psi->v.values.size());
  std::copy_n(psi->v.values.begin(), n, buffer);
  return n;
}

rf_status rf_density_l1(const rf_density* a, const rf_density* b, double* out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = pde::l1_distance(a->v, b->v);
  });
}

void rf_density_free(rf_density* psi) { delete psi; }

rf_status rf_roots_from_arrays(const double* re, const double* im, size_t n, rf_roots** out) {
  return guard([&] {
    need(out, "out");
    if (n > 0) {
      need(re, "re");
      need(im, "im");
    }
    poly::RootEnsemble e;
    for (size_t k = 0; k < n; ++k) {
      if (!std::isfinite(re[k]) || !std::isfinite(im[k])) {
        throw Error(ErrorCode::InvalidArgument, "root coordinates must be finite", {{"index", k}});
      }
      e.roots.emplace_back(re[k], im[k]);
    }
    *out = new rf_roots{std::move(e)};
  });
}

rf_status rf_roots_sample(const char* law, size_t n, uint64_t seed, rf_roots** out) {
  return guard([&] {
    need(law, "law");
    need(out, "out");
    *out = new rf_roots{poly::sample_radial_roots(poly::RadialLaw::named(law), n, seed)};
  });
}

size_t rf_roots_size(const rf_roots* roots) { return roots ? roots->v.roots.size() : 0; }

rf_status rf_roots_get(const rf_roots* roots, size_t i, double* re, double* im) {
  return guard([&] {
    need(roots, "roots");
    need(re, "re");
    need(im, "im");
    if (i >= roots->v.roots.size()) {
      throw Error(ErrorCode::InvalidArgument, "root index out of range", {{"index", i}, {"size", roots->v.roots.size()}});
    }
    *re = roots->v.roots[i].real();
    *im = roots->v.roots[i].imag();
  });
}

void rf_roots_free(rf_roots* roots) { delete roots; }

rf_status rf_poly_from_roots(const rf_roots* roots, long bits, rf_poly** out) {
  return guard([&] {
    need(roots, "roots");
    need(out, "out");
    *out = new rf_poly{poly::poly_from_roots(roots->v, policy_for(bits, roots->v.roots.size()))};
  });
}

rf_status rf_poly_random_taylor(size_t n, uint64_t seed, long bits, rf_poly** out) {
  return guard([&] {
    need(out, "out");
    *out = new rf_poly{poly::random_taylor(n, seed, policy_for(bits, n))};
  });
}

rf_status rf_poly_differentiate(const rf_poly* p, size_t k, rf_poly** out) {
  return guard([&] {
    need(p, "p");
    need(out, "out");
    *out = new rf_poly{poly::differentiate(p->v, k)};
  });
}

size_t rf_poly_degree(const rf_poly* p) { return p ? p->v.degree() : 0; }
long rf_poly_bits(const rf_poly* p) { return p ? static_cast<long>(p->v.bits()) : 0; }

rf_status rf_poly_coeff(const rf_poly* p, size_t k, double* re, double* im) {
  return guard([&] {
    need(p, "p");
    need(re, "re");
    need(im, "im");
    if (k > p->v.degree()) throw Error(ErrorCode::InvalidArgument, "coefficient index out of range", {{"index", k}});
    const auto c = p->v.coeff_double(k);
    *re = c.real();
    *im = c.imag();
  });
}

rf_status rf_poly_find_roots(const rf_poly* p, int max_iters, rf_roots** out) {
  return guard([&] {
    need(p, "p");
    need(out, "out");
    auto policy = poly::PrecisionPolicy::with_bits(p->v.bits());
    if (max_iters != 0) policy.max_iters = max_iters;
    *out = new rf_roots{poly::find_roots(p->v, policy)};
  });
}

void rf_poly_free(rf_poly* p) { delete p; }

rf_status rf_circle_kernel_average(double r, double s, double* out) {
  return guard([&] {
    need(out, "out");
    *out = poly::circle_kernel_average(r, s);
  });
}

rf_status rf_default_config(const char* subcommand, char** json_out) {
  return guard([&] {
    need(subcommand, "subcommand");
    need(json_out, "json_out");
    *json_out = dup(app::default_config(subcommand).dump());
  });
}

rf_status rf_canonicalize_config(const char* subcommand, const char* config_json, char** json_out) {
  return guard([&] {
    need(subcommand, "subcommand");
    need(json_out, "json_out");
    *json_out = dup(app::canonicalize(subcommand, parse_config(config_json)).dump(2) + "\n");
  });
}

rf_status rf_run(const char* subcommand, const char* config_json, const char* out_dir, unsigned jobs, int force,
                 char** summary_out) {
  return guard([&] {
    need(subcommand, "subcommand");
    need(out_dir, "out_dir");
    const auto summary = app::run(subcommand, parse_config(config_json), out_dir, {jobs, force != 0});
    if (summary_out) *summary_out = dup(summary.dump());
  });
}

rf_status rf_render_svg(const char* kind, const char* csv_path, const char* svg_path) {
  return guard([&] {
    need(kind, "kind");
    need(csv_path, "csv_path");
    need(svg_path, "svg_path");
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, std::string("cannot read ") + csv_path);
    const auto text = svg::render(kind, in);
    std::ofstream out(svg_path, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorCode::Io, std::string("cannot write ") + svg_path);
  });
}

}  // extern "C"
