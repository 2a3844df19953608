#pragma once

// Run configuration: a flat "key = value" text format.
//
//   # Fig. 1 style run
//   kernel      = 2@2          # terms coeff@exponent, comma separated
//   kernel.form = raw          # raw: coeff |x|^e ; normalized: coeff |x|^e / e
//   m           = 4
//   init.type   = barenblatt
//
// Lines are stripped of '#' comments and surrounding blanks. Unknown and
// duplicate keys are errors; missing optional keys take the defaults below.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slowdiff/dynamics.hpp"
#include "slowdiff/errors.hpp"
#include "slowdiff/kernel.hpp"

namespace slowdiff {

enum class InitType { barenblatt, patch };

struct BarenblattInit {
  double m_star = 2.0;
  double tau = 0.1;
  double mass = 1.0;
  bool operator==(const BarenblattInit&) const = default;
};

struct PatchInit {
  double left = -1.0;
  double right = 1.0;
  double mass = 1.0;
  bool operator==(const PatchInit&) const = default;
};

struct RunConfig {
  std::vector<KernelTerm> kernel_terms;  // normalized form
  bool unsafe_params = false;
  double m = 0.0;
  std::size_t n = 0;  // 0: derived from h and the initial support
  double h = 0.01;
  double epsilon_exponent = kDefaultEpsilonExponent;
  bool truncate = false;
  double dt = 1e-3;
  double t_final = 10.0;
  Scheme scheme = Scheme::semi_implicit;
  bool energy_guard = true;
  InitType init_type = InitType::barenblatt;
  BarenblattInit barenblatt{};
  PatchInit patch{};
  double steady_tol = 1e-3;
  bool stop_at_steady = true;
  double snapshot_interval = 1.0;  // 0: initial and final state only
  double delta = kDefaultPlateauDelta;
  bool deterministic = true;
  std::string output_dir = ".";

  bool operator==(const RunConfig&) const = default;

  double mass() const { return init_type == InitType::barenblatt ? barenblatt.mass : patch.mass; }
  void set_mass(double mass) {
    if (init_type == InitType::barenblatt)
      barenblatt.mass = mass;
    else
      patch.mass = mass;
  }

  InteractionKernel kernel() const {
    return InteractionKernel::validate(kernel_terms, 1, unsafe_params);
  }
  Mollifier mollifier() const { return Mollifier(epsilon_from_h(h, epsilon_exponent), 1, truncate); }

  /// Particle count: n if set, else the initial support length over h.
  std::size_t particle_count() const {
    if (n != 0) return n;
    const double length = init_type == InitType::barenblatt
                              ? 2.0 * barenblatt_shape(barenblatt.m_star, barenblatt.tau).support_radius()
                              : patch.right - patch.left;
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(length / h)));
  }

  Ensemble1D initial_ensemble() const {
    const std::size_t count = particle_count();
    if (init_type == InitType::barenblatt)
      return init_barenblatt(barenblatt.m_star, barenblatt.tau, barenblatt.mass, count);
    return init_patch(patch.left, patch.right, patch.mass, count);
  }

  SimulationState initial_state() const {
    return SimulationState(initial_ensemble(), kernel(), mollifier(), m, h);
  }

  StepOptions step_options() const {
    StepOptions opt;
    opt.scheme = scheme;
    opt.energy_guard = energy_guard;
    opt.threads = deterministic ? 1u : configured_threads();
    return opt;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(const std::string& key, const std::string& v, int line) {
  const char* begin = v.c_str();
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(x))
    throw ConfigError(key, "line " + std::to_string(line) + ": " + key + ": expected a real, got '" + v + "'", line);
  return x;
}

inline std::size_t parse_count(const std::string& key, const std::string& v, int line) {
  const char* begin = v.c_str();
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE || x < 0)
    throw ConfigError(key, "line " + std::to_string(line) + ": " + key + ": expected a nonnegative integer, got '" + v + "'", line);
  return static_cast<std::size_t>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "line " + std::to_string(line) + ": " + key + ": expected true/false, got '" + v + "'", line);
}

/// "c@e, c@e, ..." into (coeff, exponent) pairs as written.
inline std::vector<KernelTerm> parse_terms(const std::string& key, const std::string& v, int line) {
  std::vector<KernelTerm> terms;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto at = item.find('@');
    if (at == std::string::npos)
      throw ConfigError(key, "line " + std::to_string(line) + ": " + key + ": term '" + item + "' is not coeff@exponent", line);
    terms.push_back({parse_real(key, trim(item.substr(0, at)), line),
                     parse_real(key, trim(item.substr(at + 1)), line)});
  }
  if (terms.empty()) throw ConfigError(key, "line " + std::to_string(line) + ": " + key + ": no terms", line);
  return terms;
}

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, key + ": " + what);
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
  static const std::set<std::string> known = {
      "kernel", "kernel.form", "kernel.unsafe", "m", "N", "h", "epsilon_exponent",
      "truncate", "dt", "T", "scheme", "energy_guard", "init.type", "init.m_star",
      "init.tau", "init.mass", "init.left", "init.right", "steady_tol", "stop_at_steady",
      "snapshot_interval", "delta", "deterministic", "output_dir"};

  std::map<std::string, std::pair<std::string, int>> kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = detail::trim(std::string_view(raw).substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(line) + ": expected 'key = value'", line);
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line) + ": empty key", line);
    if (!known.contains(key))
      throw ConfigError(key, "line " + std::to_string(line) + ": unknown key '" + key + "'", line);
    if (kv.contains(key))
      throw ConfigError(key, "line " + std::to_string(line) + ": duplicate key '" + key + "'", line);
    if (value.empty())
      throw ConfigError(key, "line " + std::to_string(line) + ": " + key + ": empty value", line);
    kv[key] = {value, line};
  }

  std::string missing;
  for (const char* k : {"kernel", "m", "init.type"})
    if (!kv.contains(k)) missing += missing.empty() ? k : std::string(", ") + k;
  if (!missing.empty()) throw ConfigError(missing, "missing required keys: " + missing);

  RunConfig c;
  auto real = [&](const char* k, double& out) {
    if (auto it = kv.find(k); it != kv.end()) out = detail::parse_real(k, it->second.first, it->second.second);
  };
  auto flag = [&](const char* k, bool& out) {
    if (auto it = kv.find(k); it != kv.end()) out = detail::parse_bool(k, it->second.first, it->second.second);
  };

  const auto& [kernel_text, kernel_line] = kv.at("kernel");
  auto terms = detail::parse_terms("kernel", kernel_text, kernel_line);
  std::string form = "normalized";
  if (auto it = kv.find("kernel.form"); it != kv.end()) form = it->second.first;
  if (form == "raw") {
    for (auto& t : terms) t = KernelTerm::from_raw(t.coeff, t.exponent);
  } else if (form != "normalized") {
    throw ConfigError("kernel.form", "kernel.form: expected raw or normalized, got '" + form + "'",
                      kv.at("kernel.form").second);
  }
  c.kernel_terms = std::move(terms);
  flag("kernel.unsafe", c.unsafe_params);

  real("m", c.m);
  if (auto it = kv.find("N"); it != kv.end()) c.n = detail::parse_count("N", it->second.first, it->second.second);
  real("h", c.h);
  real("epsilon_exponent", c.epsilon_exponent);
  flag("truncate", c.truncate);
  real("dt", c.dt);
  real("T", c.t_final);
  if (auto it = kv.find("scheme"); it != kv.end()) {
    const auto& v = it->second.first;
    if (v == "euler")
      c.scheme = Scheme::euler;
    else if (v == "heun")
      c.scheme = Scheme::heun;
    else if (v == "semi_implicit")
      c.scheme = Scheme::semi_implicit;
    else
      throw ConfigError("scheme", "line " + std::to_string(it->second.second) +
                                      ": scheme: expected euler, heun or semi_implicit, got '" + v + "'",
                        it->second.second);
  }
  flag("energy_guard", c.energy_guard);

  const auto& [init_text, init_line] = kv.at("init.type");
  if (init_text == "barenblatt") {
    c.init_type = InitType::barenblatt;
    real("init.m_star", c.barenblatt.m_star);
    real("init.tau", c.barenblatt.tau);
    real("init.mass", c.barenblatt.mass);
    for (const char* k : {"init.left", "init.right"})
      if (kv.contains(k)) throw ConfigError(k, std::string(k) + ": not used by init.type = barenblatt", kv.at(k).second);
  } else if (init_text == "patch") {
    c.init_type = InitType::patch;
    real("init.left", c.patch.left);
    real("init.right", c.patch.right);
    real("init.mass", c.patch.mass);
    for (const char* k : {"init.m_star", "init.tau"})
      if (kv.contains(k)) throw ConfigError(k, std::string(k) + ": not used by init.type = patch", kv.at(k).second);
  } else {
    throw ConfigError("init.type", "line " + std::to_string(init_line) +
                                       ": init.type: expected barenblatt or patch, got '" + init_text + "'",
                      init_line);
  }

  real("steady_tol", c.steady_tol);
  flag("stop_at_steady", c.stop_at_steady);
  real("snapshot_interval", c.snapshot_interval);
  real("delta", c.delta);
  flag("deterministic", c.deterministic);
  if (auto it = kv.find("output_dir"); it != kv.end()) c.output_dir = it->second.first;

  // Constraints, reported by key.
  try {
    (void)c.kernel();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("kernel", std::string("kernel: ") + e.what(), kernel_line);
  }
  detail::require(c.m > 1.0, "m", "must be > 1");
  detail::require(c.h > 0.0, "h", "must be positive");
  detail::require(c.epsilon_exponent > 0.0, "epsilon_exponent", "must be positive");
  detail::require(c.dt > 0.0, "dt", "must be positive");
  detail::require(c.t_final >= 0.0, "T", "must be >= 0");
  detail::require(c.steady_tol > 0.0, "steady_tol", "must be positive");
  detail::require(c.snapshot_interval >= 0.0, "snapshot_interval", "must be >= 0");
  detail::require(c.delta > 0.0 && c.delta < 1.0, "delta", "must lie in (0, 1)");
  if (c.init_type == InitType::barenblatt) {
    detail::require(c.barenblatt.m_star > 1.0, "init.m_star", "must be > 1");
    detail::require(c.barenblatt.tau > 0.0, "init.tau", "must be positive");
    detail::require(c.barenblatt.mass > 0.0, "init.mass", "must be positive");
    detail::require(c.n == 0 || c.n >= 2, "N", "must be >= 2 for barenblatt data");
  } else {
    detail::require(c.patch.left < c.patch.right, "init.right", "must exceed init.left");
    detail::require(c.patch.mass > 0.0, "init.mass", "must be positive");
  }
  return c;
}

/// Text that parse_config maps back to an equal RunConfig.
inline std::string emit_config(const RunConfig& c) {
  using detail::format_real;
  std::ostringstream o;
  o << "kernel = ";
  for (std::size_t i = 0; i < c.kernel_terms.size(); ++i)
    o << (i ? ", " : "") << format_real(c.kernel_terms[i].coeff) << '@'
      << format_real(c.kernel_terms[i].exponent);
  o << "\nkernel.form = normalized\n";
  o << "kernel.unsafe = " << (c.unsafe_params ? "true" : "false") << '\n';
  o << "m = " << format_real(c.m) << '\n';
  o << "N = " << c.n << '\n';
  o << "h = " << format_real(c.h) << '\n';
  o << "epsilon_exponent = " << format_real(c.epsilon_exponent) << '\n';
  o << "truncate = " << (c.truncate ? "true" : "false") << '\n';
  o << "dt = " << format_real(c.dt) << '\n';
  o << "T = " << format_real(c.t_final) << '\n';
  o << "scheme = " << to_string(c.scheme) << '\n';
  o << "energy_guard = " << (c.energy_guard ? "true" : "false") << '\n';
  if (c.init_type == InitType::barenblatt) {
    o << "init.type = barenblatt\n";
    o << "init.m_star = " << format_real(c.barenblatt.m_star) << '\n';
    o << "init.tau = " << format_real(c.barenblatt.tau) << '\n';
    o << "init.mass = " << format_real(c.barenblatt.mass) << '\n';
  } else {
    o << "init.type = patch\n";
    o << "init.left = " << format_real(c.patch.left) << '\n';
    o << "init.right = " << format_real(c.patch.right) << '\n';
    o << "init.mass = " << format_real(c.patch.mass) << '\n';
  }
  o << "steady_tol = " << format_real(c.steady_tol) << '\n';
  o << "stop_at_steady = " << (c.stop_at_steady ? "true" : "false") << '\n';
  o << "snapshot_interval = " << format_real(c.snapshot_interval) << '\n';
  o << "delta = " << format_real(c.delta) << '\n';
  o << "deterministic = " << (c.deterministic ? "true" : "false") << '\n';
  o << "output_dir = " << c.output_dir << '\n';
  return o.str();
}

}  // namespace slowdiff
