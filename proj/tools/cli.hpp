#pragma once

// Command-line driver. Exit codes: 0 success, 1 configuration or usage
// error, 2 numerical failure. Errors are reported as one line on stderr:
//   error=<config|numerical> key=<key or kind> line=<n> message="<text>"

#include <filesystem>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slowdiff/slowdiff.hpp"

namespace slowdiff::cli {

namespace fs = std::filesystem;

inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

inline void report(std::ostream& err, const char* kind, const std::string& key, int line,
                   const std::string& message) {
  err << "error=" << kind << " key=" << (key.empty() ? "-" : key) << " line=" << line
      << " message=" << quoted(message) << '\n';
}

inline fs::path output_dir(const RunConfig& cfg, const std::string& override_dir) {
  fs::path dir = override_dir.empty() ? fs::path(cfg.output_dir) : fs::path(override_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output_dir", "cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

inline int cmd_run(const std::string& config_path, const std::string& out_dir, std::ostream& out) {
  const auto cfg = parse_config(read_file(config_path));
  const auto dir = output_dir(cfg, out_dir);
  const auto rec = run(cfg);
  write_file((dir / "observables.csv").string(), observables_csv(rec.rows));
  for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%05zu.txt", k);
    write_file((dir / name).string(),
               snapshot_text(rec.snapshots[k].time, rec.snapshots[k].ensemble, rec.epsilon));
  }
  const auto& last = rec.rows.back();
  out << "t=" << detail::format_real(last.time) << " E_total=" << detail::format_real(last.e_total)
      << " max_velocity=" << detail::format_real(last.max_velocity)
      << " steady=" << (rec.steady ? "true" : "false") << " snapshots=" << rec.snapshots.size()
      << " dir=" << dir.string() << '\n';
  return 0;
}

inline int cmd_sweep_m(const std::string& config_path, const std::vector<double>& m_list,
                       const std::string& out_dir, std::ostream& out) {
  const auto cfg = parse_config(read_file(config_path));
  const auto dir = output_dir(cfg, out_dir);
  const auto rows = m_sweep(cfg, m_list);
  std::string csv = std::string(kMSweepHeader) + "\n";
  for (const auto& r : rows) {
    csv += detail::format_real(r.m) + "," + detail::format_real(r.support_diam) + "," +
           detail::format_real(r.sup_density) + "," + detail::format_real(r.e_m) + "," +
           detail::format_real(r.e_interaction) + "\n";
  }
  write_file((dir / "m_sweep.csv").string(), csv);
  out << csv;
  return 0;
}

inline constexpr const char* kCriticalMassHeader = "q,p,m,critical_mass,bracket_lo,bracket_hi,runs";

inline int cmd_sweep_critical_mass(const std::string& config_path, const std::vector<double>& q_list,
                                   const std::vector<double>& bracket, double p, int depth,
                                   const std::string& out_dir, std::ostream& out) {
  const auto cfg = parse_config(read_file(config_path));
  if (bracket.size() != 2) throw ConfigError("bracket", "--bracket needs two masses");
  if (!(bracket[0] > 0.0 && bracket[0] < bracket[1]))
    throw ConfigError("bracket", "--bracket needs 0 < lo < hi");
  if (depth < 1) throw ConfigError("depth", "--depth must be >= 1");
  const auto dir = output_dir(cfg, out_dir);
  if (std::isnan(p)) p = cfg.kernel().repulsion_exponent();
  if (std::isnan(p)) throw ConfigError("kernel", "kernel has no repulsive term; pass --p");
  const double tol = (bracket[1] - bracket[0]) / std::pow(2.0, depth);
  std::string csv = std::string(kCriticalMassHeader) + "\n";
  for (double q : q_list) {
    const auto r = critical_mass(q, p, cfg.m, cfg, {bracket[0], bracket[1]}, tol);
    csv += detail::format_real(q) + "," + detail::format_real(p) + "," + detail::format_real(cfg.m) +
           "," + detail::format_real(r.critical_mass) + "," + detail::format_real(r.bracket.first) +
           "," + detail::format_real(r.bracket.second) + "," + std::to_string(r.runs) + "\n";
  }
  write_file((dir / "critical_mass.csv").string(), csv);
  out << csv;
  return 0;
}

inline int cmd_wasserstein(const std::string& a, const std::string& b, double order, std::ostream& out) {
  const auto sa = parse_snapshot(read_file(a));
  const auto sb = parse_snapshot(read_file(b));
  TransportResult r;
  try {
    r = wasserstein_1d(sa.ensemble, sb.ensemble, order);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("b", e.what());
  }
  out << detail::format_real(r.distance) << '\n';
  return 0;
}

inline int cmd_phase(const std::string& path, double epsilon, double delta, std::ostream& out) {
  const auto s = parse_snapshot(read_file(path));
  if (std::isnan(epsilon)) epsilon = s.epsilon;
  if (!(epsilon > 0.0)) throw ConfigError("epsilon", "--epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta", "--delta must lie in (0, 1)");
  const auto r = classify_phase(s.ensemble, Mollifier(epsilon, 1), delta);
  out << "phase=" << to_string(r.phase) << " plateau_fraction=" << detail::format_real(r.plateau_fraction)
      << " sup_density=" << detail::format_real(r.sup_density) << '\n';
  return 0;
}

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout,
                std::ostream& err = std::cerr) {
  CLI::App app{"Particle blob-method simulator for aggregation-diffusion gradient flows", "slowdiff"};
  app.require_subcommand(1);

  std::string config, out_dir, snap_a, snap_b, snap;
  std::vector<double> m_list, q_list, bracket;
  double order = 2.0, p = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN(), delta = kDefaultPlateauDelta;
  int depth = kDefaultBisectionDepth;

  auto* run_cmd = app.add_subcommand("run", "Integrate one trajectory");
  run_cmd->add_option("config", config, "Config file")->required();
  run_cmd->add_option("--output-dir", out_dir, "Overrides output_dir");

  auto* sweep_m = app.add_subcommand("sweep-m", "Steady states over a list of m");
  sweep_m->add_option("config", config, "Config file")->required();
  sweep_m->add_option("--m-list", m_list, "Comma separated m values")->required()->delimiter(',');
  sweep_m->add_option("--output-dir", out_dir, "Overrides output_dir");

  auto* sweep_cm = app.add_subcommand("sweep-critical-mass", "Critical mass bisection over q");
  sweep_cm->add_option("config", config, "Config file")->required();
  sweep_cm->add_option("--q-list", q_list, "Comma separated attraction exponents")->required()->delimiter(',');
  sweep_cm->add_option("--bracket", bracket, "Initial mass bracket: lo hi")->required()->expected(2);
  sweep_cm->add_option("--p", p, "Repulsion exponent (default: from the config kernel)");
  sweep_cm->add_option("--depth", depth, "Bisection steps")->capture_default_str();
  sweep_cm->add_option("--output-dir", out_dir, "Overrides output_dir");

  auto* wass = app.add_subcommand("wasserstein", "Distance between two snapshots");
  wass->add_option("snapshot_a", snap_a, "Snapshot file")->required();
  wass->add_option("snapshot_b", snap_b, "Snapshot file")->required();
  wass->add_option("--b", order, "Order b in [1, 2]")->capture_default_str();

  auto* phase = app.add_subcommand("phase", "Classify a steady-state snapshot");
  phase->add_option("snapshot", snap, "Snapshot file")->required();
  phase->add_option("--epsilon", epsilon, "Mollifier width (default: from the snapshot header)");
  phase->add_option("--delta", delta, "Plateau tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report(err, "config", "argv", 0, e.what());
    return 1;
  }

  try {
    if (*run_cmd) return cmd_run(config, out_dir, out);
    if (*sweep_m) return cmd_sweep_m(config, m_list, out_dir, out);
    if (*sweep_cm) return cmd_sweep_critical_mass(config, q_list, bracket, p, depth, out_dir, out);
    if (*wass) return cmd_wasserstein(snap_a, snap_b, order, out);
    if (*phase) return cmd_phase(snap, epsilon, delta, out);
  } catch (const ConfigError& e) {
    report(err, "config", e.key(), e.line(), e.what());
    return 1;
  } catch (const NumericalError& e) {
    report(err, "numerical", e.kind(), 0, e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    report(err, "config", "", 0, e.what());
    return 1;
  }
  return 1;
}

}  // namespace slowdiff::cli
