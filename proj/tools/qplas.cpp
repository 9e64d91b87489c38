// qplas: plasmon-mediated STIRAP between two emitters on a metal nanosphere.
//
//   qplas <ldos|modes|couplings|stirap|scan|truncation|distances>
//         (--config FILE | --preset NAME) [--out DIR] [--threads K]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <omp.h>

#include "qplas/config.hpp"
#include "qplas/error.hpp"
#include "qplas/output.hpp"
#include "qplas/scan.hpp"

using namespace qplas;
using nlohmann::json;

namespace {

constexpr int kConfigFailure = 1;
constexpr int kNumericFailure = 2;

struct Run {
  RunConfig cfg;
  std::string echo;
  std::vector<std::pair<std::string, std::string>> files;
  json summary = json::object();

  void add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
};

std::string r(double v) { return format_real(v); }

void cmd_ldos(Run& run) {
  const auto& c = run.cfg;
  const auto grid = c.omega_grid();
  const int n_max = c.truncation.n_max;
  std::string table = "emitter,distance_nm,omega_ev,total";
  for (int n = 1; n <= n_max; ++n) table += fmt::format(",n{}", n);
  table += "\n";
  std::string peaks = "emitter,distance_nm,n,peak_ldos,relative\n";
  json per_emitter = json::array();
  for (int i = 0; i < 2; ++i) {
    const auto& e = c.emitters[i];
    for (double w : grid) {
      std::string row;
      double total = 0.0;
      for (int n = 1; n <= n_max; ++n) {
        const double v = partial_ldos(c.nanoparticle, e, n, w);
        total += v;
        row += "," + r(v);
      }
      table += fmt::format("{},{},{},{}{}\n", i + 1, r(e.distance_nm), r(w), r(total), row);
    }
    std::vector<double> p(n_max);
    for (int n = 1; n <= n_max; ++n) p[n - 1] = peak_partial_ldos(c.nanoparticle, e, n);
    const double top = *std::max_element(p.begin(), p.end());
    for (int n = 1; n <= n_max; ++n)
      peaks += fmt::format("{},{},{},{},{}\n", i + 1, r(e.distance_nm), n, r(p[n - 1]),
                           r(p[n - 1] / top));
    const EmitterSpec single[] = {e};
    const auto sel = select_modes(c.nanoparticle, single, c.truncation.threshold, n_max);
    per_emitter.push_back({{"distance_nm", e.distance_nm},
                           {"n_prime", sel.n_prime},
                           {"clamped", sel.clamped}});
  }
  run.add("ldos.csv", table);
  run.add("ldos_peaks.csv", peaks);
  run.summary["emitters"] = per_emitter;
}

void cmd_modes(Run& run) {
  const auto& c = run.cfg;
  const auto sel = mode_selection(c);
  const auto table = build_mode_table(c.nanoparticle, c.emitters, sel.n_prime, c.omega_grid(),
                                      c.numerics.coupling_scale);
  std::string csv = "n,omega_n_ev,gamma_n_ev,g1_ev,g2_ev,residual\n";
  double worst = 0.0;
  for (const auto& m : table.modes) {
    csv += fmt::format("{},{},{},{},{},{}\n", m.mode_n, r(m.omega_n), r(m.gamma_n),
                       r(m.g_amplitudes[0]), r(m.g_amplitudes[1]), r(m.residual));
    worst = std::max(worst, m.residual);
  }
  run.add("modes.csv", csv);
  run.summary["n_prime"] = sel.n_prime;
  run.summary["clamped"] = sel.clamped;
  run.summary["max_residual"] = worst;
}

void cmd_couplings(Run& run) {
  const auto& c = run.cfg;
  const auto sel = mode_selection(c);
  const StirapSystem sys = make_system(c.nanoparticle, c.emitters, sel.n_prime, c.omega_grid(),
                                       c.numerics.coupling_scale);
  const double phi = c.phi();
  std::array<EmitterSpec, 2> placed = c.emitters;
  const auto decs = decompose_modes(c.nanoparticle, placed, sys.table, sel.n_prime,
                                    c.numerics.rank_tol);
  std::string csv =
      "n,mu_re,mu_im,lambda1,lambda2,rank,g11_re,g11_im,g12_re,g12_im,g21_re,g21_im,g22_re,"
      "g22_im\n";
  for (int k = 0; k < sel.n_prime; ++k) {
    const auto& d = decs[k];
    const auto& m = sys.table.modes[k];
    const cplx mu = mode_overlap(c.nanoparticle, placed[0], placed[1], m.mode_n, m.omega_n);
    csv += fmt::format("{},{},{},{},{},{}", m.mode_n, r(mu.real()), r(mu.imag()),
                       r(d.lambdas[0]), r(d.lambdas[1]), d.rank);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const cplx g = j < d.rank ? m.g_amplitudes[i] * std::sqrt(d.lambdas[j]) *
                                        std::conj(d.T(i, j))
                                  : cplx(0.0, 0.0);
        csv += "," + r(g.real()) + "," + r(g.imag());
      }
    csv += "\n";
  }
  StirapSettings s = stirap_settings(c);
  s.model = ModelKind::Full;
  const auto full = build_hamiltonian(sys, sel.n_prime, phi, s);
  const auto reduced = adiabatic_eliminate(full);
  run.add("couplings.csv", csv);
  run.add("hamiltonian.csv", hamiltonian_csv(full, full.h_static));
  run.add("reduced.csv", hamiltonian_csv(reduced, reduced.h_static));
  auto c2 = [](cplx z) { return json::array({z.real(), z.imag()}); };
  run.summary["n_prime"] = sel.n_prime;
  run.summary["phi_rad"] = phi;
  run.summary["dimension"] = full.dim();
  run.summary["sigma11_ev"] = c2(reduced.h_static(1, 1));
  run.summary["sigma22_ev"] = c2(reduced.h_static(2, 2));
  run.summary["j12_ev"] = c2(reduced.h_static(1, 2));
}

void cmd_stirap(Run& run) {
  const auto& c = run.cfg;
  const auto sel = mode_selection(c);
  const StirapSystem sys = make_system(c.nanoparticle, c.emitters, sel.n_prime, c.omega_grid(),
                                       c.numerics.coupling_scale);
  const StirapSettings s = stirap_settings(c);
  const Trajectory traj = run_stirap(sys, sel.n_prime, c.phi(), c.pulses.area, s);
  std::string csv = "t_ns";
  for (const auto& l : traj.labels) csv += "," + l.name();
  csv += ",norm\n";
  double bright_max = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto pops = traj.populations(k);
    csv += r(units::internal_to_ns(traj.times[k]));
    double bright = 0.0;
    for (Eigen::Index i = 0; i < pops.size(); ++i) {
      csv += "," + r(pops[i]);
      if (traj.labels[i].kind == StateKind::Bright) bright += pops[i];
    }
    bright_max = std::max(bright_max, bright);
    csv += "," + r(pops.sum()) + "\n";
  }
  run.add("trajectory.csv", csv);
  run.summary["efficiency"] = transfer_efficiency(traj);
  run.summary["n_prime"] = sel.n_prime;
  run.summary["phi_rad"] = c.phi();
  run.summary["model"] = c.numerics.model;
  run.summary["final_norm"] = traj.norm_squared(traj.times.size() - 1);
  run.summary["max_bright_population"] = bright_max;
  run.summary["accepted_steps"] = traj.accepted_steps;
  run.summary["rejected_steps"] = traj.rejected_steps;
}

std::string cells_csv(const std::vector<ScanCell>& cells, const std::string& prefix) {
  std::string out;
  for (const auto& cell : cells)
    out += fmt::format("{}{},{},{},{}\n", prefix, r(cell.phi), r(cell.area), r(cell.efficiency),
                       cell.status);
  return out;
}

std::size_t failures(const std::vector<ScanCell>& cells) {
  return std::count_if(cells.begin(), cells.end(), [](const auto& x) { return x.status != "ok"; });
}

void cmd_scan(Run& run) {
  const auto& c = run.cfg;
  const auto sel = mode_selection(c);
  const StirapSystem sys = make_system(c.nanoparticle, c.emitters, sel.n_prime, c.omega_grid(),
                                       c.numerics.coupling_scale);
  const auto phis = c.phi_grid();
  const auto areas = c.area_grid();
  const auto cells = scan_angle_area(sys, sel.n_prime, phis, areas, stirap_settings(c));
  run.add("scan.csv", "phi,area,efficiency,status\n" + cells_csv(cells, ""));
  run.summary["n_prime"] = sel.n_prime;
  run.summary["cells"] = cells.size();
  run.summary["failed_cells"] = failures(cells);
}

void cmd_truncation(Run& run) {
  const auto& c = run.cfg;
  const int top = *std::max_element(c.scan.mode_counts.begin(), c.scan.mode_counts.end());
  const StirapSystem sys = make_system(c.nanoparticle, c.emitters, top, c.omega_grid(),
                                       c.numerics.coupling_scale);
  const auto phis = c.phi_grid();
  const auto areas = c.area_grid();
  const auto results = truncation_study(sys, c.scan.mode_counts, phis, areas, stirap_settings(c));
  std::string csv = "mode_count,phi,area,efficiency,status\n";
  std::size_t failed = 0;
  for (const auto& t : results) {
    csv += cells_csv(t.cells, fmt::format("{},", t.mode_count));
    failed += failures(t.cells);
  }
  run.add("truncation.csv", csv);
  run.summary["mode_counts"] = c.scan.mode_counts;
  run.summary["failed_cells"] = failed;
}

void cmd_distances(Run& run) {
  const auto& c = run.cfg;
  DistanceStudySpec spec;
  spec.np = c.nanoparticle;
  spec.emitters = c.emitters;
  spec.omega_grid = c.omega_grid();
  spec.coupling_scale = c.numerics.coupling_scale;
  spec.threshold = c.truncation.threshold;
  spec.n_max = c.truncation.n_max;
  spec.phi = c.phi();
  spec.area = c.pulses.area;
  const auto rows = distance_study(spec, c.scan.distances_nm, stirap_settings(c));
  std::string csv = "distance_nm,n_prime,clamped,efficiency,status\n";
  json summary = json::array();
  for (const auto& row : rows) {
    csv += fmt::format("{},{},{},{},{}\n", r(row.distance_nm), row.n_prime, row.clamped ? 1 : 0,
                       r(row.efficiency), row.status);
    summary.push_back({{"distance_nm", row.distance_nm},
                       {"n_prime", row.n_prime},
                       {"efficiency", row.efficiency}});
  }
  run.add("distances.csv", csv);
  run.summary["distances"] = summary;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plasmon-mediated STIRAP between two emitters on a metal nanosphere"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, preset, out_dir;
  int threads = 0;
  app.add_option("--config", config_path, "Run configuration file");
  app.add_option("--preset", preset, "Built-in configuration")
      ->check(CLI::IsMember(preset_names()));
  app.add_option("--out", out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--threads", threads, "OpenMP threads (default: QPLAS_THREADS or runtime)")
      ->check(CLI::PositiveNumber);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"ldos", "Per-mode partial LDOS tables"},
      {"modes", "Lorentzian fits per mode"},
      {"couplings", "Bright-mode couplings and the effective Hamiltonian"},
      {"stirap", "Single STIRAP trajectory"},
      {"scan", "Efficiency over (phi, pulse area)"},
      {"truncation", "Efficiency scans for truncated mode sets"},
      {"distances", "Truncation index and efficiency versus emitter distance"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Run run;
  try {
    if (config_path.empty() == preset.empty())
      throw ConfigError("exactly one of --config and --preset is required");
    const std::string text = config_path.empty() ? preset_text(preset) : read_file(config_path);
    run.cfg = parse_config(text);
    if (!out_dir.empty()) run.cfg.output_dir = out_dir;
    run.echo = echo_config(run.cfg);
  } catch (const ConfigError& e) {
    std::cerr << "qplas: config error: " << e.what() << "\n";
    return kConfigFailure;
  }

  if (threads == 0)
    if (const char* env = std::getenv("QPLAS_THREADS")) threads = std::atoi(env);
  if (threads > 0) omp_set_num_threads(threads);

  const auto start = std::chrono::steady_clock::now();
  try {
    if (command == "ldos") cmd_ldos(run);
    else if (command == "modes") cmd_modes(run);
    else if (command == "couplings") cmd_couplings(run);
    else if (command == "stirap") cmd_stirap(run);
    else if (command == "scan") cmd_scan(run);
    else if (command == "truncation") cmd_truncation(run);
    else if (command == "distances") cmd_distances(run);
  } catch (const ConfigError& e) {
    std::cerr << "qplas: config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const PropagationError& e) {
    std::cerr << "qplas: propagation failed: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "qplas: " << command << " failed: " << e.what() << "\n";
    return kNumericFailure;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    OutputSet out(run.cfg.output_dir);
    out.add("config.cfg", run.echo);
    for (const auto& [name, content] : run.files) out.add(name, content);
    json summary = run.summary;
    summary["subcommand"] = command;
    out.add("summary.json", summary.dump(2) + "\n");
    out.write_manifest(command, run.echo, wall);
    std::cout << summary.dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "qplas: cannot write outputs: " << e.what() << "\n";
    return kNumericFailure;
  }
  return 0;
}
