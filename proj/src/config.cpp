#include "qplas/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "qplas/dynamics.hpp"
#include "qplas/error.hpp"
#include "qplas/system.hpp"
#include "qplas/units.hpp"

namespace qplas {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view v, int line, const std::string& name) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", name, v), line);
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(out)) throw ConfigError(name + " must be finite", line);
  return out;
}

template <typename T>
std::vector<T> parse_list(std::string_view v, int line, const std::string& name) {
  std::vector<T> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(parse_number<T>(trim(v.substr(0, comma)), line, name));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt::format("{}", xs[i]);
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(std::string_view, int)> set;
  std::function<std::string()> get;
};

Field real(std::string section, std::string key, double& ref) {
  const std::string name = section + "." + key;
  return {section, key,
          [&ref, name](std::string_view v, int line) { ref = parse_number<double>(v, line, name); },
          [&ref] { return fmt::format("{}", ref); }};
}

template <typename I>
Field integer(std::string section, std::string key, I& ref) {
  const std::string name = section + "." + key;
  return {section, key,
          [&ref, name](std::string_view v, int line) { ref = parse_number<I>(v, line, name); },
          [&ref] { return fmt::format("{}", ref); }};
}

Field word(std::string section, std::string key, std::string& ref) {
  return {section, key, [&ref](std::string_view v, int) { ref = std::string(v); },
          [&ref] { return ref; }};
}

template <typename T>
Field list(std::string section, std::string key, std::vector<T>& ref) {
  const std::string name = section + "." + key;
  return {section, key,
          [&ref, name](std::string_view v, int line) { ref = parse_list<T>(v, line, name); },
          [&ref] { return join(ref); }};
}

std::vector<Field> fields(RunConfig& c) {
  std::vector<Field> f;
  auto& np = c.nanoparticle;
  f.push_back(real("nanoparticle", "radius_nm", np.radius_nm));
  f.push_back(real("nanoparticle", "eps_inf", np.eps_inf));
  f.push_back(real("nanoparticle", "omega_p_ev", np.omega_p));
  f.push_back(real("nanoparticle", "gamma_p_ev", np.gamma_p));
  f.push_back(real("nanoparticle", "eps_background", np.eps_background));
  for (int i = 0; i < 2; ++i) {
    const std::string s = fmt::format("emitter.{}", i + 1);
    auto& e = c.emitters[i];
    f.push_back(real(s, "distance_nm", e.distance_nm));
    f.push_back(real(s, "polar_angle_rad", e.polar_angle_rad));
    f.push_back(real(s, "dipole_debye", e.dipole_debye));
    f.push_back(real(s, "omega_eg_ev", e.omega_eg));
    f.push_back(real(s, "omega_fg_ev", e.omega_fg));
  }
  f.push_back(real("pulses", "area", c.pulses.area));
  f.push_back(real("pulses", "tau_over_T", c.pulses.tau_over_T));
  f.push_back(real("pulses", "T_ns", c.pulses.T_ns));
  f.push_back(real("pulses", "window_multiplier", c.pulses.window_multiplier));
  f.push_back(integer("truncation", "n_max", c.truncation.n_max));
  f.push_back(real("truncation", "threshold", c.truncation.threshold));
  f.push_back(integer("truncation", "n_modes", c.truncation.n_modes));
  auto& nu = c.numerics;
  f.push_back(real("numerics", "rtol", nu.rtol));
  f.push_back(real("numerics", "atol", nu.atol));
  f.push_back(real("numerics", "rank_tol", nu.rank_tol));
  f.push_back(real("numerics", "omega_min_ev", nu.omega_min_ev));
  f.push_back(real("numerics", "omega_max_ev", nu.omega_max_ev));
  f.push_back(integer("numerics", "omega_points", nu.omega_points));
  f.push_back(real("numerics", "coupling_scale", nu.coupling_scale));
  f.push_back(real("numerics", "loss_factor", nu.loss_factor));
  f.push_back(word("numerics", "integrator", nu.integrator));
  f.push_back(word("numerics", "model", nu.model));
  f.push_back(integer("numerics", "max_steps", nu.max_steps));
  auto& sc = c.scan;
  f.push_back(real("scan", "phi_min_over_pi", sc.phi_min_over_pi));
  f.push_back(real("scan", "phi_max_over_pi", sc.phi_max_over_pi));
  f.push_back(integer("scan", "phi_points", sc.phi_points));
  f.push_back(real("scan", "area_min", sc.area_min));
  f.push_back(real("scan", "area_max", sc.area_max));
  f.push_back(integer("scan", "area_points", sc.area_points));
  f.push_back(list("scan", "mode_counts", sc.mode_counts));
  f.push_back(list("scan", "distances_nm", sc.distances_nm));
  f.push_back(word("output", "dir", c.output_dir));
  return f;
}

using LineOf = std::function<int(const std::string&)>;

void check(bool ok, const std::string& field, const std::string& what, const LineOf& line_of) {
  if (!ok) throw ConfigError(field + " " + what, line_of(field));
}

void validate_impl(const RunConfig& c, const LineOf& at) {
  const auto& np = c.nanoparticle;
  check(np.radius_nm > 0.0, "nanoparticle.radius_nm", "must be > 0", at);
  check(np.omega_p > 0.0, "nanoparticle.omega_p_ev", "must be > 0", at);
  check(np.gamma_p >= 0.0, "nanoparticle.gamma_p_ev", "must be >= 0", at);
  check(np.eps_inf >= 1.0, "nanoparticle.eps_inf", "must be >= 1", at);
  check(np.eps_background >= 1.0, "nanoparticle.eps_background", "must be >= 1", at);
  for (int i = 0; i < 2; ++i) {
    const std::string s = fmt::format("emitter.{}.", i + 1);
    const auto& e = c.emitters[i];
    check(e.distance_nm > 0.0, s + "distance_nm", "must be > 0", at);
    check(e.dipole_debye > 0.0, s + "dipole_debye", "must be > 0", at);
    check(e.omega_fg >= 0.0, s + "omega_fg_ev", "must be >= 0", at);
    check(e.omega_fg < e.omega_eg, s + "omega_fg_ev", "must be below omega_eg_ev", at);
  }
  check(c.pulses.area >= 0.0, "pulses.area", "must be >= 0", at);
  check(c.pulses.tau_over_T > 0.0, "pulses.tau_over_T", "must be > 0", at);
  check(c.pulses.T_ns > 0.0, "pulses.T_ns", "must be > 0", at);
  check(c.pulses.window_multiplier > 0.0, "pulses.window_multiplier", "must be > 0", at);
  check(c.truncation.n_max >= 1, "truncation.n_max", "must be >= 1", at);
  check(c.truncation.threshold > 0.0 && c.truncation.threshold < 1.0, "truncation.threshold",
        "must lie in (0, 1)", at);
  check(c.truncation.n_modes >= 0 && c.truncation.n_modes <= c.truncation.n_max,
        "truncation.n_modes", "must lie in 0..n_max", at);
  const auto& nu = c.numerics;
  check(nu.rtol > 0.0 && nu.rtol < 1.0, "numerics.rtol", "must lie in (0, 1)", at);
  check(nu.atol > 0.0, "numerics.atol", "must be > 0", at);
  check(nu.rank_tol > 0.0 && nu.rank_tol < 1.0, "numerics.rank_tol", "must lie in (0, 1)", at);
  check(nu.omega_min_ev > 0.0, "numerics.omega_min_ev", "must be > 0", at);
  check(nu.omega_max_ev > nu.omega_min_ev, "numerics.omega_max_ev",
        "must exceed omega_min_ev", at);
  check(nu.omega_points >= 16, "numerics.omega_points", "must be >= 16", at);
  check(nu.coupling_scale > 0.0, "numerics.coupling_scale", "must be > 0", at);
  check(nu.loss_factor >= 0.0, "numerics.loss_factor", "must be >= 0", at);
  check(nu.max_steps >= 1, "numerics.max_steps", "must be >= 1", at);
  try {
    parse_integrator(nu.integrator);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("numerics.integrator: ") + e.what(), at("numerics.integrator"));
  }
  try {
    parse_model_kind(nu.model);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("numerics.model: ") + e.what(), at("numerics.model"));
  }
  const auto& sc = c.scan;
  check(sc.phi_points >= 1, "scan.phi_points", "must be >= 1 (empty grid)", at);
  check(sc.area_points >= 1, "scan.area_points", "must be >= 1 (empty grid)", at);
  check(sc.phi_max_over_pi >= sc.phi_min_over_pi, "scan.phi_max_over_pi",
        "must be >= phi_min_over_pi", at);
  check(sc.area_min > 0.0 && sc.area_max >= sc.area_min, "scan.area_max",
        "needs 0 < area_min <= area_max", at);
  check(!sc.mode_counts.empty(), "scan.mode_counts", "must not be empty", at);
  for (int m : sc.mode_counts)
    check(m >= 1 && m <= c.truncation.n_max, "scan.mode_counts", "entries must lie in 1..n_max",
          at);
  check(!sc.distances_nm.empty(), "scan.distances_nm", "must not be empty", at);
  for (double d : sc.distances_nm) check(d > 0.0, "scan.distances_nm", "entries must be > 0", at);
  check(!c.output_dir.empty(), "output.dir", "must not be empty", at);
}

}  // namespace

std::vector<double> RunConfig::omega_grid() const {
  return linear_grid(numerics.omega_min_ev, numerics.omega_max_ev, numerics.omega_points);
}

std::vector<double> RunConfig::phi_grid() const {
  auto g = linear_grid(scan.phi_min_over_pi, scan.phi_max_over_pi, scan.phi_points);
  for (auto& x : g) x *= std::numbers::pi;
  return g;
}

std::vector<double> RunConfig::area_grid() const {
  return linear_grid(scan.area_min, scan.area_max, scan.area_points);
}

void validate_config(const RunConfig& c) {
  validate_impl(c, [](const std::string&) { return 0; });
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  const auto table = fields(c);
  std::map<std::string, const Field*> by_name;
  std::set<std::string> sections;
  for (const auto& f : table) {
    by_name[f.section + "." + f.key] = &f;
    sections.insert(f.section);
  }

  std::map<std::string, int> seen_keys;
  std::set<std::string> seen_sections;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const auto hash = line.find_first_of("#;");
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section)) throw ConfigError("unknown section [" + section + "]", line_no);
      if (!seen_sections.insert(section).second)
        throw ConfigError("duplicate section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    if (section.empty()) throw ConfigError("key outside of any section", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string name = section + "." + key;
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    if (!seen_keys.emplace(name, line_no).second)
      throw ConfigError("duplicate key '" + key + "'", line_no);
    const auto value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
    it->second->set(value, line_no);
  }
  for (const char* required : {"nanoparticle", "emitter.1", "emitter.2"})
    if (!seen_sections.count(required))
      throw ConfigError(std::string("missing section [") + required + "]");

  validate_impl(c, [&](const std::string& field) {
    const auto it = seen_keys.find(field);
    return it == seen_keys.end() ? 0 : it->second;
  });
  return c;
}

std::string echo_config(const RunConfig& c) {
  RunConfig copy = c;
  std::string out;
  std::string section;
  for (const auto& f : fields(copy)) {
    if (f.section != section) {
      out += (section.empty() ? "" : "\n") + fmt::format("[{}]\n", f.section);
      section = f.section;
    }
    out += fmt::format("{} = {}\n", f.key, f.get());
  }
  return out;
}

namespace {

const std::map<std::string, std::string, std::less<>>& presets() {
  static const std::map<std::string, std::string, std::less<>> table = [] {
    const std::string sphere =
        "[nanoparticle]\n"
        "radius_nm = 8\n"
        "eps_inf = 6\n"
        "omega_p_ev = 7.9\n"
        "gamma_p_ev = 0.051\n"
        "eps_background = 2.13\n\n";
    auto emitter = [](int i, double d, double angle) {
      return fmt::format(
          "[emitter.{}]\n"
          "distance_nm = {}\n"
          "polar_angle_rad = {}\n"
          "dipole_debye = 10\n"
          "omega_eg_ev = 2.0\n"
          "omega_fg_ev = 0.3\n\n",
          i, d, angle);
    };
    auto pulses = [](double area, double tau, double T) {
      return fmt::format("[pulses]\narea = {}\ntau_over_T = {}\nT_ns = {}\n\n", area, tau, T);
    };
    const double pi = std::numbers::pi;
    std::map<std::string, std::string, std::less<>> t;
    t["fig2"] = "# Partial LDOS of a radial emitter at d = 2 nm and d = 7 nm.\n" + sphere +
                emitter(1, 2, 0) + emitter(2, 7, 0) +
                "[numerics]\nomega_points = 2001\n\n[output]\ndir = fig2_out\n";
    t["fig5"] = "# Single STIRAP run, d = 2/4 nm, 10 D dipoles, phi = 0.\n" + sphere +
                emitter(1, 2, 0) + emitter(2, 4, 0) + pulses(60, 0.7, 10) +
                "[output]\ndir = fig5_out\n";
    t["fig6"] = "# Efficiency over (phi, area), d = 2/4 nm.\n" + sphere + emitter(1, 2, 0) +
                emitter(2, 4, 0) + pulses(60, 0.7, 10) +
                "[scan]\nphi_min_over_pi = 0\nphi_max_over_pi = 1\nphi_points = 31\n"
                "area_min = 10\narea_max = 150\narea_points = 15\n\n[output]\ndir = fig6_out\n";
    t["fig7"] = "# Artificial mode truncation, d = 2/4 nm.\n" + sphere + emitter(1, 2, 0) +
                emitter(2, 4, 0) + pulses(60, 0.7, 10) +
                "[scan]\nphi_min_over_pi = 0\nphi_max_over_pi = 1\nphi_points = 31\n"
                "area_min = 10\narea_max = 150\narea_points = 15\nmode_counts = 1, 3, 7, 25\n\n"
                "[output]\ndir = fig7_out\n";
    t["fig9"] = "# phi = pi blockade versus emitter distance, d = 7/7 nm.\n" + sphere +
                emitter(1, 7, 0) + emitter(2, 7, pi) + pulses(90, 0.8, 15) +
                "[scan]\ndistances_nm = 2, 3, 4, 5, 6, 7\n\n[output]\ndir = fig9_out\n";
    return t;
  }();
  return table;
}

}  // namespace

StirapSettings stirap_settings(const RunConfig& c) {
  StirapSettings s;
  s.tau_over_T = c.pulses.tau_over_T;
  s.width_T = units::ns_to_internal(c.pulses.T_ns);
  s.window_multiplier = c.pulses.window_multiplier;
  s.model = parse_model_kind(c.numerics.model);
  s.rank_tol = c.numerics.rank_tol;
  s.loss_factor = c.numerics.loss_factor;
  s.prop.rtol = c.numerics.rtol;
  s.prop.atol = c.numerics.atol;
  s.prop.integrator = parse_integrator(c.numerics.integrator);
  s.prop.max_steps = c.numerics.max_steps;
  return s;
}

ModeSelection mode_selection(const RunConfig& c) {
  if (c.truncation.n_modes > 0) return {c.truncation.n_modes, false};
  return select_modes(c.nanoparticle, c.emitters, c.truncation.threshold, c.truncation.n_max);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : presets()) out.push_back(name);
  return out;
}

std::string preset_text(std::string_view name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ConfigError("unknown preset '" + std::string(name) + "'");
  return it->second;
}

}  // namespace qplas
