#include "qplas/scan.hpp"

#include <cmath>
#include <limits>

#include "qplas/error.hpp"

namespace qplas {

namespace {

void check_inputs(const StirapSystem& sys, int n_modes, std::span<const double> phi_grid,
                  std::span<const double> area_grid) {
  if (phi_grid.empty() || area_grid.empty()) throw DomainError("scan grids must be non-empty");
  if (n_modes < 1 || n_modes > sys.table.size())
    throw DomainError("mode count " + std::to_string(n_modes) + " outside 1.." +
                      std::to_string(sys.table.size()));
}

std::string status_of(const Error& e) {
  if (dynamic_cast<const PropagationError*>(&e)) return "propagation_error";
  if (dynamic_cast<const EliminationError*>(&e)) return "elimination_error";
  return "numeric_error";
}

ScanCell evaluate_cell(const StirapSystem& sys, int n_modes, double phi, double area,
                       const StirapSettings& settings) {
  ScanCell cell{phi, area, 0.0, "ok"};
  try {
    cell.efficiency = stirap_efficiency(sys, n_modes, phi, area, settings);
  } catch (const Error& e) {
    cell.efficiency = std::numeric_limits<double>::quiet_NaN();
    cell.status = status_of(e);
  }
  return cell;
}

}  // namespace

std::vector<ScanCell> scan_angle_area_serial(const StirapSystem& sys, int n_modes,
                                             std::span<const double> phi_grid,
                                             std::span<const double> area_grid,
                                             const StirapSettings& settings) {
  check_inputs(sys, n_modes, phi_grid, area_grid);
  std::vector<ScanCell> cells;
  cells.reserve(phi_grid.size() * area_grid.size());
  for (double phi : phi_grid)
    for (double area : area_grid) cells.push_back(evaluate_cell(sys, n_modes, phi, area, settings));
  return cells;
}

std::vector<ScanCell> scan_angle_area(const StirapSystem& sys, int n_modes,
                                      std::span<const double> phi_grid,
                                      std::span<const double> area_grid,
                                      const StirapSettings& settings) {
  check_inputs(sys, n_modes, phi_grid, area_grid);
  const auto n_area = static_cast<std::ptrdiff_t>(area_grid.size());
  const auto total = static_cast<std::ptrdiff_t>(phi_grid.size()) * n_area;
  std::vector<ScanCell> cells(total);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < total; ++c)
    cells[c] = evaluate_cell(sys, n_modes, phi_grid[c / n_area], area_grid[c % n_area], settings);
  return cells;
}

std::vector<TruncationResult> truncation_study(const StirapSystem& sys,
                                               std::span<const int> mode_counts,
                                               std::span<const double> phi_grid,
                                               std::span<const double> area_grid,
                                               const StirapSettings& settings) {
  if (mode_counts.empty()) throw DomainError("no mode counts given");
  for (int m : mode_counts) check_inputs(sys, m, phi_grid, area_grid);
  std::vector<TruncationResult> out;
  for (int m : mode_counts)
    out.push_back({m, scan_angle_area(sys, m, phi_grid, area_grid, settings)});
  return out;
}

std::vector<DistanceResult> distance_study(const DistanceStudySpec& spec,
                                           std::span<const double> d_grid,
                                           const StirapSettings& settings) {
  if (d_grid.empty()) throw DomainError("distance grid is empty");
  std::vector<DistanceResult> out;
  for (double d : d_grid) {
    if (!(d > 0.0)) throw DomainError("distances must be > 0");
    DistanceResult row;
    row.distance_nm = d;
    std::array<EmitterSpec, 2> emitters = spec.emitters;
    emitters[0].distance_nm = d;
    emitters[1].distance_nm = d;
    const ModeSelection sel = select_modes(spec.np, emitters, spec.threshold, spec.n_max);
    row.n_prime = sel.n_prime;
    row.clamped = sel.clamped;
    try {
      const StirapSystem sys =
          make_system(spec.np, emitters, sel.n_prime, spec.omega_grid, spec.coupling_scale);
      row.efficiency = stirap_efficiency(sys, sel.n_prime, spec.phi, spec.area, settings);
    } catch (const Error& e) {
      row.efficiency = std::numeric_limits<double>::quiet_NaN();
      row.status = status_of(e);
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace qplas
