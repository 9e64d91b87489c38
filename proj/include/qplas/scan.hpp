#pragma once

// Parameter scans over (phi, pulse area), mode truncation and emitter
// distance. Cells are independent and evaluated in parallel; every parallel
// scan has a serial reference with bitwise identical output.

#include <span>
#include <string>
#include <vector>

#include "qplas/system.hpp"

namespace qplas {

struct ScanCell {
  double phi = 0.0;
  double area = 0.0;
  double efficiency = 0.0;  // NaN when the cell failed
  std::string status = "ok";
};

/// Row-major over phi (outer) and area (inner). Per-cell failures are
/// recorded in `status` and the scan continues.
std::vector<ScanCell> scan_angle_area(const StirapSystem& sys, int n_modes,
                                      std::span<const double> phi_grid,
                                      std::span<const double> area_grid,
                                      const StirapSettings& settings);

std::vector<ScanCell> scan_angle_area_serial(const StirapSystem& sys, int n_modes,
                                             std::span<const double> phi_grid,
                                             std::span<const double> area_grid,
                                             const StirapSettings& settings);

struct TruncationResult {
  int mode_count = 0;
  std::vector<ScanCell> cells;
};

/// One scan per mode count m, each keeping modes 1..m of the table.
std::vector<TruncationResult> truncation_study(const StirapSystem& sys,
                                               std::span<const int> mode_counts,
                                               std::span<const double> phi_grid,
                                               std::span<const double> area_grid,
                                               const StirapSettings& settings);

struct DistanceStudySpec {
  NanoparticleModel np;
  std::array<EmitterSpec, 2> emitters;  // distances are overwritten per point
  std::vector<double> omega_grid;
  double coupling_scale = 0.1;
  double threshold = 0.0025;
  int n_max = 40;
  double phi = 0.0;
  double area = 90.0;
};

struct DistanceResult {
  double distance_nm = 0.0;
  int n_prime = 0;
  bool clamped = false;
  double efficiency = 0.0;
  std::string status = "ok";
};

/// Both emitters at distance d; n' from select_modes, then one STIRAP run.
std::vector<DistanceResult> distance_study(const DistanceStudySpec& spec,
                                           std::span<const double> d_grid,
                                           const StirapSettings& settings);

}  // namespace qplas
