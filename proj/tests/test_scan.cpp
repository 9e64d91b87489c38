#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <omp.h>

#include "qplas/error.hpp"
#include "qplas/scan.hpp"
#include "qplas/units.hpp"

using namespace qplas;

namespace {

constexpr double kPi = std::numbers::pi;

const StirapSystem& small_system() {
  static const StirapSystem sys = [] {
    EmitterSpec a, b;
    a.distance_nm = 2.0;
    b.distance_nm = 4.0;
    const auto grid = linear_grid(2.0, 3.0, 4001);
    return make_system(NanoparticleModel{}, {a, b}, 9, grid, 0.1);
  }();
  return sys;
}

StirapSettings quick_settings() {
  StirapSettings s;
  s.width_T = units::ns_to_internal(1.0);
  return s;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

const std::vector<double> kPhis{0.0, kPi / 4, kPi / 2, kPi};
const std::vector<double> kAreas{20.0, 40.0, 60.0};

}  // namespace

TEST_CASE("parallel scan is bitwise identical to the serial reference") {
  const auto serial = scan_angle_area_serial(small_system(), 7, kPhis, kAreas, quick_settings());
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    const auto par = scan_angle_area(small_system(), 7, kPhis, kAreas, quick_settings());
    REQUIRE(par.size() == serial.size());
    for (std::size_t c = 0; c < par.size(); ++c) {
      CHECK(same_bits(par[c].efficiency, serial[c].efficiency));
      CHECK(par[c].phi == serial[c].phi);
      CHECK(par[c].area == serial[c].area);
      CHECK(par[c].status == "ok");
    }
  }
  // Row-major, phi outer.
  CHECK(serial[1].phi == 0.0);
  CHECK(serial[1].area == 40.0);
  CHECK(serial[3].phi == kPi / 4);
  for (const auto& c : serial) {
    CHECK(c.efficiency >= 0.0);
    CHECK(c.efficiency <= 1.0);
  }
  // Each cell equals a standalone run.
  CHECK(same_bits(serial[4].efficiency, stirap_efficiency(small_system(), 7, kPi / 4, 40.0, quick_settings())));
}

TEST_CASE("failed cells are recorded and the scan continues") {
  auto starved = quick_settings();
  starved.prop.max_steps = 5;
  const std::vector<double> areas{0.0, 40.0};
  const auto cells = scan_angle_area(small_system(), 3, kPhis, areas, starved);
  const auto serial = scan_angle_area_serial(small_system(), 3, kPhis, areas, starved);
  REQUIRE(cells.size() == 8);
  int failed = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CHECK(cells[c].status == serial[c].status);
    if (cells[c].status != "ok") {
      ++failed;
      CHECK(cells[c].status == "propagation_error");
      CHECK(std::isnan(cells[c].efficiency));
    }
  }
  CHECK(failed >= 4);
}

TEST_CASE("truncation study keeps the leading modes") {
  const std::vector<int> counts{1, 3, 9};
  const std::vector<double> phis{kPi};
  const std::vector<double> areas{40.0};
  const auto study = truncation_study(small_system(), counts, phis, areas, quick_settings());
  REQUIRE(study.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(study[k].mode_count == counts[k]);
    CHECK(same_bits(study[k].cells[0].efficiency,
                    stirap_efficiency(small_system(), counts[k], kPi, 40.0, quick_settings())));
  }
  const std::vector<int> too_many{1, 10};
  CHECK_THROWS_AS(truncation_study(small_system(), too_many, phis, areas, quick_settings()), DomainError);
  const std::vector<int> zero{0};
  CHECK_THROWS_AS(truncation_study(small_system(), zero, phis, areas, quick_settings()), DomainError);
  CHECK_THROWS_AS(truncation_study(small_system(), std::vector<int>{}, phis, areas, quick_settings()), DomainError);
}

TEST_CASE("empty or invalid grids are rejected") {
  const std::vector<double> none;
  CHECK_THROWS_AS(scan_angle_area(small_system(), 3, none, kAreas, quick_settings()), DomainError);
  CHECK_THROWS_AS(scan_angle_area_serial(small_system(), 3, kPhis, none, quick_settings()), DomainError);
  CHECK_THROWS_AS(scan_angle_area(small_system(), 12, kPhis, kAreas, quick_settings()), DomainError);
}

TEST_CASE("distance study selects more modes close to the surface") {
  DistanceStudySpec spec;
  spec.omega_grid = linear_grid(2.0, 3.0, 4001);
  spec.phi = kPi;
  spec.area = 40.0;
  const std::vector<double> d{2.0, 7.0, 80.0};
  const auto rows = distance_study(spec, d, quick_settings());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].n_prime > rows[1].n_prime);
  CHECK(rows[1].n_prime > rows[2].n_prime);
  CHECK(rows[0].n_prime >= 22);
  CHECK(rows[0].n_prime <= 28);
  for (const auto& r : rows) {
    CHECK(r.status == "ok");
    CHECK_FALSE(r.clamped);
    CHECK(r.efficiency >= 0.0);
    CHECK(r.efficiency <= 1.0);
  }
  CHECK_THROWS_AS(distance_study(spec, std::vector<double>{}, quick_settings()), DomainError);
  CHECK_THROWS_AS(distance_study(spec, std::vector<double>{-1.0}, quick_settings()), DomainError);
}
