#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "critlab/estimate_verifier.hpp"
#include "critlab/operators.hpp"
#include "test_support.hpp"

using namespace critlab;
using critlab::testing::sampled;
using std::numbers::pi;

namespace {

const GridSpec g32 = make_grid(2, 32);
const GridSpec g64 = make_grid(2, 64);

EnsembleSpec small_ensemble(int count, double k_max = 8.0) {
  EnsembleSpec e;
  e.count = count;
  e.seed = 42;
  e.spectrum = {1.0, k_max, 1.0};
  return e;
}

SpectralField cos_x(const GridSpec& g, int k) {
  return sampled(g, [k](double x, double, double) { return std::cos(k * x); });
}

}  // namespace

TEST_CASE("ensemble runner is deterministic across thread counts") {
  auto fn = [](int i, Rng& rng) -> std::optional<double> {
    if (i == 3) return std::nullopt;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  };
  const auto one = run_ensemble(20, 5, 1, fn);
  const auto three = run_ensemble(20, 5, 3, fn);
  REQUIRE(one.size() == 20);
  CHECK(one == three);
  CHECK_FALSE(one[3].has_value());
  // Member i does not depend on the ensemble size.
  CHECK(run_ensemble(4, 5, 2, fn)[2] == one[2]);

  auto bad = [](int i, Rng&) -> std::optional<double> {
    if (i == 7) throw std::runtime_error("boom");
    return 1.0;
  };
  CHECK_THROWS_AS(run_ensemble(10, 1, 2, bad), std::runtime_error);
}

TEST_CASE("ratio report bookkeeping") {
  auto fn = [](int i, Rng&) -> std::optional<double> {
    if (i == 0) return std::nullopt;
    return 1.0 + 0.01 * i;
  };
  const RatioReport r = ratio_report("demo", {{"a", 1.0}}, small_ensemble(10), fn);
  CHECK(r.count == 10);
  CHECK(r.skipped == 1);
  CHECK(r.ratios.size() == 9);
  CHECK(r.min_ratio == doctest::Approx(1.01));
  CHECK(r.max_ratio == doctest::Approx(1.09));
  CHECK(r.doubled_max_ratio == doctest::Approx(1.19));
  CHECK(r.stable);

  const RatioReport tiny = ratio_report("demo", {}, small_ensemble(2), fn);
  CHECK_FALSE(tiny.stable);
  CHECK_THROWS_AS(ratio_report("demo", {}, small_ensemble(0), fn), std::invalid_argument);
}

TEST_CASE("Bernstein ratios") {
  // One mode with |k| = 1: both norms see the same single block.
  CHECK(*bernstein_ratio(cos_x(g32, 1), {0.0, 2.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(*bernstein_ratio(cos_x(g32, 2), {0.5, 2.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(bernstein_ratio(SpectralField(g32), {0.0, 2.0, 1.0}).has_value());

  for (double s : {0.0, 1.0}) {
    const RatioReport r = verify_bernstein({s, 2.0, 1.0}, small_ensemble(24, 10.0), g64);
    REQUIRE(r.bracket.has_value());
    CHECK(r.bracket_ok);
    CHECK(r.min_ratio >= 0.75);
    CHECK(r.max_ratio <= 8.0 / 3.0);
    CHECK(r.stable);
  }
  const GridSpec g3 = make_grid(3, 16);
  const RatioReport r3 = verify_bernstein({1.5, 2.0, 1.0}, small_ensemble(12, 5.0), g3);
  CHECK(r3.bracket_ok);

  const RatioReport r4 = verify_bernstein({0.0, 4.0, 1.0}, small_ensemble(12), g32);
  CHECK_FALSE(r4.bracket.has_value());
  CHECK(r4.max_ratio > 0.0);
}

TEST_CASE("product laws") {
  // cos x1 cos x2 sits in block 0 with L^2 norm pi; each factor has norm pi sqrt 2.
  const SpectralField u = cos_x(g32, 1);
  const SpectralField v = sampled(g32, [](double, double y, double) { return std::cos(y); });
  CHECK(*product_ratio(ProductLaw::besov, u, v, 0.5, 0.5, 2.0) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-12));
  CHECK(*product_ratio(ProductLaw::besov_weak, u, v, 0.5, 0.5, 2.0) ==
        doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-12));
  CHECK_FALSE(product_ratio(ProductLaw::besov, SpectralField(g32), v, 0.5, 0.5, 2.0).has_value());

  CHECK_THROWS_AS(check_product_indices(ProductLaw::besov, 1.5, 0.5, 2.0, 2), IndexConditionError);
  CHECK_THROWS_AS(check_product_indices(ProductLaw::besov, -0.5, 0.5, 2.0, 2), IndexConditionError);
  CHECK_NOTHROW(check_product_indices(ProductLaw::besov, 1.0, 1.0, 2.0, 2));
  CHECK_THROWS_AS(check_product_indices(ProductLaw::besov_weak, 0.5, 1.0, 2.0, 2), IndexConditionError);
  CHECK_NOTHROW(check_product_indices(ProductLaw::besov_weak, 0.5, -0.5, 2.0, 2));
  CHECK_THROWS_AS(verify_product_laws(ProductLaw::besov, 2.0, 0.0, 2.0, small_ensemble(4), g32),
                  IndexConditionError);

  for (auto law : {ProductLaw::besov, ProductLaw::chemin_lerner_weak})
    for (auto pairing : {ProductPairing::independent, ProductPairing::self, ProductPairing::disjoint_shells}) {
      const RatioReport r = verify_product_laws(law, 0.5, 0.5, 2.0, small_ensemble(12), g64, pairing);
      CAPTURE(r.name);
      CHECK(r.skipped == 0);
      CHECK(std::isfinite(r.max_ratio));
      CHECK(r.max_ratio > 0.0);
      CHECK(r.min_ratio <= r.max_ratio);
    }
}

TEST_CASE("log interpolation") {
  // Single block q = 1: every norm is 2^{qs} b, so the ratio is eps / log(e + 2^{-eps} + 2^{eps}).
  for (double eps : {0.25, 1.0}) {
    const auto orbit = heat_orbit(cos_x(g32, 2), 0.05, 11);
    const double expected = eps / std::log(std::exp(1.0) + std::pow(2.0, -eps) + std::pow(2.0, eps));
    CHECK(*log_interpolation_ratio(orbit, 0.05, 1.0, eps, 2.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(*log_interpolation_ratio(orbit, 0.05, 0.3, eps, Exponent::infinity()) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  const auto zero = heat_orbit(SpectralField(g32), 0.05, 3);
  CHECK_FALSE(log_interpolation_ratio(zero, 0.05, 1.0, 0.5, 2.0).has_value());
  CHECK_THROWS_AS(log_interpolation_ratio(zero, 0.05, 1.0, 0.0, 2.0), std::invalid_argument);

  // Heat orbit decays mode by mode.
  const auto orbit = heat_orbit(cos_x(g32, 3), 0.1, 2);
  CHECK(orbit[1].at({3, 0, 0}).real() == doctest::Approx(0.5 * std::exp(-0.9)).epsilon(1e-14));

  const RatioReport flat = verify_log_interpolation(small_ensemble(12, 10.0), 1.0, 0.5, g64);
  EnsembleSpec slow = small_ensemble(12, 10.0);
  slow.spectrum.decay = 0.0;
  const RatioReport broad = verify_log_interpolation(slow, 1.0, 0.5, g64);
  CHECK(flat.max_ratio > 0.0);
  CHECK(broad.max_ratio > 0.0);
}

TEST_CASE("commutator") {
  // Constant A commutes with every block.
  const SpectralField B = cos_x(g32, 1) + sampled(g32, [](double, double y, double) { return std::sin(2 * y); });
  for (double b : commutator_blocks(SpectralField::constant(g32, 2.0), B, 1.0, 1.0, 2.0)) CHECK(b <= 1e-14);
  CHECK_FALSE(commutator_ratio(SpectralField::constant(g32, 2.0), B, 1.0, 1.0, 2.0).has_value());

  // A = B = cos x1: div(A grad B) = -cos 2x1 lives in block 1, grad B in block 0.
  const auto blocks = commutator_blocks(cos_x(g32, 1), cos_x(g32, 1), 1.0, 1.0, 2.0);
  REQUIRE(blocks.size() >= 3);
  CHECK(blocks[0] == doctest::Approx(pi * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(blocks[1] == doctest::Approx(pi * std::sqrt(2.0) / 2.0).epsilon(1e-12));
  for (std::size_t q = 2; q < blocks.size(); ++q) CHECK(blocks[q] <= 1e-13);

  CHECK_THROWS_AS(check_commutator_indices(0.5, 1.0, 2.0, 2), IndexConditionError);
  CHECK_THROWS_AS(check_commutator_indices(1.0, 2.5, 2.0, 2), IndexConditionError);
  CHECK_THROWS_AS(check_commutator_indices(1.0, 0.0, 2.0, 2), IndexConditionError);
  CHECK_NOTHROW(check_commutator_indices(2.0, -0.5, 2.0, 2));

  const RatioReport r = verify_commutator(small_ensemble(12), 1.0, 1.0, 2.0, g64);
  CHECK(r.skipped == 0);
  CHECK(r.max_ratio > 0.0);
  CHECK(r.stable);
}

TEST_CASE("scaling invariance") {
  // Broadband tuple below half the retained band.
  FluidState s = make_initial_data(InitialFamily::exact_gradient, 0.1, 3, g64, 5.0).first;
  Rng rng(9);
  s.sigma = random_field(g64, {1.0, 5.0, 1.0}, rng);
  s.pressure_grad = gradient(random_field(g64, {1.0, 5.0, 1.0}, rng));

  const ScalingReport zero = verify_scaling(s, 0);
  for (const auto& e : zero.entries) CHECK(e.relative_error == 0.0);

  const ScalingReport one = verify_scaling(s, 1);
  REQUIRE(one.entries.size() == 4);
  CHECK(one.passed());
  for (const auto& e : one.entries) {
    CAPTURE(e.field);
    CHECK(e.original > 0.0);
    CHECK(e.relative_error <= 1e-10);
  }

  // Single-block data: a pure index shift.
  FluidState b = FluidState::zeros(g64);
  b.sigma = cos_x(g64, 2);
  b.velocity[1] = cos_x(g64, 4);
  b.H(0, 1) = cos_x(g64, 1);
  b.pressure_grad[0] = cos_x(g64, 4);
  const ScalingReport sb = verify_scaling(b, 1);
  for (const auto& e : sb.entries) CHECK(e.relative_error <= 1e-12);
  const ScalingReport sb4 = verify_scaling(b, 1, 4.0);
  CHECK(sb4.passed());

  CHECK_THROWS_AS(verify_scaling(s, 2), RescaleError);
  b.sigma = cos_x(g64, 8);
  CHECK_THROWS_AS(verify_scaling(b, 1), RescaleError);
}

TEST_CASE("smallness experiment") {
  const PhysicalParams p;
  SmallnessOptions opts;
  opts.dt = 0.05;
  const SmallnessTable t = smallness_experiment({0.0, 1e-3, 1e-2}, 1.0, g32, p, opts);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].completed);
  CHECK(t.rows[0].h_ratio == 0.0);
  CHECK(t.rows[0].pressure_ratio == 0.0);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(t.rows[i].completed);
    CHECK(std::abs(t.rows[i].achieved_alpha - t.rows[i].alpha) <= 0.01 * t.rows[i].alpha);
  }
  CHECK(t.h_ratio_spread < 2.0);
  CHECK(t.pressure_slope == doctest::Approx(2.0).epsilon(0.15));

  // alpha of the general family is not linear in the amplitude; bisection still hits it.
  SmallnessOptions gen = opts;
  gen.family = InitialFamily::general;
  const SmallnessTable tg = smallness_experiment({0.5}, 0.1, g32, p, gen);
  CHECK(std::abs(tg.rows[0].achieved_alpha - 0.5) <= 0.005);

  // A failing run is recorded, not thrown.
  SmallnessOptions coarse = opts;
  coarse.dt = 0.5;
  const SmallnessTable bad = smallness_experiment({50.0}, 1.0, g32, p, coarse);
  CHECK_FALSE(bad.rows[0].completed);
  CHECK_FALSE(bad.rows[0].error.empty());
  CHECK_THROWS_AS(smallness_experiment({-1.0}, 1.0, g32, p, opts), std::invalid_argument);
}

TEST_CASE("refinement study") {
  const FluidState s0 = make_initial_data(InitialFamily::exact_gradient, 1e-2, 7, g32).first;
  const RefinementStudy r = refinement_study(s0, PhysicalParams{}, 0.5, 0.05, 3);
  REQUIRE(r.state_gaps.size() == 2);
  CHECK(r.dts[1] == doctest::Approx(0.025));
  CHECK(RefinementStudy::min_ratio(r.state_gaps) >= 3.0);
  CHECK(RefinementStudy::min_ratio(r.deformation_gaps) >= 3.0);
  CHECK(RefinementStudy::min_ratio(r.perturbation_gaps) >= 3.0);
  CHECK(r.max_divergence <= 1e-10);
  CHECK_THROWS_AS(refinement_study(s0, PhysicalParams{}, 0.5, 0.05, 1), std::invalid_argument);
}

TEST_CASE("report files") {
  const auto dir = std::filesystem::temp_directory_path() / "critlab_reports_test";
  std::filesystem::create_directories(dir);
  std::vector<RatioReport> reports{verify_bernstein({0.0, 2.0, 1.0}, small_ensemble(10), g32),
                                   verify_commutator(small_ensemble(2), 1.0, 1.0, 2.0, g32)};
  write_reports_csv(dir / "r.csv", reports);
  write_reports_json(dir / "r.json", reports);

  std::ifstream csv(dir / "r.csv");
  std::string header, line;
  std::getline(csv, header);
  CHECK(header.rfind("experiment,params,count", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2);

  std::ifstream js(dir / "r.json");
  const auto doc = nlohmann::json::parse(js);
  REQUIRE(doc.size() == 2);
  CHECK(doc[0]["experiment"] == "bernstein");
  CHECK(doc[0]["params"]["s"] == 0.0);
  CHECK(doc[0]["max_ratio"].get<double>() == reports[0].max_ratio);
  CHECK(doc[1]["stable"] == false);

  SmallnessTable t;
  t.rows.push_back({1e-3, 5e-4, 1e-3, 1.0, 2.0, 3.0, 4.0, true, ""});
  write_smallness_csv(dir / "s.csv", t);
  CHECK(std::filesystem::file_size(dir / "s.csv") > 0);
  CHECK_THROWS_AS(write_reports_csv(dir / "missing" / "x.csv", reports), std::runtime_error);
  std::filesystem::remove_all(dir);
}
