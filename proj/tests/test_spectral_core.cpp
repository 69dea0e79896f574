#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "critlab/fft.hpp"
#include "critlab/grid.hpp"
#include "critlab/littlewood_paley.hpp"
#include "critlab/operators.hpp"
#include "critlab/random_fields.hpp"
#include "critlab/snapshot.hpp"
#include "test_support.hpp"

using namespace critlab;
using critlab::testing::max_diff;
using critlab::testing::sampled;

TEST_CASE("make_grid validates and computes the dyadic range") {
  const GridSpec g = make_grid(2, 64);
  CHECK(g.q_min == 0);
  CHECK(g.q_max == 3);  // 8/3 * 2^q <= 64/3 gives 2^q <= 8
  CHECK(g.size() == 64u * 64u);
  CHECK(g.nyquist() == 32);
  CHECK(make_grid(2, 16).q_max == 1);
  CHECK(make_grid(3, 32).q_max == 2);
  CHECK_THROWS_AS(make_grid(3, 15), GridError);
  CHECK_THROWS_AS(make_grid(3, 8), GridError);
  CHECK_THROWS_AS(make_grid(4, 16), GridError);
  CHECK_THROWS_AS(make_grid(1, 16), GridError);
}

TEST_CASE("wavenumber table covers [-M/2, M/2) per axis") {
  const GridSpec g = make_grid(2, 16);
  const auto& tab = modes(g);
  int lo = 0, hi = 0;
  for (const auto& k : tab.k) {
    lo = std::min(lo, k[1]);
    hi = std::max(hi, k[1]);
  }
  CHECK(lo == -8);
  CHECK(hi == 7);
  CHECK(mode_index(g, {-1, 3, 0}) == 15u * 16u + 3u);
}

TEST_CASE("forward transform normalization") {
  for (int dim : {2, 3}) {
    const GridSpec g = make_grid(dim, 16);
    const SpectralField c = sampled(g, [](double, double, double) { return 3.5; });
    CHECK(c[0].real() == doctest::Approx(3.5).epsilon(1e-14));
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(c[i]) < 1e-14);

    const SpectralField cx = sampled(g, [](double x, double, double) { return std::cos(x); });
    CHECK(std::abs(cx.at({1, 0, 0}) - Complex(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(cx.at({-1, 0, 0}) - Complex(0.5, 0.0)) < 1e-14);
    double rest = 0.0;
    for (std::size_t i = 0; i < cx.size(); ++i) rest += std::norm(cx[i]);
    CHECK(rest == doctest::Approx(0.5).epsilon(1e-13));
  }
}

TEST_CASE("transform round trip and Hermitian symmetry") {
  const GridSpec g = make_grid(3, 16);
  Rng rng(7);
  std::normal_distribution<double> gauss;
  PhysicalField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = gauss(rng);
  const SpectralField s = forward_transform(f);
  CHECK(s.hermitian_defect() <= 1e-12 * std::sqrt(s.energy()));
  const PhysicalField back = inverse_transform(s);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
  CHECK(err <= 1e-12 * f.max_abs());
  CHECK_THROWS_AS(PhysicalField(g, std::vector<double>(10)), GridError);
}

TEST_CASE("derivative") {
  const GridSpec g = make_grid(2, 32);
  const auto sinx = sampled(g, [](double x, double, double) { return std::sin(x); });
  const auto cosx = sampled(g, [](double x, double, double) { return std::cos(x); });
  CHECK(max_diff(derivative(sinx, 0), cosx) < 1e-14);
  CHECK(derivative(SpectralField::constant(g, 2.0), 1).is_zero());
  const auto cos2y = sampled(g, [](double, double y, double) { return std::cos(2 * y); });
  const auto expect = sampled(g, [](double, double y, double) { return -2 * std::sin(2 * y); });
  CHECK(max_diff(derivative(cos2y, 1), expect) < 1e-14);

  SpectralField nyq(g);
  nyq.at({-16, 0, 0}) = 1.0;
  CHECK(derivative(nyq, 0).is_zero());
  CHECK_THROWS(derivative(nyq, 2));
}

TEST_CASE("lambda powers") {
  const GridSpec g = make_grid(2, 32);
  const auto cosx = sampled(g, [](double x, double, double) { return std::cos(x); });
  CHECK(max_diff(lambda_power(cosx, 2.0), cosx) < 1e-14);
  const auto cos2x = sampled(g, [](double x, double, double) { return std::cos(2 * x); });
  CHECK(max_diff(lambda_power(cos2x, 1.0), 2.0 * cos2x) < 1e-14);

  Rng rng(3);
  const auto f = random_field(g, {1.0, 8.0, 0.5}, rng);
  CHECK(max_diff(lambda_power(lambda_power(f, 1.0), -1.0), f) < 1e-13);
  SpectralField with_mean = f;
  with_mean[0] = 4.0;
  CHECK(lambda_power(with_mean, -1.0)[0] == Complex{});
  CHECK(lambda_power(with_mean, 0.0)[0] == Complex(4.0));
}

TEST_CASE("Leray projection") {
  const GridSpec g = make_grid(2, 32);
  const auto psi = sampled(g, [](double x, double y, double) { return std::cos(x + y); });
  CHECK(testing::coeff_norm(leray_project(gradient(psi))) < 1e-14);

  // v = (sin y + d1 psi, d2 psi) splits into (sin y, 0) plus a gradient.
  auto siny = sampled(g, [](double, double y, double) { return std::sin(y); });
  VectorField v{siny + derivative(psi, 0), derivative(psi, 1)};
  const VectorField p = leray_project(v);
  CHECK(max_diff(p[0], siny) < 1e-14);
  CHECK(testing::coeff_norm(p[1]) < 1e-14);

  Rng rng(11);
  const auto w = random_vector_field(g, {1.0, 10.0, 1.0}, rng);
  const auto pw = leray_project(w);
  CHECK(testing::coeff_norm(divergence(pw)) <= 1e-12 * testing::coeff_norm(w));
  CHECK(max_diff(leray_project(pw), pw) < 1e-14);

  VectorField with_mean = pw;
  with_mean[0][0] = 0.3;
  CHECK(leray_project(with_mean)[0][0] == Complex(0.3));

  VectorField bad{siny, SpectralField(make_grid(2, 16))};
  CHECK_THROWS_AS(leray_project(bad), GridError);
}

TEST_CASE("dealiasing") {
  const GridSpec g = make_grid(2, 16);
  Rng rng(5);
  const auto f = random_field(g, {1.0, 5.0, 0.0}, rng);
  CHECK(max_diff(dealias(f), f) == 0.0);

  SpectralField hi(g);
  hi.at({7, 0, 0}) = 1.0;
  hi.at({-7, 0, 0}) = 1.0;
  CHECK(dealias(hi).is_zero());
}

TEST_CASE("dealiased product equals exact convolution on the retained band") {
  const GridSpec g = make_grid(2, 16);
  Rng rng(9);
  const auto u = random_field(g, {1.0, 7.5, 0.0}, rng);
  const auto v = random_field(g, {1.0, 7.5, 0.0}, rng);
  const SpectralField prod = multiply(u, v);
  const auto& tab = modes(g);
  const int cut = g.dealias_cutoff();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& k = tab.k[i];
    const bool kept = std::abs(k[0]) <= cut && std::abs(k[1]) <= cut;
    Complex conv{};
    if (kept) {
      for (std::size_t a = 0; a < g.size(); ++a) {
        const auto& ka = tab.k[a];
        const int bx = k[0] - ka[0], by = k[1] - ka[1];
        if (std::abs(bx) > cut || std::abs(by) > cut) continue;
        conv += u[a] * v.at({bx, by, 0});
      }
    }
    worst = std::max(worst, std::abs(prod[i] - conv));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("partition profile") {
  const PartitionProfile phi;
  CHECK(phi(0.74) == 0.0);
  CHECK(phi(0.75) == 0.0);
  CHECK(phi(2.7) == 0.0);
  CHECK(phi(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(phi(2.0) == 0.0);
  for (double rho = 0.01; rho < 300.0; rho *= 1.0137) CHECK(std::abs(phi.dyadic_sum(rho) - 1.0) < 1e-12);

  const GridSpec g = make_grid(2, 64);
  const auto& tab = modes(g);
  for (std::size_t i = 1; i < g.size(); ++i) REQUIRE(std::abs(phi.dyadic_sum(tab.norm[i]) - 1.0) < 1e-12);
}

TEST_CASE("dyadic blocks: support, reconstruction, near orthogonality") {
  const GridSpec g = make_grid(2, 64);
  Rng rng(21);
  auto u = random_field(g, {1.0, g.retained_radius(), 0.5}, rng);
  u[0] = 0.7;
  const DyadicBlocks blocks = dyadic_decompose(u);
  const auto& tab = modes(g);
  for (int q = blocks.q_min; q <= blocks.q_max; ++q) {
    const auto& b = blocks.at(q);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (b[i] == Complex{}) continue;
      CHECK(tab.norm[i] >= 0.75 * std::ldexp(1.0, q));
      CHECK(tab.norm[i] <= 8.0 / 3.0 * std::ldexp(1.0, q));
    }
  }
  CHECK(max_diff(blocks.reconstruct(), u) <= 1e-10 * testing::coeff_norm(u));
  CHECK(blocks.mean == doctest::Approx(0.7));

  for (int q = g.q_min; q <= g.q_max; ++q)
    for (int k = g.q_min; k <= g.q_max; ++k)
      if (std::abs(q - k) >= 2) CHECK(dyadic_block(dyadic_block(u, q), k).is_zero());

  for (int q = g.q_min; q <= g.q_max; ++q) {
    CHECK(max_diff(dyadic_block(derivative(u, 0), q), derivative(dyadic_block(u, q), 0)) < 1e-15);
    CHECK(max_diff(dyadic_block(lambda_power(u, 1.5), q), lambda_power(dyadic_block(u, q), 1.5)) < 1e-14);
  }
}

TEST_CASE("power-of-two radii sit in a single block") {
  const GridSpec g = make_grid(2, 64);
  const auto cos2x = sampled(g, [](double x, double, double) { return std::cos(2 * x); });
  const auto blocks = dyadic_decompose(cos2x);
  for (int q = g.q_min; q <= g.q_max; ++q) {
    if (q == 1) {
      CHECK(max_diff(blocks.at(q), cos2x) < 1e-15);
    } else {
      CHECK(testing::coeff_norm(blocks.at(q)) < 1e-15);
    }
  }
  const auto cosx = sampled(g, [](double x, double, double) { return std::cos(x); });
  CHECK(max_diff(dyadic_block(cosx, 0), cosx) < 1e-15);
}

TEST_CASE("low frequency cutoff") {
  const GridSpec g = make_grid(2, 64);
  Rng rng(2);
  auto u = random_field(g, {1.0, 12.0, 0.0}, rng);
  u[0] = -1.25;
  SpectralField expect = SpectralField::constant(g, -1.25);
  for (int q = 0; q < 2; ++q) expect += dyadic_block(u, q);
  CHECK(max_diff(low_freq_cutoff(u, 2), expect) < 1e-15);
  CHECK(max_diff(low_freq_cutoff(u, g.q_min), SpectralField::constant(g, -1.25)) < 1e-15);
}

TEST_CASE("rescale") {
  const GridSpec g = make_grid(2, 64);
  const auto cosx = sampled(g, [](double x, double, double) { return std::cos(x); });
  const auto cos2x = sampled(g, [](double x, double, double) { return std::cos(2 * x); });
  CHECK(max_diff(rescale(cosx, 1), cos2x) < 1e-15);
  CHECK(max_diff(rescale(cosx, 0), cosx) == 0.0);

  Rng rng(4);
  const auto u = random_field(g, {1.0, 6.0, 0.0}, rng);
  CHECK(max_diff(rescale(rescale(u, 2), -2), u) == 0.0);
  CHECK_THROWS_AS(rescale(u, 3), RescaleError);
  CHECK_THROWS_AS(rescale(u, -1), RescaleError);
}

TEST_CASE("snapshot round trip and malformed input") {
  const GridSpec g = make_grid(2, 16);
  Rng rng(8);
  Snapshot snap;
  snap.add("a", random_field(g, {1.0, 5.0, 0.0}, rng));
  snap.add("b", inverse_transform(random_field(g, {1.0, 5.0, 0.0}, rng)));
  const auto dir = std::filesystem::temp_directory_path() / "critlab_snapshot_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "snap.bin";
  write_snapshot(path, snap);

  std::ifstream raw(path, std::ios::binary);
  std::string header;
  std::getline(raw, header);
  CHECK(header == R"({"dim":2,"M":16,"fields":["a","b"],"layout":"row-major","scalar":"float64-le"})");
  CHECK(std::filesystem::file_size(path) == header.size() + 1 + 2 * 16 * 16 * 8);

  const Snapshot back = read_snapshot(path);
  REQUIRE(back.names == snap.names);
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.fields[f][i] == snap.fields[f][i]);

  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  CHECK_THROWS_AS(read_snapshot(path), SnapshotError);
  {
    std::ofstream bad(path);
    bad << "not json\n";
  }
  CHECK_THROWS_AS(read_snapshot(path), SnapshotError);
  CHECK_THROWS_AS(read_snapshot(dir / "missing.bin"), SnapshotError);
  std::filesystem::remove_all(dir);
}
