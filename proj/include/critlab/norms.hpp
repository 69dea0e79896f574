#pragma once

#include <span>
#include <string>
#include <vector>

#include "critlab/spectral_field.hpp"

namespace critlab {

/// Integrability or summation exponent in [1, inf]; infinity is its own state,
/// never a sentinel float.
class Exponent {
 public:
  enum class Kind { finite, infinite };

  Exponent(double value);  // NOLINT(google-explicit-constructor): 2.0 reads as L^2
  static Exponent infinity() { return Exponent(Kind::infinite); }

  [[nodiscard]] bool is_infinite() const { return kind_ == Kind::infinite; }
  /// Finite value; throws for infinity.
  [[nodiscard]] double value() const;
  /// 1/p, with 1/inf = 0.
  [[nodiscard]] double reciprocal() const { return is_infinite() ? 0.0 : 1.0 / value_; }
  [[nodiscard]] std::string to_string() const;
  static Exponent parse(const std::string& text);

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  explicit Exponent(Kind k) : kind_(k) {}
  Kind kind_ = Kind::finite;
  double value_ = 1.0;
};

/// Homogeneous Besov index triple (s, p, r).
struct BesovSpec {
  double s = 0.0;
  Exponent p = 2.0;
  Exponent r = 1.0;
};

/// Hybrid index (s, r) with frequency threshold weight mu > 0 (L^2 based).
struct HybridSpec {
  double s = 0.0;
  Exponent r = 1.0;
  double weight = 1.0;
};

/// Rectangle-rule L^p norm with cell volume (2pi/M)^N; p = inf is the max.
double lp_norm(const PhysicalField& f, Exponent p);
double lp_norm(const SpectralField& f, Exponent p);
/// Pointwise Euclidean (Frobenius) magnitude, then L^p.
double lp_norm(const VectorField& v, Exponent p);
double lp_norm(const TensorField& t, Exponent p);

/// ||Delta_q u||_p for q in [q_min, q_max] of a field given by its components
/// (one component for a scalar; magnitudes are pointwise Euclidean).
std::vector<double> block_lp_norms(std::span<const SpectralField> components, Exponent p);
std::vector<double> block_lp_norms(const SpectralField& f, Exponent p);
std::vector<double> block_lp_norms(const VectorField& v, Exponent p);
std::vector<double> block_lp_norms(const TensorField& t, Exponent p);

struct BesovResult {
  double value = 0.0;
  int q_min = 0;
  /// ||Delta_q u||_p per block.
  std::vector<double> block_lp;
  /// 2^{qs} ||Delta_q u||_p per block.
  std::vector<double> weighted;
  /// Share of non-mean energy outside the retained blocks.
  double out_of_band = 0.0;

  [[nodiscard]] bool truncation_flagged() const { return out_of_band > 0.01; }
};

/// l^r over q of 2^{qs} * block_lp[q - q_min].
double combine_blocks(std::span<const double> block_lp, int q_min, double s, Exponent r,
                      std::vector<double>* weighted = nullptr);

BesovResult besov_norm(const SpectralField& f, const BesovSpec& spec);
BesovResult besov_norm(const VectorField& v, const BesovSpec& spec);
BesovResult besov_norm(const TensorField& t, const BesovSpec& spec);

/// Sum_q 2^{qs} max(mu, 2^{-q})^{1 - 2/r} ||Delta_q u||_{L^2}.
double hybrid_norm(const SpectralField& f, const HybridSpec& spec);
double hybrid_norm(const VectorField& v, const HybridSpec& spec);
double hybrid_norm(const TensorField& t, const HybridSpec& spec);
double hybrid_from_blocks(std::span<const double> block_l2, int q_min, const HybridSpec& spec);

/// Time samples of per-block L^p norms of one field.
struct NormSeries {
  int q_min = 0;
  std::vector<double> times;
  /// per_block_lp[n][q - q_min] = ||Delta_q u(times[n])||_p
  std::vector<std::vector<double>> per_block_lp;

  void append(double t, std::vector<double> block_lp);
  [[nodiscard]] std::size_t samples() const { return times.size(); }
  [[nodiscard]] std::size_t blocks() const {
    return per_block_lp.empty() ? 0 : per_block_lp.front().size();
  }
};

class NormSeriesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Chemin-Lerner norm: per block, trapezoid quadrature over [0, T] of
/// ||Delta_q u(t)||_p^k (per-block sup over samples when k = inf), then the
/// weighted l^r sum. The integrand is linearly interpolated at T when T falls
/// between samples.
double chemin_lerner_norm(const NormSeries& series, Exponent k, double s, Exponent r, double t_end);

/// L^k_T of the Besov norm: ( int_0^T ||u(t)||_{B^s_{p,r}}^k dt )^{1/k}.
double lebesgue_time_norm(const NormSeries& series, Exponent k, double s, Exponent r, double t_end);

/// Trapezoid rule for samples (t_i, y_i) over [t_0, t_end].
double trapezoid(std::span<const double> t, std::span<const double> y, double t_end);

}  // namespace critlab
