#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "critlab/norms.hpp"
#include "critlab/oldroyd.hpp"
#include "critlab/random_fields.hpp"

namespace critlab {

/// Member i of an ensemble draws from Rng(seed + i), so a member does not
/// depend on the count or the thread layout.
struct EnsembleSpec {
  int count = 64;
  std::uint64_t seed = 1;
  RandomSpectrum spectrum{1.0, 8.0, 1.0};
  int threads = 1;

  void validate() const;
};

/// Ensembles below this size are never flagged stable.
inline constexpr int kMinStableCount = 10;

struct RatioReport {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  int count = 0;
  /// Members skipped by a 0/0 guard.
  int skipped = 0;
  /// Max over the doubled ensemble (members 0 .. 2 count - 1).
  double doubled_max_ratio = 0.0;
  bool stable = false;
  /// Hard bracket, when the inequality has a known sharp one.
  std::optional<std::pair<double, double>> bracket;
  bool bracket_ok = true;
  std::vector<double> ratios;

  [[nodiscard]] bool passed() const { return stable && bracket_ok; }
};

class IndexConditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluates fn(i, rng) for i in [0, count) on up to `threads` threads. Empty
/// results are skipped; the output keeps member order.
std::vector<std::optional<double>> run_ensemble(int count, std::uint64_t seed, int threads,
                                                const std::function<std::optional<double>(int, Rng&)>& fn);

/// Builds a report from a member function: max/min over `count` members,
/// stability against 2 * count members.
RatioReport ratio_report(std::string name, std::vector<std::pair<std::string, double>> params,
                         const EnsembleSpec& ens, const std::function<std::optional<double>(int, Rng&)>& fn);

/// ||grad u||_{B^{s-1}_{p,r}} / ||u||_{B^s_{p,r}}; hard bracket [3/4, 8/3] for p = 2.
RatioReport verify_bernstein(const BesovSpec& spec, const EnsembleSpec& ens, const GridSpec& grid);
std::optional<double> bernstein_ratio(const SpectralField& u, const BesovSpec& spec);

enum class ProductLaw {
  /// ||uv||_{B^{s1+s2-N/p}_{p,1}} <= C ||u||_{B^{s1}_{p,1}} ||v||_{B^{s2}_{p,1}}
  besov,
  /// ||uv||_{B^{s1+s2-N/p}_{p,inf}} <= C ||u||_{B^{s1}_{p,1}} ||v||_{B^{s2}_{p,inf}}
  besov_weak,
  /// Chemin-Lerner forms of the two laws, L~^1 <= L~^2 x L~^2.
  chemin_lerner,
  chemin_lerner_weak,
};

enum class ProductPairing { independent, self, disjoint_shells };

std::string to_string(ProductLaw law);
std::string to_string(ProductPairing pairing);

/// Throws IndexConditionError when (s1, s2, p) lie outside the admissible range.
void check_product_indices(ProductLaw law, double s1, double s2, double p, int dim);

std::optional<double> product_ratio(ProductLaw law, const SpectralField& u, const SpectralField& v, double s1,
                                    double s2, double p);

RatioReport verify_product_laws(ProductLaw law, double s1, double s2, double p, const EnsembleSpec& ens,
                                const GridSpec& grid, ProductPairing pairing = ProductPairing::independent);

/// Samples of e^{t Laplacian} u on [0, t_end].
std::vector<SpectralField> heat_orbit(const SpectralField& u, double t_end, int samples);

/// ||f||_{L~^k(B^s_{2,1})} eps / (||f||_{L~^k(B^s_{2,inf})} log(e + (||f||_{s-eps,inf} + ||f||_{s+eps,inf}) / ||f||_{s,inf})).
std::optional<double> log_interpolation_ratio(const std::vector<SpectralField>& orbit, double t_end, double s,
                                              double eps, Exponent k);

RatioReport verify_log_interpolation(const EnsembleSpec& ens, double s, double eps, const GridSpec& grid,
                                     Exponent k = 2.0);

/// Throws IndexConditionError outside t <= N/p + 1, 1 <= s <= N/p + 1, s + t > 1.
void check_commutator_indices(double s, double t, double p, int dim);

/// Per block q: ||div(A Delta_q grad B) - Delta_q div(A grad B)||_{L^p} 2^{q(s + t - 2 - N/p)}.
std::vector<double> commutator_blocks(const SpectralField& A, const SpectralField& B, double s, double t, double p);

/// Sum of the weighted blocks over ||grad A||_{B^{s-1}_{p,1}} ||grad B||_{B^{t-1}_{p,1}}.
std::optional<double> commutator_ratio(const SpectralField& A, const SpectralField& B, double s, double t, double p);

RatioReport verify_commutator(const EnsembleSpec& ens, double s, double t, double p, const GridSpec& grid);

struct ScalingEntry {
  std::string field;
  double original = 0.0;
  /// Critical norm of the rescaled field, with the cell factor 2^{-mN/p} and,
  /// for grad P, the time factor 2^{-2m} of L^1_T.
  double rescaled = 0.0;
  double relative_error = 0.0;
};

struct ScalingReport {
  int m = 0;
  double p = 2.0;
  std::vector<ScalingEntry> entries;
  double tolerance = 1e-10;

  [[nodiscard]] bool passed() const;
};

/// Applies sigma(x) -> sigma(l x), v -> l v(l x), H -> H(l x), grad P -> l^3 grad P(l x)
/// with l = 2^m and compares critical norms. Throws RescaleError when a dilated
/// field leaves the retained band 0 < |k| <= 3/4 2^{q_max + 1}.
ScalingReport verify_scaling(const FluidState& s, int m, double p = 2.0, double tolerance = 1e-10);

struct SmallnessRow {
  double alpha = 0.0;
  double amplitude = 0.0;
  double achieved_alpha = 0.0;
  /// ||(sigma, v, H)||_{H_T} at the final time (non-decreasing in T).
  double h_norm = 0.0;
  double grad_p_l1 = 0.0;
  double h_ratio = 0.0;     // h_norm / alpha
  double pressure_ratio = 0.0;  // grad_p_l1 / alpha^2
  bool completed = false;
  std::string error;
};

struct SmallnessTable {
  std::vector<SmallnessRow> rows;
  /// max / min of h_ratio over completed rows with alpha > 0.
  double h_ratio_spread = 0.0;
  /// Least-squares slope of log grad_p_l1 against log alpha.
  double pressure_slope = 0.0;
};

struct SmallnessOptions {
  InitialFamily family = InitialFamily::exact_gradient;
  std::uint64_t seed = 7;
  double dt = 0.02;
  int save_stride = 5;
  double bisection_tol = 0.01;
};

/// alpha = ||sigma0||_{B~^{N/2,inf}} + ||v0||_{B^{N/2-1}} + ||H0||_{B~^{N/2,inf}}, hybrid weight mu.
double smallness_alpha(const FluidState& s, double mu);

/// H_T norm: sup_t ||(sigma, H)||_{B~^{s,inf}} + sup_t ||v||_{B^{s-1}}
/// + mu (int ||(sigma, H)||_{B~^{s,1}} + int ||v||_{B^{s+1}}), s = N/2.
double h_norm(const RunRecord& rec, double mu, double t_end);

SmallnessTable smallness_experiment(const std::vector<double>& alphas, double T, const GridSpec& grid,
                                    const PhysicalParams& params, const SmallnessOptions& opts = {});

/// Runs at dt, dt/2, ..., dt/2^(levels-1) and compares successive finals.
struct RefinementStudy {
  std::vector<double> dts;
  /// state_gaps[i] = ||final(dt_i) - final(dt_{i+1})||_{L^2}
  std::vector<double> state_gaps;
  std::vector<double> deformation_gaps;
  std::vector<double> perturbation_gaps;
  /// Max over all saves and levels of ||div v||_{L^2}.
  double max_divergence = 0.0;

  [[nodiscard]] static double min_ratio(const std::vector<double>& gaps);
};

RefinementStudy refinement_study(const FluidState& s0, const PhysicalParams& params, double T, double dt,
                                 int levels = 3);

/// Ensemble suites with shipped default experiments.
const std::vector<std::string>& ratio_suite_names();

/// The default experiments of one ensemble suite; throws std::invalid_argument
/// for an unknown name.
std::vector<RatioReport> default_ratio_suite(const std::string& suite, const EnsembleSpec& ens,
                                             const GridSpec& grid);

/// Broadband (sigma, v, H, grad P) inside half the retained band, so the
/// l = 2 dilation stays resolved.
FluidState band_safe_state(const GridSpec& grid, std::uint64_t seed);

/// One CSV row per report; the JSON summary lists {experiment, params, max_ratio, stable}.
void write_reports_csv(const std::filesystem::path& path, const std::vector<RatioReport>& reports);
void write_reports_json(const std::filesystem::path& path, const std::vector<RatioReport>& reports);
void write_smallness_csv(const std::filesystem::path& path, const SmallnessTable& table);

}  // namespace critlab
