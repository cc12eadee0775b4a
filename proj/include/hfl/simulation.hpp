#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hfl/assignment.hpp"
#include "hfl/estimators.hpp"
#include "hfl/population.hpp"
#include "hfl/random.hpp"

namespace hfl {

enum class ModelKind { StrictAdditive, CorrelatedNormal };

/// Superpopulation used to draw one finite population of potential outcomes.
struct PopulationModel {
  std::string name = "model";
  ModelKind kind = ModelKind::StrictAdditive;
  double theta_A_star = 0.0;
  double theta_B_star = 0.0;
  double theta_AB_star = 0.0;
  double sigma2 = 1.0;
  double rho = 0.0;  // CorrelatedNormal only; equicorrelation across the four cells
};

/// Mean vector in canonical cell order: (theta_AB*, theta_A*, theta_B*, theta_A* + theta_B* + theta_AB*).
CellVector model_means(const PopulationModel& model);

PotentialOutcomes generate_population(const PopulationModel& model, std::size_t n, RandomStream& rng);

enum class Situation { I, II };
const char* to_string(Situation s);

struct ReplicateRecord {
  double point = 0.0;
  double variance_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool covered = false;
  double width = 0.0;
  std::size_t attempts = 1;
  std::optional<double> plugin_variance;  // situation II with plugin enabled
};

struct ReplicateOptions {
  std::size_t min_cell = 2;
  double alpha = 0.05;
  std::size_t max_attempts = kDefaultMaxAttempts;
  bool plugin = false;
};

/// One draw of the assignment (conditional on min_cell in situation II) and the
/// situation's estimate, interval, and coverage of `theta_a`.
ReplicateRecord run_replicate(const PotentialOutcomes& table, const Design& design, double theta_a,
                              Situation situation, const ReplicateOptions& options, RandomStream& rng);

struct SweepConfig {
  std::size_t n_units = 100;
  std::size_t n_plus = 50;
  PopulationModel model;
  std::vector<double> pi_grid;
  std::size_t replicates = 1000;
  std::size_t min_cell = 2;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  std::vector<Situation> situations = {Situation::I, Situation::II};
  std::size_t max_attempts = kDefaultMaxAttempts;

  /// Throws Error(Config) describing the first violated constraint.
  void validate() const;
};

/// Evenly spaced grid lo, lo + step, ..., hi (inclusive), rounded to 12 decimals.
std::vector<double> make_grid(double lo, double hi, double step);

struct SweepRow {
  std::string model;
  Situation situation = Situation::I;
  double pi_b = 0.0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double mse = 0.0;
  double rel_bias = 0.0;
  double varest_rel_bias = 0.0;
  double exact_bias = 0.0;
  double exact_var = 0.0;
  double acceptance_rate = 1.0;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Monte Carlo summaries kept alongside each row but not serialized.
struct SweepDiagnostics {
  double mean_point = 0.0;
  double point_variance = 0.0;   // over replicates, divisor R - 1
  double mean_varhat = 0.0;
  double coverage_se = 0.0;      // binomial standard error of the coverage proportion
  double mean_point_se = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepDiagnostics> diagnostics;  // parallel to rows; empty after parsing
  double theta_A = 0.0;                       // finite-population estimand of the last model
};

/// Draws the population once from `config.model`, then runs every grid point
/// and replicate. Results depend only on master_seed, never on `threads`.
SweepResult run_sweep(const SweepConfig& config, unsigned threads = 1);

/// As run_sweep, on a caller-supplied population.
SweepResult run_sweep_on(const PotentialOutcomes& table, const SweepConfig& config, unsigned threads = 1);

std::string sweep_csv_header();
std::string to_csv(const SweepResult& result);
SweepResult parse_sweep_csv(const std::string& text);

}  // namespace hfl
