#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hfl/assignment.hpp"
#include "hfl/population.hpp"

namespace hfl {

enum class Visibility { Hidden, Observed };

/// What the analyst sees after the experiment: one outcome per unit, its A arm,
/// and (situation II only) its B level.
class ObservedData {
 public:
  /// `b_levels` must be empty for Hidden visibility and size-matched otherwise.
  ObservedData(std::vector<double> y_obs, std::vector<Level> arms, std::vector<Level> b_levels,
               Visibility visibility);

  std::size_t size() const { return y_.size(); }
  double y(std::size_t i) const { return y_[i]; }
  Level arm(std::size_t i) const { return arms_[i]; }
  Visibility visibility() const { return visibility_; }
  std::size_t arm_count(Level z_a) const { return arm_counts_[level_index(z_a)]; }

  /// Throws Error(Unavailable) when B is hidden.
  Level b_level(std::size_t i) const;
  const CellCounts& cell_counts() const;

 private:
  std::vector<double> y_;
  std::vector<Level> arms_;
  std::vector<Level> b_;
  Visibility visibility_;
  std::array<std::size_t, 2> arm_counts_{};
  CellCounts cell_counts_{};
};

ObservedData observe(const PotentialOutcomes& table, const Assignment& assignment, Visibility visibility);

enum class DivisorMode {
  ArmSizeMinusOne,  // s^2(z_A) divides by N_{z_A.} - 1 (default)
  NMinusOne,        // s^2(z_A) divides by N - 1
};

/// Difference of arm means; ignores B.
double theta_hat_1(const ObservedData& data);
double var_hat_1(const ObservedData& data, DivisorMode mode = DivisorMode::ArmSizeMinusOne);

/// Average of the two within-B contrasts; needs B labels and all cells occupied.
double theta_hat_2(const ObservedData& data);
/// sum_z s^2(z) / (4 N_z); needs every N_z >= 2.
double var_hat_2(const ObservedData& data);
/// sum_z E^[1/N_z] s^2(z) / 4 with E^ from the truncated-binomial moment at the pooled pi^_B.
double var_hat_2_plugin(const ObservedData& data, const Design& design);

/// Pooled n_{.+1_B} / N.
double pooled_pi_b(const ObservedData& data);

/// Two-sided standard-normal critical value z_{alpha/2}; exactly 1.96 at alpha = 0.05.
double normal_critical_value(double alpha);

std::pair<double, double> confidence_interval(double point, double variance_estimate, double alpha);

enum class EstimatorId { ThetaA1, ThetaA2 };
enum class VarianceMethod { NeymanI, ConditionalII, PluginII };

struct EstimateReport {
  EstimatorId estimator = EstimatorId::ThetaA1;
  double point = 0.0;
  VarianceMethod variance_method = VarianceMethod::NeymanI;
  double variance_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.05;
};

/// Runs the estimator/variance pair; PluginII requires `design`.
EstimateReport estimate(const ObservedData& data, EstimatorId estimator, VarianceMethod method,
                        double alpha, const Design* design = nullptr);

const char* to_string(EstimatorId id);
const char* to_string(VarianceMethod method);

/// `estimator,point,var_method,var,ci_low,ci_high,alpha`
std::string estimate_csv_header();
std::string to_csv_row(const EstimateReport& report);

}  // namespace hfl
