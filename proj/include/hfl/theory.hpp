#pragma once

#include <string>

#include "hfl/assignment.hpp"
#include "hfl/population.hpp"

namespace hfl {

/// E[theta_hat_1] = pi_B theta_{A|+1_B} + (1 - pi_B) theta_{A|-1_B}.
double expectation_theta1(const PotentialOutcomes& table, double pi_b);
double bias_theta1(const PotentialOutcomes& table, double pi_b);

/// Exact randomization variance of theta_hat_1 (general closed form).
double variance_theta1(const PotentialOutcomes& table, const Design& design);

enum class SpecialCase { HalfPi, StrictAdditive };

/// Which printed form of the strict-additivity reduction to evaluate.
/// `Corrected` specializes the general closed form; `Verbatim` carries the
/// extra 1/N on the B-effect term as printed in the source.
enum class StrictAdditiveForm { Corrected, Verbatim };

/// Closed-form special cases. HalfPi needs pi_B == 0.5; StrictAdditive needs a
/// strictly additive table. Throws Error(InvalidArgument) otherwise.
double variance_theta1_special(const PotentialOutcomes& table, const Design& design, SpecialCase mode,
                               StrictAdditiveForm form = StrictAdditiveForm::Corrected);

/// Same variance assembled from joint assignment-indicator covariances.
double variance_theta1_altform(const PotentialOutcomes& table, const Design& design);

/// E[var_hat_1] - Var(theta_hat_1) with the arm-size divisor; equals S^2_{A_w} / N.
double varest_bias_theta1(const PotentialOutcomes& table, const Design& design);

/// Var(theta_hat_2 | every N_z >= min_cell). min_cell = 1 is the all-cells-occupied event.
double variance_theta2(const PotentialOutcomes& table, const Design& design, std::size_t min_cell = 1);

struct TheoreticalMoments {
  double theta_A = 0.0;
  double e_theta1 = 0.0;
  double bias_theta1 = 0.0;
  double var_theta1 = 0.0;
  double varest_bias_theta1 = 0.0;
  double e_theta2 = 0.0;
  double var_theta2 = 0.0;  // NaN when the arms are too small for min_cell
  std::size_t min_cell = 1;
};

TheoreticalMoments theoretical_moments(const PotentialOutcomes& table, const Design& design,
                                       std::size_t min_cell = 1);

std::string theory_csv_header();
std::string to_csv_row(const TheoreticalMoments& m);

}  // namespace hfl
