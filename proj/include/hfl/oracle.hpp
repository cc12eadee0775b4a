#pragma once

#include <cstddef>
#include <string>

#include "hfl/assignment.hpp"
#include "hfl/estimators.hpp"
#include "hfl/population.hpp"

namespace hfl {

/// Exact randomization moments obtained by visiting every (w_A, w_B) pair.
struct ExactMoments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_varhat = 0.0;         // NaN when the variance estimator is undefined on the support
  double mean_varhat_plugin = 0.0;  // theta_A_2 only; NaN otherwise
  std::size_t min_cell = 0;         // 0: unconditional; k: every N_z >= k
  double event_probability = 1.0;
  std::size_t support_size = 0;
};

/// Largest C(N, N+) * 2^N the enumerator accepts.
inline constexpr double kMaxEnumeration = 1e8;

struct EnumerationOptions {
  unsigned threads = 1;
};

ExactMoments enumerate_theta1(const PotentialOutcomes& table, const Design& design,
                              DivisorMode mode = DivisorMode::ArmSizeMinusOne,
                              EnumerationOptions options = {});

/// Conditional on every N_z >= min_cell (min_cell >= 1). Throws Error(EmptyEvent)
/// when no assignment qualifies.
ExactMoments enumerate_theta2(const PotentialOutcomes& table, const Design& design, std::size_t min_cell,
                              EnumerationOptions options = {});

/// Exact probability that the estimator's interval covers theta_A. For
/// theta_A_1, min_cell = 0 means unconditional; theta_A_2 needs min_cell >= 2.
double exact_coverage(const PotentialOutcomes& table, const Design& design, EstimatorId estimator,
                      std::size_t min_cell, double alpha, EnumerationOptions options = {});

std::string oracle_csv_header();
std::string to_csv_row(EstimatorId estimator, const ExactMoments& m);

}  // namespace hfl
