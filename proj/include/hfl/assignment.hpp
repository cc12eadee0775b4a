#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hfl/population.hpp"
#include "hfl/random.hpp"

namespace hfl {

/// Complete randomization of A (fixed arm sizes) crossed with independent
/// Bernoulli(pi_B) assignment of B.
class Design {
 public:
  /// Requires 1 <= n_plus <= n_units - 1 and 0 < pi_b < 1.
  Design(std::size_t n_units, std::size_t n_plus, double pi_b);

  std::size_t n_units() const { return n_units_; }
  std::size_t n_plus() const { return n_plus_; }
  std::size_t n_minus() const { return n_units_ - n_plus_; }
  std::size_t arm_size(Level z_a) const { return z_a == Level::Plus ? n_plus() : n_minus(); }
  double pi_b() const { return pi_b_; }
  /// E[W_{i,B}(z_B)]: pi_B for +1_B, 1 - pi_B for -1_B.
  double prob_b(Level z_b) const { return z_b == Level::Plus ? pi_b_ : 1.0 - pi_b_; }

 private:
  std::size_t n_units_;
  std::size_t n_plus_;
  double pi_b_;
};

using CellCounts = std::array<std::size_t, 4>;

/// One realized assignment: 1 in w_a means +1_A, 1 in w_b means +1_B.
struct Assignment {
  std::vector<std::uint8_t> w_a;
  std::vector<std::uint8_t> w_b;
  CellCounts cell_counts{};

  /// Validates 0/1 entries and equal lengths, then fills cell_counts.
  static Assignment from_indicators(std::vector<std::uint8_t> w_a, std::vector<std::uint8_t> w_b);

  std::size_t size() const { return w_a.size(); }
  Cell cell_of(std::size_t i) const {
    return Cell{w_a[i] ? Level::Plus : Level::Minus, w_b[i] ? Level::Plus : Level::Minus};
  }
  std::size_t min_cell_count() const;
};

CellCounts count_cells(const std::vector<std::uint8_t>& w_a, const std::vector<std::uint8_t>& w_b);

Assignment sample_assignment(const Design& design, RandomStream& rng);

/// Result of a conditional draw; `attempts` counts every draw including the accepted one.
struct ConditionalDraw {
  Assignment assignment;
  std::size_t attempts = 0;
};

inline constexpr std::size_t kDefaultMaxAttempts = 100000;

/// Rejection sampler for the joint law conditioned on every N_z >= min_cell.
/// Throws Error(AcceptanceFailure) after max_attempts rejections.
ConditionalDraw sample_conditional_assignment(const Design& design, std::size_t min_cell,
                                              std::size_t max_attempts, RandomStream& rng);

/// Cov(W_{i,A}(z_A1), W_{i',A}(z_A2)) under complete randomization.
double indicator_covariance_A(const Design& design, std::size_t i, std::size_t i_prime, Level z_a1,
                              Level z_a2);

/// Cov(W_i(z), W_{i'}(z*)) for the joint indicators W_i(z) = W_{i,A}(z_A) W_{i,B}(z_B).
double joint_indicator_covariance(const Design& design, std::size_t i, std::size_t i_prime, Cell z,
                                  Cell z_star);

/// E[1/N_{z_A,z_B} | min_cell <= N_{z_A,z_B} <= n_arm - min_cell], where
/// N_{z_A,z_B} ~ Binomial(n_arm, p) with p = pi_B for +1_B and 1 - pi_B for -1_B.
/// With min_cell = 1 this is the truncated-binomial inverse moment for the
/// event that both cells of the arm are occupied.
double truncated_inverse_mean(std::size_t n_arm, double pi_b, Level z_b, std::size_t min_cell = 1);

/// CSV with columns `unit,w_a,w_b`.
void write_assignment_csv(const Assignment& assignment, const std::string& path);
Assignment read_assignment_csv(const std::string& path);

}  // namespace hfl
