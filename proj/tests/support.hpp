// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls the library's theory or oracle code.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hfl/population.hpp"

namespace hfl::testing {

inline PotentialOutcomes table_from(const std::vector<std::array<double, 4>>& rows) {
  return PotentialOutcomes::build(std::vector<CellVector>(rows.begin(), rows.end()));
}

// T4: theta_A|- = 2, theta_A|+ = 4, theta_A = 3, theta_AB = 1.
inline PotentialOutcomes t4() { return table_from({{0, 2, 1, 5}, {1, 3, 2, 6}, {0, 1, 1, 3}, {1, 4, 0, 6}}); }

enum class TableShape { Gaussian, Integer, Additive, Skewed };

inline PotentialOutcomes random_table(std::mt19937_64& g, std::size_t n, TableShape shape) {
  std::normal_distribution<double> norm(0.0, 1.0);
  std::uniform_int_distribution<int> small(-3, 6);
  std::exponential_distribution<double> expo(0.7);
  std::vector<CellVector> rows(n);
  const CellVector shift{norm(g), 2.0 + norm(g), 1.0 + norm(g), 3.0 + norm(g)};
  for (auto& r : rows) {
    const double e = norm(g);
    for (std::size_t j = 0; j < 4; ++j) {
      switch (shape) {
        case TableShape::Gaussian: r[j] = shift[j] + norm(g); break;
        case TableShape::Integer: r[j] = small(g); break;
        case TableShape::Additive: r[j] = shift[j] + e; break;
        case TableShape::Skewed: r[j] = shift[j] + expo(g) * (j + 1); break;
      }
    }
  }
  return PotentialOutcomes::build(std::move(rows));
}

struct BruteMoments {
  double prob = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_varhat = 0.0;
};

struct BruteResult {
  BruteMoments theta1;           // unconditional
  double mean_varhat1_nm1 = 0.0;  // divisor N - 1 variant
  BruteMoments theta2;           // conditional on all N_z >= min_cell
  double cover1 = 0.0;           // P(theta_A in theta1 +- z sqrt(var))
  double cover2 = 0.0;           // conditional coverage of theta2
};

inline double sample_var(const std::vector<double>& v) {
  if (v.size() < 2) return std::nan("");
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double mean_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

// Visits every (w_A, w_B) by plain bit loops and accumulates in long double.
inline BruteResult brute_force(const PotentialOutcomes& t, std::size_t n_plus, double pi_b, std::size_t min_cell,
                               double z = 1.96) {
  const std::size_t n = t.size();
  long double n_choose = 1;
  for (std::size_t k = 0; k < n_plus; ++k) n_choose = n_choose * (n - k) / (k + 1);

  double theta_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) theta_a += 0.5 * ((t(i, 1) - t(i, 0)) + (t(i, 3) - t(i, 2)));
  theta_a /= static_cast<double>(n);

  long double p1 = 0, s1 = 0, ss1 = 0, v1 = 0, v1n = 0, c1 = 0;
  long double p2 = 0, s2 = 0, ss2 = 0, v2 = 0, c2 = 0;
  for (std::uint32_t a = 0; a < (1U << n); ++a) {
    if (static_cast<std::size_t>(__builtin_popcount(a)) != n_plus) continue;
    for (std::uint32_t b = 0; b < (1U << n); ++b) {
      long double p = 1.0L / n_choose;
      std::vector<double> arm[2], cell[4];
      for (std::size_t i = 0; i < n; ++i) {
        const int wa = (a >> i) & 1U, wb = (b >> i) & 1U;
        p *= wb ? pi_b : 1.0 - pi_b;
        const double y = t(i, static_cast<std::size_t>(wa + 2 * wb));
        arm[wa].push_back(y);
        cell[wa + 2 * wb].push_back(y);
      }
      const double est1 = mean_of(arm[1]) - mean_of(arm[0]);
      const double var1 = sample_var(arm[1]) / arm[1].size() + sample_var(arm[0]) / arm[0].size();
      double nm1 = 0.0;
      for (int k = 0; k < 2; ++k) {
        double ss = 0.0;
        const double m = mean_of(arm[k]);
        for (double y : arm[k]) ss += (y - m) * (y - m);
        nm1 += ss / static_cast<double>(n - 1) / arm[k].size();
      }
      p1 += p;
      s1 += p * est1;
      ss1 += p * est1 * est1;
      v1 += p * var1;
      v1n += p * nm1;
      if (std::abs(est1 - theta_a) <= z * std::sqrt(var1)) c1 += p;

      bool ok = true;
      for (const auto& c : cell) ok = ok && c.size() >= min_cell;
      if (!ok) continue;
      const double est2 = 0.5 * (mean_of(cell[1]) - mean_of(cell[0])) + 0.5 * (mean_of(cell[3]) - mean_of(cell[2]));
      double var2 = 0.0;
      for (const auto& c : cell) var2 += sample_var(c) / (4.0 * c.size());
      p2 += p;
      s2 += p * est2;
      ss2 += p * est2 * est2;
      if (min_cell >= 2) {
        v2 += p * var2;
        if (std::abs(est2 - theta_a) <= z * std::sqrt(var2)) c2 += p;
      }
    }
  }
  BruteResult r;
  r.theta1.prob = static_cast<double>(p1);
  r.theta1.mean = static_cast<double>(s1);
  r.theta1.variance = static_cast<double>(ss1 - s1 * s1);
  r.theta1.mean_varhat = static_cast<double>(v1);
  r.mean_varhat1_nm1 = static_cast<double>(v1n);
  r.cover1 = static_cast<double>(c1);
  r.theta2.prob = static_cast<double>(p2);
  if (p2 > 0) {
    r.theta2.mean = static_cast<double>(s2 / p2);
    r.theta2.variance = static_cast<double>(ss2 / p2 - (s2 / p2) * (s2 / p2));
    r.theta2.mean_varhat = min_cell >= 2 ? static_cast<double>(v2 / p2) : std::nan("");
    r.cover2 = static_cast<double>(c2 / p2);
  }
  return r;
}

// E[1/X | m <= X <= n - m], X ~ Binomial(n, p), by direct pmf products.
inline double direct_truncated_inverse(std::size_t n, double p, std::size_t m = 1) {
  long double num = 0, den = 0;
  for (std::size_t x = m; x + m <= n; ++x) {
    long double pmf = 1;
    for (std::size_t k = 0; k < x; ++k) pmf = pmf * (n - k) / (k + 1);
    pmf *= std::pow(static_cast<long double>(p), static_cast<long double>(x)) *
           std::pow(1.0L - p, static_cast<long double>(n - x));
    num += pmf / x;
    den += pmf;
  }
  return static_cast<double>(num / den);
}

}  // namespace hfl::testing
