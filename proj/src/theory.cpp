#include "hfl/theory.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hfl/csv.hpp"
#include "hfl/error.hpp"

namespace hfl {

namespace {

void check_match(const PotentialOutcomes& table, const Design& design) {
  require(table.size() == design.n_units(), ErrorCode::DimensionMismatch,
          "design and table have different numbers of units");
}

double same_arm_cross(const DispersionSummary& d, Level z_a) {
  return d.s_cross[cell_index(z_a, Level::Plus)][cell_index(z_a, Level::Minus)];
}

}  // namespace

double expectation_theta1(const PotentialOutcomes& table, double pi_b) {
  require(pi_b > 0.0 && pi_b < 1.0, ErrorCode::InvalidArgument, "pi_B must lie strictly inside (0, 1)");
  const auto e = estimands(table);
  return pi_b * e.theta_A_given_B[1] + (1.0 - pi_b) * e.theta_A_given_B[0];
}

double bias_theta1(const PotentialOutcomes& table, double pi_b) {
  const auto e = estimands(table);
  return expectation_theta1(table, pi_b) - e.theta_A;
}

double variance_theta1(const PotentialOutcomes& table, const Design& design) {
  check_match(table, design);
  const auto d = dispersions(table);
  const double n = static_cast<double>(table.size());
  const double p = design.pi_b();
  const double pq = p * (1.0 - p);
  double total = 0.0;
  for (Level z_a : {Level::Minus, Level::Plus}) {
    const double arm = static_cast<double>(design.arm_size(z_a));
    // Extra spread from the unobserved B split within the arm.
    total += pq / arm * (d.sum_sq_thetaB_given_A[level_index(z_a)] / n + 2.0 * same_arm_cross(d, z_a));
    for (Level z_b : {Level::Minus, Level::Plus}) {
      const double w = design.prob_b(z_b);
      total += w * w * d.s2_cell[cell_index(z_a, z_b)] / arm;
    }
  }
  return total - weighted_effect_dispersion(table, p) / n;
}

double variance_theta1_special(const PotentialOutcomes& table, const Design& design, SpecialCase mode,
                               StrictAdditiveForm form) {
  check_match(table, design);
  const auto d = dispersions(table);
  const double n = static_cast<double>(table.size());
  double total = 0.0;

  if (mode == SpecialCase::HalfPi) {
    require(design.pi_b() == 0.5, ErrorCode::InvalidArgument, "half-pi form needs pi_B = 0.5");
    for (Level z_a : {Level::Minus, Level::Plus}) {
      const double arm = static_cast<double>(design.arm_size(z_a));
      total += (d.sum_sq_thetaB_given_A[level_index(z_a)] / (2.0 * n) + same_arm_cross(d, z_a)) / (2.0 * arm);
      for (Level z_b : {Level::Minus, Level::Plus}) total += d.s2_cell[cell_index(z_a, z_b)] / (4.0 * arm);
    }
    return total - d.s2_A / n;
  }

  require(is_strictly_additive(table), ErrorCode::InvalidArgument, "table is not strictly additive");
  const auto e = estimands(table);
  const double pq = design.pi_b() * (1.0 - design.pi_b());
  const double common_s2 = (d.s2_cell[0] + d.s2_cell[1] + d.s2_cell[2] + d.s2_cell[3]) / 4.0;
  const double extra = form == StrictAdditiveForm::Verbatim ? n : 1.0;
  for (Level z_a : {Level::Minus, Level::Plus}) {
    const double arm = static_cast<double>(design.arm_size(z_a));
    const double tb = e.theta_B_given_A[level_index(z_a)];
    total += pq * tb * tb / (extra * arm) + common_s2 / arm;
  }
  return total;
}

double variance_theta1_altform(const PotentialOutcomes& table, const Design& design) {
  check_match(table, design);

  // Indicator covariances depend on (i, i') only through i == i'.
  auto diag = [&](Cell z, Cell zs) { return joint_indicator_covariance(design, 0, 0, z, zs); };
  auto off = [&](Cell z, Cell zs) { return joint_indicator_covariance(design, 0, 1, z, zs); };

  CellVector col_sum{};
  CellMatrix cross_sum{};  // sum_i Y_i(z) Y_i(z*)
  for (const auto& r : table.rows()) {
    for (std::size_t j = 0; j < 4; ++j) {
      col_sum[j] += r[j];
      for (std::size_t k = 0; k < 4; ++k) cross_sum[j][k] += r[j] * r[k];
    }
  }

  // Var or covariance of N_z Ybar_obs(z) with N_z* Ybar_obs(z*).
  auto weighted_cov = [&](std::size_t j, std::size_t k) {
    const Cell z = kCells[j], zs = kCells[k];
    return diag(z, zs) * cross_sum[j][k] + off(z, zs) * (col_sum[j] * col_sum[k] - cross_sum[j][k]);
  };
  auto bb_s2 = [&](std::size_t j) { return weighted_cov(j, j); };            // S2(z)
  auto bb_s2_pair = [&](std::size_t j, std::size_t k) { return -weighted_cov(j, k); };  // S2(z, z*)

  const double n_plus = static_cast<double>(design.n_plus());
  const double n_minus = static_cast<double>(design.n_minus());
  double total = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    const double arm = static_cast<double>(design.arm_size(kCells[j].a));
    total += bb_s2(j) / (arm * arm);
    for (std::size_t k = 0; k < 4; ++k) {
      if (k == j) continue;
      if (kCells[j].a == kCells[k].a) {
        total -= bb_s2_pair(j, k) / (arm * arm);
      } else {
        total += bb_s2_pair(j, k) / (n_plus * n_minus);
      }
    }
  }
  return total;
}

double varest_bias_theta1(const PotentialOutcomes& table, const Design& design) {
  check_match(table, design);
  const auto e = estimands(table);
  const double n = static_cast<double>(table.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    double u = 0.0;
    for (Level z_b : {Level::Minus, Level::Plus}) {
      u += design.prob_b(z_b) * (table.unit_effect_A(i, z_b) - e.theta_A_given_B[level_index(z_b)]);
    }
    acc += u * u;
  }
  return acc / (n * (n - 1.0));
}

double variance_theta2(const PotentialOutcomes& table, const Design& design, std::size_t min_cell) {
  check_match(table, design);
  require(min_cell >= 1, ErrorCode::InvalidArgument, "min_cell must be at least 1");
  require(design.n_plus() >= 2 * min_cell && design.n_minus() >= 2 * min_cell, ErrorCode::InvalidArgument,
          "arms too small for the conditioning event");
  const auto d = dispersions(table);
  double total = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    const Cell z = kCells[c];
    total += truncated_inverse_mean(design.arm_size(z.a), design.pi_b(), z.b, min_cell) / 4.0 * d.s2_cell[c];
  }
  return total - d.s2_A / static_cast<double>(table.size());
}

TheoreticalMoments theoretical_moments(const PotentialOutcomes& table, const Design& design,
                                       std::size_t min_cell) {
  TheoreticalMoments m;
  m.min_cell = min_cell;
  m.theta_A = estimands(table).theta_A;
  m.e_theta1 = expectation_theta1(table, design.pi_b());
  m.bias_theta1 = m.e_theta1 - m.theta_A;
  m.var_theta1 = variance_theta1(table, design);
  m.varest_bias_theta1 = varest_bias_theta1(table, design);
  m.e_theta2 = m.theta_A;
  const bool arms_ok = min_cell >= 1 && design.n_plus() >= 2 * min_cell && design.n_minus() >= 2 * min_cell;
  m.var_theta2 = arms_ok ? variance_theta2(table, design, min_cell) : std::numeric_limits<double>::quiet_NaN();
  return m;
}

std::string theory_csv_header() {
  return "exact_theta_a,exact_e_theta1,exact_bias_theta1,exact_var_theta1,exact_varest_bias_theta1,"
         "exact_e_theta2,exact_var_theta2,exact_min_cell";
}

std::string to_csv_row(const TheoreticalMoments& m) {
  std::ostringstream out;
  out << csv::format(m.theta_A) << ',' << csv::format(m.e_theta1) << ',' << csv::format(m.bias_theta1) << ','
      << csv::format(m.var_theta1) << ',' << csv::format(m.varest_bias_theta1) << ',' << csv::format(m.e_theta2)
      << ',' << csv::format(m.var_theta2) << ',' << m.min_cell;
  return out.str();
}

}  // namespace hfl
