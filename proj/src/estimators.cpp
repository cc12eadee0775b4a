#include "hfl/estimators.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <sstream>

#include "hfl/csv.hpp"
#include "hfl/error.hpp"

namespace hfl {

ObservedData::ObservedData(std::vector<double> y_obs, std::vector<Level> arms, std::vector<Level> b_levels,
                           Visibility visibility)
    : y_(std::move(y_obs)), arms_(std::move(arms)), b_(std::move(b_levels)), visibility_(visibility) {
  require(y_.size() == arms_.size(), ErrorCode::DimensionMismatch, "outcomes and arm labels differ in length");
  if (visibility_ == Visibility::Observed) {
    require(b_.size() == y_.size(), ErrorCode::DimensionMismatch, "outcomes and B labels differ in length");
  } else {
    require(b_.empty(), ErrorCode::InvalidArgument, "hidden B data must not carry B labels");
  }
  for (std::size_t i = 0; i < y_.size(); ++i) {
    ++arm_counts_[level_index(arms_[i])];
    if (visibility_ == Visibility::Observed) ++cell_counts_[cell_index(arms_[i], b_[i])];
  }
}

Level ObservedData::b_level(std::size_t i) const {
  require(visibility_ == Visibility::Observed, ErrorCode::Unavailable, "factor-B labels unavailable");
  return b_[i];
}

const CellCounts& ObservedData::cell_counts() const {
  require(visibility_ == Visibility::Observed, ErrorCode::Unavailable, "factor-B labels unavailable");
  return cell_counts_;
}

ObservedData observe(const PotentialOutcomes& table, const Assignment& assignment, Visibility visibility) {
  require(table.size() == assignment.size(), ErrorCode::DimensionMismatch,
          "table and assignment have different numbers of units");
  const std::size_t n = table.size();
  std::vector<double> y(n);
  std::vector<Level> arms(n);
  std::vector<Level> b;
  if (visibility == Visibility::Observed) b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Cell z = assignment.cell_of(i);
    y[i] = table(i, z);
    arms[i] = z.a;
    if (visibility == Visibility::Observed) b[i] = z.b;
  }
  return ObservedData(std::move(y), std::move(arms), std::move(b), visibility);
}

namespace {

struct GroupStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sum_sq_dev = 0.0;
};

// Two-pass mean and centered sum of squares over the units selected by `in_group`.
template <class Pred>
GroupStats group_stats(const ObservedData& data, Pred in_group) {
  GroupStats g;
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (in_group(i)) {
      ++g.n;
      sum += data.y(i);
    }
  }
  if (g.n == 0) return g;
  g.mean = sum / static_cast<double>(g.n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (in_group(i)) {
      const double d = data.y(i) - g.mean;
      g.sum_sq_dev += d * d;
    }
  }
  return g;
}

GroupStats arm_stats(const ObservedData& data, Level z_a) {
  return group_stats(data, [&](std::size_t i) { return data.arm(i) == z_a; });
}

std::array<GroupStats, 4> cell_stats(const ObservedData& data) {
  std::array<GroupStats, 4> out;
  for (std::size_t c = 0; c < 4; ++c) {
    const Cell z = kCells[c];
    out[c] = group_stats(data, [&](std::size_t i) { return data.arm(i) == z.a && data.b_level(i) == z.b; });
  }
  return out;
}

}  // namespace

double theta_hat_1(const ObservedData& data) {
  const auto plus = arm_stats(data, Level::Plus);
  const auto minus = arm_stats(data, Level::Minus);
  require(plus.n >= 1 && minus.n >= 1, ErrorCode::InvalidArgument, "empty arm");
  return plus.mean - minus.mean;
}

double var_hat_1(const ObservedData& data, DivisorMode mode) {
  double total = 0.0;
  for (Level z_a : {Level::Plus, Level::Minus}) {
    const auto g = arm_stats(data, z_a);
    require(g.n >= 2, ErrorCode::InvalidArgument, "each arm needs at least 2 units");
    const double divisor =
        mode == DivisorMode::ArmSizeMinusOne ? static_cast<double>(g.n) - 1.0 : static_cast<double>(data.size()) - 1.0;
    total += (g.sum_sq_dev / divisor) / static_cast<double>(g.n);
  }
  return total;
}

double theta_hat_2(const ObservedData& data) {
  const auto cells = cell_stats(data);
  for (const auto& g : cells) require(g.n >= 1, ErrorCode::InvalidArgument, "empty cell");
  auto m = [&](Level a, Level b) { return cells[cell_index(a, b)].mean; };
  return 0.5 * (m(Level::Plus, Level::Plus) - m(Level::Minus, Level::Plus) + m(Level::Plus, Level::Minus) -
                m(Level::Minus, Level::Minus));
}

double var_hat_2(const ObservedData& data) {
  const auto cells = cell_stats(data);
  double total = 0.0;
  for (const auto& g : cells) {
    require(g.n >= 2, ErrorCode::InvalidArgument, "every cell needs at least 2 units");
    const double n = static_cast<double>(g.n);
    total += (g.sum_sq_dev / (n - 1.0)) / (4.0 * n);
  }
  return total;
}

double pooled_pi_b(const ObservedData& data) {
  std::size_t plus = 0;
  for (std::size_t i = 0; i < data.size(); ++i) plus += data.b_level(i) == Level::Plus ? 1 : 0;
  return static_cast<double>(plus) / static_cast<double>(data.size());
}

double var_hat_2_plugin(const ObservedData& data, const Design& design) {
  require(design.n_units() == data.size() && design.n_plus() == data.arm_count(Level::Plus),
          ErrorCode::DimensionMismatch, "design does not match the observed data");
  const auto cells = cell_stats(data);
  for (const auto& g : cells) require(g.n >= 2, ErrorCode::InvalidArgument, "every cell needs at least 2 units");
  const double pi_hat = pooled_pi_b(data);
  double total = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    const Cell z = kCells[c];
    const double inv_mean = truncated_inverse_mean(design.arm_size(z.a), pi_hat, z.b);
    const double s2 = cells[c].sum_sq_dev / (static_cast<double>(cells[c].n) - 1.0);
    total += inv_mean * s2 / 4.0;
  }
  return total;
}

double normal_critical_value(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie strictly inside (0, 1)");
  if (alpha == 0.05) return 1.96;
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), 1.0 - alpha / 2.0);
}

std::pair<double, double> confidence_interval(double point, double variance_estimate, double alpha) {
  require(variance_estimate >= 0.0, ErrorCode::InvalidArgument, "variance estimate must be non-negative");
  const double half = normal_critical_value(alpha) * std::sqrt(variance_estimate);
  return {point - half, point + half};
}

EstimateReport estimate(const ObservedData& data, EstimatorId estimator, VarianceMethod method, double alpha,
                        const Design* design) {
  EstimateReport r;
  r.estimator = estimator;
  r.variance_method = method;
  r.alpha = alpha;
  if (estimator == EstimatorId::ThetaA1) {
    require(method == VarianceMethod::NeymanI, ErrorCode::InvalidArgument,
            "theta_A_1 pairs with the neyman_I variance estimator");
    r.point = theta_hat_1(data);
    r.variance_estimate = var_hat_1(data);
  } else {
    r.point = theta_hat_2(data);
    if (method == VarianceMethod::ConditionalII) {
      r.variance_estimate = var_hat_2(data);
    } else if (method == VarianceMethod::PluginII) {
      require(design != nullptr, ErrorCode::InvalidArgument, "plugin_II needs the design");
      r.variance_estimate = var_hat_2_plugin(data, *design);
    } else {
      fail(ErrorCode::InvalidArgument, "theta_A_2 pairs with conditional_II or plugin_II");
    }
  }
  std::tie(r.ci_low, r.ci_high) = confidence_interval(r.point, r.variance_estimate, alpha);
  return r;
}

const char* to_string(EstimatorId id) { return id == EstimatorId::ThetaA1 ? "theta_A_1" : "theta_A_2"; }

const char* to_string(VarianceMethod method) {
  switch (method) {
    case VarianceMethod::NeymanI: return "neyman_I";
    case VarianceMethod::ConditionalII: return "conditional_II";
    case VarianceMethod::PluginII: return "plugin_II";
  }
  return "?";
}

std::string estimate_csv_header() { return "estimator,point,var_method,var,ci_low,ci_high,alpha"; }

std::string to_csv_row(const EstimateReport& r) {
  std::ostringstream out;
  out << to_string(r.estimator) << ',' << csv::format(r.point) << ',' << to_string(r.variance_method) << ','
      << csv::format(r.variance_estimate) << ',' << csv::format(r.ci_low) << ',' << csv::format(r.ci_high) << ','
      << csv::format(r.alpha);
  return out.str();
}

}  // namespace hfl
