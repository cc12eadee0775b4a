#include "hfl/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "hfl/csv.hpp"
#include "hfl/error.hpp"

namespace hfl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct GroupMoments {
  std::array<double, 2> arm_mean{}, arm_ssd{};
  std::array<std::size_t, 2> arm_n{};
  std::array<double, 4> cell_mean{}, cell_ssd{};
  std::array<std::size_t, 4> cell_n{};
};

GroupMoments group_moments(const PotentialOutcomes& table, std::uint64_t a_mask, std::uint64_t b_mask) {
  GroupMoments g;
  const std::size_t n = table.size();
  std::array<double, 4> cell_sum{};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = (a_mask >> i) & 1U;
    const std::size_t b = (b_mask >> i) & 1U;
    const std::size_t c = a + 2 * b;
    cell_sum[c] += table(i, c);
    ++g.cell_n[c];
  }
  for (std::size_t a = 0; a < 2; ++a) {
    g.arm_n[a] = g.cell_n[a] + g.cell_n[a + 2];
    g.arm_mean[a] = (cell_sum[a] + cell_sum[a + 2]) / static_cast<double>(g.arm_n[a]);
  }
  for (std::size_t c = 0; c < 4; ++c) {
    g.cell_mean[c] = g.cell_n[c] ? cell_sum[c] / static_cast<double>(g.cell_n[c]) : 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = (a_mask >> i) & 1U;
    const std::size_t c = a + 2 * ((b_mask >> i) & 1U);
    const double y = table(i, c);
    g.arm_ssd[a] += (y - g.arm_mean[a]) * (y - g.arm_mean[a]);
    g.cell_ssd[c] += (y - g.cell_mean[c]) * (y - g.cell_mean[c]);
  }
  return g;
}

// All n-bit masks with k bits set, in increasing numeric order.
std::vector<std::uint64_t> subsets(std::size_t n, std::size_t k) {
  std::vector<std::uint64_t> out;
  std::uint64_t v = (k == 0) ? 0 : ((std::uint64_t{1} << k) - 1);
  const std::uint64_t limit = std::uint64_t{1} << n;
  while (v < limit) {
    out.push_back(v);
    if (v == 0) break;
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
  }
  return out;
}

void check_size(const PotentialOutcomes& table, const Design& design) {
  require(table.size() == design.n_units(), ErrorCode::DimensionMismatch,
          "design and table have different numbers of units");
  const double n = static_cast<double>(design.n_units());
  const double log_count = std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(design.n_plus()) + 1.0) -
                           std::lgamma(static_cast<double>(design.n_minus()) + 1.0) + n * std::log(2.0);
  require(design.n_units() < 63 && log_count <= std::log(kMaxEnumeration) + 1e-9, ErrorCode::TooLarge,
          "instance too large for exhaustive enumeration");
}

// Per-assignment values fed to the accumulators.
struct Evaluation {
  bool in_event = false;
  double theta = 0.0;
  double varhat = kNaN;
  double varhat_plugin = kNaN;
};

struct Partial {
  CompensatedSum weight, first, second, varhat, varhat_plugin, covered;
  std::size_t count = 0;
};

// Visits every assignment, calling eval(a_mask, b_mask) -> Evaluation and
// reducing per-A-subset partials in subset order so results do not depend on
// the worker count.
template <class Eval, class Visit>
std::vector<Partial> sweep(const PotentialOutcomes& table, const Design& design, unsigned threads, Eval eval,
                           Visit visit) {
  const std::size_t n = table.size();
  const auto a_sets = subsets(n, design.n_plus());
  std::vector<double> b_weight(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    b_weight[k] = std::pow(design.pi_b(), static_cast<double>(k)) *
                  std::pow(1.0 - design.pi_b(), static_cast<double>(n - k));
  }
  const double a_weight = 1.0 / static_cast<double>(a_sets.size());
  std::vector<Partial> partials(a_sets.size());
  const std::uint64_t b_limit = std::uint64_t{1} << n;

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      Partial& p = partials[s];
      for (std::uint64_t b = 0; b < b_limit; ++b) {
        const Evaluation e = eval(a_sets[s], b);
        if (!e.in_event) continue;
        const double w = a_weight * b_weight[static_cast<std::size_t>(std::popcount(b))];
        visit(p, w, e);
      }
    }
  };

  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(a_sets.size())));
  if (workers == 1) {
    work(0, a_sets.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (a_sets.size() + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(a_sets.size(), begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return partials;
}

template <class Field>
double reduce(const std::vector<Partial>& partials, Field field) {
  CompensatedSum total;
  for (const auto& p : partials) total.add((p.*field).value());
  return total.value();
}

// Two passes: the first fixes the mean, the second accumulates central moments.
template <class Eval>
ExactMoments exact_moments(const PotentialOutcomes& table, const Design& design, std::size_t min_cell,
                           unsigned threads, Eval eval) {
  auto first = sweep(table, design, threads, eval, [](Partial& p, double w, const Evaluation& e) {
    p.weight.add(w);
    p.first.add(w * e.theta);
    p.varhat.add(w * e.varhat);
    p.varhat_plugin.add(w * e.varhat_plugin);
    ++p.count;
  });
  ExactMoments m;
  m.min_cell = min_cell;
  m.event_probability = reduce(first, &Partial::weight);
  for (const auto& p : first) m.support_size += p.count;
  require(m.support_size > 0 && m.event_probability > 0.0, ErrorCode::EmptyEvent,
          "conditioning event is empty");
  m.mean = reduce(first, &Partial::first) / m.event_probability;
  m.mean_varhat = reduce(first, &Partial::varhat) / m.event_probability;
  m.mean_varhat_plugin = reduce(first, &Partial::varhat_plugin) / m.event_probability;

  const double centre = m.mean;
  auto second = sweep(table, design, threads, eval, [centre](Partial& p, double w, const Evaluation& e) {
    const double d = e.theta - centre;
    p.second.add(w * d * d);
  });
  m.variance = reduce(second, &Partial::second) / m.event_probability;
  return m;
}

double arm_varhat(const GroupMoments& g, std::size_t n_units, DivisorMode mode) {
  if (g.arm_n[0] < 2 || g.arm_n[1] < 2) return kNaN;
  double total = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    const double na = static_cast<double>(g.arm_n[a]);
    const double div = mode == DivisorMode::ArmSizeMinusOne ? na - 1.0 : static_cast<double>(n_units) - 1.0;
    total += g.arm_ssd[a] / div / na;
  }
  return total;
}

double theta2_of(const GroupMoments& g) {
  return 0.5 * (g.cell_mean[3] - g.cell_mean[2] + g.cell_mean[1] - g.cell_mean[0]);
}

double cell_varhat(const GroupMoments& g) {
  double total = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    if (g.cell_n[c] < 2) return kNaN;
    const double nc = static_cast<double>(g.cell_n[c]);
    total += g.cell_ssd[c] / (nc - 1.0) / (4.0 * nc);
  }
  return total;
}

// inverse_means[k][c]: plug-in E^[1/N_z] when k units sit at +1_B.
std::vector<std::array<double, 4>> plugin_inverse_means(const Design& design) {
  const std::size_t n = design.n_units();
  std::vector<std::array<double, 4>> out(n + 1);
  for (std::size_t k = 1; k < n; ++k) {
    const double pi_hat = static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t c = 0; c < 4; ++c) {
      const std::size_t arm = design.arm_size(kCells[c].a);
      out[k][c] = arm >= 2 ? truncated_inverse_mean(arm, pi_hat, kCells[c].b) : kNaN;
    }
  }
  return out;
}

double cell_varhat_plugin(const GroupMoments& g, const std::array<double, 4>& inv_mean) {
  double total = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    if (g.cell_n[c] < 2) return kNaN;
    total += inv_mean[c] * (g.cell_ssd[c] / (static_cast<double>(g.cell_n[c]) - 1.0)) / 4.0;
  }
  return total;
}

bool all_cells_at_least(const GroupMoments& g, std::size_t min_cell) {
  return std::all_of(g.cell_n.begin(), g.cell_n.end(), [&](std::size_t c) { return c >= min_cell; });
}

}  // namespace

ExactMoments enumerate_theta1(const PotentialOutcomes& table, const Design& design, DivisorMode mode,
                              EnumerationOptions options) {
  check_size(table, design);
  const std::size_t n = table.size();
  return exact_moments(table, design, 0, options.threads, [&](std::uint64_t a, std::uint64_t b) {
    const auto g = group_moments(table, a, b);
    Evaluation e;
    e.in_event = true;
    e.theta = g.arm_mean[1] - g.arm_mean[0];
    e.varhat = arm_varhat(g, n, mode);
    return e;
  });
}

ExactMoments enumerate_theta2(const PotentialOutcomes& table, const Design& design, std::size_t min_cell,
                              EnumerationOptions options) {
  check_size(table, design);
  require(min_cell >= 1, ErrorCode::InvalidArgument, "min_cell must be at least 1");
  const auto inv_means = plugin_inverse_means(design);
  return exact_moments(table, design, min_cell, options.threads, [&](std::uint64_t a, std::uint64_t b) {
    const auto g = group_moments(table, a, b);
    Evaluation e;
    e.in_event = all_cells_at_least(g, min_cell);
    if (!e.in_event) return e;
    e.theta = theta2_of(g);
    if (min_cell >= 2) {
      e.varhat = cell_varhat(g);
      e.varhat_plugin = cell_varhat_plugin(g, inv_means[static_cast<std::size_t>(std::popcount(b))]);
    }
    return e;
  });
}

double exact_coverage(const PotentialOutcomes& table, const Design& design, EstimatorId estimator,
                      std::size_t min_cell, double alpha, EnumerationOptions options) {
  check_size(table, design);
  const double theta_a = estimands(table).theta_A;
  const double z = normal_critical_value(alpha);
  const std::size_t n = table.size();
  if (estimator == EstimatorId::ThetaA1) {
    require(design.n_plus() >= 2 && design.n_minus() >= 2, ErrorCode::InvalidArgument,
            "each arm needs at least 2 units");
  } else {
    require(min_cell >= 2, ErrorCode::InvalidArgument, "theta_A_2 coverage needs min_cell >= 2");
  }

  auto partials = sweep(
      table, design, options.threads,
      [&](std::uint64_t a, std::uint64_t b) {
        const auto g = group_moments(table, a, b);
        Evaluation e;
        e.in_event = min_cell == 0 || all_cells_at_least(g, min_cell);
        if (!e.in_event) return e;
        if (estimator == EstimatorId::ThetaA1) {
          e.theta = g.arm_mean[1] - g.arm_mean[0];
          e.varhat = arm_varhat(g, n, DivisorMode::ArmSizeMinusOne);
        } else {
          e.theta = theta2_of(g);
          e.varhat = cell_varhat(g);
        }
        return e;
      },
      [&](Partial& p, double w, const Evaluation& e) {
        p.weight.add(w);
        const double half = z * std::sqrt(e.varhat);
        if (e.theta - half <= theta_a && theta_a <= e.theta + half) p.covered.add(w);
        ++p.count;
      });
  const double event = reduce(partials, &Partial::weight);
  require(event > 0.0, ErrorCode::EmptyEvent, "conditioning event is empty");
  return reduce(partials, &Partial::covered) / event;
}

std::string oracle_csv_header() {
  return "estimator,min_cell,event_probability,support_size,mean,variance,mean_varhat,mean_varhat_plugin";
}

std::string to_csv_row(EstimatorId estimator, const ExactMoments& m) {
  std::ostringstream out;
  out << to_string(estimator) << ',' << m.min_cell << ',' << csv::format(m.event_probability) << ','
      << m.support_size << ',' << csv::format(m.mean) << ',' << csv::format(m.variance) << ','
      << csv::format(m.mean_varhat) << ',' << csv::format(m.mean_varhat_plugin);
  return out.str();
}

}  // namespace hfl
