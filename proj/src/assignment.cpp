#include "hfl/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hfl/csv.hpp"
#include "hfl/error.hpp"

namespace hfl {

Design::Design(std::size_t n_units, std::size_t n_plus, double pi_b)
    : n_units_(n_units), n_plus_(n_plus), pi_b_(pi_b) {
  require(n_units >= 2, ErrorCode::InvalidArgument, "design needs at least 2 units");
  require(n_plus >= 1 && n_plus <= n_units - 1, ErrorCode::InvalidArgument,
          "arm sizes must both be at least 1");
  require(pi_b > 0.0 && pi_b < 1.0, ErrorCode::InvalidArgument, "pi_B must lie strictly inside (0, 1)");
}

CellCounts count_cells(const std::vector<std::uint8_t>& w_a, const std::vector<std::uint8_t>& w_b) {
  CellCounts counts{};
  for (std::size_t i = 0; i < w_a.size(); ++i) ++counts[(w_a[i] ? 1 : 0) + 2 * (w_b[i] ? 1 : 0)];
  return counts;
}

Assignment Assignment::from_indicators(std::vector<std::uint8_t> w_a, std::vector<std::uint8_t> w_b) {
  require(w_a.size() == w_b.size(), ErrorCode::DimensionMismatch, "w_a and w_b differ in length");
  for (std::size_t i = 0; i < w_a.size(); ++i) {
    require(w_a[i] <= 1 && w_b[i] <= 1, ErrorCode::InvalidArgument, "indicators must be 0 or 1");
  }
  Assignment out;
  out.cell_counts = count_cells(w_a, w_b);
  out.w_a = std::move(w_a);
  out.w_b = std::move(w_b);
  return out;
}

std::size_t Assignment::min_cell_count() const {
  return *std::min_element(cell_counts.begin(), cell_counts.end());
}

Assignment sample_assignment(const Design& design, RandomStream& rng) {
  const std::size_t n = design.n_units();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first n_plus slots form a uniform n_plus-subset.
  for (std::size_t k = 0; k < design.n_plus(); ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n - 1);
    std::swap(order[k], order[pick(rng.engine())]);
  }
  Assignment out;
  out.w_a.assign(n, 0);
  out.w_b.assign(n, 0);
  for (std::size_t k = 0; k < design.n_plus(); ++k) out.w_a[order[k]] = 1;
  for (std::size_t i = 0; i < n; ++i) out.w_b[i] = rng.bernoulli(design.pi_b()) ? 1 : 0;
  out.cell_counts = count_cells(out.w_a, out.w_b);
  return out;
}

ConditionalDraw sample_conditional_assignment(const Design& design, std::size_t min_cell,
                                              std::size_t max_attempts, RandomStream& rng) {
  require(min_cell >= 1, ErrorCode::InvalidArgument, "min_cell must be at least 1");
  require(2 * min_cell <= std::min(design.n_plus(), design.n_minus()), ErrorCode::InvalidArgument,
          "min_cell too large for the arm sizes");
  require(max_attempts >= 1, ErrorCode::InvalidArgument, "max_attempts must be at least 1");
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    auto a = sample_assignment(design, rng);
    if (a.min_cell_count() >= min_cell) return ConditionalDraw{std::move(a), attempt};
  }
  std::ostringstream msg;
  msg << "acceptance failure: no assignment with all cells >= " << min_cell << " in " << max_attempts
      << " attempts at pi_b=" << csv::format(design.pi_b());
  fail(ErrorCode::AcceptanceFailure, msg.str());
}

double indicator_covariance_A(const Design& design, std::size_t i, std::size_t i_prime, Level z_a1,
                              Level z_a2) {
  const double n = static_cast<double>(design.n_units());
  require(i < design.n_units() && i_prime < design.n_units(), ErrorCode::InvalidArgument,
          "unit index out of range");
  double cov = static_cast<double>(design.n_plus()) * static_cast<double>(design.n_minus()) / (n * n);
  if (z_a1 != z_a2) cov = -cov;
  if (i != i_prime) cov *= -1.0 / (n - 1.0);
  return cov;
}

double joint_indicator_covariance(const Design& design, std::size_t i, std::size_t i_prime, Cell z,
                                  Cell z_star) {
  require(i < design.n_units() && i_prime < design.n_units(), ErrorCode::InvalidArgument,
          "unit index out of range");
  const double n = static_cast<double>(design.n_units());
  const double p1 = design.prob_b(z.b);
  const double p2 = design.prob_b(z_star.b);
  if (i != i_prime) return p1 * p2 * indicator_covariance_A(design, i, i_prime, z.a, z_star.a);
  const double n1 = static_cast<double>(design.arm_size(z.a));
  if (z == z_star) return p1 * n1 * (n - p1 * n1) / (n * n);
  // Same unit, different cells: the indicators are mutually exclusive.
  const double n2 = static_cast<double>(design.arm_size(z_star.a));
  return -(n1 * n2 / (n * n)) * p1 * p2;
}

double truncated_inverse_mean(std::size_t n_arm, double pi_b, Level z_b, std::size_t min_cell) {
  require(n_arm >= 2, ErrorCode::InvalidArgument, "arm size must be at least 2");
  require(pi_b > 0.0 && pi_b < 1.0, ErrorCode::InvalidArgument, "pi_B must lie strictly inside (0, 1)");
  require(min_cell >= 1 && 2 * min_cell <= n_arm, ErrorCode::InvalidArgument,
          "min_cell incompatible with the arm size");
  const double p = z_b == Level::Plus ? pi_b : 1.0 - pi_b;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double nn = static_cast<double>(n_arm);
  const double log_n_fact = std::lgamma(nn + 1.0);
  double numer = 0.0;
  double denom = 0.0;
  for (std::size_t k = min_cell; k + min_cell <= n_arm; ++k) {
    const double kk = static_cast<double>(k);
    const double log_pmf =
        log_n_fact - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) + kk * log_p + (nn - kk) * log_q;
    const double pmf = std::exp(log_pmf);
    denom += pmf;
    numer += pmf / kk;
  }
  return numer / denom;
}

void write_assignment_csv(const Assignment& assignment, const std::string& path) {
  std::ostringstream out;
  out << "unit,w_a,w_b\n";
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    out << i << ',' << int(assignment.w_a[i]) << ',' << int(assignment.w_b[i]) << '\n';
  }
  csv::write_text(path, out.str());
}

Assignment read_assignment_csv(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty() || lines.front() != "unit,w_a,w_b") {
    fail(ErrorCode::Io, "'" + path + "': expected header unit,w_a,w_b");
  }
  std::vector<std::uint8_t> w_a, w_b;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto f = csv::split(lines[l]);
    const std::string ctx = path + ":" + std::to_string(l + 1);
    if (f.size() != 3) fail(ErrorCode::Io, ctx + ": expected 3 columns");
    if (csv::parse_int(f[0], ctx) != static_cast<long long>(l - 1)) {
      fail(ErrorCode::Io, ctx + ": units must be listed in order starting at 0");
    }
    const auto a = csv::parse_int(f[1], ctx);
    const auto b = csv::parse_int(f[2], ctx);
    if ((a != 0 && a != 1) || (b != 0 && b != 1)) fail(ErrorCode::Io, ctx + ": indicators must be 0 or 1");
    w_a.push_back(static_cast<std::uint8_t>(a));
    w_b.push_back(static_cast<std::uint8_t>(b));
  }
  return Assignment::from_indicators(std::move(w_a), std::move(w_b));
}

}  // namespace hfl
