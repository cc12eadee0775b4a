#include "hfl/population.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hfl/csv.hpp"
#include "hfl/error.hpp"

namespace hfl {

namespace {

constexpr char kTableHeader[] = "y_mm,y_pm,y_mp,y_pp";

double sample_cov(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - mx) * (y[i] - my);
  return acc / (n - 1.0);
}

}  // namespace

PotentialOutcomes PotentialOutcomes::build(std::vector<CellVector> rows) {
  require(rows.size() >= 2, ErrorCode::InvalidArgument, "population too small: need at least 2 units");
  for (const auto& r : rows) {
    for (double v : r) {
      require(std::isfinite(v), ErrorCode::InvalidArgument, "potential outcomes must be finite");
    }
  }
  return PotentialOutcomes(std::move(rows));
}

EstimandSummary estimands(const PotentialOutcomes& table) {
  EstimandSummary s;
  const double n = static_cast<double>(table.size());
  for (std::size_t j = 0; j < 4; ++j) {
    double acc = 0.0;
    for (const auto& r : table.rows()) acc += r[j];
    s.cell_means[j] = acc / n;
  }
  auto mean = [&](Level a, Level b) { return s.cell_means[cell_index(a, b)]; };
  for (std::size_t k = 0; k < 2; ++k) {
    const Level z = level_at(k);
    s.theta_A_given_B[k] = mean(Level::Plus, z) - mean(Level::Minus, z);
    s.theta_B_given_A[k] = mean(z, Level::Plus) - mean(z, Level::Minus);
  }
  s.theta_A = (s.theta_A_given_B[1] + s.theta_A_given_B[0]) / 2.0;
  s.theta_AB = (s.theta_A_given_B[1] - s.theta_A_given_B[0]) / 2.0;
  return s;
}

DispersionSummary dispersions(const PotentialOutcomes& table) {
  DispersionSummary d;
  const std::size_t n = table.size();

  std::array<std::vector<double>, 4> cols;
  for (std::size_t j = 0; j < 4; ++j) {
    cols[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) cols[j][i] = table(i, j);
  }
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = j; k < 4; ++k) {
      d.s_cross[j][k] = d.s_cross[k][j] = sample_cov(cols[j], cols[k]);
    }
    d.s2_cell[j] = d.s_cross[j][j];
  }

  std::array<std::vector<double>, 2> effA;
  std::vector<double> mainA(n);
  for (std::size_t k = 0; k < 2; ++k) {
    effA[k].resize(n);
    for (std::size_t i = 0; i < n; ++i) effA[k][i] = table.unit_effect_A(i, level_at(k));
  }
  for (std::size_t i = 0; i < n; ++i) mainA[i] = (effA[1][i] + effA[0][i]) / 2.0;

  d.s2_A = sample_cov(mainA, mainA);
  for (std::size_t k = 0; k < 2; ++k) d.s2_A_given_B[k] = sample_cov(effA[k], effA[k]);
  d.s_cond_cross = sample_cov(effA[1], effA[0]);

  for (std::size_t k = 0; k < 2; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = table.unit_effect_B(i, level_at(k));
      acc += e * e;
    }
    d.sum_sq_thetaB_given_A[k] = acc;
  }
  return d;
}

double weighted_effect_dispersion(const PotentialOutcomes& table, double pi_b) {
  require(pi_b > 0.0 && pi_b < 1.0, ErrorCode::InvalidArgument, "pi_B must lie strictly inside (0, 1)");
  const auto d = dispersions(table);
  const double q = 1.0 - pi_b;
  return pi_b * pi_b * d.s2_A_given_B[1] + q * q * d.s2_A_given_B[0] + 2.0 * pi_b * q * d.s_cond_cross;
}

bool is_strictly_additive(const PotentialOutcomes& table, double tol) {
  double scale = 1.0;
  for (const auto& r : table.rows()) {
    for (double v : r) scale = std::max(scale, std::abs(v));
  }
  const auto& first = table.row(0);
  for (const auto& r : table.rows()) {
    for (std::size_t j = 1; j < 4; ++j) {
      if (std::abs((r[j] - r[0]) - (first[j] - first[0])) > tol * scale) return false;
    }
  }
  return true;
}

PotentialOutcomes read_table_csv(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty() || lines.front() != kTableHeader) {
    fail(ErrorCode::Io, "'" + path + "': expected header " + kTableHeader);
  }
  std::vector<CellVector> rows;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = csv::split(lines[l]);
    const std::string ctx = path + ":" + std::to_string(l + 1);
    if (fields.size() != 4) fail(ErrorCode::Io, ctx + ": expected 4 columns");
    CellVector row{};
    for (std::size_t j = 0; j < 4; ++j) row[j] = csv::parse_double(fields[j], ctx);
    rows.push_back(row);
  }
  return PotentialOutcomes::build(std::move(rows));
}

void write_table_csv(const PotentialOutcomes& table, const std::string& path) {
  std::ostringstream out;
  out << kTableHeader << '\n';
  for (const auto& r : table.rows()) {
    out << csv::format(r[0]) << ',' << csv::format(r[1]) << ',' << csv::format(r[2]) << ','
        << csv::format(r[3]) << '\n';
  }
  csv::write_text(path, out.str());
}

}  // namespace hfl
