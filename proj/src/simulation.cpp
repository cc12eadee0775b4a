#include "hfl/simulation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "hfl/csv.hpp"
#include "hfl/error.hpp"
#include "hfl/theory.hpp"

namespace hfl {

CellVector model_means(const PopulationModel& m) {
  return {m.theta_AB_star, m.theta_A_star, m.theta_B_star, m.theta_A_star + m.theta_B_star + m.theta_AB_star};
}

PotentialOutcomes generate_population(const PopulationModel& model, std::size_t n, RandomStream& rng) {
  require(model.sigma2 > 0.0 && std::isfinite(model.sigma2), ErrorCode::InvalidArgument, "sigma2 must be positive");
  const CellVector mu = model_means(model);
  const double sd = std::sqrt(model.sigma2);
  std::vector<CellVector> rows(n);

  if (model.kind == ModelKind::StrictAdditive) {
    for (auto& r : rows) {
      const double eps = sd * rng.normal();
      for (std::size_t j = 0; j < 4; ++j) r[j] = mu[j] + eps;
    }
    return PotentialOutcomes::build(std::move(rows));
  }

  Eigen::Matrix4d cov = Eigen::Matrix4d::Constant(model.rho * model.sigma2);
  cov.diagonal().setConstant(model.sigma2);
  const Eigen::LLT<Eigen::Matrix4d> llt(cov);
  if (!(model.rho > -1.0 / 3.0 && model.rho < 1.0) || llt.info() != Eigen::Success) {
    fail(ErrorCode::InvalidArgument, "covariance matrix is not positive definite");
  }
  const Eigen::Matrix4d lower = llt.matrixL();
  for (auto& r : rows) {
    Eigen::Vector4d z;
    for (int j = 0; j < 4; ++j) z[j] = rng.normal();
    const Eigen::Vector4d y = lower * z;
    for (std::size_t j = 0; j < 4; ++j) r[j] = mu[j] + y[static_cast<int>(j)];
  }
  return PotentialOutcomes::build(std::move(rows));
}

const char* to_string(Situation s) { return s == Situation::I ? "I" : "II"; }

ReplicateRecord run_replicate(const PotentialOutcomes& table, const Design& design, double theta_a,
                              Situation situation, const ReplicateOptions& options, RandomStream& rng) {
  ReplicateRecord rec;
  EstimateReport report;
  if (situation == Situation::I) {
    const auto a = sample_assignment(design, rng);
    report = estimate(observe(table, a, Visibility::Hidden), EstimatorId::ThetaA1, VarianceMethod::NeymanI,
                      options.alpha);
  } else {
    require(options.min_cell >= 2, ErrorCode::InvalidArgument, "situation II needs min_cell >= 2");
    auto draw = sample_conditional_assignment(design, options.min_cell, options.max_attempts, rng);
    rec.attempts = draw.attempts;
    const auto data = observe(table, draw.assignment, Visibility::Observed);
    report = estimate(data, EstimatorId::ThetaA2, VarianceMethod::ConditionalII, options.alpha);
    if (options.plugin) rec.plugin_variance = var_hat_2_plugin(data, design);
  }
  rec.point = report.point;
  rec.variance_estimate = report.variance_estimate;
  rec.ci_low = report.ci_low;
  rec.ci_high = report.ci_high;
  rec.covered = report.ci_low <= theta_a && theta_a <= report.ci_high;
  rec.width = report.ci_high - report.ci_low;
  return rec;
}

void SweepConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::Config, "invalid config: " + what);
  };
  check(n_units >= 4, "n_units must be at least 4");
  check(n_plus >= 2 && n_plus + 2 <= n_units, "both arms need at least 2 units");
  check(!pi_grid.empty(), "pi_grid is empty");
  for (std::size_t g = 0; g < pi_grid.size(); ++g) {
    check(pi_grid[g] > 0.0 && pi_grid[g] < 1.0, "pi_grid values must lie strictly inside (0, 1)");
    check(g == 0 || pi_grid[g] > pi_grid[g - 1], "pi_grid must be strictly increasing");
  }
  check(replicates >= 1, "replicates must be at least 1");
  check(alpha > 0.0 && alpha < 1.0, "alpha must lie strictly inside (0, 1)");
  check(max_attempts >= 1, "max_attempts must be at least 1");
  check(!situations.empty(), "situations is empty");
  check(situations.size() == 1 || situations[0] != situations[1], "situations must not repeat");
  if (std::find(situations.begin(), situations.end(), Situation::II) != situations.end()) {
    check(min_cell >= 2, "situation II needs min_cell >= 2");
    check(2 * min_cell <= std::min(n_plus, n_units - n_plus), "min_cell too large for the arm sizes");
  }
  check(model.sigma2 > 0.0, "sigma2 must be positive");
  check(model.kind == ModelKind::StrictAdditive || (model.rho > -1.0 / 3.0 && model.rho < 1.0),
        "rho must lie in (-1/3, 1)");
  check(model.name.find_first_of(",\n\r\"") == std::string::npos && !model.name.empty(),
        "model name must be non-empty without commas, quotes or newlines");
}

std::vector<double> make_grid(double lo, double hi, double step) {
  require(step > 0.0 && hi >= lo, ErrorCode::InvalidArgument, "bad grid bounds");
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12;
  }
  return grid;
}

namespace {

constexpr std::uint64_t kPopulationStream = ~std::uint64_t{0};

struct TaskFailure {
  ErrorCode code = ErrorCode::InvalidArgument;
  std::string message;
};

}  // namespace

SweepResult run_sweep_on(const PotentialOutcomes& table, const SweepConfig& config, unsigned threads) {
  config.validate();
  require(table.size() == config.n_units, ErrorCode::DimensionMismatch, "table size differs from n_units");
  const double theta_a = estimands(table).theta_A;
  const std::size_t n_sit = config.situations.size();
  const std::size_t n_grid = config.pi_grid.size();
  const std::size_t reps = config.replicates;
  const std::size_t n_tasks = n_sit * n_grid * reps;

  std::vector<Design> designs;
  designs.reserve(n_grid);
  for (double p : config.pi_grid) designs.emplace_back(config.n_units, config.n_plus, p);

  ReplicateOptions options;
  options.min_cell = config.min_cell;
  options.alpha = config.alpha;
  options.max_attempts = config.max_attempts;

  // Task index t = (g * n_sit + s) * reps + r.
  std::vector<ReplicateRecord> records(n_tasks);
  std::vector<std::optional<TaskFailure>> failures(n_tasks);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{n_tasks};

  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= n_tasks || t > first_failure.load()) return;
      const std::size_t r = t % reps;
      const std::size_t s = (t / reps) % n_sit;
      const std::size_t g = t / (reps * n_sit);
      const Situation sit = config.situations[s];
      auto rng = RandomStream::derive(config.master_seed, g, r).split(sit == Situation::I ? 1 : 2);
      try {
        records[t] = run_replicate(table, designs[g], theta_a, sit, options, rng);
      } catch (const Error& e) {
        failures[t] = TaskFailure{e.code(), e.what()};
        std::size_t cur = first_failure.load();
        while (t < cur && !first_failure.compare_exchange_weak(cur, t)) {
        }
      }
    }
  };

  const unsigned workers = std::max(1U, threads);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures) {
    if (f) fail(f->code, f->message);
  }

  SweepResult result;
  result.theta_A = theta_a;
  const double nrep = static_cast<double>(reps);
  for (std::size_t g = 0; g < n_grid; ++g) {
    const Design& design = designs[g];
    for (std::size_t s = 0; s < n_sit; ++s) {
      const Situation sit = config.situations[s];
      double covered = 0.0, width = 0.0, sq_err = 0.0, point = 0.0, varhat = 0.0, attempts = 0.0;
      const std::size_t base = (g * n_sit + s) * reps;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& rec = records[base + r];
        covered += rec.covered ? 1.0 : 0.0;
        width += rec.width;
        sq_err += (rec.point - theta_a) * (rec.point - theta_a);
        point += rec.point;
        varhat += rec.variance_estimate;
        attempts += static_cast<double>(rec.attempts);
      }
      SweepRow row;
      row.model = config.model.name;
      row.situation = sit;
      row.pi_b = design.pi_b();
      row.coverage = covered / nrep;
      row.mean_width = width / nrep;
      row.mse = sq_err / nrep;
      row.rel_bias = (point / nrep - theta_a) / theta_a;
      if (sit == Situation::I) {
        row.exact_bias = bias_theta1(table, design.pi_b());
        row.exact_var = variance_theta1(table, design);
      } else {
        row.exact_bias = 0.0;
        row.exact_var = variance_theta2(table, design, config.min_cell);
      }
      row.varest_rel_bias = (varhat / nrep - row.exact_var) / row.exact_var;
      row.acceptance_rate = nrep / attempts;

      SweepDiagnostics diag;
      diag.mean_point = point / nrep;
      diag.mean_varhat = varhat / nrep;
      double ss = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double d = records[base + r].point - diag.mean_point;
        ss += d * d;
      }
      diag.point_variance = reps > 1 ? ss / (nrep - 1.0) : 0.0;
      diag.coverage_se = std::sqrt(row.coverage * (1.0 - row.coverage) / nrep);
      diag.mean_point_se = std::sqrt(diag.point_variance / nrep);

      result.rows.push_back(std::move(row));
      result.diagnostics.push_back(diag);
    }
  }
  return result;
}

SweepResult run_sweep(const SweepConfig& config, unsigned threads) {
  config.validate();
  auto rng = RandomStream::derive(config.master_seed, kPopulationStream, 0);
  const auto table = generate_population(config.model, config.n_units, rng);
  return run_sweep_on(table, config, threads);
}

std::string sweep_csv_header() {
  return "model,situation,pi_b,coverage,mean_width,mse,rel_bias,varest_rel_bias,exact_bias,exact_var,"
         "acceptance_rate";
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << sweep_csv_header() << '\n';
  for (const auto& r : result.rows) {
    out << r.model << ',' << to_string(r.situation) << ',' << csv::format(r.pi_b) << ',' << csv::format(r.coverage)
        << ',' << csv::format(r.mean_width) << ',' << csv::format(r.mse) << ',' << csv::format(r.rel_bias) << ','
        << csv::format(r.varest_rel_bias) << ',' << csv::format(r.exact_bias) << ',' << csv::format(r.exact_var)
        << ',' << csv::format(r.acceptance_rate) << '\n';
  }
  return out.str();
}

SweepResult parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != sweep_csv_header()) fail(ErrorCode::Io, "sweep csv: bad header");
  SweepResult result;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    const std::string ctx = "sweep csv line " + std::to_string(lineno);
    if (f.size() != 11) fail(ErrorCode::Io, ctx + ": expected 11 columns");
    SweepRow r;
    r.model = f[0];
    if (f[1] == "I") {
      r.situation = Situation::I;
    } else if (f[1] == "II") {
      r.situation = Situation::II;
    } else {
      fail(ErrorCode::Io, ctx + ": unknown situation '" + f[1] + "'");
    }
    r.pi_b = csv::parse_double(f[2], ctx);
    r.coverage = csv::parse_double(f[3], ctx);
    r.mean_width = csv::parse_double(f[4], ctx);
    r.mse = csv::parse_double(f[5], ctx);
    r.rel_bias = csv::parse_double(f[6], ctx);
    r.varest_rel_bias = csv::parse_double(f[7], ctx);
    r.exact_bias = csv::parse_double(f[8], ctx);
    r.exact_var = csv::parse_double(f[9], ctx);
    r.acceptance_rate = csv::parse_double(f[10], ctx);
    result.rows.push_back(std::move(r));
  }
  return result;
}

}  // namespace hfl
