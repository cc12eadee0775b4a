#include "hfl/hfl.h"

#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "hfl/config.hpp"
#include "hfl/csv.hpp"
#include "hfl/error.hpp"
#include "hfl/oracle.hpp"
#include "hfl/population.hpp"
#include "hfl/simulation.hpp"
#include "hfl/svg.hpp"
#include "hfl/theory.hpp"

struct hfl_table {
  hfl::PotentialOutcomes table;
};

struct hfl_sweep {
  hfl::SweepResult result;
};

namespace {

thread_local std::string g_last_error;

hfl_status to_status(hfl::ErrorCode code) {
  using hfl::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return HFL_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return HFL_ERR_DIMENSION_MISMATCH;
    case ErrorCode::Unavailable: return HFL_ERR_UNAVAILABLE;
    case ErrorCode::AcceptanceFailure: return HFL_ERR_ACCEPTANCE_FAILURE;
    case ErrorCode::TooLarge: return HFL_ERR_TOO_LARGE;
    case ErrorCode::EmptyEvent: return HFL_ERR_EMPTY_EVENT;
    case ErrorCode::Io: return HFL_ERR_IO;
    case ErrorCode::Config: return HFL_ERR_CONFIG;
  }
  return HFL_ERR_INTERNAL;
}

template <class F>
hfl_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return HFL_OK;
  } catch (const hfl::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return HFL_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (p == nullptr) hfl::fail(hfl::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

hfl::Design design_for(const hfl_table* t, std::size_t n_plus, double pi_b) {
  need(t, "table");
  return hfl::Design(t->table.size(), n_plus, pi_b);
}

hfl::EstimatorId estimator_of(hfl_estimator e) {
  if (e == HFL_THETA_A1) return hfl::EstimatorId::ThetaA1;
  if (e == HFL_THETA_A2) return hfl::EstimatorId::ThetaA2;
  hfl::fail(hfl::ErrorCode::InvalidArgument, "unknown estimator");
}

void fill(const hfl::ExactMoments& m, hfl_exact_moments* out) {
  *out = {m.mean, m.variance, m.mean_varhat, m.mean_varhat_plugin, m.min_cell, m.event_probability, m.support_size};
}

void run_configs(const std::vector<hfl::SweepConfig>& configs, unsigned threads, hfl_sweep** out) {
  auto sweep = std::make_unique<hfl_sweep>();
  for (const auto& cfg : configs) {
    auto part = hfl::run_sweep(cfg, threads);
    sweep->result.theta_A = part.theta_A;
    for (auto& r : part.rows) sweep->result.rows.push_back(std::move(r));
    for (auto& d : part.diagnostics) sweep->result.diagnostics.push_back(d);
  }
  *out = sweep.release();
}

}  // namespace

extern "C" {

const char* hfl_last_error(void) { return g_last_error.c_str(); }

const char* hfl_status_name(hfl_status status) {
  switch (status) {
    case HFL_OK: return "ok";
    case HFL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HFL_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case HFL_ERR_UNAVAILABLE: return "unavailable";
    case HFL_ERR_ACCEPTANCE_FAILURE: return "acceptance failure";
    case HFL_ERR_TOO_LARGE: return "too large";
    case HFL_ERR_EMPTY_EVENT: return "empty event";
    case HFL_ERR_IO: return "io error";
    case HFL_ERR_CONFIG: return "config error";
    case HFL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

hfl_status hfl_table_create(const double* values, size_t n_units, hfl_table** out) {
  return guarded([&] {
    need(values, "values");
    need(out, "out");
    std::vector<hfl::CellVector> rows(n_units);
    for (size_t i = 0; i < n_units; ++i) {
      for (size_t j = 0; j < 4; ++j) rows[i][j] = values[4 * i + j];
    }
    *out = new hfl_table{hfl::PotentialOutcomes::build(std::move(rows))};
  });
}

hfl_status hfl_table_read_csv(const char* path, hfl_table** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new hfl_table{hfl::read_table_csv(path)};
  });
}

hfl_status hfl_table_write_csv(const hfl_table* table, const char* path) {
  return guarded([&] {
    need(table, "table");
    need(path, "path");
    hfl::write_table_csv(table->table, path);
  });
}

size_t hfl_table_size(const hfl_table* table) { return table ? table->table.size() : 0; }

void hfl_table_destroy(hfl_table* table) { delete table; }

hfl_status hfl_table_estimands(const hfl_table* table, hfl_estimands* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    const auto e = hfl::estimands(table->table);
    for (size_t j = 0; j < 4; ++j) out->cell_means[j] = e.cell_means[j];
    out->theta_a = e.theta_A;
    out->theta_ab = e.theta_AB;
    out->theta_a_given_b[0] = e.theta_A_given_B[0];
    out->theta_a_given_b[1] = e.theta_A_given_B[1];
    out->theta_b_given_a[0] = e.theta_B_given_A[0];
    out->theta_b_given_a[1] = e.theta_B_given_A[1];
  });
}

hfl_status hfl_theory_moments(const hfl_table* table, size_t n_plus, double pi_b, size_t min_cell,
                              hfl_theory* out) {
  return guarded([&] {
    need(out, "out");
    const auto design = design_for(table, n_plus, pi_b);
    const auto m = hfl::theoretical_moments(table->table, design, min_cell);
    *out = {m.theta_A, m.e_theta1, m.bias_theta1, m.var_theta1, m.varest_bias_theta1, m.e_theta2, m.var_theta2,
            m.min_cell};
  });
}

hfl_status hfl_theory_write_csv(const hfl_table* table, size_t n_plus, double pi_b, size_t min_cell,
                                const char* path) {
  return guarded([&] {
    need(path, "path");
    const auto design = design_for(table, n_plus, pi_b);
    const auto m = hfl::theoretical_moments(table->table, design, min_cell);
    hfl::csv::write_text(path, hfl::theory_csv_header() + "\n" + hfl::to_csv_row(m) + "\n");
  });
}

hfl_status hfl_oracle_theta1(const hfl_table* table, size_t n_plus, double pi_b, unsigned threads,
                             hfl_exact_moments* out) {
  return guarded([&] {
    need(out, "out");
    const auto design = design_for(table, n_plus, pi_b);
    fill(hfl::enumerate_theta1(table->table, design, hfl::DivisorMode::ArmSizeMinusOne, {threads}), out);
  });
}

hfl_status hfl_oracle_theta2(const hfl_table* table, size_t n_plus, double pi_b, size_t min_cell, unsigned threads,
                             hfl_exact_moments* out) {
  return guarded([&] {
    need(out, "out");
    const auto design = design_for(table, n_plus, pi_b);
    fill(hfl::enumerate_theta2(table->table, design, min_cell, {threads}), out);
  });
}

hfl_status hfl_oracle_coverage(const hfl_table* table, size_t n_plus, double pi_b, hfl_estimator estimator,
                               size_t min_cell, double alpha, unsigned threads, double* out) {
  return guarded([&] {
    need(out, "out");
    const auto design = design_for(table, n_plus, pi_b);
    *out = hfl::exact_coverage(table->table, design, estimator_of(estimator), min_cell, alpha, {threads});
  });
}

hfl_status hfl_oracle_write_csv(const hfl_table* table, size_t n_plus, double pi_b, size_t min_cell,
                                unsigned threads, const char* path) {
  return guarded([&] {
    need(path, "path");
    const auto design = design_for(table, n_plus, pi_b);
    const auto m1 = hfl::enumerate_theta1(table->table, design, hfl::DivisorMode::ArmSizeMinusOne, {threads});
    const auto m2 = hfl::enumerate_theta2(table->table, design, min_cell, {threads});
    std::ostringstream text;
    text << hfl::oracle_csv_header() << '\n'
         << hfl::to_csv_row(hfl::EstimatorId::ThetaA1, m1) << '\n'
         << hfl::to_csv_row(hfl::EstimatorId::ThetaA2, m2) << '\n';
    hfl::csv::write_text(path, text.str());
  });
}

hfl_status hfl_estimate(const double* y, const unsigned char* w_a, const unsigned char* w_b, size_t n_units,
                        hfl_estimator estimator, hfl_var_method method, double alpha, double design_pi_b,
                        hfl_estimate_report* out) {
  return guarded([&] {
    need(y, "y");
    need(w_a, "w_a");
    need(out, "out");
    std::vector<double> ys(y, y + n_units);
    std::vector<hfl::Level> arms(n_units), b;
    size_t n_plus = 0;
    for (size_t i = 0; i < n_units; ++i) {
      arms[i] = w_a[i] ? hfl::Level::Plus : hfl::Level::Minus;
      n_plus += w_a[i] ? 1 : 0;
    }
    if (w_b != nullptr) {
      b.resize(n_units);
      for (size_t i = 0; i < n_units; ++i) b[i] = w_b[i] ? hfl::Level::Plus : hfl::Level::Minus;
    }
    const auto vis = w_b ? hfl::Visibility::Observed : hfl::Visibility::Hidden;
    const hfl::ObservedData data(std::move(ys), std::move(arms), std::move(b), vis);

    hfl::VarianceMethod vm;
    switch (method) {
      case HFL_VAR_NEYMAN_I: vm = hfl::VarianceMethod::NeymanI; break;
      case HFL_VAR_CONDITIONAL_II: vm = hfl::VarianceMethod::ConditionalII; break;
      case HFL_VAR_PLUGIN_II: vm = hfl::VarianceMethod::PluginII; break;
      default: hfl::fail(hfl::ErrorCode::InvalidArgument, "unknown variance method");
    }
    const hfl::EstimateReport r =
        vm == hfl::VarianceMethod::PluginII
            ? [&] {
                const hfl::Design design(n_units, n_plus, design_pi_b);
                return hfl::estimate(data, estimator_of(estimator), vm, alpha, &design);
              }()
            : hfl::estimate(data, estimator_of(estimator), vm, alpha);
    *out = {r.point, r.variance_estimate, r.ci_low, r.ci_high, r.alpha};
  });
}

hfl_status hfl_sweep_run_config_file(const char* path, unsigned threads, hfl_sweep** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    run_configs(hfl::load_sweep_configs(path), threads, out);
  });
}

hfl_status hfl_sweep_run_config_json(const char* json, unsigned threads, hfl_sweep** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    run_configs(hfl::parse_sweep_configs(json), threads, out);
  });
}

hfl_status hfl_sweep_write_csv(const hfl_sweep* sweep, const char* path) {
  return guarded([&] {
    need(sweep, "sweep");
    need(path, "path");
    hfl::csv::write_text(path, hfl::to_csv(sweep->result));
  });
}

hfl_status hfl_sweep_write_svg(const hfl_sweep* sweep, const char* metric, const char* path) {
  return guarded([&] {
    need(sweep, "sweep");
    need(metric, "metric");
    need(path, "path");
    hfl::emit_svg(sweep->result, metric, path);
  });
}

size_t hfl_sweep_row_count(const hfl_sweep* sweep) { return sweep ? sweep->result.rows.size() : 0; }

hfl_status hfl_sweep_row_at(const hfl_sweep* sweep, size_t index, hfl_sweep_row* out) {
  return guarded([&] {
    need(sweep, "sweep");
    need(out, "out");
    if (index >= sweep->result.rows.size()) hfl::fail(hfl::ErrorCode::InvalidArgument, "row index out of range");
    const auto& r = sweep->result.rows[index];
    *out = {r.model.c_str(),
            r.situation == hfl::Situation::I ? HFL_SITUATION_I : HFL_SITUATION_II,
            r.pi_b,
            r.coverage,
            r.mean_width,
            r.mse,
            r.rel_bias,
            r.varest_rel_bias,
            r.exact_bias,
            r.exact_var,
            r.acceptance_rate};
  });
}

void hfl_sweep_destroy(hfl_sweep* sweep) { delete sweep; }

}  // extern "C"
