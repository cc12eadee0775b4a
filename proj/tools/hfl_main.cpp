#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "hfl/hfl.h"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

int report(const std::string& context, int code) {
  std::fprintf(stderr, "hfl: %s: %s\n", context.c_str(), hfl_last_error());
  return code;
}

// Input problems (unreadable or malformed files) are usage errors.
int input_code(hfl_status st) {
  return st == HFL_ERR_IO || st == HFL_ERR_CONFIG ? kUsageError : kRuntimeError;
}

std::string output_path(const std::string& dir, const char* name) {
  if (dir.empty() || dir == "-") return "-";
  return (std::filesystem::path(dir) / name).string();
}

bool make_dir(const std::string& dir) {
  if (dir.empty() || dir == "-") return true;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    std::fprintf(stderr, "hfl: cannot create output directory '%s'\n", dir.c_str());
    return false;
  }
  return true;
}

struct TableArgs {
  std::string table;
  std::size_t n_plus = 0;
  double pi_b = 0.5;
  std::size_t min_cell = 1;
  std::string out;
};

void add_table_args(CLI::App* cmd, TableArgs& a) {
  cmd->add_option("--table", a.table, "potential-outcome table CSV (y_mm,y_pm,y_mp,y_pp)")->required();
  cmd->add_option("--n-plus", a.n_plus, "units assigned to +1 of factor A")->required();
  cmd->add_option("--pi-b", a.pi_b, "probability of +1 for factor B")->required();
  cmd->add_option("--min-cell", a.min_cell, "conditioning floor on every cell count")->capture_default_str();
  cmd->add_option("--out", a.out, "output directory (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomization inference for two-factor designs with a Bernoulli second factor"};
  app.require_subcommand(1);

  unsigned threads = 1;
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (fallback: HFL_THREADS, else 1)")
                          ->check(CLI::PositiveNumber);

  std::string config, out_dir = ".";
  bool svg = false;
  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo coverage sweep from a JSON config");
  sim->add_option("--config", config, "sweep config (JSON object or array)")->required();
  sim->add_option("--out", out_dir, "output directory")->capture_default_str();
  sim->add_flag("--svg", svg, "also write coverage.svg and width.svg");

  TableArgs oracle_args, theory_args;
  auto* oracle = app.add_subcommand("oracle", "exact randomization moments by full enumeration");
  add_table_args(oracle, oracle_args);
  auto* theory = app.add_subcommand("theory", "closed-form moments for a table");
  add_table_args(theory, theory_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "hfl: %s\n", e.what());
    return kUsageError;
  }
  if (threads_opt->count() == 0) {
    if (const char* env = std::getenv("HFL_THREADS"); env != nullptr && *env != '\0') {
      const std::string text = env;
      const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), threads);
      if (ec != std::errc{} || end != text.data() + text.size() || threads == 0) {
        std::fprintf(stderr, "hfl: HFL_THREADS must be a positive integer, got '%s'\n", env);
        return kUsageError;
      }
    }
  }

  if (sim->parsed()) {
    hfl_sweep* sweep = nullptr;
    hfl_status st = hfl_sweep_run_config_file(config.c_str(), threads, &sweep);
    if (st != HFL_OK) return report("simulate", input_code(st));
    int rc = 0;
    if (!make_dir(out_dir)) {
      rc = kRuntimeError;
    } else if ((st = hfl_sweep_write_csv(sweep, output_path(out_dir, "sweep.csv").c_str())) != HFL_OK) {
      rc = report("writing sweep.csv", kRuntimeError);
    } else if (svg) {
      if ((st = hfl_sweep_write_svg(sweep, "coverage", output_path(out_dir, "coverage.svg").c_str())) != HFL_OK ||
          (st = hfl_sweep_write_svg(sweep, "mean_width", output_path(out_dir, "width.svg").c_str())) != HFL_OK) {
        rc = report("writing svg", kRuntimeError);
      }
    }
    hfl_sweep_destroy(sweep);
    return rc;
  }

  const bool is_oracle = oracle->parsed();
  const TableArgs& a = is_oracle ? oracle_args : theory_args;
  hfl_table* table = nullptr;
  hfl_status st = hfl_table_read_csv(a.table.c_str(), &table);
  if (st != HFL_OK) return report("reading table", input_code(st));
  if (!make_dir(a.out)) {
    hfl_table_destroy(table);
    return kRuntimeError;
  }
  if (is_oracle) {
    st = hfl_oracle_write_csv(table, a.n_plus, a.pi_b, a.min_cell, threads, output_path(a.out, "oracle.csv").c_str());
  } else {
    st = hfl_theory_write_csv(table, a.n_plus, a.pi_b, a.min_cell, output_path(a.out, "theory.csv").c_str());
  }
  hfl_table_destroy(table);
  return st == HFL_OK ? 0 : report(is_oracle ? "oracle" : "theory", kRuntimeError);
}
