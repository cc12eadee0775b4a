#pragma once

#include <string>

#include "hfl/simulation.hpp"

namespace hfl {

/// Column of a sweep row to plot: coverage, mean_width, mse, rel_bias,
/// varest_rel_bias, exact_bias, exact_var or acceptance_rate.
double sweep_metric(const SweepRow& row, const std::string& metric);

/// Line plot of `metric` against pi_b, one polyline per (model, situation).
/// Identical input gives identical bytes.
std::string render_svg(const SweepResult& sweep, const std::string& metric);

void emit_svg(const SweepResult& sweep, const std::string& metric, const std::string& path);

}  // namespace hfl
