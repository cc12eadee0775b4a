#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace hfl {

enum class Level : int { Minus = -1, Plus = 1 };

/// 0 for the minus level, 1 for the plus level. Used to index 2-vectors.
constexpr std::size_t level_index(Level z) { return z == Level::Plus ? 1 : 0; }
constexpr Level level_at(std::size_t idx) { return idx == 0 ? Level::Minus : Level::Plus; }
constexpr Level flip(Level z) { return z == Level::Plus ? Level::Minus : Level::Plus; }

/// A treatment combination (z_A, z_B).
struct Cell {
  Level a;
  Level b;
  friend constexpr bool operator==(Cell, Cell) = default;
};

/// Canonical order: (-,-), (+,-), (-,+), (+,+).
inline constexpr std::array<Cell, 4> kCells = {{
    {Level::Minus, Level::Minus},
    {Level::Plus, Level::Minus},
    {Level::Minus, Level::Plus},
    {Level::Plus, Level::Plus},
}};

constexpr std::size_t cell_index(Level a, Level b) { return level_index(a) + 2 * level_index(b); }
constexpr std::size_t cell_index(Cell z) { return cell_index(z.a, z.b); }

using CellVector = std::array<double, 4>;
using CellMatrix = std::array<std::array<double, 4>, 4>;
using LevelPair = std::array<double, 2>;  // indexed by level_index

/// Finite population of potential outcomes Y_i(z), one row per unit, columns in
/// canonical cell order. Immutable once built.
class PotentialOutcomes {
 public:
  /// Throws Error(InvalidArgument) when N < 2 or any entry is non-finite.
  static PotentialOutcomes build(std::vector<CellVector> rows);

  std::size_t size() const { return rows_.size(); }
  const CellVector& row(std::size_t i) const { return rows_[i]; }
  double operator()(std::size_t i, Cell z) const { return rows_[i][cell_index(z)]; }
  double operator()(std::size_t i, std::size_t cell) const { return rows_[i][cell]; }
  const std::vector<CellVector>& rows() const { return rows_; }

  /// Unit-level conditional effect theta_{i,A|z_B}.
  double unit_effect_A(std::size_t i, Level z_b) const {
    return (*this)(i, Cell{Level::Plus, z_b}) - (*this)(i, Cell{Level::Minus, z_b});
  }
  /// Unit-level conditional effect theta_{i,B|z_A}.
  double unit_effect_B(std::size_t i, Level z_a) const {
    return (*this)(i, Cell{z_a, Level::Plus}) - (*this)(i, Cell{z_a, Level::Minus});
  }

 private:
  explicit PotentialOutcomes(std::vector<CellVector> rows) : rows_(std::move(rows)) {}
  std::vector<CellVector> rows_;
};

struct EstimandSummary {
  CellVector cell_means{};
  double theta_A = 0.0;
  double theta_AB = 0.0;
  LevelPair theta_A_given_B{};  // [theta_{A|-1_B}, theta_{A|+1_B}]
  LevelPair theta_B_given_A{};  // [theta_{B|-1_A}, theta_{B|+1_A}]
};

struct DispersionSummary {
  CellVector s2_cell{};
  CellMatrix s_cross{};
  double s2_A = 0.0;
  LevelPair s2_A_given_B{};
  double s_cond_cross = 0.0;  // S_{A|+1_B, A|-1_B}
  LevelPair sum_sq_thetaB_given_A{};  // uncentered: sum_i theta_{i,B|z_A}^2
};

EstimandSummary estimands(const PotentialOutcomes& table);

/// All variances and covariances use divisor N - 1.
DispersionSummary dispersions(const PotentialOutcomes& table);

/// S^2_{A_w}: dispersion of the pi_B-weighted unit-level conditional effects.
double weighted_effect_dispersion(const PotentialOutcomes& table, double pi_b);

/// True when every contrast Y_i(z) - Y_i(z*) is the same for all units, up to
/// `tol` relative to the table's magnitude.
bool is_strictly_additive(const PotentialOutcomes& table, double tol = 1e-9);

/// CSV with header `y_mm,y_pm,y_mp,y_pp`.
PotentialOutcomes read_table_csv(const std::string& path);
void write_table_csv(const PotentialOutcomes& table, const std::string& path);

}  // namespace hfl
