#include <cmath>
#include <string>

#include "doctest.h"
#include "hfl/error.hpp"
#include "hfl/estimators.hpp"
#include "support.hpp"

using namespace hfl;

namespace {

Assignment t4_assignment() { return Assignment::from_indicators({1, 1, 0, 0}, {1, 0, 1, 0}); }

}  // namespace

TEST_CASE("observe picks the assigned potential outcome") {
  const auto data = observe(hfl::testing::t4(), t4_assignment(), Visibility::Observed);
  CHECK(data.y(0) == 5.0);
  CHECK(data.y(1) == 3.0);
  CHECK(data.y(2) == 1.0);
  CHECK(data.y(3) == 1.0);
  CHECK(data.arm_count(Level::Plus) == 2);
  CHECK(data.cell_counts() == CellCounts{1, 1, 1, 1});
}

TEST_CASE("point and variance estimates on the four-unit table") {
  const auto hidden = observe(hfl::testing::t4(), t4_assignment(), Visibility::Hidden);
  CHECK(theta_hat_1(hidden) == doctest::Approx(3.0));
  CHECK(var_hat_1(hidden) == doctest::Approx(1.0));
  CHECK(var_hat_1(hidden, DivisorMode::NMinusOne) == doctest::Approx(1.0 / 3.0));
  const auto seen = observe(hfl::testing::t4(), t4_assignment(), Visibility::Observed);
  CHECK(theta_hat_2(seen) == doctest::Approx(3.0));
  // One unit per cell: s^2(z) is undefined.
  CHECK_THROWS_AS(var_hat_2(seen), Error);
}

TEST_CASE("hidden B labels are unavailable") {
  const auto hidden = observe(hfl::testing::t4(), t4_assignment(), Visibility::Hidden);
  try {
    theta_hat_2(hidden);
    FAIL("expected Unavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unavailable);
  }
  CHECK_THROWS_AS(hidden.b_level(0), Error);
  CHECK_THROWS_AS(hidden.cell_counts(), Error);
}

TEST_CASE("observe rejects size mismatch") {
  const auto a = Assignment::from_indicators({1, 0, 1}, {0, 0, 1});
  try {
    observe(hfl::testing::t4(), a, Visibility::Hidden);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("situation II variance estimate on a hand-checked sample") {
  // Cells (-,-): 1,3  (+,-): 2,6  (-,+): 0,4  (+,+): 5,5.
  const ObservedData data({1, 3, 2, 6, 0, 4, 5, 5},
                          {Level::Minus, Level::Minus, Level::Plus, Level::Plus, Level::Minus, Level::Minus,
                           Level::Plus, Level::Plus},
                          {Level::Minus, Level::Minus, Level::Minus, Level::Minus, Level::Plus, Level::Plus,
                           Level::Plus, Level::Plus},
                          Visibility::Observed);
  CHECK(theta_hat_2(data) == doctest::Approx(0.5 * (4 - 2) + 0.5 * (5 - 2)));
  CHECK(var_hat_2(data) == doctest::Approx((2.0 / 2 + 8.0 / 2 + 8.0 / 2 + 0.0) / 4.0));
  CHECK(pooled_pi_b(data) == doctest::Approx(0.5));
  // E^[1/N_z] at n_arm = 4, pi = 1/2 is 25/42.
  const Design design(8, 4, 0.5);
  CHECK(var_hat_2_plugin(data, design) == doctest::Approx(25.0 / 42.0 * (2.0 + 8.0 + 8.0 + 0.0) / 4.0));
}

TEST_CASE("critical value and interval") {
  CHECK(normal_critical_value(0.05) == 1.96);
  CHECK(normal_critical_value(0.10) == doctest::Approx(1.6448536269514722));
  CHECK_THROWS_AS(normal_critical_value(0.0), Error);
  const auto [lo, hi] = confidence_interval(3.0, 0.25, 0.05);
  CHECK(lo == doctest::Approx(2.02));
  CHECK(hi == doctest::Approx(3.98));
  CHECK_THROWS_AS(confidence_interval(3.0, -1.0, 0.05), Error);
}

TEST_CASE("estimate report serializes to one csv row") {
  const auto hidden = observe(hfl::testing::t4(), t4_assignment(), Visibility::Hidden);
  const auto r = estimate(hidden, EstimatorId::ThetaA1, VarianceMethod::NeymanI, 0.05);
  CHECK(r.point == doctest::Approx(3.0));
  CHECK(r.ci_low == doctest::Approx(3.0 - 1.96));
  CHECK(estimate_csv_header() == "estimator,point,var_method,var,ci_low,ci_high,alpha");
  const std::string row = to_csv_row(r);
  CHECK(row.rfind("theta_A_1,3,", 0) == 0);
  CHECK(row.find(",0.05") != std::string::npos);
  CHECK_THROWS_AS(estimate(hidden, EstimatorId::ThetaA2, VarianceMethod::PluginII, 0.05), Error);
}

TEST_CASE("estimators are shift equivariant and permutation invariant") {
  std::mt19937_64 g(17);
  RandomStream rng(2);
  for (int rep = 0; rep < 25; ++rep) {
    const auto t = hfl::testing::random_table(g, 12, hfl::testing::TableShape::Gaussian);
    const auto a = sample_conditional_assignment(Design(12, 6, 0.5), 2, 1000, rng).assignment;
    const auto base = observe(t, a, Visibility::Observed);

    auto rows = t.rows();
    for (auto& r : rows) {
      for (double& y : r) y += 10.0;
    }
    const auto shifted = observe(PotentialOutcomes::build(rows), a, Visibility::Observed);
    CHECK(theta_hat_1(shifted) == doctest::Approx(theta_hat_1(base)).epsilon(1e-9));
    CHECK(theta_hat_2(shifted) == doctest::Approx(theta_hat_2(base)).epsilon(1e-9));
    CHECK(var_hat_2(shifted) == doctest::Approx(var_hat_2(base)).epsilon(1e-9));

    std::vector<double> y;
    std::vector<Level> arms, bs;
    for (std::size_t i = 12; i-- > 0;) {
      y.push_back(base.y(i));
      arms.push_back(base.arm(i));
      bs.push_back(base.b_level(i));
    }
    const ObservedData reversed(y, arms, bs, Visibility::Observed);
    CHECK(theta_hat_2(reversed) == doctest::Approx(theta_hat_2(base)).epsilon(1e-12));
    CHECK(var_hat_1(reversed) == doctest::Approx(var_hat_1(base)).epsilon(1e-12));
  }
}
