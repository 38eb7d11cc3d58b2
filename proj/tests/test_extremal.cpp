#include <catch2/catch_amalgamated.hpp>

#include <convlab/extremal_search.hpp>

using namespace convlab;

namespace {
SContext line_ctx(double t) {
  auto grid = make_real_grid(0.05, 3.0);
  return make_scontext(indicator_interval(grid, 1.0), t);
}
} // namespace

TEST_CASE("context validation") {
  auto grid = make_real_grid(0.05, 3.0);
  CHECK_THROWS_AS(make_scontext(indicator_interval(grid, 2.0), 0.1), validation_error);
  CHECK_THROWS_AS(make_scontext(indicator_interval(grid, 1.0), 1.5), validation_error);
}

TEST_CASE("degenerate masses") {
  auto ctx = line_ctx(0.25);
  CHECK(estimate_S(ctx, 0.0, 500, 1).value == 0.0);
  // I = t: the pointwise cap keeps conv <= t, so the hinge norm vanishes.
  CHECK(estimate_S(ctx, 0.25, 500, 1).value == 0.0);
  CHECK_THROWS_AS(estimate_S(ctx, 100.0, 500, 1), validation_error);
}

TEST_CASE("t = 0 reduces to Fubini") {
  auto ctx = line_ctx(0.0);
  // ||f_0 o (phi1 * phi)|| = ||phi1|| ||phi|| = I for every feasible phi.
  auto r = estimate_S(ctx, 1.5, 300, 7);
  CHECK(r.value == Catch::Approx(1.5).margin(1e-10));
}

TEST_CASE("determinism and soundness") {
  auto ctx = line_ctx(0.25);
  auto a = estimate_S(ctx, 1.0, 1000, 42);
  auto b = estimate_S(ctx, 1.0, 1000, 42);
  CHECK(a.value == b.value);
  REQUIRE(a.best_phi.has_value());
  CHECK(a.best_phi->values() == b.best_phi->values());
  CHECK(l1_norm(*a.best_phi) == Catch::Approx(1.0).margin(1e-12));
  // Lower bound below the certified envelope.
  CHECK(a.value <= 0.75 * 0.75 + 0.05);
  // An interval candidate gives (1-t)(I-t) in the continuum: the search
  // should get close.
  CHECK(a.value >= 0.75 * 0.75 - 0.15);
}

TEST_CASE("property reports and gap curve") {
  auto ctx = line_ctx(0.25);
  std::vector<double> grid{0.25, 0.75, 1.25};
  auto reports = check_S_properties(ctx, grid, 800, 5);
  for (const auto &r : reports)
    CHECK(r.verdict == Verdict::Pass);

  auto rows = gap_curve(ctx, grid, 800, 5);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].I == 0.25);
  CHECK(rows[0].s_hat == 0.0);
  CHECK(rows[0].bound == 0.0);
  for (const auto &row : rows)
    CHECK(row.gap >= -0.05);
  CHECK(gap_curve(ctx, {}, 800, 5).empty());
}
