#include <catch2/catch_amalgamated.hpp>

#include <convlab/io.hpp>
#include <convlab/step_fn.hpp>

using namespace convlab;

TEST_CASE("interval indicator mass exactness") {
  auto grid = make_real_grid(0.1, 2.0);
  auto phi = indicator_interval(grid, 1.2);
  CHECK(l1_norm(phi) == Catch::Approx(1.2).margin(1e-12));
  // (-0.6, 0.6): cells at |x| <= 0.5 full, the boundary pair half-covered.
  CHECK(phi[grid->cell_of_signed(0)] == 1.0);
  CHECK(phi[grid->cell_of_signed(6)] == Catch::Approx(0.5));

  auto phi2 = indicator_interval(grid, 2.0);
  CHECK(phi2[grid->cell_of_signed(9)] == 1.0);  // x = 0.9
  CHECK(phi2[grid->cell_of_signed(11)] == 0.0); // x = 1.1
  CHECK(l1_norm(indicator_interval(grid, 0.0)) == 0.0);
  CHECK_THROWS_AS(indicator_interval(grid, 10.0), validation_error);
}

TEST_CASE("arc indicator") {
  auto circle = make_cyclic(64, 1.0, true);
  auto a = indicator_arc(circle, 0.5, 0.7);
  CHECK(l1_norm(a) == 0.7);
  auto wrapped = indicator_arc(circle, 0.0, 0.5); // arc straddles 0
  CHECK(l1_norm(wrapped) == 0.5);
  CHECK(wrapped[0] == 1.0);
  CHECK(wrapped[63] == 1.0);
}

TEST_CASE("translation") {
  auto z5 = make_cyclic(5, 5.0, false);
  std::vector<int> zero{0};
  auto d0 = indicator_cells(z5, zero);
  auto r2 = translate(d0, 2, Side::Right); // R_2 phi(g') = phi(g' + 2)
  CHECK(r2[3] == 1.0);
  CHECK(l1_norm(r2) == 1.0);
  auto l0 = translate(d0, z5->identity(), Side::Left);
  CHECK(l0.values() == d0.values());

  auto s3 = make_finite_cayley(s3_table(), 1.0);
  auto phi = sample_B(s3, 2.5, 7);
  for (int g = 0; g < 6; ++g) {
    CHECK(l1_norm(translate(phi, g, Side::Right)) == Catch::Approx(l1_norm(phi)));
    // Translate there and back restores phi bitwise.
    auto back = translate(translate(phi, g, Side::Left), s3->inverse(g), Side::Left);
    CHECK(back.values() == phi.values());
  }

  auto grid = make_real_grid(0.5, 1.0);
  auto edge = indicator_cells(grid, std::vector<int>{4});
  CHECK_THROWS_AS(translate(edge, grid->cell_of_signed(-1), Side::Right), overflow_error);
}

TEST_CASE("pointwise algebra") {
  auto z2 = make_cyclic(2, 2.0, false);
  StepFn phi(z2, {0.5, 0.0});
  StepFn psi(z2, {1.0, 0.0});
  CHECK(l1_norm(pointwise(phi, psi, PointwiseOp::Product)) == 0.5);
  CHECK(pointwise(phi, phi, PointwiseOp::Min).values() == phi.values());
  // min/max mass identity.
  const double lhs = l1_norm(pointwise(phi, psi, PointwiseOp::Min)) +
                     l1_norm(pointwise(phi, psi, PointwiseOp::Max));
  CHECK(lhs == l1_norm(phi) + l1_norm(psi));
  CHECK_THROWS_AS(affine(2.0, psi, 0.0, psi), validation_error); // cap exceeded
}

TEST_CASE("B(I) sampler") {
  auto z7 = make_cyclic(7, 7.0, false);
  auto phi = sample_B(z7, 2.5, 42);
  CHECK(l1_norm(phi) == Catch::Approx(2.5).margin(1e-12));
  for (double v : phi.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(sample_B(z7, 2.5, 42).values() == phi.values()); // deterministic
  CHECK(l1_norm(sample_B(z7, 0.0, 1)) == 0.0);
  auto full = sample_B(z7, 7.0, 1);
  for (double v : full.values())
    CHECK(v == 1.0);
  CHECK_THROWS_AS(sample_B(z7, 8.0, 1), validation_error);
}

TEST_CASE("coset mass additivity") {
  auto p = make_product(make_cyclic(16, 1.0, true), make_finite_cayley(cyclic_table(2), 1.0));
  auto cs = product_cosets(p);
  auto phi = sample_B(p, 0.6, 3);
  auto prof = coset_masses(phi, cs);
  REQUIRE(prof.mass.size() == 2);
  // Same summation order as l1_norm: additivity is bitwise-reproducible and
  // tight in float.
  CHECK(prof.total() == Catch::Approx(l1_norm(phi)).epsilon(1e-12));
  CHECK(l1_norm(phi, cs.g0_cells) == Catch::Approx(prof.mass[0]).epsilon(1e-12));
}

TEST_CASE("exact representation") {
  auto z4 = make_cyclic(4, 4.0, false);
  auto fn = StepFn::exact(z4, {1, 2, 0, 1}, 4);
  CHECK(fn.is_exact());
  CHECK(fn[1] == 0.5);
  CHECK_THROWS_AS(StepFn::exact(z4, {1, 2, 0, 1}, 0), validation_error);
  CHECK_THROWS_AS(StepFn(z4, {0.5, -0.1, 0.0, 0.0}), validation_error);
  CHECK_THROWS_AS(StepFn(z4, {1.5, 0.0, 0.0, 0.0}), validation_error);
}
