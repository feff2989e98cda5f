#include "flocksim/estimator.hpp"
#include "flocksim/scenarios.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace flocksim;
using testing::vec2;

namespace {

Regressor random_regressor(std::mt19937_64& rng) {
  Regressor C(2, 3);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) C(r, c) = uniform(rng, -2.0, 2.0);
  }
  return C;
}

}  // namespace

TEST_CASE("initial estimator state") {
  EstimatorGains gains;
  gains.k_hat0 = Eigen::Vector3d(0.1, 0.2, 0.3);
  const EstimatorState est = initial_estimator(vec2(3, 4), gains);
  CHECK(est.vF.isApprox(vec2(3, 4)));
  CHECK(est.CF.isZero());
  CHECK(est.k_hat == gains.k_hat0);
  CHECK(prediction_residual(est, vec2(3, 4)) == 0.0);
}

TEST_CASE("filter derivatives") {
  EstimatorState est = initial_estimator(vec2(1, -1), EstimatorGains{});
  const FilterDerivatives rest = filter_derivatives(est, vec2(1, -1), Regressor::Zero(2, 3));
  CHECK(rest.dvF.isZero());
  CHECK(rest.dCF.isZero());

  est.a = 1.0;
  est.vF = vec2(0, 0);
  const FilterDerivatives d = filter_derivatives(est, vec2(2, 0), Regressor::Zero(2, 3));
  CHECK(d.dvF.isApprox(vec2(2, 0)));
}

TEST_CASE("estimate derivative") {
  std::mt19937_64 rng(31);
  EstimatorState est = initial_estimator(vec2(0, 0), EstimatorGains{});
  CHECK(estimate_derivative(est, Regressor::Zero(2, 3), vec2(1, 2), vec2(0, 0)).isZero());

  SUBCASE("true parameters are an equilibrium") {
    const Eigen::Vector3d k(0.8, 0.3, 4.5e5);
    est.k_hat = k;
    est.CF = random_regressor(rng);
    const Vec v = vec2(1.5, -0.5);
    est.vF = v + est.CF * k;  // filter identity
    CHECK(estimate_derivative(est, random_regressor(rng), vec2(0, 0), v).norm() < 1e-9);
    CHECK(prediction_residual(est, v) < 1e-9);
  }
  SUBCASE("residual with an empty filtered regressor") {
    est.CF.setZero();
    est.vF = vec2(1, 1);
    CHECK(prediction_residual(est, vec2(4, 5)) == doctest::Approx(5.0));
  }
  SUBCASE("coupling direction") {
    // With a consistent filter the update is Gamma C^T sum_j (v_j - v_f).
    est.k_hat.setZero();
    est.CF.setZero();
    est.vF = vec2(0, 0);
    est.Gamma = 2.0 * Eigen::Matrix3d::Identity();
    const Regressor C = random_regressor(rng);
    const Vec sums = vec2(0.5, -1.0);
    CHECK(estimate_derivative(est, C, sums, vec2(0, 0)).isApprox(2.0 * C.transpose() * sums));
  }
  SUBCASE("filter correction reduces the residual") {
    est.k_hat = Eigen::Vector3d(1, 1, 1);
    est.CF = random_regressor(rng);
    est.vF = vec2(0.3, 0.7);
    const Vec v = vec2(-0.2, 0.4);
    const Eigen::Vector3d dk = estimate_derivative(est, Regressor::Zero(2, 3), vec2(0, 0), v);
    const Vec residual = est.CF * est.k_hat + v - est.vF;
    // d/dt of |residual|^2 / 2 along dk is -|CF^T residual|^2_Gamma.
    CHECK(residual.dot(est.CF * dk) < 0.0);
  }
}
