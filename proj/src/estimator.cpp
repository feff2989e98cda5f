#include "flocksim/estimator.hpp"

namespace flocksim {

EstimatorState initial_estimator(const Vec& v_malicious, const EstimatorGains& gains) {
  EstimatorState est;
  est.vF = v_malicious;
  est.CF = Regressor::Zero(v_malicious.size(), 3);
  est.k_hat = gains.k_hat0;
  est.a = gains.a;
  est.Gamma = gains.Gamma;
  return est;
}

FilterDerivatives filter_derivatives(const EstimatorState& est, const Vec& v_malicious, const Regressor& C) {
  return {-est.a * est.vF + est.a * v_malicious, -est.a * est.CF + C};
}

Eigen::Vector3d estimate_derivative(const EstimatorState& est, const Regressor& C, const Vec& velocity_sums,
                                    const Vec& v_malicious) {
  // The coupling term enters with a positive sign: it cancels the cross term
  // k_tilde^T C^T sum_j (v_j - v_{i_f}) in the derivative of the group energy.
  const Vec residual = est.CF * est.k_hat + v_malicious - est.vF;
  return est.Gamma * (C.transpose() * velocity_sums) - est.Gamma * (est.CF.transpose() * residual);
}

double prediction_residual(const EstimatorState& est, const Vec& v_malicious) {
  return (est.CF * est.k_hat + v_malicious - est.vF).norm();
}

}  // namespace flocksim
