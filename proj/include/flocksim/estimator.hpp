#pragma once

#include "flocksim/controllers.hpp"
#include "flocksim/core.hpp"

namespace flocksim {

/// Filtered malicious velocity, filtered regressor and the parameter estimate.
struct EstimatorState {
  Vec vF;
  Regressor CF;
  Eigen::Vector3d k_hat = Eigen::Vector3d::Ones();
  double a = 10.0;
  Eigen::Matrix3d Gamma = 10.0 * Eigen::Matrix3d::Identity();
};

/// vF(0) = v_{i_f}(0), CF(0) = 0, k_hat(0) from the gains.
EstimatorState initial_estimator(const Vec& v_malicious, const EstimatorGains& gains);

struct FilterDerivatives {
  Vec dvF;
  Regressor dCF;
};

/// First-order low-pass filters: dvF = -a vF + a v, dCF = -a CF + C.
FilterDerivatives filter_derivatives(const EstimatorState& est, const Vec& v_malicious, const Regressor& C);

/// Adaptive update of k_hat. `velocity_sums` is sum_j (v_j - v_{i_f}) over
/// the malicious agent's neighbors.
Eigen::Vector3d estimate_derivative(const EstimatorState& est, const Regressor& C, const Vec& velocity_sums,
                                    const Vec& v_malicious);

/// |CF k_hat + v_{i_f} - vF|.
double prediction_residual(const EstimatorState& est, const Vec& v_malicious);

}  // namespace flocksim
