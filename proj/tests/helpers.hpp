#pragma once

#include "flocksim/core.hpp"

#include <functional>
#include <vector>

namespace testing {

inline flocksim::Vec vec2(double x, double y) {
  flocksim::Vec v(2);
  v << x, y;
  return v;
}

inline flocksim::AgentMatrix columns(const std::vector<flocksim::Vec>& cols) {
  flocksim::AgentMatrix X(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) X.col(static_cast<Eigen::Index>(i)) = cols[i];
  return X;
}

// Central difference gradient of a scalar field.
inline flocksim::Vec numeric_gradient(const std::function<double(const flocksim::Vec&)>& f, const flocksim::Vec& x,
                                      double h) {
  flocksim::Vec g(x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    flocksim::Vec xp = x;
    flocksim::Vec xm = x;
    xp(c) += h;
    xm(c) -= h;
    g(c) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const flocksim::Vec& a, const flocksim::Vec& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace testing
