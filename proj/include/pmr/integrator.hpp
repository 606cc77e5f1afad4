#pragma once

#include <Eigen/Dense>

namespace pmr {

/// Classic fixed-step RK4 for the linear system x' = A x + B w(t).
///
/// Because the system is linear, one RK4 step is an affine map of the state
/// and of the three input samples RK4 consumes (w at t, t+h/2 and t+h). The
/// map is assembled once by stepping basis vectors, so each subsequent step
/// costs a handful of matrix-vector products and reproduces the textbook
/// four-stage update up to rounding.
class Rk4Propagator {
 public:
  Rk4Propagator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double step);

  void step(Eigen::VectorXd& x, const Eigen::VectorXd& w0, const Eigen::VectorXd& w_mid,
            const Eigen::VectorXd& w1);

  /// Input held constant over the step (zero-order hold).
  void step_constant(Eigen::VectorXd& x, const Eigen::VectorXd& w);

  double step_size() const noexcept { return h_; }
  Eigen::Index states() const noexcept { return phi_.rows(); }
  Eigen::Index inputs() const noexcept { return g0_.cols(); }

 private:
  double h_;
  Eigen::MatrixXd phi_;
  Eigen::MatrixXd g0_, g_mid_, g1_, g_hold_;
  Eigen::VectorXd next_;
};

}  // namespace pmr
