#include "pmr/integrator.hpp"

namespace pmr {

namespace {

Eigen::VectorXd rk4_once(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double h,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& w0,
                         const Eigen::VectorXd& wm, const Eigen::VectorXd& w1) {
  const Eigen::VectorXd k1 = a * x + b * w0;
  const Eigen::VectorXd k2 = a * (x + 0.5 * h * k1) + b * wm;
  const Eigen::VectorXd k3 = a * (x + 0.5 * h * k2) + b * wm;
  const Eigen::VectorXd k4 = a * (x + h * k3) + b * w1;
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Rk4Propagator::Rk4Propagator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double step)
    : h_(step) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  phi_.resize(n, n);
  g0_.resize(n, m);
  g_mid_.resize(n, m);
  g1_.resize(n, m);
  next_.resize(n);

  const Eigen::VectorXd zero_x = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd zero_w = Eigen::VectorXd::Zero(m);
  for (Eigen::Index j = 0; j < n; ++j)
    phi_.col(j) = rk4_once(a, b, h_, Eigen::VectorXd::Unit(n, j), zero_w, zero_w, zero_w);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(m, j);
    g0_.col(j) = rk4_once(a, b, h_, zero_x, e, zero_w, zero_w);
    g_mid_.col(j) = rk4_once(a, b, h_, zero_x, zero_w, e, zero_w);
    g1_.col(j) = rk4_once(a, b, h_, zero_x, zero_w, zero_w, e);
  }
  g_hold_ = g0_ + g_mid_ + g1_;
}

void Rk4Propagator::step(Eigen::VectorXd& x, const Eigen::VectorXd& w0,
                         const Eigen::VectorXd& w_mid, const Eigen::VectorXd& w1) {
  next_.noalias() = phi_ * x;
  next_.noalias() += g0_ * w0;
  next_.noalias() += g_mid_ * w_mid;
  next_.noalias() += g1_ * w1;
  x.swap(next_);
}

void Rk4Propagator::step_constant(Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  next_.noalias() = phi_ * x;
  next_.noalias() += g_hold_ * w;
  x.swap(next_);
}

}  // namespace pmr
