#include "distrel/qr_init.hpp"

#include <algorithm>
#include <cmath>

#include "distrel/prox_solvers.hpp"

namespace distrel::qr {

double check_loss(double x, double tau) noexcept {
  return x * (tau - (x <= 0.0 ? 1.0 : 0.0));
}

double mean_check_loss(const Dataset& data, const Coefficients& beta, double tau) {
  if (beta.size() != data.cols()) throw Error(ErrorKind::kDimensionMismatch, "check loss");
  if (data.rows() == 0) throw Error(ErrorKind::kEmptyInput, "check loss of empty data");
  const Vector resid = data.y - sparse_product(data.x, beta);
  double total = 0.0;
  for (Index i = 0; i < resid.size(); ++i) total += check_loss(resid[i], tau);
  return total / static_cast<double>(resid.size());
}

double quantile_prox(double u, double gamma, double tau) noexcept {
  if (u > gamma * tau) return u - gamma * tau;
  if (u < -gamma * (1.0 - tau)) return u + gamma * (1.0 - tau);
  return 0.0;
}

void QrProblem::validate() const {
  data.validate();
  if (data.rows() < 2) throw Error(ErrorKind::kInvalidArgument, "l1-QR needs at least 2 rows");
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::kInvalidArgument, "tau must lie in (0,1)");
  if (!(reg >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "lambda0 must be >= 0");
  if (!data.x.allFinite() || !data.y.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "non-finite data");
  }
}

double default_lambda0(Index p, Index n, Index m) {
  const double big = static_cast<double>(std::max(p, n));
  return 0.5 * std::sqrt(std::log(big) / static_cast<double>(m));
}

QrResult solve_l1_qr(const QrProblem& prob, const AdmmSettings& settings) {
  prob.validate();
  if (settings.max_iters < 1 || !(settings.rel_tol > 0.0) || !(settings.penalty > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "bad ADMM settings");
  }
  const Matrix& x = prob.data.x;
  const Vector& y = prob.data.y;
  const Index m = x.rows();
  const Index d = x.cols();
  const double md = static_cast<double>(m);
  double rho = settings.penalty;
  const double alpha = settings.relaxation;
  const double tau = prob.tau;

  // (X'X/m + I) beta = X'(y - r - u)/m + z - w; reused every iteration.
  Matrix gram = Matrix::Identity(d, d);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / md);
  Eigen::LLT<Matrix, Eigen::Lower> chol(gram);
  if (chol.info() != Eigen::Success) {
    throw Error(ErrorKind::kDegenerateDesign, "Cholesky of X'X/m + I failed");
  }

  const Vector xty = x.transpose() * y;
  const double norm_c = y.norm() / std::sqrt(md);

  Vector beta = Vector::Zero(d), z = Vector::Zero(d), w = Vector::Zero(d);
  Vector r = y, u = Vector::Zero(m);
  Vector xtr = xty;               // X' r
  Vector xtu = Vector::Zero(d);   // X' u, updated incrementally
  Vector xb(m), xb_hat(m), q(d), z_old(d), b_hat(d);

  QrResult result;
  for (int it = 1; it <= settings.max_iters; ++it) {
    result.iterations = it;
    q = (xty - xtr - xtu) / md + z - w;
    beta = chol.solve(q);
    xb.noalias() = x * beta;
    // X'X beta = m (q - beta) by construction of the linear system.
    const Vector xtxb = md * (q - beta);

    xb_hat = alpha * xb + (1.0 - alpha) * (y - r);
    const Vector xt_xb_hat = alpha * xtxb + (1.0 - alpha) * (xty - xtr);
    const Vector xtr_old = xtr;

    const double gamma = 1.0 / rho;
    for (Index i = 0; i < m; ++i) {
      r[i] = quantile_prox(y[i] - xb_hat[i] - u[i], gamma, tau);
    }
    xtr.noalias() = x.transpose() * r;
    u += xb_hat + r - y;
    xtu += xt_xb_hat + xtr - xty;

    b_hat = alpha * beta + (1.0 - alpha) * z;
    z_old = z;
    const double thr = prob.reg / rho;
    for (Index j = 0; j < d; ++j) z[j] = prox::soft_threshold(b_hat[j] + w[j], thr);
    w += b_hat - z;

    const double primal =
        std::sqrt((xb + r - y).squaredNorm() / md + (beta - z).squaredNorm());
    const double dual = rho * ((xtr - xtr_old) / md - (z - z_old)).norm();
    const double norm_ax = std::sqrt(xb.squaredNorm() / md + beta.squaredNorm());
    const double norm_bw = std::sqrt(r.squaredNorm() / md + z.squaredNorm());
    const double eps_pri = settings.rel_tol * (1.0 + std::max({norm_ax, norm_bw, norm_c}));
    const double eps_dual = settings.rel_tol * (1.0 + rho * (xtu / md + w).norm());
    result.primal_residual = primal;
    result.dual_residual = dual;
    if (primal <= eps_pri && dual <= eps_dual) {
      result.converged = true;
      break;
    }
    if (settings.adaptive_penalty && it <= settings.adaptive_until && it % 10 == 0) {
      const double ratio = (primal / eps_pri) / std::max(dual / eps_dual, 1e-300);
      double scale = 1.0;
      if (ratio > 10.0) scale = 2.0;
      else if (ratio < 0.1) scale = 0.5;
      if (scale != 1.0) {
        rho *= scale;
        u /= scale;
        w /= scale;
        xtu /= scale;
      }
    }
  }
  result.beta = z;
  return result;
}

}  // namespace distrel::qr
