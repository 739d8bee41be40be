#include "checks/oracles.hpp"

#include <cmath>
#include <limits>

#include "distrel/error.hpp"

namespace distrel::oracle {

Vector coordinate_descent(const Matrix& a, const Vector& lin, double reg, double tol, int max_sweeps) {
  const Index d = a.rows();
  Vector beta = Vector::Zero(d);
  Vector ab = Vector::Zero(d);  // A beta, kept current
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (Index j = 0; j < d; ++j) {
      const double partial = lin[j] - (ab[j] - a(j, j) * beta[j]);
      double next = 0.0;
      if (partial > reg) next = (partial - reg) / a(j, j);
      else if (partial < -reg) next = (partial + reg) / a(j, j);
      const double delta = next - beta[j];
      if (delta != 0.0) {
        ab += delta * a.col(j);
        beta[j] = next;
        change = std::max(change, std::abs(delta));
      }
    }
    if (change <= tol * (1.0 + beta.cwiseAbs().maxCoeff())) return beta;
  }
  throw Error(ErrorKind::kNonConvergence, "coordinate descent oracle did not converge");
}

Vector l1_qr_simplex(const Dataset& data, double tau, double reg) {
  const Index m = data.rows();
  const Index d = data.cols();
  // Columns: b+ (d), b- (d), u+ (m), u- (m), rhs.
  const Index nvar = 2 * d + 2 * m;
  Matrix t = Matrix::Zero(m, nvar + 1);
  Vector cost(nvar);
  cost.head(2 * d).setConstant(reg);
  cost.segment(2 * d, m).setConstant(tau / static_cast<double>(m));
  cost.tail(m).setConstant((1.0 - tau) / static_cast<double>(m));
  std::vector<Index> basis(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const double sign = data.y[i] >= 0.0 ? 1.0 : -1.0;
    t.block(i, 0, 1, d) = sign * data.x.row(i);
    t.block(i, d, 1, d) = -sign * data.x.row(i);
    t(i, 2 * d + i) = sign;
    t(i, 2 * d + m + i) = -sign;
    t(i, nvar) = sign * data.y[i];
    basis[static_cast<std::size_t>(i)] = sign > 0 ? 2 * d + i : 2 * d + m + i;
  }
  constexpr double eps = 1e-11;
  for (int iter = 0; iter < 200000; ++iter) {
    Vector dual(m);
    for (Index i = 0; i < m; ++i) dual[i] = cost[basis[static_cast<std::size_t>(i)]];
    // Tableau rows already equal B^-1 A, so reduced cost is c - c_B' T.
    Index enter = -1;
    for (Index j = 0; j < nvar; ++j) {
      const double reduced = cost[j] - dual.dot(t.col(j));
      if (reduced < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      Vector x = Vector::Zero(nvar);
      for (Index i = 0; i < m; ++i) x[basis[static_cast<std::size_t>(i)]] = t(i, nvar);
      return x.head(d) - x.segment(d, d);
    }
    Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) {
      if (t(i, enter) > eps) {
        const double ratio = t(i, nvar) / t(i, enter);
        if (ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && leave >= 0 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) throw Error(ErrorKind::kNonConvergence, "LP oracle unbounded");
    t.row(leave) /= t(leave, enter);
    for (Index i = 0; i < m; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  throw Error(ErrorKind::kNonConvergence, "LP oracle iteration cap");
}

double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals < 2 || intervals % 2 != 0) throw Error(ErrorKind::kInvalidArgument, "even intervals");
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

Vector dense_linear_term(const std::vector<Dataset>& shards, std::size_t first, const Vector& beta,
                         double f0, double tau) {
  const Index d = beta.size();
  Matrix gram_all = Matrix::Zero(d, d);
  Vector xy = Vector::Zero(d);
  double n = 0.0;
  for (const auto& s : shards) {
    const Vector fitted = s.x * beta;
    Vector yt(s.rows());
    for (Index i = 0; i < s.rows(); ++i) {
      yt[i] = fitted[i] - ((s.y[i] <= fitted[i] ? 1.0 : 0.0) - tau) / f0;
    }
    gram_all += s.x.transpose() * s.x;
    xy += s.x.transpose() * yt;
    n += static_cast<double>(s.rows());
  }
  const Dataset& one = shards.at(first);
  const Matrix sigma1 = one.x.transpose() * one.x / static_cast<double>(one.rows());
  return sigma1 * beta + xy / n - gram_all * beta / n;
}

}  // namespace distrel::oracle
