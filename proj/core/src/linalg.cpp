#include "qsd/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace qsd {

MatrixXd expm(const MatrixXd& a) { return a.exp(); }

MatrixXcd expm(const MatrixXcd& a) { return a.exp(); }

VectorXcd vec(const MatrixXcd& m) {
  return Eigen::Map<const VectorXcd>(m.data(), m.size());
}

MatrixXcd unvec(const VectorXcd& v, Eigen::Index rows) {
  if (rows <= 0 || v.size() % rows != 0) {
    throw std::invalid_argument("unvec: size not divisible by row count");
  }
  return Eigen::Map<const MatrixXcd>(v.data(), rows, v.size() / rows);
}

MatrixXcd evolution_gramian(const MatrixXcd& a, const MatrixXcd& q, double tau) {
  if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows()) {
    throw std::invalid_argument("evolution_gramian: dimension mismatch");
  }
  if (tau < 0) {
    throw std::invalid_argument("evolution_gramian: negative time");
  }
  const Eigen::Index n = a.rows();
  if (tau == 0) return MatrixXcd::Zero(n, n);

  // e^{-A^H dt} grows like e^{mu dt} with mu = lambda_max((-A^H - A)/2);
  // keep mu*dt <= 1 so the block exponential below stays well scaled.
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(-0.5 * (a + a.adjoint()));
  const double mu = std::max(0.0, es.eigenvalues().maxCoeff());
  int k = 0;
  while (mu * tau / std::pow(2.0, k) > 1.0 && k < 60) ++k;
  const double dt = tau / std::pow(2.0, k);

  //  exp([[-A^H, Q],[0, A]] dt) = [[e^{-A^H dt}, e^{-A^H dt} G(dt)],[0, e^{A dt}]]
  MatrixXcd blk = MatrixXcd::Zero(2 * n, 2 * n);
  blk.topLeftCorner(n, n) = -a.adjoint() * dt;
  blk.topRightCorner(n, n) = q * dt;
  blk.bottomRightCorner(n, n) = a * dt;
  const MatrixXcd eblk = expm(blk);

  MatrixXcd p = expm((a * dt).eval());  // contraction, stable to square
  MatrixXcd g = p.adjoint() * eblk.topRightCorner(n, n);
  for (int i = 0; i < k; ++i) {
    g = g + p.adjoint() * g * p;
    p = p * p;
  }
  return g;
}

}  // namespace qsd
