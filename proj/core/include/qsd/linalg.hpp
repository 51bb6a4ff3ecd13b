#pragma once

#include <Eigen/Dense>

namespace qsd {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Matrix exponential, Pade approximant with scaling and squaring.
MatrixXd expm(const MatrixXd& a);
MatrixXcd expm(const MatrixXcd& a);

// Column-major vectorization and its inverse.
VectorXcd vec(const MatrixXcd& m);
MatrixXcd unvec(const VectorXcd& v, Eigen::Index rows);

// G(tau) = \int_0^tau e^{A^H t} Q e^{A t} dt for a contraction semigroup
// (numerical abscissa of A <= 0, e.g. A = -iH - Gamma*S). Computed exactly
// via a block exponential on [0, tau/2^k] followed by interval doubling
// G(2t) = G(t) + e^{A^H t} G(t) e^{A t}, which keeps every factor bounded.
MatrixXcd evolution_gramian(const MatrixXcd& a, const MatrixXcd& q, double tau);

}  // namespace qsd
