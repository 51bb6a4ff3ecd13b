#include "qsd/qdynamics.hpp"

#include <cmath>
#include <complex>

#include "doctest.h"
#include "qsd/linalg.hpp"
#include "qsd/rng.hpp"
#include "test_util.hpp"

using namespace qsd;
using std::complex;

namespace {

const Topology kSmall = build_topology("2r-2r-2");

Hamiltonian ansatz_hamiltonian(double h) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 2) = m(2, 0) = h;
  m(0, 3) = m(3, 0) = h;
  m(1, 2) = m(2, 1) = h;
  m(1, 3) = m(3, 1) = -h;
  return make_hamiltonian(kSmall, m);
}

TransitionMatrix classical_t(const Topology& topo) {
  return make_transition_matrix(topo,
                                classical_transition_from_adjacency(topo.mask));
}

DensityMatrix input_pure(const Topology& topo, const Eigen::VectorXcd& amplitudes) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(topo.n_total);
  psi.head(amplitudes.size()) = amplitudes;
  return make_density_matrix(psi * psi.adjoint());
}

}  // namespace

TEST_CASE("matrix type validation") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(4, 4);
  bad(0, 1) = 0.3;  // off-mask for 2r-2r-2
  bad(1, 0) = 0.3;
  CHECK_THROWS(make_hamiltonian(kSmall, bad));

  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(4, 4);
  asym(0, 2) = 0.3;
  CHECK_THROWS(make_hamiltonian(kSmall, asym));

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(4, 4);
  diag(0, 0) = 0.1;
  CHECK_THROWS(make_hamiltonian(kSmall, diag));

  Eigen::MatrixXd t = classical_transition_from_adjacency(kSmall.mask);
  t(2, 0) = 0.7;  // column no longer sums to one
  CHECK_THROWS(make_transition_matrix(kSmall, t));

  CHECK_THROWS(make_density_matrix(Eigen::MatrixXcd::Identity(3, 3)));  // trace 3
  Eigen::MatrixXcd nonpsd = Eigen::MatrixXcd::Zero(2, 2);
  nonpsd(0, 0) = 1.5;
  nonpsd(1, 1) = -0.5;
  CHECK_THROWS(make_density_matrix(nonpsd));
}

TEST_CASE("build_liouvillian validates inputs") {
  const Hamiltonian h = ansatz_hamiltonian(0.5);
  const TransitionMatrix t = classical_t(kSmall);
  CHECK_THROWS(build_liouvillian(kSmall, h, t, -0.1));
  CHECK_THROWS(build_liouvillian(kSmall, h, t, 1.1));
  CHECK_THROWS(build_liouvillian(kSmall, h, t, 0.5, 0.0));
  CHECK_THROWS(build_liouvillian(kSmall, h, t, 0.5, -1.0));
}

TEST_CASE("the generator is trace preserving on every basis matrix") {
  Rng rng(11);
  const Liouvillian l = build_liouvillian(kSmall, test_util::rand_hamiltonian(kSmall, rng),
                                          test_util::rand_transition(kSmall, rng), 0.37);
  const int n = l.n_total;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
      e(i, j) = 1.0;
      const Eigen::MatrixXcd image = unvec(l.l_tilde * vec(e), n);
      CHECK(std::abs(image.trace()) < 1e-12);
    }
  }
}

TEST_CASE("p=0 kills the noise part: generator independent of T") {
  Rng rng(12);
  const Hamiltonian h = test_util::rand_hamiltonian(kSmall, rng);
  const Liouvillian a =
      build_liouvillian(kSmall, h, test_util::rand_transition(kSmall, rng), 0.0);
  const Liouvillian b =
      build_liouvillian(kSmall, h, test_util::rand_transition(kSmall, rng), 0.0);
  CHECK((a.l_tilde - b.l_tilde).cwiseAbs().maxCoeff() == 0.0);
  // and equals the commutator part plus sink terms
  const Hamiltonian zero = make_hamiltonian(kSmall, Eigen::MatrixXd::Zero(4, 4));
  const Liouvillian sinks_only =
      build_liouvillian(kSmall, zero, classical_t(kSmall), 0.0);
  const Eigen::MatrixXcd reconstructed =
      coherent_generator(kSmall, h) + sinks_only.l_tilde;
  CHECK((a.l_tilde - reconstructed).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("p=1 kills the Hamiltonian part") {
  Rng rng(13);
  const TransitionMatrix t = test_util::rand_transition(kSmall, rng);
  const Liouvillian a =
      build_liouvillian(kSmall, test_util::rand_hamiltonian(kSmall, rng), t, 1.0);
  const Liouvillian b =
      build_liouvillian(kSmall, test_util::rand_hamiltonian(kSmall, rng), t, 1.0);
  CHECK((a.l_tilde - b.l_tilde).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("p=1 population block is the classical generator") {
  // T parameterized by (d1..d4); diagonal coordinates obey
  // v' = [[-1,0,1/2+d1,1/2-d2],[0,-1,1/2-d1,1/2+d2],
  //       [1/2+d3,1/2-d4,-3,0],[1/2-d3,1/2+d4,0,-3]] v
  const double d1 = 0.21, d2 = -0.34, d3 = 0.45, d4 = 0.05;
  Eigen::MatrixXd t(4, 4);
  t << 0, 0, 0.5 + d1, 0.5 - d2,
       0, 0, 0.5 - d1, 0.5 + d2,
       0.5 + d3, 0.5 - d4, 0, 0,
       0.5 - d3, 0.5 + d4, 0, 0;
  const Liouvillian l = build_liouvillian(
      kSmall, make_hamiltonian(kSmall, Eigen::MatrixXd::Zero(4, 4)),
      make_transition_matrix(kSmall, t), 1.0);
  const RealBlockForm block = real_block_form(l);

  Eigen::Matrix4d expected;
  expected << -1, 0, 0.5 + d1, 0.5 - d2,
              0, -1, 0.5 - d1, 0.5 + d2,
              0.5 + d3, 0.5 - d4, -3, 0,
              0.5 - d3, 0.5 + d4, 0, -3;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(block.l(block.diag_index(i), block.diag_index(j)) ==
            doctest::Approx(expected(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("evolve at tau=0 is the identity") {
  Rng rng(14);
  const Liouvillian l = build_liouvillian(kSmall, test_util::rand_hamiltonian(kSmall, rng),
                                          test_util::rand_transition(kSmall, rng), 0.42);
  const DensityMatrix rho0 =
      input_pure(kSmall, Eigen::Vector2cd(std::cos(0.3), std::sin(0.3)));
  const DensityMatrix rho = evolve(l, rho0, 0.0);
  CHECK((rho.rho - rho0.rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sinker population matches the closed form for the ansatz network") {
  const double theta = M_PI / 8;
  const DensityMatrix rho0 =
      input_pure(kSmall, Eigen::Vector2cd(std::cos(theta), std::sin(theta)));
  for (double h : {0.5, 0.35355, 0.2}) {
    const Liouvillian l =
        build_liouvillian(kSmall, ansatz_hamiltonian(h), classical_t(kSmall), 0.0);
    const double z2 = 1.0 - 8.0 * h * h;
    for (double t : {0.5, 1.0, 5.0}) {
      const DensityMatrix rho = evolve(l, rho0, t);
      double shsq;  // sinh^2(z t/2)/z^2, trigonometric when z^2 < 0
      if (z2 > 0) {
        shsq = std::pow(std::sinh(std::sqrt(z2) * t / 2), 2) / z2;
      } else {
        shsq = std::pow(std::sin(std::sqrt(-z2) * t / 2), 2) / (-z2);
      }
      const double closed =
          4 * h * h * std::exp(-t) * shsq * (1 + std::sin(2 * theta));
      CHECK(std::abs(rho.rho(2, 2).real() - closed) < 1e-8);
    }
  }
}

TEST_CASE("trace and positivity are preserved along the evolution") {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Liouvillian l = build_liouvillian(
        kSmall, test_util::rand_hamiltonian(kSmall, rng),
        test_util::rand_transition(kSmall, rng), rng.next_double());
    const DensityMatrix rho0 = make_density_matrix(
        (Eigen::MatrixXcd(6, 6) << test_util::rand_density(rng, 2),
         Eigen::MatrixXcd::Zero(2, 4), Eigen::MatrixXcd::Zero(4, 6))
            .finished());
    for (double tau : {0.1, 1.0, 10.0}) {
      const DensityMatrix rho = evolve(l, rho0, tau);
      CHECK(std::abs(rho.rho.trace().real() - 1.0) < 1e-9);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.rho);
      CHECK(es.eigenvalues().minCoeff() > -1e-9);
    }
  }
}

TEST_CASE("coherent part alone is unitary: spectrum is frozen") {
  Rng rng(16);
  const Eigen::MatrixXcd gen =
      coherent_generator(kSmall, test_util::rand_hamiltonian(kSmall, rng));
  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(6, 6);
  rho0.topLeftCorner(2, 2) = test_util::rand_density(rng, 2);
  const Eigen::VectorXd before =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(rho0).eigenvalues();
  for (double tau : {1.0, 7.0}) {
    const Eigen::MatrixXcd rt = unvec(expm((tau * gen).eval()) * vec(rho0), 6);
    const Eigen::VectorXd after =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(rt).eigenvalues();
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("real block form is a similarity: spectra agree") {
  Rng rng(17);
  const Liouvillian l = build_liouvillian(kSmall, test_util::rand_hamiltonian(kSmall, rng),
                                          test_util::rand_transition(kSmall, rng), 0.3);
  const RealBlockForm block = real_block_form(l);
  Eigen::VectorXcd ev_complex =
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(l.l_tilde).eigenvalues();
  const Eigen::MatrixXcd as_complex = block.l.cast<complex<double>>();
  Eigen::VectorXcd ev_real =
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(as_complex).eigenvalues();
  // multiset comparison: greedily match each eigenvalue to its nearest peer
  std::vector<bool> used(ev_real.size(), false);
  for (Eigen::Index i = 0; i < ev_complex.size(); ++i) {
    double best = 1e300;
    Eigen::Index pick = -1;
    for (Eigen::Index j = 0; j < ev_real.size(); ++j) {
      if (!used[j] && std::abs(ev_complex[i] - ev_real[j]) < best) {
        best = std::abs(ev_complex[i] - ev_real[j]);
        pick = j;
      }
    }
    used[pick] = true;
    CHECK(best < 1e-10);
  }
}

TEST_CASE("round trip through real coordinates") {
  Rng rng(18);
  const Eigen::MatrixXcd rho = test_util::rand_density(rng, 5);
  CHECK((from_real_coords(to_real_coords(rho), 5) - rho).cwiseAbs().maxCoeff() <
        1e-15);
}

TEST_CASE("2r-2r-2 with real couplings splits off a six-coordinate block") {
  Rng rng(19);
  for (double p : {0.0, 0.33, 1.0}) {
    const Liouvillian l =
        build_liouvillian(kSmall, test_util::rand_hamiltonian(kSmall, rng),
                          test_util::rand_transition(kSmall, rng), p);
    const RealBlockForm b = real_block_form(l);
    const std::vector<int> closed = {b.re_index(0, 2), b.re_index(0, 3),
                                     b.re_index(1, 2), b.re_index(1, 3),
                                     b.im_index(0, 1), b.im_index(2, 3)};
    const auto in_closed = [&](int k) {
      return std::find(closed.begin(), closed.end(), k) != closed.end();
    };
    for (int i = 0; i < b.l.rows(); ++i) {
      for (int j = 0; j < b.l.cols(); ++j) {
        if (in_closed(i) != in_closed(j)) {
          CHECK(std::abs(b.l(i, j)) < 1e-13);
        }
      }
    }
  }
}

TEST_CASE("coherences of the invariant block never reach the sinks") {
  Rng rng(20);
  const Liouvillian l = build_liouvillian(kSmall, test_util::rand_hamiltonian(kSmall, rng),
                                          test_util::rand_transition(kSmall, rng), 0.4);
  // Hermitian seed supported on {a13, a14, a23, a24, b12, b34} only
  Eigen::VectorXd r = Eigen::VectorXd::Zero(36);
  RealBlockForm b = real_block_form(l);
  r[b.re_index(0, 2)] = 0.3;
  r[b.re_index(1, 3)] = -0.2;
  r[b.im_index(0, 1)] = 0.5;
  r[b.im_index(2, 3)] = 0.1;
  const Eigen::MatrixXcd seed = from_real_coords(r, 6);
  for (double tau : {0.5, 3.0, 20.0}) {
    const Eigen::MatrixXcd out = propagate_matrix(l, seed, tau);
    CHECK(std::abs(out(4, 4)) < 1e-12);
    CHECK(std::abs(out(5, 5)) < 1e-12);
  }
}

TEST_CASE("sink populations: start empty, grow monotonically, obey the integral") {
  Rng rng(21);
  const Liouvillian l = build_liouvillian(kSmall, test_util::rand_hamiltonian(kSmall, rng),
                                          test_util::rand_transition(kSmall, rng), 0.25);
  const DensityMatrix rho0 =
      input_pure(kSmall, Eigen::Vector2cd(std::cos(0.4), std::sin(0.4)));
  CHECK(sink_populations(evolve(l, rho0, 0.0), kSmall).maxCoeff() == 0.0);

  // monotone in tau
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(2);
  for (double tau : {0.2, 0.5, 1.0, 2.0, 5.0, 15.0}) {
    const Eigen::VectorXd pops = sink_populations(evolve(l, rho0, tau), kSmall);
    CHECK((pops - prev).minCoeff() > -1e-10);
    prev = pops;
  }

  // rho_{n,n}(tau) = 2 Gamma int_0^tau rho_{s_n,s_n}(t) dt  (composite Simpson)
  const double tau = 4.0;
  const int steps = 4000;
  const Propagator step = make_propagator(l, tau / steps);
  Eigen::MatrixXcd rho = rho0.rho;
  Eigen::Vector2d integral = Eigen::Vector2d::Zero();
  for (int k = 0; k <= steps; ++k) {
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    integral[0] += w * rho(2, 2).real();
    integral[1] += w * rho(3, 3).real();
    if (k < steps) rho = step.apply(rho);
  }
  integral *= 2.0 * l.gamma * (tau / steps) / 3.0;
  const Eigen::VectorXd direct = sink_populations(evolve(l, rho0, tau), kSmall);
  CHECK(std::abs(direct[0] - integral[0]) < 1e-6);
  CHECK(std::abs(direct[1] - integral[1]) < 1e-6);
}

TEST_CASE("deterministic routing at p=1 with the permutation T") {
  Eigen::MatrixXd t(4, 4);
  t << 0, 0, 1, 0,
       0, 0, 0, 1,
       1, 0, 0, 0,
       0, 1, 0, 0;
  const Liouvillian l = build_liouvillian(
      kSmall, make_hamiltonian(kSmall, Eigen::MatrixXd::Zero(4, 4)),
      make_transition_matrix(kSmall, t), 1.0);
  const DensityMatrix rho0 = input_pure(kSmall, Eigen::Vector2cd(1.0, 0.0));
  const Eigen::VectorXd pops = sink_populations(evolve(l, rho0, 50.0), kSmall);
  CHECK(std::abs(pops[0] - 1.0) < 1e-6);
  CHECK(std::abs(pops[1]) < 1e-12);
}

TEST_CASE("a growing generator is reported as invalid") {
  Liouvillian bad;
  bad.n_total = 2;
  bad.l_tilde = 500.0 * Eigen::MatrixXcd::Identity(4, 4);
  const Eigen::MatrixXcd rho = 0.5 * Eigen::MatrixXcd::Identity(2, 2);
  CHECK_THROWS(evolve(bad, DensityMatrix{rho}, 10.0));
}

TEST_CASE("pure dephasing generator is diagonal in real coordinates") {
  // two-level toy: L = -gamma/2 on both coherences, zero elsewhere
  Liouvillian l;
  l.n_total = 2;
  l.l_tilde = Eigen::MatrixXcd::Zero(4, 4);
  l.l_tilde(1, 1) = -0.5;  // rho_{2,1}
  l.l_tilde(2, 2) = -0.5;  // rho_{1,2}
  const RealBlockForm b = real_block_form(l);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(std::abs(b.l(i, j)) < 1e-15);
    }
  }
}
