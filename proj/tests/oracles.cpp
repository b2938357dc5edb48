#include "oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace oracles {

double interval_lambda1_dense(std::size_t shape, double length) {
  const std::size_t m = shape - 2;
  const double h = length / static_cast<double>(shape - 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  const double inv_h2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < m; ++i) {
    a(i, i) = 2.0 * inv_h2;
    if (i + 1 < m) {
      a(i, i + 1) = -inv_h2;
      a(i + 1, i) = -inv_h2;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("interval_lambda1_dense: eigensolve failed");
  }
  return solver.eigenvalues()(0);
}

double interval_lambda1_closed(std::size_t shape, double length) {
  const double h = length / static_cast<double>(shape - 1);
  const double s = std::sin(M_PI * h / (2.0 * length));
  return 4.0 / (h * h) * s * s;
}

double square_lambda1_sparse(std::size_t shape) {
  const std::size_t m = shape - 2; // interior nodes per side
  const std::size_t n = m * m;
  const double h = 1.0 / static_cast<double>(shape - 1);
  const double inv_h2 = 1.0 / (h * h);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(5 * n);
  auto id = [m](std::size_t r, std::size_t c) { return r * m + c; };
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      triplets.emplace_back(id(r, c), id(r, c), 4.0 * inv_h2);
      if (r + 1 < m) {
        triplets.emplace_back(id(r, c), id(r + 1, c), -inv_h2);
        triplets.emplace_back(id(r + 1, c), id(r, c), -inv_h2);
      }
      if (c + 1 < m) {
        triplets.emplace_back(id(r, c), id(r, c + 1), -inv_h2);
        triplets.emplace_back(id(r, c + 1), id(r, c), -inv_h2);
      }
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("square_lambda1_sparse: factorization failed");
  }

  Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
  b.normalize();
  for (int it = 0; it < 120; ++it) {
    b = ldlt.solve(b);
    b.normalize();
  }
  return b.dot(a * b);
}

namespace {

struct ShootState {
  double u;
  double w; // flux |u'|^{p-2} u'
};

ShootState derivative(const ShootState& s, double p) {
  const double q = 1.0 / (p - 1.0);
  ShootState d;
  d.u = s.w == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s.w), q), s.w);
  d.w = s.u == 0.0 ? 0.0 : -std::copysign(std::pow(std::abs(s.u), p - 1.0), s.u);
  return d;
}

ShootState rk4_step(const ShootState& s, double dt, double p) {
  const ShootState k1 = derivative(s, p);
  const ShootState s2{s.u + 0.5 * dt * k1.u, s.w + 0.5 * dt * k1.w};
  const ShootState k2 = derivative(s2, p);
  const ShootState s3{s.u + 0.5 * dt * k2.u, s.w + 0.5 * dt * k2.w};
  const ShootState k3 = derivative(s3, p);
  const ShootState s4{s.u + dt * k3.u, s.w + dt * k3.w};
  const ShootState k4 = derivative(s4, p);
  return ShootState{
      s.u + dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
      s.w + dt / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

} // namespace

double p_laplacian_first_zero(double p) {
  // Integrate u' = |w|^{1/(p-1)} sgn w, w' = -|u|^{p-1} sgn u from
  // u(0) = 0, w(0) = 1 and locate the first return of u to zero.
  const double dt = 2e-5;
  ShootState s{0.0, 1.0};
  double x = 0.0;
  // Step past the initial zero first.
  s = rk4_step(s, dt, p);
  x += dt;
  while (x < 10.0) {
    const ShootState next = rk4_step(s, dt, p);
    if (s.u > 0.0 && next.u <= 0.0) {
      // Bisect the crossing inside [x, x + dt] with single RK4 substeps.
      double lo = 0.0, hi = dt;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const ShootState probe = rk4_step(s, mid, p);
        (probe.u <= 0.0 ? hi : lo) = mid;
      }
      return x + 0.5 * (lo + hi);
    }
    s = next;
    x += dt;
  }
  throw std::runtime_error("p_laplacian_first_zero: no zero found");
}

double p_laplacian_interval_lambda1(double p) {
  const double x1 = p_laplacian_first_zero(p);
  return std::pow(x1, p);
}

double p_laplacian_interval_lambda1_closed(double p) {
  const double pi_p = 2.0 * M_PI / (p * std::sin(M_PI / p));
  return (p - 1.0) * std::pow(pi_p, p);
}

} // namespace oracles
