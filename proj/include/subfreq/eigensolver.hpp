#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "subfreq/fields.hpp"
#include "subfreq/grid.hpp"
#include "subfreq/operators.hpp"

namespace subfreq {

struct SolverOptions {
  double p = 2.0;
  std::size_t max_iterations = 20000;
  /// Stop when the relative lambda change stays below tol_lambda for 5
  /// consecutive accepted iterates AND the relative weak-form residual is
  /// below tol_residual.
  double tol_lambda = 1e-9;
  double tol_residual = 1e-7;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 60;
  /// First trial step; <= 0 selects 1 / (1 + lambda_0).
  double initial_step = -1.0;
  std::uint64_t seed = 1;
  /// Regularization of the flux weight inside the solver only; < 0 selects
  /// the default 1e-10 * diameter for p < 2 and exactly 0 otherwise.
  double eps_reg = -1.0;
  /// Extra short-step descent iterations after the main loop; damps
  /// high-frequency residual content (used by checks that divide nodal
  /// residuals by small eigenfunction values).
  std::size_t polish_iterations = 0;
  bool record_trace = false;

  void validate() const;
  double effective_eps_reg(const GridDomain& domain) const;
};

struct EigenPair {
  double lambda1;
  GridFunction u1;
  std::size_t iterations;
  /// Relative weak-form residual of (u1, lambda1), regularization-free.
  double residual;
  bool converged;
  /// Rayleigh quotient after every accepted iterate (record_trace only).
  std::vector<double> lambda_trace;
};

struct VerificationReport {
  std::string check;
  bool pass = false;
  /// False when the theorem's hypotheses could not be certified; such a
  /// report makes no claim either way.
  bool applicable = true;
  std::vector<std::pair<std::string, double>> metrics;
  std::string note;

  void add(std::string key, double value) {
    metrics.emplace_back(std::move(key), value);
  }
};

/// Minimize the Rayleigh quotient over the positive cone of unit-p-norm grid
/// functions by projected gradient descent (positive part, then
/// p-normalization) with Armijo backtracking; trial steps are seeded with a
/// Barzilai-Borwein estimate. The accepted-iterate Rayleigh quotients are
/// strictly nonincreasing.
EigenPair solve_principal(const VectorFieldFamily& family, DomainPtr domain,
                          const SolverOptions& opts);

/// min over interior nodes of (L_p v) / v^{p-1} for strictly positive v.
/// By construction v is a discrete sup-solution at this level, so the value
/// never exceeds the discrete principal frequency (up to solver accuracy).
double barta_lower_bound(const VectorFieldFamily& family, DomainPtr domain,
                         const GridFunction& v, double p);

/// A strictly positive weak eigenpair (v, lambda) forces lambda to be the
/// principal frequency: certify the hypothesis, re-solve, compare.
VerificationReport uniqueness_check(const VectorFieldFamily& family,
                                    DomainPtr domain, const GridFunction& v,
                                    double lambda, double p, double tol,
                                    const SolverOptions& opts);

struct SimplicityOptions {
  std::size_t restarts = 5;
  double defect_tol = 1e-8;
  double lambda_tol = 1e-8;
  /// Explicit restart seeds; when empty, seeds are opts.seed + i.
  std::vector<std::uint64_t> seeds;
};

/// Re-solve from several random positive initializations and measure the
/// worst pairwise proportionality defect 1 - |<u_a, u_b>| / (|u_a||u_b|) and
/// the lambda spread.
VerificationReport simplicity_check(const VectorFieldFamily& family,
                                    DomainPtr domain, double p,
                                    const SimplicityOptions& simplicity,
                                    const SolverOptions& opts);

/// lambda_1(Omega) >= lambda_1(Omega_tilde) for nested domains on a shared
/// lattice. Throws when the domains are not nested (precondition).
VerificationReport domain_monotonicity_check(const VectorFieldFamily& family,
                                             DomainPtr omega,
                                             DomainPtr omega_tilde, double p,
                                             double tol,
                                             const SolverOptions& opts);

/// lambda_1(delta_s Omega) * s^p == lambda_1(Omega) for families carrying a
/// dilation law.
VerificationReport scaling_check(const VectorFieldFamily& family,
                                 DomainPtr domain, double p, double s,
                                 double tol, const SolverOptions& opts);

/// Diagnostic cross-check for p = 2 only: inverse power iteration with a
/// matrix-free conjugate-gradient inner solve. Never used as the reported
/// result path.
double p2_inverse_iteration_estimate(const VectorFieldFamily& family,
                                     DomainPtr domain,
                                     std::size_t outer_iterations = 60,
                                     double cg_tol = 1e-12,
                                     std::uint64_t seed = 7);

} // namespace subfreq
