#include "subfreq/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subfreq {

void SolverOptions::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("SolverOptions: p > 1 required");
  if (max_iterations < 1) {
    throw std::invalid_argument("SolverOptions: max_iterations >= 1 required");
  }
  if (!(tol_lambda > 0.0) || !(tol_residual > 0.0)) {
    throw std::invalid_argument("SolverOptions: tolerances must be positive");
  }
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw std::invalid_argument("SolverOptions: armijo_c in (0, 1) required");
  }
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw std::invalid_argument("SolverOptions: backtrack in (0, 1) required");
  }
}

double SolverOptions::effective_eps_reg(const GridDomain& domain) const {
  if (eps_reg >= 0.0) return eps_reg;
  return p < 2.0 ? 1e-10 * domain.diameter() : 0.0;
}

namespace {

using kernels::energy_from_grads;
using kernels::gradient_all;
using kernels::p_flux_weight;
using kernels::p_mass;
using kernels::signed_power;
using kernels::weighted_adjoint_divergence;

constexpr std::size_t kStableIters = 5;

double dot_h(const GridDomain& domain, std::span<const double> a,
             std::span<const double> b) {
  StableSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value() * domain.cell_volume();
}

/// Positive part followed by p-normalization. Returns false when the
/// positive part vanishes identically.
bool project_positive_unit(const GridDomain& domain, std::vector<double>& u,
                           double p) {
  for (double& v : u) v = std::max(v, 0.0);
  const double mass = p_mass(domain, u, p);
  if (!(mass > 0.0)) return false;
  const double inv = 1.0 / std::pow(mass, 1.0 / p);
  for (double& v : u) v *= inv;
  return true;
}

/// Scratch space and kernel plumbing for one solve.
struct SolveWorkspace {
  const FieldTable& table;
  const GridDomain& domain;
  double p;
  double eps;

  std::vector<std::vector<double>> grads;
  std::vector<double> weight, lp, flux, adj;

  SolveWorkspace(const FieldTable& t, double p_, double eps_)
      : table(t), domain(*t.domain()), p(p_), eps(eps_) {}

  double rayleigh(std::span<const double> u) {
    gradient_all(table, u, grads);
    return energy_from_grads(domain, grads, p) / p_mass(domain, u, p);
  }

  /// g = L_p^{eps} u - lambda |u|^{p-2} u, reusing the gradients left behind
  /// by the last rayleigh() call on the same u.
  void descent_gradient(std::span<const double> u, double lambda,
                        std::vector<double>& g) {
    p_flux_weight(grads, p, eps, weight);
    weighted_adjoint_divergence(table, grads, weight, lp, flux, adj);
    g.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      g[i] = lp[i] - lambda * signed_power(u[i], p);
    }
  }

  /// Regularization-free relative weak-form residual of (u, lambda).
  /// Recomputes everything; safe to call at any point.
  double relative_residual(std::span<const double> u, double lambda) {
    gradient_all(table, u, grads);
    p_flux_weight(grads, p, 0.0, weight);
    weighted_adjoint_divergence(table, grads, weight, lp, flux, adj);
    StableSum res2, op2, m2;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double mass_term = signed_power(u[i], p);
      const double r = lp[i] - lambda * mass_term;
      res2.add(r * r);
      op2.add(lp[i] * lp[i]);
      m2.add(mass_term * mass_term);
    }
    const double scale =
        std::sqrt(op2.value()) + std::abs(lambda) * std::sqrt(m2.value());
    return scale > 0.0 ? std::sqrt(res2.value()) / scale : 0.0;
  }
};

} // namespace

EigenPair solve_principal(const VectorFieldFamily& family, DomainPtr domain,
                          const SolverOptions& opts) {
  opts.validate();
  FieldTable table(family, domain);
  const double p = opts.p;
  const double eps = opts.effective_eps_reg(*domain);
  SolveWorkspace ws(table, p, eps);
  const std::size_t n = domain->num_nodes();

  const GridFunction u0 = random_positive_function(domain, opts.seed);
  std::vector<double> u(u0.values().begin(), u0.values().end());
  project_positive_unit(*domain, u, p);

  double lambda = ws.rayleigh(u);
  std::vector<double> g;
  ws.descent_gradient(u, lambda, g);
  double gnorm2 = dot_h(*domain, g, g);

  std::vector<double> u_prev(n), g_prev(n), trial(n);
  double t_last =
      opts.initial_step > 0.0 ? opts.initial_step : 1.0 / (1.0 + lambda);
  bool have_prev = false;

  std::vector<double> trace;
  if (opts.record_trace) trace.push_back(lambda);

  // One projected-gradient step with Armijo backtracking; the trial step is
  // seeded by a Barzilai-Borwein estimate (BB2 takes the shorter step, used
  // by the polish phase to damp high-frequency residual content). Returns
  // false when no acceptable step exists.
  auto one_iteration = [&](bool bb2) -> bool {
    double t = t_last;
    if (have_prev) {
      StableSum uu, ug, gg;
      for (std::size_t i = 0; i < n; ++i) {
        const double du = u[i] - u_prev[i];
        const double dg = g[i] - g_prev[i];
        uu.add(du * du);
        ug.add(du * dg);
        gg.add(dg * dg);
      }
      const double num = bb2 ? ug.value() : uu.value();
      const double den = bb2 ? gg.value() : ug.value();
      const double bb = num / den;
      t = (std::isfinite(bb) && bb > 0.0) ? bb : t_last * 2.0;
    }
    t = std::clamp(t, 1e-18, 1e18);

    const double lambda_ref = lambda;
    for (std::size_t bt = 0; bt <= opts.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] - t * g[i];
      if (!project_positive_unit(*domain, trial, p)) {
        t *= opts.backtrack;
        continue;
      }
      const double lambda_trial = ws.rayleigh(trial);
      if (lambda_trial <= lambda_ref - opts.armijo_c * t * gnorm2) {
        u_prev.swap(u);
        g_prev.swap(g);
        u = trial;
        lambda = lambda_trial;
        t_last = t;
        ws.descent_gradient(u, lambda, g); // gradients left by rayleigh(trial)
        gnorm2 = dot_h(*domain, g, g);
        have_prev = true;
        return true;
      }
      t *= opts.backtrack;
    }
    return false;
  };

  std::size_t iterations = 0;
  std::size_t stable = 0;
  bool converged = false;

  // Cheap residual when eps == 0: descent_gradient already holds the
  // regularization-free operator application.
  auto current_relative_residual = [&]() {
    if (eps == 0.0) {
      StableSum res2, op2, m2;
      for (std::size_t i = 0; i < n; ++i) {
        const double mass_term = signed_power(u[i], p);
        res2.add(g[i] * g[i]);
        op2.add(ws.lp[i] * ws.lp[i]);
        m2.add(mass_term * mass_term);
      }
      const double scale =
          std::sqrt(op2.value()) + std::abs(lambda) * std::sqrt(m2.value());
      return scale > 0.0 ? std::sqrt(res2.value()) / scale : 0.0;
    }
    const double r = ws.relative_residual(u, lambda);
    // relative_residual clobbered the workspace; restore the descent state
    // for the next iteration.
    ws.rayleigh(u);
    ws.descent_gradient(u, lambda, g);
    return r;
  };

  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    const double lambda_before = lambda;
    if (!one_iteration(/*bb2=*/false)) break;
    ++iterations;
    if (opts.record_trace) trace.push_back(lambda);

    const double denom = std::max(std::abs(lambda), 1e-300);
    stable = std::abs(lambda_before - lambda) <= opts.tol_lambda * denom
                 ? stable + 1
                 : 0;
    if (stable >= kStableIters &&
        current_relative_residual() <= opts.tol_residual) {
      converged = true;
      break;
    }
  }

  for (std::size_t it = 0; it < opts.polish_iterations; ++it) {
    const double lambda_before = lambda;
    if (!one_iteration(/*bb2=*/true)) break;
    ++iterations;
    if (opts.record_trace) trace.push_back(lambda);
    const double denom = std::max(std::abs(lambda), 1e-300);
    stable = std::abs(lambda_before - lambda) <= opts.tol_lambda * denom
                 ? stable + 1
                 : 0;
  }

  // Final feasibility polish and exact-consistency recompute.
  project_positive_unit(*domain, u, p);
  const double lambda_final = ws.rayleigh(u);
  const double residual = ws.relative_residual(u, lambda_final);
  if (!converged) {
    converged = stable >= kStableIters && residual <= opts.tol_residual;
  }

  EigenPair pair{lambda_final,
                 GridFunction(domain, std::move(u)),
                 iterations,
                 residual,
                 converged,
                 std::move(trace)};
  return pair;
}

double barta_lower_bound(const VectorFieldFamily& family, DomainPtr domain,
                         const GridFunction& v, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("barta_lower_bound: p > 1 required");
  if (!v.domain()->same_lattice(*domain) ||
      v.domain()->interior_mask() != domain->interior_mask()) {
    throw std::invalid_argument("barta_lower_bound: v not on the given domain");
  }
  const double vmin = v.min_interior();
  if (!(vmin > 0.0)) {
    throw std::invalid_argument(
        "barta_lower_bound: v must be strictly positive on the interior");
  }
  const GridFunction lv = apply_operator(family, v, p, 0.0);
  const double eps_den = 1e-12 * v.max_interior();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!domain->interior(i)) continue;
    const double den = std::pow(std::max(v[i], eps_den), p - 1.0);
    bound = std::min(bound, lv[i] / den);
  }
  return bound;
}

VerificationReport uniqueness_check(const VectorFieldFamily& family,
                                    DomainPtr domain, const GridFunction& v,
                                    double lambda, double p, double tol,
                                    const SolverOptions& opts) {
  VerificationReport report;
  report.check = "uniqueness";
  report.add("lambda", lambda);

  if (!(v.min_interior() > 0.0)) {
    report.applicable = false;
    report.note = "hypothesis failed: v is not strictly positive on the interior";
    return report;
  }
  const SolutionClass cls = classify_solution_nodal(family, v, lambda, p, tol);
  report.add("classification_worst_violation", cls.worst_violation);
  if (cls.kind != SolutionKind::weak_solution) {
    report.applicable = false;
    report.note = std::string("hypothesis failed: (v, lambda) classified as ") +
                  to_string(cls.kind);
    return report;
  }

  SolverOptions solve_opts = opts;
  solve_opts.p = p;
  const EigenPair pair = solve_principal(family, domain, solve_opts);
  report.add("lambda1", pair.lambda1);
  const double gap = std::abs(lambda - pair.lambda1);
  report.add("relative_gap", gap / std::max(std::abs(lambda), 1e-300));
  report.pass = gap <= tol * std::abs(lambda);
  if (!pair.converged) report.note = "warning: reference solve did not converge";
  return report;
}

VerificationReport simplicity_check(const VectorFieldFamily& family,
                                    DomainPtr domain, double p,
                                    const SimplicityOptions& simplicity,
                                    const SolverOptions& opts) {
  if (simplicity.restarts < 2) {
    throw std::invalid_argument("simplicity_check: restarts >= 2 required");
  }
  VerificationReport report;
  report.check = "simplicity";

  std::vector<EigenPair> pairs;
  pairs.reserve(simplicity.restarts);
  std::size_t converged_count = 0;
  for (std::size_t r = 0; r < simplicity.restarts; ++r) {
    SolverOptions solve_opts = opts;
    solve_opts.p = p;
    solve_opts.seed = r < simplicity.seeds.size() ? simplicity.seeds[r]
                                                  : opts.seed + r;
    pairs.push_back(solve_principal(family, domain, solve_opts));
    if (pairs.back().converged) ++converged_count;
  }

  double max_defect = 0.0;
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const double uu = inner_product(pairs[a].u1, pairs[a].u1);
      const double vv = inner_product(pairs[b].u1, pairs[b].u1);
      const double uv = inner_product(pairs[a].u1, pairs[b].u1);
      const double defect = 1.0 - std::abs(uv) / std::sqrt(uu * vv);
      max_defect = std::max(max_defect, defect);
    }
  }
  double lambda_min = std::numeric_limits<double>::infinity();
  double lambda_max = -lambda_min;
  for (const auto& pair : pairs) {
    lambda_min = std::min(lambda_min, pair.lambda1);
    lambda_max = std::max(lambda_max, pair.lambda1);
  }
  const double spread =
      (lambda_max - lambda_min) / std::max(std::abs(lambda_max), 1e-300);

  report.add("restarts", static_cast<double>(simplicity.restarts));
  report.add("converged_count", static_cast<double>(converged_count));
  report.add("max_proportionality_defect", max_defect);
  report.add("lambda_spread", spread);
  report.add("lambda1", pairs.front().lambda1);
  report.pass = converged_count == simplicity.restarts &&
                max_defect <= simplicity.defect_tol &&
                spread <= simplicity.lambda_tol;
  if (converged_count != simplicity.restarts) {
    report.note = "partial data: some restarts did not converge";
  }
  return report;
}

VerificationReport domain_monotonicity_check(const VectorFieldFamily& family,
                                             DomainPtr omega,
                                             DomainPtr omega_tilde, double p,
                                             double tol,
                                             const SolverOptions& opts) {
  if (!is_subdomain(*omega, *omega_tilde)) {
    throw std::invalid_argument(
        "domain_monotonicity_check: omega is not a subdomain of omega_tilde");
  }
  SolverOptions solve_opts = opts;
  solve_opts.p = p;
  const EigenPair inner = solve_principal(family, omega, solve_opts);
  const EigenPair outer = solve_principal(family, omega_tilde, solve_opts);

  VerificationReport report;
  report.check = "monotonicity";
  report.add("lambda_omega", inner.lambda1);
  report.add("lambda_omega_tilde", outer.lambda1);
  report.add("margin", inner.lambda1 - outer.lambda1);
  report.pass = inner.lambda1 >= outer.lambda1 - tol * outer.lambda1;
  if (!inner.converged || !outer.converged) {
    report.note = "warning: a solve did not converge";
  }
  return report;
}

VerificationReport scaling_check(const VectorFieldFamily& family,
                                 DomainPtr domain, double p, double s,
                                 double tol, const SolverOptions& opts) {
  if (!family.dilation()) {
    throw std::invalid_argument("scaling_check: family has no dilation law");
  }
  if (!(s > 0.0)) throw std::invalid_argument("scaling_check: s must be positive");
  SolverOptions solve_opts = opts;
  solve_opts.p = p;
  const EigenPair base = solve_principal(family, domain, solve_opts);
  const DomainPtr scaled = dilate_domain(family, s, *domain);
  const EigenPair dilated = solve_principal(family, scaled, solve_opts);

  const double ratio = dilated.lambda1 * std::pow(s, p) / base.lambda1;
  VerificationReport report;
  report.check = "scaling";
  report.add("s", s);
  report.add("lambda1", base.lambda1);
  report.add("lambda1_dilated", dilated.lambda1);
  report.add("normalized_ratio", ratio);
  report.pass = std::abs(ratio - 1.0) <= tol;
  if (!base.converged || !dilated.converged) {
    report.note = "warning: a solve did not converge";
  }
  return report;
}

double p2_inverse_iteration_estimate(const VectorFieldFamily& family,
                                     DomainPtr domain,
                                     std::size_t outer_iterations,
                                     double cg_tol, std::uint64_t seed) {
  FieldTable table(family, domain);
  SolveWorkspace ws(table, 2.0, 0.0);
  const std::size_t n = domain->num_nodes();

  auto apply_a = [&](std::span<const double> x, std::vector<double>& out) {
    gradient_all(table, x, ws.grads);
    p_flux_weight(ws.grads, 2.0, 0.0, ws.weight);
    weighted_adjoint_divergence(table, ws.grads, ws.weight, out, ws.flux, ws.adj);
  };

  const GridFunction b0 = random_positive_function(domain, seed);
  std::vector<double> b(b0.values().begin(), b0.values().end());
  {
    const double norm = std::sqrt(dot_h(*domain, b, b));
    for (double& x : b) x /= norm;
  }

  std::vector<double> x(n), r(n), pdir(n), ap(n);
  for (std::size_t outer = 0; outer < outer_iterations; ++outer) {
    // CG on A x = b starting from x = 0.
    std::fill(x.begin(), x.end(), 0.0);
    r = b;
    pdir = r;
    double rr = dot_h(*domain, r, r);
    const double target = cg_tol * cg_tol * rr;
    for (std::size_t it = 0; it < 20 * n && rr > target; ++it) {
      apply_a(pdir, ap);
      const double alpha = rr / dot_h(*domain, pdir, ap);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * pdir[i];
        r[i] -= alpha * ap[i];
      }
      const double rr_next = dot_h(*domain, r, r);
      const double beta = rr_next / rr;
      for (std::size_t i = 0; i < n; ++i) pdir[i] = r[i] + beta * pdir[i];
      rr = rr_next;
    }
    const double norm = std::sqrt(dot_h(*domain, x, x));
    for (std::size_t i = 0; i < n; ++i) b[i] = x[i] / norm;
  }
  apply_a(b, ap);
  return dot_h(*domain, b, ap) / dot_h(*domain, b, b);
}

} // namespace subfreq
