#include "subfreq/caccioppoli.hpp"

#include <cmath>
#include <stdexcept>

#include "subfreq/operators.hpp"

namespace subfreq {

namespace {

struct GradientNorms {
  std::vector<double> gv_norm;
  std::vector<double> gphi_norm;
};

void require_inputs(const GridFunction& v, const GridFunction& phi, double p,
                    double q) {
  if (!(p > 1.0)) throw std::invalid_argument("caccioppoli: p > 1 required");
  if (!(q > p - 1.0)) {
    throw std::invalid_argument("caccioppoli: q > p - 1 required");
  }
  if (!v.domain()->same_lattice(*phi.domain())) {
    throw std::invalid_argument("caccioppoli: v and phi on different lattices");
  }
  if (!(v.min_interior() > 0.0)) {
    throw std::invalid_argument(
        "caccioppoli: v must be strictly positive on the interior");
  }
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (phi[i] < 0.0) {
      throw std::invalid_argument("caccioppoli: phi must be nonnegative");
    }
  }
}

GradientNorms gradient_norms(const VectorFieldFamily& family,
                             const GridFunction& v, const GridFunction& phi) {
  FieldTable table(family, v.domain());
  std::vector<std::vector<double>> gv, gphi;
  kernels::gradient_all(table, v.values(), gv);
  kernels::gradient_all(table, phi.values(), gphi);
  const std::size_t n = v.size();
  GradientNorms norms;
  norms.gv_norm.assign(n, 0.0);
  norms.gphi_norm.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < gv.size(); ++k) {
      a += gv[k][i] * gv[k][i];
      b += gphi[k][i] * gphi[k][i];
    }
    norms.gv_norm[i] = std::sqrt(a);
    norms.gphi_norm[i] = std::sqrt(b);
  }
  return norms;
}

CaccioppoliReport evaluate_sides(const GridFunction& v, const GridFunction& phi,
                                 const GradientNorms& norms, double p, double q,
                                 double lambda, double tol) {
  const DomainPtr& domain = v.domain();
  const std::size_t n = v.size();
  const double eps_den = 1e-14 * v.max_interior();

  StableSum lhs_sum, grad_sum, mass_sum;
  for (std::size_t i = 0; i < n; ++i) {
    // v^q and v^q phi^p vanish with v outside the interior (q > 0).
    if (v[i] > 0.0) {
      const double vq = std::pow(v[i], q);
      grad_sum.add(vq * std::pow(norms.gphi_norm[i], p));
      if (phi[i] > 0.0) mass_sum.add(vq * std::pow(phi[i], p));
    }
    // The lhs weight v^{q-p} blows up at v = 0 for q < p; the cutoff kills
    // those nodes, so skip wherever phi or the gradient vanishes.
    if (phi[i] > 0.0 && norms.gv_norm[i] > 0.0) {
      const double vg = std::max(v[i], eps_den);
      lhs_sum.add(std::pow(vg, q - p) * std::pow(phi[i], p) *
                  std::pow(norms.gv_norm[i], p));
    }
  }

  CaccioppoliReport report;
  report.p = p;
  report.q = q;
  report.lambda = lambda;
  report.constant_used = std::pow(p / (q - p + 1.0), p);
  const double vol = domain->cell_volume();
  report.lhs = lhs_sum.value() * vol;
  report.rhs_gradient_term = report.constant_used * grad_sum.value() * vol;
  report.rhs_lambda_term =
      lambda * p / (q - p + 1.0) * mass_sum.value() * vol;
  report.rhs = report.rhs_gradient_term + report.rhs_lambda_term;
  report.margin = report.rhs - report.lhs;
  report.rhs_negative = report.rhs < 0.0;
  report.pass =
      report.margin >= -tol * std::max(std::abs(report.lhs), std::abs(report.rhs));
  return report;
}

} // namespace

CaccioppoliReport caccioppoli_sides(const VectorFieldFamily& family,
                                    const GridFunction& v,
                                    const GridFunction& phi, double p, double q,
                                    double lambda) {
  require_inputs(v, phi, p, q);
  const GradientNorms norms = gradient_norms(family, v, phi);
  return evaluate_sides(v, phi, norms, p, q, lambda, 1e-9);
}

CaccioppoliReport verify_caccioppoli(const VectorFieldFamily& family,
                                     const GridFunction& v,
                                     const GridFunction& phi, double p, double q,
                                     double lambda, double tol,
                                     double classify_tol) {
  require_inputs(v, phi, p, q);
  const SolutionClass cls =
      classify_solution_nodal(family, v, lambda, p, classify_tol);
  const GradientNorms norms = gradient_norms(family, v, phi);
  CaccioppoliReport report = evaluate_sides(v, phi, norms, p, q, lambda, tol);
  report.hypothesis_checked = true;
  if (cls.kind != SolutionKind::sub_solution &&
      cls.kind != SolutionKind::weak_solution) {
    report.applicable = false;
    report.pass = false;
  }
  return report;
}

std::vector<CaccioppoliReport> caccioppoli_sweep(const VectorFieldFamily& family,
                                                 const GridFunction& v,
                                                 const GridFunction& phi,
                                                 double p, double lambda,
                                                 const std::vector<double>& q_grid,
                                                 double tol) {
  // Fail fast: reject the whole sweep on any invalid q.
  for (double q : q_grid) {
    if (!(q > p - 1.0)) {
      throw std::invalid_argument("caccioppoli_sweep: q > p - 1 required");
    }
  }
  std::vector<CaccioppoliReport> reports;
  if (q_grid.empty()) return reports;
  require_inputs(v, phi, p, q_grid.front());
  const GradientNorms norms = gradient_norms(family, v, phi);
  reports.reserve(q_grid.size());
  for (double q : q_grid) {
    reports.push_back(evaluate_sides(v, phi, norms, p, q, lambda, tol));
  }
  return reports;
}

} // namespace subfreq
