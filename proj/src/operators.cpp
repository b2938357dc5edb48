#include "subfreq/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subfreq {

const char* to_string(SolutionKind kind) {
  switch (kind) {
    case SolutionKind::weak_solution: return "weak_solution";
    case SolutionKind::sup_solution: return "sup_solution";
    case SolutionKind::sub_solution: return "sub_solution";
    case SolutionKind::neither: return "neither";
  }
  return "neither";
}

namespace kernels {

void gradient_all(const FieldTable& table, std::span<const double> u,
                  std::vector<std::vector<double>>& grads) {
  grads.resize(table.num_fields());
  for (std::size_t k = 0; k < table.num_fields(); ++k) {
    grads[k].resize(u.size());
    table.apply(k, u, grads[k]);
  }
}

void p_flux_weight(const std::vector<std::vector<double>>& grads, double p,
                   double eps_reg, std::vector<double>& weight) {
  const std::size_t n = grads.front().size();
  weight.resize(n);
  const double expo = 0.5 * (p - 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    double t = eps_reg * eps_reg;
    for (const auto& g : grads) t += g[i] * g[i];
    if (t == 0.0) {
      // Flux convention: 0^{(p-2)/2} * 0 = 0.
      weight[i] = p < 2.0 ? 0.0 : (p == 2.0 ? 1.0 : 0.0);
    } else {
      weight[i] = p == 2.0 ? 1.0 : std::pow(t, expo);
    }
  }
}

void weighted_adjoint_divergence(const FieldTable& table,
                                 const std::vector<std::vector<double>>& grads,
                                 const std::vector<double>& weight,
                                 std::vector<double>& out,
                                 std::vector<double>& flux_scratch,
                                 std::vector<double>& adj_scratch) {
  const std::size_t n = weight.size();
  out.assign(n, 0.0);
  flux_scratch.resize(n);
  adj_scratch.resize(n);
  for (std::size_t k = 0; k < grads.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) flux_scratch[i] = weight[i] * grads[k][i];
    table.apply_adjoint(k, flux_scratch, adj_scratch);
    for (std::size_t i = 0; i < n; ++i) out[i] += adj_scratch[i];
  }
}

double energy_from_grads(const GridDomain& domain,
                         const std::vector<std::vector<double>>& grads,
                         double p) {
  StableSum s;
  const std::size_t n = grads.front().size();
  const double half_p = 0.5 * p;
  for (std::size_t i = 0; i < n; ++i) {
    double t = 0.0;
    for (const auto& g : grads) t += g[i] * g[i];
    s.add(p == 2.0 ? t : std::pow(t, half_p));
  }
  return s.value() * domain.cell_volume();
}

double p_mass(const GridDomain& domain, std::span<const double> u, double p) {
  StableSum s;
  for (double v : u) s.add(p == 2.0 ? v * v : std::pow(std::abs(v), p));
  return s.value() * domain.cell_volume();
}

double signed_power(double x, double p) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), p - 1.0), x);
}

} // namespace kernels

namespace {

void require_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("requires p > 1");
}

} // namespace

double dirichlet_energy(const VectorFieldFamily& family, const GridFunction& u,
                        double p) {
  require_p(p);
  FieldTable table(family, u.domain());
  std::vector<std::vector<double>> grads;
  kernels::gradient_all(table, u.values(), grads);
  return kernels::energy_from_grads(*u.domain(), grads, p);
}

double rayleigh_quotient(const VectorFieldFamily& family, const GridFunction& u,
                         double p) {
  require_p(p);
  const double mass = kernels::p_mass(*u.domain(), u.values(), p);
  if (!(mass > 0.0)) {
    throw std::invalid_argument("rayleigh_quotient: u vanishes identically");
  }
  return dirichlet_energy(family, u, p) / mass;
}

GridFunction apply_operator(const VectorFieldFamily& family,
                            const GridFunction& u, double p, double eps_reg) {
  require_p(p);
  if (eps_reg < 0.0) throw std::invalid_argument("apply_operator: eps_reg >= 0");
  FieldTable table(family, u.domain());
  std::vector<std::vector<double>> grads;
  kernels::gradient_all(table, u.values(), grads);
  std::vector<double> weight, out, flux, adj;
  kernels::p_flux_weight(grads, p, eps_reg, weight);
  kernels::weighted_adjoint_divergence(table, grads, weight, out, flux, adj);
  return GridFunction(u.domain(), std::move(out));
}

double weak_form_residual(const VectorFieldFamily& family, const GridFunction& u,
                          double lambda, double p, const GridFunction& phi) {
  require_p(p);
  if (!u.domain()->same_lattice(*phi.domain())) {
    throw std::invalid_argument("weak_form_residual: lattice mismatch");
  }
  FieldTable table(family, u.domain());
  std::vector<std::vector<double>> gu, gphi;
  kernels::gradient_all(table, u.values(), gu);
  kernels::gradient_all(table, phi.values(), gphi);
  std::vector<double> weight;
  kernels::p_flux_weight(gu, p, 0.0, weight);

  const std::size_t n = u.size();
  StableSum flux_term;
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t k = 0; k < gu.size(); ++k) dot += gu[k][i] * gphi[k][i];
    flux_term.add(weight[i] * dot);
  }
  StableSum mass_term;
  for (std::size_t i = 0; i < n; ++i) {
    mass_term.add(kernels::signed_power(u[i], p) * phi[i]);
  }
  const double vol = u.domain()->cell_volume();
  return flux_term.value() * vol - lambda * mass_term.value() * vol;
}

namespace {

struct NormalizedResiduals {
  // Normalized residual r_phi / scale_phi per test function, plus whether
  // each test function is nonnegative.
  std::vector<double> normalized;
  std::vector<bool> nonnegative;
};

SolutionClass classify_from_normalized(const NormalizedResiduals& data,
                                       double tol) {
  double max_abs_all = 0.0;       // over all test functions
  double max_pos_nn = 0.0;        // positive part over nonnegative phi
  double max_neg_nn = 0.0;        // negative part over nonnegative phi
  bool has_nonnegative = false;
  for (std::size_t i = 0; i < data.normalized.size(); ++i) {
    const double r = data.normalized[i];
    max_abs_all = std::max(max_abs_all, std::abs(r));
    if (data.nonnegative[i]) {
      has_nonnegative = true;
      max_pos_nn = std::max(max_pos_nn, r);
      max_neg_nn = std::max(max_neg_nn, -r);
    }
  }

  SolutionClass cls;
  cls.num_test_functions = data.normalized.size();
  const bool weak = max_abs_all <= tol;
  const bool sup = has_nonnegative && max_neg_nn <= tol;
  const bool sub = has_nonnegative && max_pos_nn <= tol;
  if (weak) {
    cls.kind = SolutionKind::weak_solution;
    cls.worst_violation = max_abs_all;
  } else if (sup && !sub) {
    cls.kind = SolutionKind::sup_solution;
    cls.worst_violation = max_neg_nn;
  } else if (sub && !sup) {
    cls.kind = SolutionKind::sub_solution;
    cls.worst_violation = max_pos_nn;
  } else if (sup && sub) {
    // Nonnegative tests all pass but some signed one failed the weak test.
    cls.kind = SolutionKind::sup_solution;
    cls.worst_violation = max_neg_nn;
  } else {
    cls.kind = SolutionKind::neither;
    cls.worst_violation = std::min({max_abs_all, max_neg_nn, max_pos_nn});
  }
  return cls;
}

} // namespace

SolutionClass classify_solution(const VectorFieldFamily& family,
                                const GridFunction& v, double lambda, double p,
                                const std::vector<GridFunction>& test_set,
                                double tol) {
  require_p(p);
  if (test_set.empty()) {
    throw std::invalid_argument("classify_solution: empty test set");
  }
  FieldTable table(family, v.domain());
  std::vector<std::vector<double>> gv, gphi;
  kernels::gradient_all(table, v.values(), gv);
  std::vector<double> weight;
  kernels::p_flux_weight(gv, p, 0.0, weight);
  const std::size_t n = v.size();
  const double vol = v.domain()->cell_volume();

  std::vector<double> gv_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    double t = 0.0;
    for (const auto& g : gv) t += g[i] * g[i];
    gv_norm[i] = std::sqrt(t);
  }

  NormalizedResiduals data;
  for (const auto& phi : test_set) {
    if (!phi.domain()->same_lattice(*v.domain())) {
      throw std::invalid_argument("classify_solution: lattice mismatch");
    }
    kernels::gradient_all(table, phi.values(), gphi);
    StableSum residual;
    StableSum scale;
    bool nonneg = true;
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      double norm2 = 0.0;
      for (std::size_t k = 0; k < gv.size(); ++k) {
        dot += gv[k][i] * gphi[k][i];
        norm2 += gphi[k][i] * gphi[k][i];
      }
      const double vpow = kernels::signed_power(v[i], p);
      residual.add(weight[i] * dot - lambda * vpow * phi[i]);
      scale.add(weight[i] * gv_norm[i] * std::sqrt(norm2) +
                std::abs(lambda) * std::abs(vpow) * std::abs(phi[i]));
      nonneg = nonneg && phi[i] >= 0.0;
    }
    const double r = residual.value() * vol;
    const double s = std::max(scale.value() * vol, 1e-300);
    data.normalized.push_back(r / s);
    data.nonnegative.push_back(nonneg);
  }
  return classify_from_normalized(data, tol);
}

SolutionClass classify_solution_nodal(const VectorFieldFamily& family,
                                      const GridFunction& v, double lambda,
                                      double p, double tol) {
  require_p(p);
  FieldTable table(family, v.domain());
  std::vector<std::vector<double>> gv;
  kernels::gradient_all(table, v.values(), gv);
  std::vector<double> weight;
  kernels::p_flux_weight(gv, p, 0.0, weight);

  const std::size_t n = v.size();
  std::vector<double> residual, scale, flux(n), scratch(n);
  kernels::weighted_adjoint_divergence(table, gv, weight, residual, flux, scratch);

  // Magnitude counterpart: transpose with absolute coefficients on |flux|.
  scale.assign(n, 0.0);
  for (std::size_t k = 0; k < gv.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) flux[i] = weight[i] * gv[k][i];
    table.apply_adjoint_abs(k, flux, scratch);
    for (std::size_t i = 0; i < n; ++i) scale[i] += scratch[i];
  }

  NormalizedResiduals data;
  for (std::size_t i = 0; i < n; ++i) {
    if (!v.domain()->interior(i)) continue;
    const double vpow = kernels::signed_power(v[i], p);
    const double r = residual[i] - lambda * vpow;
    const double s =
        std::max(scale[i] + std::abs(lambda) * std::abs(vpow), 1e-300);
    data.normalized.push_back(r / s);
    data.nonnegative.push_back(true);
  }
  return classify_from_normalized(data, tol);
}

} // namespace subfreq
