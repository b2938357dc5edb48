#include "subfreq/picone.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "subfreq/operators.hpp"

namespace subfreq {

const char* to_string(PiconeMode mode) {
  return mode == PiconeMode::algebraic ? "algebraic" : "discrete";
}

namespace {

struct PiconeEvaluation {
  std::vector<double> L;
  std::vector<double> R;
  std::vector<double> scale; // sum of absolute term magnitudes per node
};

void require_inputs(const GridFunction& u, const GridFunction& v, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("picone: p > 1 required");
  if (!u.domain()->same_lattice(*v.domain())) {
    throw std::invalid_argument("picone: u and v on different lattices");
  }
  if (!(v.min_interior() > 0.0)) {
    throw std::invalid_argument(
        "picone: v must be strictly positive on the interior");
  }
}

/// Shared evaluation of L, R and the magnitude scale. The three L-terms are
/// nodewise algebra over the discrete gradients; R differs between modes in
/// how the inner gradient is formed.
PiconeEvaluation evaluate(const VectorFieldFamily& family, const GridFunction& u,
                          const GridFunction& v, double p, PiconeMode mode,
                          bool want_R) {
  require_inputs(u, v, p);
  const DomainPtr& domain = u.domain();
  FieldTable table(family, domain);
  const std::size_t n = domain->num_nodes();
  const std::size_t num_fields = table.num_fields();

  std::vector<std::vector<double>> gu, gv, gq;
  kernels::gradient_all(table, u.values(), gu);
  kernels::gradient_all(table, v.values(), gv);

  const double eps_den = 1e-14 * v.max_interior();

  if (want_R && mode == PiconeMode::discrete) {
    // Quotient |u|^p / v^{p-1} formed nodewise, then differenced.
    std::vector<double> quotient(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!domain->interior(i)) continue;
      const double vg = std::max(v[i], eps_den);
      quotient[i] = std::pow(std::abs(u[i]), p) / std::pow(vg, p - 1.0);
    }
    kernels::gradient_all(table, quotient, gq);
  }

  PiconeEvaluation out;
  out.L.assign(n, 0.0);
  out.R.assign(n, 0.0);
  out.scale.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    if (!domain->interior(i)) continue;
    double gu2 = 0.0, gv2 = 0.0, dot = 0.0;
    for (std::size_t k = 0; k < num_fields; ++k) {
      gu2 += gu[k][i] * gu[k][i];
      gv2 += gv[k][i] * gv[k][i];
      dot += gv[k][i] * gu[k][i];
    }
    const double gu_norm = std::sqrt(gu2);
    const double gv_norm = std::sqrt(gv2);
    const double vg = std::max(v[i], eps_den);
    const double t = std::abs(u[i]) / vg;

    const double term1 = std::pow(gu_norm, p);
    // |grad v|^{p-2} <grad v, .>: flux convention 0 at vanishing gradient.
    const double gv_pm2 = gv_norm > 0.0 ? std::pow(gv_norm, p - 2.0) : 0.0;
    const double ratio = u[i] == 0.0
                             ? 0.0
                             : std::copysign(std::pow(t, p - 1.0), u[i]);
    const double term2 = -p * ratio * gv_pm2 * dot;
    const double term3 = (p - 1.0) * std::pow(t, p) * std::pow(gv_norm, p);
    out.L[i] = term1 + term2 + term3;
    out.scale[i] = std::abs(term1) + std::abs(term2) + std::abs(term3);

    if (!want_R) continue;
    if (mode == PiconeMode::algebraic) {
      // grad(|u|^p / v^{p-1}) expanded by product/chain rule.
      double dot_q = 0.0;
      const double c1 = p * ratio;
      const double c2 = (p - 1.0) * std::pow(t, p);
      for (std::size_t k = 0; k < num_fields; ++k) {
        dot_q += gv[k][i] * (c1 * gu[k][i] - c2 * gv[k][i]);
      }
      out.R[i] = term1 - gv_pm2 * dot_q;
    } else {
      double dot_q = 0.0;
      for (std::size_t k = 0; k < num_fields; ++k) {
        dot_q += gv[k][i] * gq[k][i];
      }
      out.R[i] = term1 - gv_pm2 * dot_q;
    }
  }
  return out;
}

} // namespace

GridFunction picone_L(const VectorFieldFamily& family, const GridFunction& u,
                      const GridFunction& v, double p) {
  PiconeEvaluation eval =
      evaluate(family, u, v, p, PiconeMode::algebraic, /*want_R=*/false);
  return GridFunction(u.domain(), std::move(eval.L));
}

GridFunction picone_R(const VectorFieldFamily& family, const GridFunction& u,
                      const GridFunction& v, double p, PiconeMode mode) {
  PiconeEvaluation eval = evaluate(family, u, v, p, mode, /*want_R=*/true);
  return GridFunction(u.domain(), std::move(eval.R));
}

PiconeReport verify_picone(const VectorFieldFamily& family,
                           const GridFunction& u, const GridFunction& v,
                           double p, PiconeMode mode, double tol) {
  PiconeEvaluation eval = evaluate(family, u, v, p, mode, /*want_R=*/true);
  const DomainPtr& domain = u.domain();

  PiconeReport report;
  report.mode = mode;
  bool first = true;
  for (std::size_t i = 0; i < eval.L.size(); ++i) {
    if (!domain->interior(i)) continue;
    report.scale = std::max(report.scale, eval.scale[i]);
    if (first || eval.L[i] < report.min_L) {
      report.min_L = eval.L[i];
      report.argmin_node = i;
    }
    const double diff = std::abs(eval.L[i] - eval.R[i]);
    if (first || diff > report.max_abs_L_minus_R) {
      report.max_abs_L_minus_R = diff;
      report.argmax_node = i;
    }
    first = false;
  }

  // Proportionality fit u ~ c v in the lattice L2 inner product.
  const double vv = inner_product(v, v);
  const double uv = inner_product(u, v);
  const double uu = inner_product(u, u);
  report.fitted_c = vv > 0.0 ? uv / vv : 0.0;
  const double res2 =
      std::max(0.0, uu - 2.0 * report.fitted_c * uv + report.fitted_c * report.fitted_c * vv);
  report.proportionality_residual =
      uu > 0.0 ? std::sqrt(res2 / uu) : 0.0;
  if (report.proportionality_residual <= tol) {
    double max_abs_L = 0.0;
    for (std::size_t i = 0; i < eval.L.size(); ++i) {
      if (domain->interior(i)) max_abs_L = std::max(max_abs_L, std::abs(eval.L[i]));
    }
    report.equality_case_defect = max_abs_L;
  }

  const double scale = std::max(report.scale, 1e-300);
  report.pass = report.min_L >= -tol * scale;
  if (mode == PiconeMode::algebraic) {
    report.pass = report.pass && report.max_abs_L_minus_R <= 1e-12 * scale;
  }
  return report;
}

} // namespace subfreq
