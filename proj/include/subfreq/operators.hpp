#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subfreq/fields.hpp"
#include "subfreq/grid.hpp"

namespace subfreq {

/// Outcome of testing a candidate (v, lambda) against the discrete weak form.
enum class SolutionKind { weak_solution, sup_solution, sub_solution, neither };

struct SolutionClass {
  SolutionKind kind = SolutionKind::neither;
  /// Largest normalized violation of the returned kind's defining
  /// inequality (for `neither`: distance to the nearest kind). Always >= 0.
  double worst_violation = 0.0;
  std::size_t num_test_functions = 0;
};

const char* to_string(SolutionKind kind);

/// integrate(|grad_X u|^p); the p-th power of the gradient seminorm.
double dirichlet_energy(const VectorFieldFamily& family, const GridFunction& u,
                        double p);

/// dirichlet_energy / integrate(|u|^p). Requires a nontrivial u.
double rayleigh_quotient(const VectorFieldFamily& family, const GridFunction& u,
                         double p);

/// grad_X^* ( (|grad_X u|^2 + eps_reg^2)^{(p-2)/2} grad_X u ), masked to the
/// interior. eps_reg = 0 gives the raw operator with the flux convention
/// 0^{(p-2)/2} * 0 = 0 at nodes where the gradient vanishes.
GridFunction apply_operator(const VectorFieldFamily& family,
                            const GridFunction& u, double p,
                            double eps_reg = 0.0);

/// integrate(|grad u|^{p-2} <grad u, grad phi>) - lambda * integrate(|u|^{p-2} u phi).
/// Equals the operator-form pairing <L_p u - lambda |u|^{p-2} u, phi>_h to
/// rounding because the adjoint is the exact stencil transpose.
double weak_form_residual(const VectorFieldFamily& family, const GridFunction& u,
                          double lambda, double p, const GridFunction& phi);

/// Classify (v, lambda) against an explicit list of test functions.
/// Sup/sub classification only consults the nonnegative ones.
SolutionClass classify_solution(const VectorFieldFamily& family,
                                const GridFunction& v, double lambda, double p,
                                const std::vector<GridFunction>& test_set,
                                double tol);

/// Classify against every interior nodal indicator (the discrete hat basis),
/// evaluated implicitly through the nodewise residual, so no test functions
/// are materialized.
SolutionClass classify_solution_nodal(const VectorFieldFamily& family,
                                      const GridFunction& v, double lambda,
                                      double p, double tol);

/// Low-level kernels shared by the public operations and the eigensolver so
/// both follow one arithmetic path. Raw vectors are full-lattice nodal
/// arrays over table.domain().
namespace kernels {

/// Forward-link gradient of u along every field; grads[k] resized as needed.
void gradient_all(const FieldTable& table, std::span<const double> u,
                  std::vector<std::vector<double>>& grads);

/// weight_i = (sum_k grads[k][i]^2 + eps_reg^2)^{(p-2)/2}, with weight = 0
/// where the argument vanishes and p < 2.
void p_flux_weight(const std::vector<std::vector<double>>& grads, double p,
                   double eps_reg, std::vector<double>& weight);

/// out = sum_k adjoint(weight .* grads[k]), masked to the interior.
void weighted_adjoint_divergence(const FieldTable& table,
                                 const std::vector<std::vector<double>>& grads,
                                 const std::vector<double>& weight,
                                 std::vector<double>& out,
                                 std::vector<double>& flux_scratch,
                                 std::vector<double>& adj_scratch);

/// integrate(|grad|^p) from precomputed gradient components.
double energy_from_grads(const GridDomain& domain,
                         const std::vector<std::vector<double>>& grads, double p);

/// integrate(|u|^p).
double p_mass(const GridDomain& domain, std::span<const double> u, double p);

/// sign(x) |x|^{p-1}.
double signed_power(double x, double p);

} // namespace kernels

} // namespace subfreq
