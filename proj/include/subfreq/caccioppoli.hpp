#pragma once

#include <vector>

#include "subfreq/fields.hpp"
#include "subfreq/grid.hpp"

namespace subfreq {

struct CaccioppoliReport {
  /// integrate(v^{q-p} phi^p |grad v|^p)
  double lhs = 0.0;
  /// constant_used * integrate(v^q |grad phi|^p)
  double rhs_gradient_term = 0.0;
  /// (lambda p / (q-p+1)) * integrate(v^q phi^p)
  double rhs_lambda_term = 0.0;
  double rhs = 0.0;
  double margin = 0.0; // rhs - lhs
  double p = 0.0, q = 0.0, lambda = 0.0;
  double constant_used = 0.0; // (p / (q-p+1))^p
  bool pass = false;
  /// True only for verify_caccioppoli with a certified sub/weak solution v.
  bool hypothesis_checked = false;
  bool applicable = true;
  /// Tolerance scaling is delicate when lambda < 0 makes rhs negative.
  bool rhs_negative = false;
};

/// Evaluate both sides of the energy inequality for positive v and
/// nonnegative cutoff phi. Requires q > p - 1. Makes no claim about the
/// hypothesis on v.
CaccioppoliReport caccioppoli_sides(const VectorFieldFamily& family,
                                    const GridFunction& v,
                                    const GridFunction& phi, double p, double q,
                                    double lambda);

/// As caccioppoli_sides, but first certifies that (v, lambda) is a discrete
/// sub-solution (weak solutions qualify); otherwise the report is flagged
/// inapplicable. `classify_tol` is the certification tolerance.
CaccioppoliReport verify_caccioppoli(const VectorFieldFamily& family,
                                     const GridFunction& v,
                                     const GridFunction& phi, double p, double q,
                                     double lambda, double tol,
                                     double classify_tol = 1e-6);

/// One report per q, sharing the gradient evaluations. Rejects the whole
/// sweep if any q fails q > p - 1.
std::vector<CaccioppoliReport> caccioppoli_sweep(const VectorFieldFamily& family,
                                                 const GridFunction& v,
                                                 const GridFunction& phi,
                                                 double p, double lambda,
                                                 const std::vector<double>& q_grid,
                                                 double tol = 1e-9);

} // namespace subfreq
