#pragma once

#include <cstddef>
#include <string>

#include "subfreq/fields.hpp"
#include "subfreq/grid.hpp"

namespace subfreq {

/// How the inner gradient of R(u, v) is formed. `algebraic` expands
/// grad(|u|^p / v^{p-1}) by the product and chain rules from nodal values and
/// already-computed gradients, so L == R holds to rounding. `discrete` forms
/// the quotient nodewise first and differentiates it with the stencil, so
/// L - R carries discretization error that must shrink under refinement.
enum class PiconeMode { algebraic, discrete };

struct PiconeReport {
  double min_L = 0.0;
  std::size_t argmin_node = 0;
  double max_abs_L_minus_R = 0.0;
  std::size_t argmax_node = 0;
  /// Largest nodal magnitude of the three L-terms; tolerances scale by it.
  double scale = 0.0;
  /// Least-squares proportionality fit u ~ c v.
  double fitted_c = 0.0;
  double proportionality_residual = 0.0;
  /// max |L| recorded when the pair was proportional within tol; -1 when the
  /// equality case was not asserted.
  double equality_case_defect = -1.0;
  PiconeMode mode = PiconeMode::algebraic;
  bool pass = false;
};

const char* to_string(PiconeMode mode);

/// L(u,v) = |grad u|^p
///        - p (|u|^{p-2}u / v^{p-1}) |grad v|^{p-2} <grad v, grad u>
///        + (p-1) (|u|^p / v^p) |grad v|^p,
/// evaluated nodewise on the interior (zero outside). Requires v strictly
/// positive on the interior; divisions guard v by 1e-14 * max v.
GridFunction picone_L(const VectorFieldFamily& family, const GridFunction& u,
                      const GridFunction& v, double p);

/// R(u,v) = |grad u|^p - |grad v|^{p-2} <grad v, grad(|u|^p / v^{p-1})>.
GridFunction picone_R(const VectorFieldFamily& family, const GridFunction& u,
                      const GridFunction& v, double p, PiconeMode mode);

/// Evaluate L and R, their nonnegativity and identity defects, and the
/// proportionality (equality-case) diagnostics.
PiconeReport verify_picone(const VectorFieldFamily& family,
                           const GridFunction& u, const GridFunction& v,
                           double p, PiconeMode mode, double tol);

} // namespace subfreq
