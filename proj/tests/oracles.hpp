#pragma once

// Test-only reference computations, independent of the library's kernels:
// the 1D/2D linear eigenvalue oracles assemble the textbook stencils
// directly and go through Eigen, the nonlinear 1D oracle is a shooting
// method for the p-Laplacian eigenvalue problem.

#include <cstddef>

namespace oracles {

/// Smallest eigenvalue of the (-1, 2, -1)/h^2 tridiagonal Dirichlet matrix
/// for a grid with `shape` nodes (shape - 2 interior) on an interval of the
/// given length. Dense symmetric eigensolve.
double interval_lambda1_dense(std::size_t shape, double length);

/// Closed form for the same matrix: (4/h^2) sin^2(pi h / (2 L)).
double interval_lambda1_closed(std::size_t shape, double length);

/// Smallest eigenvalue of the 5-point Dirichlet Laplacian on the unit
/// square with shape x shape nodes: sparse LDLT inverse power iteration.
double square_lambda1_sparse(std::size_t shape);

/// First zero of the p-Laplacian initial value problem at lambda = 1; the
/// principal frequency on (0, 1) is first_zero^p.
double p_laplacian_first_zero(double p);

/// lambda_1 of the 1D p-Laplacian on (0, 1) via shooting.
double p_laplacian_interval_lambda1(double p);

/// Closed form (p - 1) * pi_p^p with pi_p = 2 pi / (p sin(pi / p)).
double p_laplacian_interval_lambda1_closed(double p);

} // namespace oracles
