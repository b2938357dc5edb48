#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subfreq/grid.hpp"

namespace subfreq {

/// Anisotropic scaling law delta_s(x)_j = s^{w_j} x_j attached to a family,
/// with the homogeneity degree of the horizontal gradient under it.
struct DilationLaw {
  std::vector<double> coordinate_weights;
  double gradient_homogeneity = -1.0;
};

/// Family {X_k} of first-order vector fields X_k = sum_j a_kj(x) d/dx_j.
/// Coefficients are stored sparsely: each field keeps only the axes with a
/// non-identically-zero coefficient.
class VectorFieldFamily {
 public:
  using Coefficient = std::function<double(std::span<const double>)>;
  struct Term {
    std::size_t axis;
    Coefficient coefficient;
  };

  VectorFieldFamily(std::string name, std::size_t ambient_dim,
                    std::vector<std::vector<Term>> fields,
                    std::optional<DilationLaw> dilation = std::nullopt);

  const std::string& name() const { return name_; }
  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t num_fields() const { return fields_.size(); }
  const std::vector<Term>& field_terms(std::size_t k) const { return fields_[k]; }
  const std::optional<DilationLaw>& dilation() const { return dilation_; }

  /// Dense coefficient vector a_k(x), length ambient_dim.
  std::vector<double> coefficients(std::size_t k, std::span<const double> x) const;

  /// Image of a point under delta_s. Requires a dilation law.
  std::vector<double> dilate_point(double s, std::span<const double> x) const;

 private:
  std::string name_;
  std::size_t ambient_dim_;
  std::vector<std::vector<Term>> fields_;
  std::optional<DilationLaw> dilation_;
};

VectorFieldFamily make_euclidean_family(std::size_t n);
VectorFieldFamily make_grushin_family();
VectorFieldFamily make_heisenberg_family(std::size_t n);

struct CustomFamilySpec {
  std::size_t ambient_dim = 0;
  /// fields[k][j] = coefficient expression for a_kj over variables x1..xn;
  /// an empty string means identically zero.
  std::vector<std::vector<std::string>> field_exprs;
  std::string name = "custom";
};

VectorFieldFamily make_custom_family(const CustomFamilySpec& spec);

/// Parse {"ambient_dim": n, "fields": [[expr, ...], ...]} (optional "name").
VectorFieldFamily family_from_json(const std::string& json_text);

/// Coefficients of a family sampled at every node of a domain. All discrete
/// field applications go through this one arithmetic path, so library
/// operations and solver internals produce bit-identical values.
///
/// Discretization: X_k u at node i is sum over terms (axis j, coefficient a)
/// of a(x_i) * (u[i + e_j] - u[i]) / h_j, a forward link difference with the
/// coefficient collocated at the row node. Rows live on the link hull; reads
/// beyond the lattice count as zero. The adjoint is the exact transpose of
/// this linear action, masked to the interior.
class FieldTable {
 public:
  FieldTable(const VectorFieldFamily& family, DomainPtr domain);

  const DomainPtr& domain() const { return domain_; }
  std::size_t num_fields() const { return fields_.size(); }

  void apply(std::size_t k, std::span<const double> u, std::span<double> out) const;
  void apply_adjoint(std::size_t k, std::span<const double> f,
                     std::span<double> out) const;
  /// Transpose with absolute coefficient values applied to |f|; used for the
  /// magnitude scale of nodewise residual tests.
  void apply_adjoint_abs(std::size_t k, std::span<const double> f,
                         std::span<double> out) const;

 private:
  struct SampledTerm {
    std::size_t axis;
    double inv_h;
    std::vector<double> values; // coefficient at every node
  };

  void accumulate_adjoint(std::size_t k, std::span<const double> f,
                          std::span<double> out, bool absolute) const;

  DomainPtr domain_;
  std::vector<std::vector<SampledTerm>> fields_;
};

/// Horizontal section (F_1, ..., F_N) sharing one domain. Components carry
/// hull support (see FieldTable).
struct HorizontalVectorField {
  std::vector<GridFunction> components;

  const DomainPtr& domain() const { return components.front().domain(); }
  std::size_t num_components() const { return components.size(); }
};

GridFunction apply_field(const VectorFieldFamily& family, std::size_t k,
                         const GridFunction& u);
GridFunction apply_adjoint_field(const VectorFieldFamily& family, std::size_t k,
                                 const GridFunction& f);
HorizontalVectorField horizontal_gradient(const VectorFieldFamily& family,
                                          const GridFunction& u);
GridFunction horizontal_adjoint_divergence(const VectorFieldFamily& family,
                                           const HorizontalVectorField& F);

/// Image lattice of a domain under delta_s: bounds scale coordinate-wise by
/// s^{w_j}, node counts and the mask are preserved, spacings scale
/// proportionally. Requires the family to carry a dilation law.
DomainPtr dilate_domain(const VectorFieldFamily& family, double s,
                        const GridDomain& omega);

} // namespace subfreq
