#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace subfreq {

/// Compensated (Neumaier) accumulator. All quadrature and inner products go
/// through this so reduction error stays near one ulp of the term magnitude
/// sum regardless of node count.
class StableSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Masked rectangular lattice approximating an open set.
///
/// Nodes sit at low_j + i_j * spacing_j, i_j = 0..shape_j-1 (both bounds are
/// lattice nodes). `interior` marks nodes strictly inside the set; the
/// outermost lattice layer is never interior, so every interior node has all
/// its lattice neighbors. The `link hull` additionally contains nodes one
/// step below an interior node along some axis: forward-difference rows are
/// supported there (boundary links of the Dirichlet problem).
class GridDomain {
 public:
  GridDomain(std::vector<std::array<double, 2>> bounds,
             std::vector<std::size_t> shape,
             std::vector<std::uint8_t> interior_mask);

  std::size_t dim() const { return shape_.size(); }
  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_interior() const { return num_interior_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<std::array<double, 2>>& bounds() const { return bounds_; }

  double lower(std::size_t axis) const { return bounds_[axis][0]; }
  double upper(std::size_t axis) const { return bounds_[axis][1]; }
  double spacing(std::size_t axis) const { return spacing_[axis]; }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }

  /// Product of spacings: the rectangle-rule weight of one node.
  double cell_volume() const { return cell_volume_; }
  /// Euclidean diameter of the bounding box.
  double diameter() const;

  bool interior(std::size_t flat) const { return interior_[flat] != 0; }
  bool in_hull(std::size_t flat) const { return hull_[flat] != 0; }
  const std::vector<std::uint8_t>& interior_mask() const { return interior_; }

  double coordinate(std::size_t axis, std::size_t index) const {
    return bounds_[axis][0] + static_cast<double>(index) * spacing_[axis];
  }
  /// Decode a flat index into per-axis lattice indices.
  void unflatten(std::size_t flat, std::span<std::size_t> idx) const;
  /// Node coordinates for a flat index.
  std::vector<double> node_coords(std::size_t flat) const;

  /// True when the two domains are the same lattice (bounds and shape equal
  /// exactly); masks may differ.
  bool same_lattice(const GridDomain& other) const;

 private:
  std::vector<std::array<double, 2>> bounds_;
  std::vector<std::size_t> shape_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::vector<std::uint8_t> interior_;
  std::vector<std::uint8_t> hull_;
  std::size_t num_nodes_ = 0;
  std::size_t num_interior_ = 0;
  double cell_volume_ = 1.0;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Scalar field on a GridDomain.
///
/// Two support classes exist. `Support::interior` is the default: values
/// vanish outside the interior mask (discrete zero-extension, the stand-in
/// for a compactly supported Sobolev function). `Support::hull` is used for
/// horizontal-gradient components, whose forward-difference rows also live on
/// boundary links. Construction validates finiteness and the support class.
class GridFunction {
 public:
  enum class Support { interior, hull };

  GridFunction(DomainPtr domain, std::vector<double> values,
               Support support = Support::interior);

  static GridFunction zeros(DomainPtr domain,
                            Support support = Support::interior);
  /// Sample f at interior nodes; zero elsewhere.
  static GridFunction from_function(
      DomainPtr domain, const std::function<double(std::span<const double>)>& f);

  const DomainPtr& domain() const { return domain_; }
  Support support() const { return support_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  std::size_t size() const { return values_.size(); }

  double min_interior() const;
  double max_interior() const;
  double max_abs() const;

 private:
  DomainPtr domain_;
  std::vector<double> values_;
  Support support_;
};

DomainPtr make_box_domain(std::vector<std::array<double, 2>> bounds,
                          std::vector<std::size_t> shape);

DomainPtr make_mask_domain(
    std::vector<std::array<double, 2>> bounds, std::vector<std::size_t> shape,
    const std::function<bool(std::span<const double>)>& predicate);

/// Nodewise mask inclusion on a shared lattice. Throws on lattice mismatch.
bool is_subdomain(const GridDomain& omega, const GridDomain& omega_tilde);

/// Rectangle rule: sum over every lattice node times the cell volume.
/// Interior-supported functions only see interior nodes by their invariant;
/// hull-supported gradient fields also integrate their boundary-link rows.
double integrate(const GridFunction& f);

/// Lattice inner product <f,g>_h = sum f*g*cell_volume.
double inner_product(const GridFunction& f, const GridFunction& g);
double inner_product(const GridDomain& domain, std::span<const double> f,
                     std::span<const double> g);

/// (integrate |f|^p)^(1/p); requires p > 1.
double lp_norm(const GridFunction& f, double p);

/// Deterministic low-frequency random synthesis, affinely mapped so interior
/// values lie in [0.1, 1.1]; zero outside. Built from normalized box
/// coordinates, so dilated domains reproduce identical nodal values.
GridFunction random_positive_function(DomainPtr domain, std::uint64_t seed);

/// Tensor-product polynomial cutoff ((1 - xi^2)_+)^m in coordinates
/// normalized to the central `shrink` fraction of the bounding box, then
/// masked to the interior. Vanishes identically outside that central region,
/// so it is a discrete stand-in for a smooth compactly supported test
/// function.
GridFunction make_bump_function(DomainPtr domain, int m, double shrink = 0.7);

} // namespace subfreq
