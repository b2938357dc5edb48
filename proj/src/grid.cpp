#include "subfreq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subfreq {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

} // namespace

GridDomain::GridDomain(std::vector<std::array<double, 2>> bounds,
                       std::vector<std::size_t> shape,
                       std::vector<std::uint8_t> interior_mask)
    : bounds_(std::move(bounds)),
      shape_(std::move(shape)),
      interior_(std::move(interior_mask)) {
  if (bounds_.empty() || bounds_.size() != shape_.size()) {
    throw std::invalid_argument("GridDomain: bounds/shape dimension mismatch");
  }
  const std::size_t d = shape_.size();
  spacing_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (shape_[j] < 3) {
      throw std::invalid_argument("GridDomain: shape must be >= 3 per axis");
    }
    const double lo = bounds_[j][0];
    const double hi = bounds_[j][1];
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw std::invalid_argument("GridDomain: degenerate bounds (low >= high)");
    }
    spacing_[j] = (hi - lo) / static_cast<double>(shape_[j] - 1);
    cell_volume_ *= spacing_[j];
  }
  num_nodes_ = product(shape_);
  if (interior_.size() != num_nodes_) {
    throw std::invalid_argument("GridDomain: mask size mismatch");
  }

  // Row-major strides, last axis contiguous.
  strides_.assign(d, 1);
  for (std::size_t j = d; j-- > 1;) {
    strides_[j - 1] = strides_[j] * shape_[j];
  }

  // Validate the mask: the outermost layer is never interior, so every
  // interior node has all lattice neighbors.
  std::vector<std::size_t> idx(d);
  for (std::size_t flat = 0; flat < num_nodes_; ++flat) {
    if (!interior_[flat]) continue;
    unflatten(flat, idx);
    for (std::size_t j = 0; j < d; ++j) {
      if (idx[j] == 0 || idx[j] + 1 == shape_[j]) {
        throw std::invalid_argument(
            "GridDomain: interior mask touches the lattice edge");
      }
    }
    ++num_interior_;
  }
  if (num_interior_ == 0) {
    throw std::invalid_argument("GridDomain: empty interior");
  }

  // Link hull: interior nodes plus nodes one step below an interior node.
  hull_.assign(num_nodes_, 0);
  for (std::size_t flat = 0; flat < num_nodes_; ++flat) {
    if (!interior_[flat]) continue;
    hull_[flat] = 1;
    for (std::size_t j = 0; j < d; ++j) {
      hull_[flat - strides_[j]] = 1; // idx[j] >= 1 by the edge check above
    }
  }
}

double GridDomain::diameter() const {
  double s = 0.0;
  for (const auto& b : bounds_) {
    const double w = b[1] - b[0];
    s += w * w;
  }
  return std::sqrt(s);
}

void GridDomain::unflatten(std::size_t flat, std::span<std::size_t> idx) const {
  for (std::size_t j = 0; j < shape_.size(); ++j) {
    idx[j] = flat / strides_[j];
    flat -= idx[j] * strides_[j];
  }
}

std::vector<double> GridDomain::node_coords(std::size_t flat) const {
  std::vector<std::size_t> idx(dim());
  unflatten(flat, idx);
  std::vector<double> x(dim());
  for (std::size_t j = 0; j < dim(); ++j) x[j] = coordinate(j, idx[j]);
  return x;
}

bool GridDomain::same_lattice(const GridDomain& other) const {
  return bounds_ == other.bounds_ && shape_ == other.shape_;
}

GridFunction::GridFunction(DomainPtr domain, std::vector<double> values,
                           Support support)
    : domain_(std::move(domain)), values_(std::move(values)), support_(support) {
  if (!domain_) throw std::invalid_argument("GridFunction: null domain");
  if (values_.size() != domain_->num_nodes()) {
    throw std::invalid_argument("GridFunction: value count mismatch");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("GridFunction: non-finite value");
    }
    const bool allowed = support_ == Support::interior ? domain_->interior(i)
                                                       : domain_->in_hull(i);
    if (!allowed && values_[i] != 0.0) {
      throw std::invalid_argument(
          "GridFunction: nonzero value outside the support mask");
    }
  }
}

GridFunction GridFunction::zeros(DomainPtr domain, Support support) {
  std::vector<double> v(domain->num_nodes(), 0.0);
  return GridFunction(std::move(domain), std::move(v), support);
}

GridFunction GridFunction::from_function(
    DomainPtr domain, const std::function<double(std::span<const double>)>& f) {
  std::vector<double> v(domain->num_nodes(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!domain->interior(i)) continue;
    v[i] = f(domain->node_coords(i));
  }
  return GridFunction(std::move(domain), std::move(v));
}

double GridFunction::min_interior() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (domain_->interior(i)) m = std::min(m, values_[i]);
  }
  return m;
}

double GridFunction::max_interior() const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (domain_->interior(i)) m = std::max(m, values_[i]);
  }
  return m;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

DomainPtr make_box_domain(std::vector<std::array<double, 2>> bounds,
                          std::vector<std::size_t> shape) {
  const std::size_t n = product(shape);
  if (n == 0 || bounds.size() != shape.size()) {
    throw std::invalid_argument("make_box_domain: bad bounds/shape");
  }
  for (std::size_t s : shape) {
    if (s < 3) throw std::invalid_argument("make_box_domain: shape must be >= 3");
  }
  // All nodes except the outermost layer.
  std::vector<std::uint8_t> mask(n, 1);
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t j = shape.size(); j-- > 1;) strides[j - 1] = strides[j] * shape[j];
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rem = flat;
    for (std::size_t j = 0; j < shape.size(); ++j) {
      idx[j] = rem / strides[j];
      rem -= idx[j] * strides[j];
      if (idx[j] == 0 || idx[j] + 1 == shape[j]) {
        mask[flat] = 0;
        break;
      }
    }
  }
  return std::make_shared<GridDomain>(std::move(bounds), std::move(shape),
                                      std::move(mask));
}

DomainPtr make_mask_domain(
    std::vector<std::array<double, 2>> bounds, std::vector<std::size_t> shape,
    const std::function<bool(std::span<const double>)>& predicate) {
  auto box = make_box_domain(bounds, shape); // validates bounds/shape
  const std::size_t n = box->num_nodes();
  std::vector<std::uint8_t> mask(n, 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    const auto x = box->node_coords(flat);
    if (!predicate(x)) continue;
    if (!box->interior(flat)) {
      throw std::invalid_argument(
          "make_mask_domain: predicate true on the lattice edge");
    }
    mask[flat] = 1;
  }
  // GridDomain constructor rejects an empty interior.
  return std::make_shared<GridDomain>(bounds, shape, std::move(mask));
}

bool is_subdomain(const GridDomain& omega, const GridDomain& omega_tilde) {
  if (!omega.same_lattice(omega_tilde)) {
    throw std::invalid_argument("is_subdomain: lattice mismatch");
  }
  for (std::size_t i = 0; i < omega.num_nodes(); ++i) {
    if (omega.interior(i) && !omega_tilde.interior(i)) return false;
  }
  return true;
}

double integrate(const GridFunction& f) {
  StableSum s;
  for (double v : f.values()) s.add(v);
  return s.value() * f.domain()->cell_volume();
}

double inner_product(const GridDomain& domain, std::span<const double> f,
                     std::span<const double> g) {
  StableSum s;
  for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * g[i]);
  return s.value() * domain.cell_volume();
}

double inner_product(const GridFunction& f, const GridFunction& g) {
  if (!f.domain()->same_lattice(*g.domain())) {
    throw std::invalid_argument("inner_product: lattice mismatch");
  }
  return inner_product(*f.domain(), f.values(), g.values());
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("lp_norm: requires p > 1");
  StableSum s;
  for (double v : f.values()) s.add(std::pow(std::abs(v), p));
  return std::pow(s.value() * f.domain()->cell_volume(), 1.0 / p);
}

GridFunction random_positive_function(DomainPtr domain, std::uint64_t seed) {
  // splitmix64; portable and stable across standard libraries.
  std::uint64_t state = seed + 0x9E3779B97F4A7C15ULL;
  auto next_u64 = [&state]() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  auto unit = [&next_u64]() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  };

  const std::size_t d = domain->dim();
  constexpr int kModes = 8;
  struct Mode {
    double amplitude;
    std::vector<double> freq;
    std::vector<double> phase;
  };
  std::vector<Mode> modes(kModes);
  for (int m = 0; m < kModes; ++m) {
    modes[m].amplitude = (2.0 * unit() - 1.0) / (1.0 + m);
    modes[m].freq.resize(d);
    modes[m].phase.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      modes[m].freq[j] = static_cast<double>(next_u64() % 4);
      modes[m].phase[j] = 2.0 * M_PI * unit();
    }
  }

  const std::size_t n = domain->num_nodes();
  std::vector<double> raw(n, 0.0);
  std::vector<std::size_t> idx(d);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t flat = 0; flat < n; ++flat) {
    if (!domain->interior(flat)) continue;
    domain->unflatten(flat, idx);
    double value = 0.0;
    for (const Mode& mode : modes) {
      double prod = mode.amplitude;
      for (std::size_t j = 0; j < d; ++j) {
        const double xhat = static_cast<double>(idx[j]) /
                            static_cast<double>(domain->shape()[j] - 1);
        prod *= std::cos(M_PI * mode.freq[j] * xhat + mode.phase[j]);
      }
      value += prod;
    }
    raw[flat] = value;
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }

  std::vector<double> out(n, 0.0);
  const double width = hi - lo;
  for (std::size_t flat = 0; flat < n; ++flat) {
    if (!domain->interior(flat)) continue;
    out[flat] = width > 1e-30 ? 0.1 + (raw[flat] - lo) / width : 0.6;
  }
  return GridFunction(std::move(domain), std::move(out));
}

GridFunction make_bump_function(DomainPtr domain, int m, double shrink) {
  if (m < 1) throw std::invalid_argument("make_bump_function: m >= 1 required");
  if (!(shrink > 0.0 && shrink <= 1.0)) {
    throw std::invalid_argument("make_bump_function: shrink in (0, 1]");
  }
  const std::size_t d = domain->dim();
  const std::size_t n = domain->num_nodes();
  std::vector<double> out(n, 0.0);
  std::vector<std::size_t> idx(d);
  for (std::size_t flat = 0; flat < n; ++flat) {
    if (!domain->interior(flat)) continue;
    domain->unflatten(flat, idx);
    double value = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = 0.5 * (domain->lower(j) + domain->upper(j));
      const double half = 0.5 * (domain->upper(j) - domain->lower(j)) * shrink;
      const double xi = (domain->coordinate(j, idx[j]) - c) / half;
      const double w = std::max(0.0, 1.0 - xi * xi);
      value *= std::pow(w, m);
    }
    out[flat] = value;
  }
  return GridFunction(std::move(domain), std::move(out));
}

} // namespace subfreq
