#include "subfreq/fields.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "subfreq/expr.hpp"

namespace subfreq {

VectorFieldFamily::VectorFieldFamily(std::string name, std::size_t ambient_dim,
                                     std::vector<std::vector<Term>> fields,
                                     std::optional<DilationLaw> dilation)
    : name_(std::move(name)),
      ambient_dim_(ambient_dim),
      fields_(std::move(fields)),
      dilation_(std::move(dilation)) {
  if (ambient_dim_ < 1) {
    throw std::invalid_argument("VectorFieldFamily: ambient_dim must be >= 1");
  }
  if (fields_.empty() || fields_.size() > ambient_dim_) {
    throw std::invalid_argument(
        "VectorFieldFamily: requires 1 <= num_fields <= ambient_dim");
  }
  for (const auto& terms : fields_) {
    for (const auto& term : terms) {
      if (term.axis >= ambient_dim_) {
        throw std::invalid_argument("VectorFieldFamily: term axis out of range");
      }
      if (!term.coefficient) {
        throw std::invalid_argument("VectorFieldFamily: null coefficient");
      }
    }
  }
  if (dilation_ && dilation_->coordinate_weights.size() != ambient_dim_) {
    throw std::invalid_argument(
        "VectorFieldFamily: dilation weights dimension mismatch");
  }
}

std::vector<double> VectorFieldFamily::coefficients(
    std::size_t k, std::span<const double> x) const {
  if (k >= num_fields()) {
    throw std::invalid_argument("VectorFieldFamily: field index out of range");
  }
  std::vector<double> a(ambient_dim_, 0.0);
  for (const auto& term : fields_[k]) a[term.axis] = term.coefficient(x);
  return a;
}

std::vector<double> VectorFieldFamily::dilate_point(
    double s, std::span<const double> x) const {
  if (!dilation_) {
    throw std::invalid_argument("VectorFieldFamily: no dilation law");
  }
  if (!(s > 0.0)) throw std::invalid_argument("dilate_point: s must be positive");
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t j = 0; j < y.size(); ++j) {
    y[j] *= std::pow(s, dilation_->coordinate_weights[j]);
  }
  return y;
}

namespace {

VectorFieldFamily::Coefficient constant_one() {
  return [](std::span<const double>) { return 1.0; };
}

} // namespace

VectorFieldFamily make_euclidean_family(std::size_t n) {
  if (n < 1) throw std::invalid_argument("make_euclidean_family: n >= 1 required");
  std::vector<std::vector<VectorFieldFamily::Term>> fields(n);
  for (std::size_t k = 0; k < n; ++k) {
    fields[k].push_back({k, constant_one()});
  }
  DilationLaw law{std::vector<double>(n, 1.0), -1.0};
  return VectorFieldFamily("euclidean", n, std::move(fields), law);
}

VectorFieldFamily make_grushin_family() {
  std::vector<std::vector<VectorFieldFamily::Term>> fields(2);
  fields[0].push_back({0, constant_one()});
  fields[1].push_back({1, [](std::span<const double> x) { return x[0]; }});
  DilationLaw law{{1.0, 2.0}, -1.0};
  return VectorFieldFamily("grushin", 2, std::move(fields), law);
}

VectorFieldFamily make_heisenberg_family(std::size_t n) {
  if (n < 1) throw std::invalid_argument("make_heisenberg_family: n >= 1 required");
  const std::size_t dim = 2 * n + 1;
  const std::size_t t_axis = 2 * n;
  std::vector<std::vector<VectorFieldFamily::Term>> fields(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    // X_j = d/dx_j + 2 y_j d/dt
    fields[j].push_back({j, constant_one()});
    fields[j].push_back({t_axis, [j, n](std::span<const double> x) {
                           return 2.0 * x[n + j];
                         }});
    // Y_j = d/dy_j - 2 x_j d/dt
    fields[n + j].push_back({n + j, constant_one()});
    fields[n + j].push_back({t_axis, [j](std::span<const double> x) {
                               return -2.0 * x[j];
                             }});
  }
  std::vector<double> weights(dim, 1.0);
  weights[t_axis] = 2.0;
  DilationLaw law{std::move(weights), -1.0};
  return VectorFieldFamily("heisenberg", dim, std::move(fields), law);
}

VectorFieldFamily make_custom_family(const CustomFamilySpec& spec) {
  if (spec.ambient_dim < 1) {
    throw std::invalid_argument("custom family: ambient_dim must be >= 1");
  }
  if (spec.field_exprs.empty() || spec.field_exprs.size() > spec.ambient_dim) {
    throw std::invalid_argument(
        "custom family: requires 1 <= num_fields <= ambient_dim");
  }
  std::vector<std::vector<VectorFieldFamily::Term>> fields(spec.field_exprs.size());
  for (std::size_t k = 0; k < spec.field_exprs.size(); ++k) {
    const auto& row = spec.field_exprs[k];
    if (row.size() != spec.ambient_dim) {
      throw std::invalid_argument(
          "custom family: each field needs ambient_dim coefficient entries");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j].empty() || row[j] == "0") continue;
      auto expr = std::make_shared<Expression>(
          Expression::parse(row[j], spec.ambient_dim));
      fields[k].push_back({j, [expr](std::span<const double> x) {
                             return expr->eval(x);
                           }});
    }
  }
  VectorFieldFamily family(spec.name, spec.ambient_dim, std::move(fields));

  // Probe for non-finite coefficients at a few deterministic points.
  std::vector<double> probe(spec.ambient_dim);
  for (int trial = 0; trial < 5; ++trial) {
    for (std::size_t j = 0; j < spec.ambient_dim; ++j) {
      probe[j] = -1.0 + 0.43 * static_cast<double>(trial) +
                 0.17 * static_cast<double>(j + 1);
    }
    for (std::size_t k = 0; k < family.num_fields(); ++k) {
      for (double a : family.coefficients(k, probe)) {
        if (!std::isfinite(a)) {
          throw std::invalid_argument(
              "custom family: non-finite coefficient at probe point");
        }
      }
    }
  }
  return family;
}

VectorFieldFamily family_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("custom family JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("ambient_dim") || !j.contains("fields")) {
    throw std::invalid_argument(
        "custom family JSON: need object with ambient_dim and fields");
  }
  CustomFamilySpec spec;
  spec.ambient_dim = j.at("ambient_dim").get<std::size_t>();
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  for (const auto& row : j.at("fields")) {
    std::vector<std::string> exprs;
    for (const auto& cell : row) {
      if (cell.is_number()) {
        exprs.push_back(nlohmann::to_string(cell));
      } else {
        exprs.push_back(cell.get<std::string>());
      }
    }
    spec.field_exprs.push_back(std::move(exprs));
  }
  return make_custom_family(spec);
}

FieldTable::FieldTable(const VectorFieldFamily& family, DomainPtr domain)
    : domain_(std::move(domain)) {
  if (family.ambient_dim() != domain_->dim()) {
    throw std::invalid_argument(
        "FieldTable: family/domain dimension mismatch");
  }
  const std::size_t n = domain_->num_nodes();
  fields_.resize(family.num_fields());
  std::vector<double> x(domain_->dim());
  std::vector<std::size_t> idx(domain_->dim());
  for (std::size_t k = 0; k < family.num_fields(); ++k) {
    for (const auto& term : family.field_terms(k)) {
      SampledTerm sampled;
      sampled.axis = term.axis;
      sampled.inv_h = 1.0 / domain_->spacing(term.axis);
      sampled.values.resize(n);
      for (std::size_t flat = 0; flat < n; ++flat) {
        domain_->unflatten(flat, idx);
        for (std::size_t j = 0; j < x.size(); ++j) {
          x[j] = domain_->coordinate(j, idx[j]);
        }
        sampled.values[flat] = term.coefficient(x);
        if (!std::isfinite(sampled.values[flat])) {
          throw std::invalid_argument("FieldTable: non-finite coefficient");
        }
      }
      fields_[k].push_back(std::move(sampled));
    }
  }
}

void FieldTable::apply(std::size_t k, std::span<const double> u,
                       std::span<double> out) const {
  if (k >= fields_.size()) {
    throw std::invalid_argument("FieldTable::apply: field index out of range");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t total = domain_->num_nodes();
  for (const auto& term : fields_[k]) {
    const std::size_t s = domain_->stride(term.axis);
    const std::size_t m = domain_->shape()[term.axis];
    const std::size_t block = s * m;
    const double inv_h = term.inv_h;
    const double* c = term.values.data();
    for (std::size_t base = 0; base < total; base += block) {
      // Skip a = m-1: the forward link leaves the lattice and both u values
      // are zero there for valid inputs.
      for (std::size_t a = 0; a + 1 < m; ++a) {
        const std::size_t row0 = base + a * s;
        for (std::size_t i = row0; i < row0 + s; ++i) {
          out[i] += c[i] * (u[i + s] - u[i]) * inv_h;
        }
      }
    }
  }
}

void FieldTable::accumulate_adjoint(std::size_t k, std::span<const double> f,
                                    std::span<double> out, bool absolute) const {
  if (k >= fields_.size()) {
    throw std::invalid_argument("FieldTable::apply_adjoint: field index out of range");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t total = domain_->num_nodes();
  for (const auto& term : fields_[k]) {
    const std::size_t s = domain_->stride(term.axis);
    const std::size_t m = domain_->shape()[term.axis];
    const std::size_t block = s * m;
    const double inv_h = term.inv_h;
    const double* c = term.values.data();
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t a = 0; a < m; ++a) {
        const std::size_t row0 = base + a * s;
        for (std::size_t i = row0; i < row0 + s; ++i) {
          if (absolute) {
            const double back =
                a > 0 ? std::abs(c[i - s]) * std::abs(f[i - s]) : 0.0;
            out[i] += (back + std::abs(c[i]) * std::abs(f[i])) * inv_h;
          } else {
            const double back = a > 0 ? c[i - s] * f[i - s] : 0.0;
            out[i] += (back - c[i] * f[i]) * inv_h;
          }
        }
      }
    }
  }
  // The adjoint output lives in the scalar (interior-supported) class.
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!domain_->interior(i)) out[i] = 0.0;
  }
}

void FieldTable::apply_adjoint(std::size_t k, std::span<const double> f,
                               std::span<double> out) const {
  accumulate_adjoint(k, f, out, /*absolute=*/false);
}

void FieldTable::apply_adjoint_abs(std::size_t k, std::span<const double> f,
                                   std::span<double> out) const {
  accumulate_adjoint(k, f, out, /*absolute=*/true);
}

namespace {

void check_match(const VectorFieldFamily& family, const GridFunction& u) {
  if (family.ambient_dim() != u.domain()->dim()) {
    throw std::invalid_argument("family/domain dimension mismatch");
  }
}

} // namespace

GridFunction apply_field(const VectorFieldFamily& family, std::size_t k,
                         const GridFunction& u) {
  check_match(family, u);
  FieldTable table(family, u.domain());
  std::vector<double> out(u.size());
  table.apply(k, u.values(), out);
  return GridFunction(u.domain(), std::move(out), GridFunction::Support::hull);
}

GridFunction apply_adjoint_field(const VectorFieldFamily& family, std::size_t k,
                                 const GridFunction& f) {
  check_match(family, f);
  FieldTable table(family, f.domain());
  std::vector<double> out(f.size());
  table.apply_adjoint(k, f.values(), out);
  return GridFunction(f.domain(), std::move(out));
}

HorizontalVectorField horizontal_gradient(const VectorFieldFamily& family,
                                          const GridFunction& u) {
  check_match(family, u);
  FieldTable table(family, u.domain());
  HorizontalVectorField F;
  F.components.reserve(family.num_fields());
  std::vector<double> out(u.size());
  for (std::size_t k = 0; k < family.num_fields(); ++k) {
    table.apply(k, u.values(), out);
    F.components.emplace_back(u.domain(), out, GridFunction::Support::hull);
  }
  return F;
}

GridFunction horizontal_adjoint_divergence(const VectorFieldFamily& family,
                                           const HorizontalVectorField& F) {
  if (F.components.size() != family.num_fields()) {
    throw std::invalid_argument(
        "horizontal_adjoint_divergence: component count mismatch");
  }
  const DomainPtr& domain = F.domain();
  for (const auto& comp : F.components) {
    if (comp.domain().get() != domain.get() &&
        !comp.domain()->same_lattice(*domain)) {
      throw std::invalid_argument(
          "horizontal_adjoint_divergence: components on different domains");
    }
  }
  check_match(family, F.components.front());
  FieldTable table(family, domain);
  std::vector<double> acc(domain->num_nodes(), 0.0);
  std::vector<double> out(domain->num_nodes());
  for (std::size_t k = 0; k < family.num_fields(); ++k) {
    table.apply_adjoint(k, F.components[k].values(), out);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += out[i];
  }
  return GridFunction(domain, std::move(acc));
}

DomainPtr dilate_domain(const VectorFieldFamily& family, double s,
                        const GridDomain& omega) {
  if (!family.dilation()) {
    throw std::invalid_argument("dilate_domain: family has no dilation law");
  }
  if (!(s > 0.0)) throw std::invalid_argument("dilate_domain: s must be positive");
  if (family.ambient_dim() != omega.dim()) {
    throw std::invalid_argument("dilate_domain: dimension mismatch");
  }
  std::vector<std::array<double, 2>> bounds = omega.bounds();
  const auto& w = family.dilation()->coordinate_weights;
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    const double factor = std::pow(s, w[j]);
    bounds[j][0] *= factor;
    bounds[j][1] *= factor;
  }
  return std::make_shared<GridDomain>(std::move(bounds), omega.shape(),
                                      omega.interior_mask());
}

} // namespace subfreq
