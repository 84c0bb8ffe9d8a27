#include "otnet/measures.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace otnet {

DiscreteMeasure::DiscreteMeasure(PointSet points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() != weights_.size()) {
    throw ValidationError("DiscreteMeasure: " + std::to_string(points_.rows()) + " points but " +
                          std::to_string(weights_.size()) + " weights");
  }
  if (points_.rows() == 0) throw ValidationError("DiscreteMeasure: no atoms");
  if (!points_.allFinite()) throw ValidationError("DiscreteMeasure: non-finite point");
  if ((weights_.array() < 0.0).any() || !weights_.allFinite()) {
    throw ValidationError("DiscreteMeasure: weights must be finite and >= 0");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-12) {
    throw ValidationError("DiscreteMeasure: weights sum to " + std::to_string(weights_.sum()));
  }
}

DiscreteMeasure DiscreteMeasure::without_empty_atoms() const {
  std::vector<Index> keep;
  for (Index j = 0; j < size(); ++j) {
    if (weights_(j) > 0.0) keep.push_back(j);
  }
  PointSet pts(static_cast<Index>(keep.size()), dim());
  Vector w(static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    pts.row(static_cast<Index>(i)) = points_.row(keep[i]);
    w(static_cast<Index>(i)) = weights_(keep[i]);
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

SourceSpec::SourceSpec(Kind kind, Index dim, Vector lower, Vector upper)
    : kind_(kind), dim_(dim), lower_(std::move(lower)), upper_(std::move(upper)) {}

SourceSpec SourceSpec::standard_gaussian(Index dim) {
  if (dim < 1) throw ValidationError("standard-gaussian: dimension must be >= 1");
  return SourceSpec(Kind::StandardGaussian, dim, Vector(), Vector());
}

SourceSpec SourceSpec::uniform_box(Vector lower, Vector upper) {
  if (lower.size() < 1 || lower.size() != upper.size()) {
    throw ValidationError("uniform-box: lower/upper must be nonempty and equal length");
  }
  if (!(lower.array() < upper.array()).all() || !lower.allFinite() || !upper.allFinite()) {
    throw ValidationError("uniform-box: requires finite lower < upper componentwise");
  }
  const Index d = lower.size();
  return SourceSpec(Kind::UniformBox, d, std::move(lower), std::move(upper));
}

TargetSpec::TargetSpec(Kind kind, std::vector<GaussianComponent> components)
    : kind_(kind), dim_(components.front().mean.size()), components_(std::move(components)) {}

TargetSpec TargetSpec::gaussian(Vector mean, double variance) {
  if (mean.size() < 1) throw ValidationError("gaussian target: empty mean");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw ValidationError("gaussian target: variance must be > 0");
  if (!mean.allFinite()) throw ValidationError("gaussian target: non-finite mean");
  return TargetSpec(Kind::Gaussian, {GaussianComponent{1.0, std::move(mean), variance}});
}

TargetSpec TargetSpec::gaussian_mixture(std::vector<GaussianComponent> components) {
  if (components.empty()) throw ValidationError("gaussian-mixture: no components");
  const Index d = components.front().mean.size();
  if (d < 1) throw ValidationError("gaussian-mixture: empty mean");
  double total = 0.0;
  for (const auto& c : components) {
    if (c.mean.size() != d) throw ValidationError("gaussian-mixture: component dimensions differ");
    if (!(c.weight > 0.0)) throw ValidationError("gaussian-mixture: weights must be positive");
    if (!(c.variance > 0.0) || !std::isfinite(c.variance)) {
      throw ValidationError("gaussian-mixture: variance must be > 0");
    }
    if (!c.mean.allFinite()) throw ValidationError("gaussian-mixture: non-finite mean");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("gaussian-mixture: weights sum to " + std::to_string(total));
  return TargetSpec(Kind::GaussianMixture, std::move(components));
}

double TargetSpec::mean_bound() const {
  double m = 0.0;
  for (const auto& c : components_) m = std::max(m, c.mean.norm());
  return m;
}

namespace {

double component_log_density(const GaussianComponent& c, const Eigen::Ref<const Vector>& x) {
  const double d = static_cast<double>(x.size());
  return std::log(c.weight) - 0.5 * d * std::log(2.0 * std::numbers::pi * c.variance) -
         (x - c.mean).squaredNorm() / (2.0 * c.variance);
}

}  // namespace

double TargetSpec::log_density(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim_) throw ValidationError("log_density: dimension mismatch");
  double top = -std::numeric_limits<double>::infinity();
  Vector logs(static_cast<Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) {
    logs(static_cast<Index>(k)) = component_log_density(components_[k], x);
    top = std::max(top, logs(static_cast<Index>(k)));
  }
  return top + std::log((logs.array() - top).exp().sum());
}

Vector TargetSpec::score(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim_) throw ValidationError("score: dimension mismatch");
  if (components_.size() == 1) return -(x - components_[0].mean) / components_[0].variance;

  Vector logs(static_cast<Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) {
    logs(static_cast<Index>(k)) = component_log_density(components_[k], x);
  }
  const Vector resp = (logs.array() - logs.maxCoeff()).exp().matrix();
  const double total = resp.sum();
  Vector s = Vector::Zero(dim_);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    s -= (resp(static_cast<Index>(k)) / total) * (x - components_[k].mean) / components_[k].variance;
  }
  return s;
}

DiscreteMeasure empirical_measure(const PointSet& samples) {
  if (samples.rows() < 1) throw ValidationError("empirical_measure: no samples");
  const Index n = samples.rows();
  return DiscreteMeasure(samples, Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

}  // namespace otnet
