#pragma once

#include "otnet/random.hpp"
#include "otnet/types.hpp"

#include <cmath>
#include <vector>

namespace otnet {

/// Finitely supported probability measure sum_j w_j delta_{y_j}.
class DiscreteMeasure {
 public:
  /// Validates: equal lengths, weights >= 0, sum(weights) = 1 within 1e-12.
  DiscreteMeasure(PointSet points, Vector weights);

  const PointSet& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }

  /// Same measure with zero-weight atoms removed.
  DiscreteMeasure without_empty_atoms() const;

 private:
  PointSet points_;
  Vector weights_;
};

/// Absolutely continuous source distribution.
class SourceSpec {
 public:
  enum class Kind { StandardGaussian, UniformBox };

  static SourceSpec standard_gaussian(Index dim);
  static SourceSpec uniform_box(Vector lower, Vector upper);

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  template <typename Derived>
  void draw(Stream& stream, Eigen::MatrixBase<Derived>&& out) const {
    for (Index k = 0; k < dim_; ++k) {
      out(k) = kind_ == Kind::StandardGaussian ? stream.normal()
                                               : lower_(k) + (upper_(k) - lower_(k)) * stream.uniform();
    }
  }

 private:
  SourceSpec(Kind kind, Index dim, Vector lower, Vector upper);

  Kind kind_;
  Index dim_;
  Vector lower_;
  Vector upper_;
};

struct GaussianComponent {
  double weight = 1.0;
  Vector mean;
  double variance = 1.0;  // isotropic
};

/// Target distribution: isotropic Gaussian or a finite mixture of them.
class TargetSpec {
 public:
  enum class Kind { Gaussian, GaussianMixture };

  static TargetSpec gaussian(Vector mean, double variance);
  static TargetSpec standard_normal(Index dim) { return gaussian(Vector::Zero(dim), 1.0); }
  static TargetSpec gaussian_mixture(std::vector<GaussianComponent> components);

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }
  const std::vector<GaussianComponent>& components() const { return components_; }

  /// Largest component mean norm (the sub-Gaussian centre bound).
  double mean_bound() const;

  double log_density(const Eigen::Ref<const Vector>& x) const;

  /// grad log pi(x), with log-sum-exp responsibilities for mixtures.
  Vector score(const Eigen::Ref<const Vector>& x) const;

  template <typename Derived>
  void draw(Stream& stream, Eigen::MatrixBase<Derived>&& out) const {
    const GaussianComponent* comp = &components_.back();
    if (components_.size() > 1) {
      double u = stream.uniform();
      for (const auto& c : components_) {
        if (u < c.weight) {
          comp = &c;
          break;
        }
        u -= c.weight;
      }
    }
    const double sd = std::sqrt(comp->variance);
    for (Index k = 0; k < dim_; ++k) out(k) = comp->mean(k) + sd * stream.normal();
  }

 private:
  TargetSpec(Kind kind, std::vector<GaussianComponent> components);

  Kind kind_;
  Index dim_;
  std::vector<GaussianComponent> components_;
};

/// n i.i.d. rows; row i is drawn from stream key.child(i), so the matrix is a
/// pure function of (spec, n, key).
template <typename Spec>
PointSet sample(const Spec& spec, Index n, StreamKey key) {
  if (n < 1) throw ValidationError("sample: n must be >= 1");
  PointSet out(n, spec.dim());
  for (Index i = 0; i < n; ++i) {
    Stream stream(key.child(static_cast<std::uint64_t>(i)));
    spec.draw(stream, out.row(i));
  }
  return out;
}

template <typename Spec>
PointSet sample(const Spec& spec, Index n, std::uint64_t seed) {
  return sample(spec, n, StreamKey::from_seed(seed));
}

/// Uniform weights 1/n on the rows of `samples`.
DiscreteMeasure empirical_measure(const PointSet& samples);

}  // namespace otnet
