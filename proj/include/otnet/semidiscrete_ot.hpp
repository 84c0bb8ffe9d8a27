#pragma once

#include "otnet/max_affine.hpp"
#include "otnet/measures.hpp"

#include <cstdint>

namespace otnet {

/// Dual variables psi_j, one per target atom. Solver outputs are mean-zero,
/// but any vector is a valid point of the dual space.
class DualPotential {
 public:
  DualPotential() = default;
  explicit DualPotential(Vector values) : values_(std::move(values)) {}

  static DualPotential zeros(Index n) { return DualPotential(Vector::Zero(n)); }
  static DualPotential centered(Vector values) {
    values.array() -= values.mean();
    return DualPotential(std::move(values));
  }

  const Vector& values() const { return values_; }
  Index size() const { return values_.size(); }
  double operator()(Index j) const { return values_(j); }

 private:
  Vector values_;
};

struct SolverConfig {
  Index mc_batch = 10000;
  Index max_iters = 10000;
  double step0 = 1.0;            // step at iteration t is step0 / sqrt(1 + t)
  bool averaging = true;         // Polyak averaging over the latest half of the iterates
  double grad_tol = 2e-3;        // on the validation-batch gradient, inf-norm
  std::uint64_t seed = 0;
  Index validation_batch = 0;    // 0: use mc_batch
  Index check_every = 100;       // iterations between convergence checks

  void validate() const;
};

struct SolveReport {
  DualPotential psi;
  double grad_norm = 0.0;   // inf-norm of the last validation gradient
  double dual_value = 0.0;  // validation estimate of F(psi)
  Index iterations = 0;
  bool converged = false;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// argmin_j 1/2 |x - y_j|^2 - psi_j; smallest index on ties.
Index assign(const Eigen::Ref<const Vector>& x, const DiscreteMeasure& nu, const DualPotential& psi);

/// min_j (1/2 |x - y_j|^2 - psi_j), the integrand of the dual functional.
double dual_integrand(const Eigen::Ref<const Vector>& x, const DiscreteMeasure& nu, const DualPotential& psi);

/// Cell index for every row of `x` (power-diagram assignment).
Eigen::VectorXi assign_batch(const PointSet& x, const DiscreteMeasure& nu, const DualPotential& psi);

/// F(psi) = E_rho[min_j(1/2|x-y_j|^2 - psi_j)] + sum_j psi_j nu_j by Monte Carlo.
/// The same (batch, key) always reuses the same source draws.
McEstimate dual_value_mc(const SourceSpec& source, const DiscreteMeasure& nu, const DualPotential& psi, Index batch,
                         StreamKey key);
McEstimate dual_value_mc(const SourceSpec& source, const DiscreteMeasure& nu, const DualPotential& psi, Index batch,
                         std::uint64_t seed);

/// dF/dpsi_i = nu_i - mu(P_i(psi)), cell masses estimated from `batch` draws.
Vector dual_gradient_mc(const SourceSpec& source, const DiscreteMeasure& nu, const DualPotential& psi, Index batch,
                        StreamKey key);
Vector dual_gradient_mc(const SourceSpec& source, const DiscreteMeasure& nu, const DualPotential& psi, Index batch,
                        std::uint64_t seed);

/// Stochastic gradient ascent on F with mean-zero recentering.
SolveReport solve(const SourceSpec& source, const DiscreteMeasure& nu, const SolverConfig& config);

/// Brenier potential max_j(x . y_j + m_j), m_j = psi_j - 1/2 |y_j|^2.
MaxAffine<double> brenier_coefficients(const DiscreteMeasure& nu, const DualPotential& psi);

/// T(x) = y_{assign(x)}.
Vector transport(const Eigen::Ref<const Vector>& x, const DiscreteMeasure& nu, const DualPotential& psi);

}  // namespace otnet
