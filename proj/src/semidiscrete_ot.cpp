#include "otnet/semidiscrete_ot.hpp"

#include "otnet/parallel.hpp"

#include <cmath>
#include <deque>
#include <string>
#include <utility>

namespace otnet {

namespace {

constexpr Index kBlock = 2048;

void check_shapes(const DiscreteMeasure& nu, const DualPotential& psi) {
  if (psi.size() != nu.size()) {
    throw ValidationError("dual potential has " + std::to_string(psi.size()) + " entries for " +
                          std::to_string(nu.size()) + " atoms");
  }
}

void check_source(const SourceSpec& source, const DiscreteMeasure& nu) {
  if (source.dim() != nu.dim()) {
    throw ValidationError("source dimension " + std::to_string(source.dim()) + " != target dimension " +
                          std::to_string(nu.dim()));
  }
}

/// Draws rows [begin, end) of the batch identified by `key` into `out`.
void draw_rows(const SourceSpec& source, StreamKey key, Index begin, Index end, PointSet& out) {
  out.resize(end - begin, source.dim());
  for (Index i = begin; i < end; ++i) {
    Stream stream(key.child(static_cast<std::uint64_t>(i)));
    source.draw(stream, out.row(i - begin));
  }
}

/// argmax_j (y_j . x_i + m_j) for every row; smallest index on ties.
Eigen::VectorXi assign_with(const PointSet& x, const MaxAffine<double>& phi) {
  const Matrix slopes = phi.slopes;  // column-major, one contiguous column per axis
  Vector scores(phi.size());
  Eigen::VectorXi idx(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    scores = phi.offsets;
    for (Index k = 0; k < x.cols(); ++k) scores += x(i, k) * slopes.col(k);
    const double best = scores.maxCoeff();
    Index j = 0;
    while (j + 1 < scores.size() && scores(j) != best) ++j;
    idx(i) = static_cast<int>(j);
  }
  return idx;
}

struct Moments {
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
};

}  // namespace

void SolverConfig::validate() const {
  if (mc_batch < 1) throw ValidationError("solver: mc_batch must be >= 1");
  if (max_iters < 1) throw ValidationError("solver: max_iters must be >= 1");
  if (!(step0 > 0.0)) throw ValidationError("solver: step0 must be > 0");
  if (!(grad_tol > 0.0 && grad_tol < 1.0)) throw ValidationError("solver: grad_tol must lie in (0, 1)");
  if (validation_batch < 0) throw ValidationError("solver: validation_batch must be >= 0");
  if (check_every < 1) throw ValidationError("solver: check_every must be >= 1");
}

Index assign(const Eigen::Ref<const Vector>& x, const DiscreteMeasure& nu, const DualPotential& psi) {
  check_shapes(nu, psi);
  if (x.size() != nu.dim()) throw ValidationError("assign: dimension mismatch");
  Index best = 0;
  double best_cost = 0.5 * (x.transpose() - nu.points().row(0)).squaredNorm() - psi(0);
  for (Index j = 1; j < nu.size(); ++j) {
    const double cost = 0.5 * (x.transpose() - nu.points().row(j)).squaredNorm() - psi(j);
    if (cost < best_cost) {
      best_cost = cost;
      best = j;
    }
  }
  return best;
}

double dual_integrand(const Eigen::Ref<const Vector>& x, const DiscreteMeasure& nu, const DualPotential& psi) {
  const Index j = assign(x, nu, psi);
  return 0.5 * (x.transpose() - nu.points().row(j)).squaredNorm() - psi(j);
}

Eigen::VectorXi assign_batch(const PointSet& x, const DiscreteMeasure& nu, const DualPotential& psi) {
  check_shapes(nu, psi);
  if (x.cols() != nu.dim()) throw ValidationError("assign_batch: dimension mismatch");
  return assign_with(x, brenier_coefficients(nu, psi));
}

McEstimate dual_value_mc(const SourceSpec& source, const DiscreteMeasure& nu, const DualPotential& psi, Index batch,
                         StreamKey key) {
  check_shapes(nu, psi);
  check_source(source, nu);
  if (batch < 1) throw ValidationError("dual_value_mc: batch must be >= 1");
  const auto partial = map_blocks<Moments>(batch, kBlock, [&](Index begin, Index end) {
    PointSet x;
    draw_rows(source, key, begin, end, x);
    Moments m;
    for (Index i = 0; i < x.rows(); ++i) {
      const long double v = dual_integrand(x.row(i).transpose(), nu, psi);
      m.sum += v;
      m.sum_sq += v * v;
    }
    return m;
  });
  Moments total;
  for (const auto& m : partial) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
  }
  const long double count = static_cast<long double>(batch);
  const long double mean = total.sum / count;
  const long double var = batch > 1 ? std::max(0.0L, (total.sum_sq - count * mean * mean) / (count - 1)) : 0.0L;
  McEstimate est;
  est.value = static_cast<double>(mean) + psi.values().dot(nu.weights());
  est.std_error = static_cast<double>(std::sqrt(var / count));
  return est;
}

McEstimate dual_value_mc(const SourceSpec& source, const DiscreteMeasure& nu, const DualPotential& psi, Index batch,
                         std::uint64_t seed) {
  return dual_value_mc(source, nu, psi, batch, StreamKey::from_seed(seed));
}

Vector dual_gradient_mc(const SourceSpec& source, const DiscreteMeasure& nu, const DualPotential& psi, Index batch,
                        StreamKey key) {
  check_shapes(nu, psi);
  check_source(source, nu);
  if (batch < 1) throw ValidationError("dual_gradient_mc: batch must be >= 1");
  const MaxAffine<double> phi = brenier_coefficients(nu, psi);
  const auto partial = map_blocks<Eigen::VectorXi>(batch, kBlock, [&](Index begin, Index end) {
    PointSet x;
    draw_rows(source, key, begin, end, x);
    const Eigen::VectorXi cell = assign_with(x, phi);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(nu.size());
    for (Index i = 0; i < cell.size(); ++i) ++counts(cell(i));
    return counts;
  });
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(nu.size());
  for (const auto& c : partial) counts += c;
  return nu.weights() - counts.cast<double>() / static_cast<double>(batch);
}

Vector dual_gradient_mc(const SourceSpec& source, const DiscreteMeasure& nu, const DualPotential& psi, Index batch,
                        std::uint64_t seed) {
  return dual_gradient_mc(source, nu, psi, batch, StreamKey::from_seed(seed));
}

SolveReport solve(const SourceSpec& source, const DiscreteMeasure& nu, const SolverConfig& config) {
  config.validate();
  check_source(source, nu);
  for (Index j = 0; j < nu.size(); ++j) {
    if (!(nu.weights()(j) > 0.0)) {
      throw ValidationError("solve: atom " + std::to_string(j) +
                            " has zero weight; drop empty atoms (DiscreteMeasure::without_empty_atoms) first");
    }
  }

  const Index n = nu.size();
  const Index validation_batch = config.validation_batch > 0 ? config.validation_batch : config.mc_batch;
  const StreamKey root = StreamKey::from_seed(config.seed);
  const StreamKey step_key = root.child("step");
  const StreamKey check_key = root.child("validate");

  SolveReport report;
  if (n == 1) {
    report.psi = DualPotential::zeros(1);
    report.dual_value = dual_value_mc(source, nu, report.psi, validation_batch, check_key).value;
    report.converged = true;
    return report;
  }

  // Iterates are averaged over the most recent half of the run: prefix sums
  // are kept at every check so the window (t/2, t] is a difference of two.
  Vector psi = Vector::Zero(n);
  Vector prefix = Vector::Zero(n);
  std::deque<std::pair<Index, Vector>> checkpoints{{0, prefix}};
  for (Index t = 0; t < config.max_iters; ++t) {
    const Vector g = dual_gradient_mc(source, nu, DualPotential(psi), config.mc_batch,
                                      step_key.child(static_cast<std::uint64_t>(t)));
    psi += (config.step0 / std::sqrt(1.0 + static_cast<double>(t))) * g;
    psi.array() -= psi.mean();
    prefix += psi;

    const Index done = t + 1;
    if (done % config.check_every != 0 && done != config.max_iters) continue;

    while (checkpoints.size() > 1 && checkpoints[1].first <= done / 2) checkpoints.pop_front();
    const auto& [start, start_sum] = checkpoints.front();
    const DualPotential estimate(config.averaging ? Vector((prefix - start_sum) / static_cast<double>(done - start))
                                                  : psi);
    checkpoints.emplace_back(done, prefix);

    const Vector g_check = dual_gradient_mc(source, nu, estimate, validation_batch,
                                            check_key.child(static_cast<std::uint64_t>(t)));
    report.iterations = done;
    report.grad_norm = g_check.lpNorm<Eigen::Infinity>();
    report.psi = DualPotential::centered(estimate.values());
    if (report.grad_norm <= config.grad_tol) {
      report.converged = true;
      break;
    }
  }
  report.dual_value =
      dual_value_mc(source, nu, report.psi, validation_batch, check_key.child("value")).value;
  return report;
}

MaxAffine<double> brenier_coefficients(const DiscreteMeasure& nu, const DualPotential& psi) {
  check_shapes(nu, psi);
  MaxAffine<double> phi;
  phi.slopes = nu.points();
  phi.offsets = psi.values() - 0.5 * nu.points().rowwise().squaredNorm();
  return phi;
}

Vector transport(const Eigen::Ref<const Vector>& x, const DiscreteMeasure& nu, const DualPotential& psi) {
  return nu.points().row(assign(x, nu, psi)).transpose();
}

}  // namespace otnet
