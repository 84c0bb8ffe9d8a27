#include "otnet/rate_harness.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

namespace otnet {

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::W1: return "w1";
    case Metric::Mmd: return "mmd";
    case Metric::Ksd: return "ksd";
  }
  return "unknown";
}

Metric metric_from_string(const std::string& name) {
  if (name == "w1") return Metric::W1;
  if (name == "mmd") return Metric::Mmd;
  if (name == "ksd") return Metric::Ksd;
  throw ValidationError("unknown metric '" + name + "' (expected w1, mmd or ksd)");
}

TargetSpec TargetFamily::at(Index d) const {
  if (components.empty()) throw ValidationError("target family: no components");
  if (components.size() == 1 && components[0].weight == 1.0) {
    return TargetSpec::gaussian(Vector::Constant(d, components[0].center), components[0].variance);
  }
  std::vector<GaussianComponent> comps;
  for (const auto& c : components) comps.push_back({c.weight, Vector::Constant(d, c.center), c.variance});
  return TargetSpec::gaussian_mixture(std::move(comps));
}

Index SweepConfig::resolved_reference_size() const {
  if (reference_size > 0) return reference_size;
  return 16 * (n_grid.empty() ? 0 : *std::max_element(n_grid.begin(), n_grid.end()));
}

void SweepConfig::validate() const {
  if (dims.empty()) throw ValidationError("sweep: dims is empty");
  for (Index d : dims) {
    if (d < 1) throw ValidationError("sweep: dimensions must be >= 1");
  }
  if (n_grid.size() < 2) throw ValidationError("sweep: n_grid needs at least 2 points");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw ValidationError("sweep: n_grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ValidationError("sweep: n_grid must be strictly increasing");
  }
  if (replicates < 3) throw ValidationError("sweep: replicates must be >= 3");
  if (metric != Metric::Ksd) {
    const Index n_max = *std::max_element(n_grid.begin(), n_grid.end());
    if (resolved_reference_size() < 16 * n_max) {
      throw ValidationError("sweep: reference_size " + std::to_string(resolved_reference_size()) +
                            " is below 16 * max(n_grid) = " + std::to_string(16 * n_max));
    }
  }
  for (Index d : dims) target.at(d);
}

namespace {

/// First n entries of a seeded Fisher-Yates shuffle of [0, size).
std::vector<Index> subsample_indices(Index size, Index n, StreamKey key) {
  std::vector<Index> idx(static_cast<std::size_t>(size));
  for (Index i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
  Stream stream(key);
  for (Index i = 0; i < n; ++i) {
    const Index j = i + static_cast<Index>(stream.uniform() * static_cast<double>(size - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(std::min(j, size - 1))]);
  }
  idx.resize(static_cast<std::size_t>(n));
  return idx;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  const StreamKey root = StreamKey::from_seed(config.seed);
  std::vector<SweepRow> rows;

  for (Index d : config.dims) {
    const TargetSpec target = config.target.at(d);
    const auto ud = static_cast<std::uint64_t>(d);

    PointSet reference;
    double reference_self = 0.0;
    if (config.metric != Metric::Ksd) {
      reference = sample(target, config.resolved_reference_size(), root.child({tag("reference"), ud}));
      if (config.metric == Metric::Mmd) reference_self = gram_mean(reference, reference, config.kernel);
    }

    for (Index n : config.n_grid) {
      for (Index rep = 0; rep < config.replicates; ++rep) {
        const StreamKey cell = root.child({tag("cell"), ud, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
        const PointSet p = sample(target, n, cell.child("draw"));
        double value = 0.0;
        switch (config.metric) {
          case Metric::Ksd:
            value = ksd(p, target, config.kernel);
            break;
          case Metric::Mmd: {
            const double sq = gram_mean(p, p, config.kernel) + reference_self -
                              2.0 * gram_mean(p, reference, config.kernel);
            value = std::sqrt(std::max(sq, 0.0));
            break;
          }
          case Metric::W1: {
            const auto idx = subsample_indices(reference.rows(), n, cell.child("subsample"));
            PointSet q(n, d);
            for (Index i = 0; i < n; ++i) q.row(i) = reference.row(idx[static_cast<std::size_t>(i)]);
            value = d == 1 ? w1_1d(p.col(0), q.col(0)) : w1_matching(p, q);
            break;
          }
        }
        rows.push_back({d, n, rep, value});
      }
    }
  }
  return rows;
}

double median_value(const std::vector<SweepRow>& rows, Index d, Index n) {
  std::vector<double> values;
  for (const auto& r : rows) {
    if (r.d == d && r.n == n) values.push_back(r.value);
  }
  if (values.empty()) throw ValidationError("median_value: no rows at d=" + std::to_string(d) + ", n=" + std::to_string(n));
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  return m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

SlopeFit fit_loglog_slope(const std::vector<SweepRow>& rows, Index d) {
  std::map<Index, std::vector<double>> by_n;
  SlopeFit fit;
  for (const auto& r : rows) {
    if (r.d != d) continue;
    if (!(r.value > 0.0)) {
      ++fit.dropped;
      continue;
    }
    by_n[r.n].push_back(r.value);
  }
  if (by_n.empty()) throw ValidationError("fit_loglog_slope: no positive values at d=" + std::to_string(d));
  if (fit.dropped > 0) {
    std::clog << "warning: fit_loglog_slope dropped " << fit.dropped << " non-positive value(s) at d=" << d << '\n';
  }
  if (by_n.size() < 2) throw ValidationError("fit_loglog_slope: need at least 2 distinct n with positive values");

  Vector lx(static_cast<Index>(by_n.size())), ly(static_cast<Index>(by_n.size()));
  Index k = 0;
  for (auto& [n, values] : by_n) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    const double med = m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
    lx(k) = std::log(static_cast<double>(n));
    ly(k) = std::log(med);
    ++k;
  }
  const double mx = lx.mean(), my = ly.mean();
  const Vector cx = lx.array() - mx, cy = ly.array() - my;
  fit.slope = cx.dot(cy) / cx.squaredNorm();
  fit.intercept = my - fit.slope * mx;
  const double ss_tot = cy.squaredNorm();
  const double ss_res = (cy - fit.slope * cx).squaredNorm();
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points = k;
  return fit;
}

EndToEndReport end_to_end(const EndToEndConfig& config) {
  if (config.source.dim() != config.target.dim()) throw ValidationError("end_to_end: source/target dimensions differ");
  if (config.n < 1) throw ValidationError("end_to_end: n must be >= 1");
  if (config.eval_size < 1 || config.metric_size < 1) throw ValidationError("end_to_end: eval_size and metric_size must be >= 1");

  const StreamKey root = StreamKey::from_seed(config.seed);
  const PointSet atoms = sample(config.target, config.n, root.child("atoms"));
  DiscreteMeasure nu = empirical_measure(atoms);

  SolverConfig solver = config.solver;
  solver.seed = root.child("solver").value();
  SolveReport solved = solve(config.source, nu, solver);
  if (!solved.converged) {
    std::ostringstream msg;
    msg << "end_to_end: dual ascent stopped after " << solved.iterations << " iterations with gradient inf-norm "
        << solved.grad_norm << " > grad_tol " << solver.grad_tol;
    throw NonConvergenceError(msg.str());
  }

  BrenierNetwork network(brenier_coefficients(nu, solved.psi));

  const PointSet z = sample(config.source, config.eval_size, root.child("eval"));
  const Index keep = std::min(config.eval_size, config.metric_size);
  PointSet pushed(keep, nu.dim());
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(nu.size());
  for (Index i = 0; i < z.rows(); ++i) {
    const Index j = network.coeffs.argmax(z.row(i).transpose());
    ++counts(j);
    if (i < keep) pushed.row(i) = nu.points().row(j);
  }

  const double p = 1.0 / static_cast<double>(config.n);
  const Vector freq = counts.cast<double>() / static_cast<double>(config.eval_size);
  const double band = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(config.eval_size));
  const double within =
      static_cast<double>(((freq.array() - p).abs() <= band).count()) / static_cast<double>(config.n);

  const PointSet fresh = sample(config.target, config.metric_size, root.child("fresh"));
  const PointSet fresh2 = sample(config.target, config.metric_size, root.child("fresh2"));

  EndToEndReport report{std::move(nu), std::move(solved), std::move(network), freq, p, band, within,
                        mmd(pushed, fresh, config.kernel).value, mmd(atoms, fresh, config.kernel).value,
                        mmd(fresh2, fresh, config.kernel).value};
  return report;
}

}  // namespace otnet
