#pragma once

#include "otnet/discrepancies.hpp"
#include "otnet/relu_network.hpp"
#include "otnet/semidiscrete_ot.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace otnet {

enum class Metric { W1, Mmd, Ksd };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

/// A target defined in every dimension: isotropic Gaussian components with
/// means centre * (1, ..., 1).
struct TargetFamily {
  struct Component {
    double weight = 1.0;
    double center = 0.0;
    double variance = 1.0;
  };
  std::vector<Component> components{Component{}};

  static TargetFamily standard_normal() { return TargetFamily{}; }
  TargetSpec at(Index d) const;
};

struct SweepConfig {
  Metric metric = Metric::Mmd;
  TargetFamily target;
  std::vector<Index> dims{2};
  std::vector<Index> n_grid{64, 128, 256, 512, 1024, 2048, 4096};
  Index replicates = 5;
  Index reference_size = 0;  // 0: 16 * max(n_grid)
  Kernel kernel = Kernel::gaussian(1.0);
  std::uint64_t seed = 0;

  Index resolved_reference_size() const;
  void validate() const;
};

struct SweepRow {
  Index d = 0;
  Index n = 0;
  Index replicate = 0;
  double value = 0.0;
};

/// Every (d, n, replicate) cell draws P_n from its own stream
/// (seed, d, n, replicate). KSD is measured against the target score; MMD
/// and W1 against one reference sample per dimension. W1 subsamples the
/// reference down to n points and matches exactly.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  Index points = 0;   // distinct n used
  Index dropped = 0;  // non-positive values ignored
};

/// Least squares of log(median over replicates) on log n for dimension d.
SlopeFit fit_loglog_slope(const std::vector<SweepRow>& rows, Index d);

/// Median over replicates of the rows at (d, n).
double median_value(const std::vector<SweepRow>& rows, Index d, Index n);

struct EndToEndConfig {
  TargetSpec target = TargetSpec::standard_normal(2);
  SourceSpec source = SourceSpec::standard_gaussian(2);
  Index n = 256;
  SolverConfig solver;
  Kernel kernel = Kernel::gaussian(1.0);
  Index eval_size = 100000;
  Index metric_size = 2048;  // samples per side for the MMD comparison
  std::uint64_t seed = 0;
};

struct EndToEndReport {
  DiscreteMeasure atoms;
  SolveReport solve;
  BrenierNetwork network;
  Vector frequencies;          // push-forward mass per atom
  double expected = 0.0;       // 1/n
  double band = 0.0;           // 4 sqrt(p(1-p)/eval_size)
  double fraction_within = 0.0;
  double mmd_pushed = 0.0;     // MMD(pushed, fresh target)
  double mmd_empirical = 0.0;  // MMD(P_n, fresh target)
  double mmd_noise_floor = 0.0;  // MMD between two fresh target samples
};

/// Empirical measure -> semi-discrete OT -> ReLU network -> push-forward.
/// Throws NonConvergenceError if the solver does not reach grad_tol.
EndToEndReport end_to_end(const EndToEndConfig& config);

}  // namespace otnet
