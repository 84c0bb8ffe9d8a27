#include "otnet/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace otnet {

namespace {

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

Vector vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected an array of numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

json array_of(const Eigen::Ref<const Vector>& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void require_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  require_object(obj, where);
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

SourceSpec source_from_json(const json& j) {
  require_object(j, "source");
  const auto kind = get<std::string>(j, "kind", "source");
  if (kind == "standard-gaussian") {
    require_keys(j, {"kind", "dim"}, "source");
    return SourceSpec::standard_gaussian(get<Index>(j, "dim", "source"));
  }
  if (kind == "uniform-box") {
    require_keys(j, {"kind", "lower", "upper"}, "source");
    return SourceSpec::uniform_box(vector_from(j.at("lower"), "source.lower"), vector_from(j.at("upper"), "source.upper"));
  }
  throw ConfigError("source: unknown kind '" + kind + "' (expected standard-gaussian or uniform-box)");
}

json to_json(const SourceSpec& spec) {
  if (spec.kind() == SourceSpec::Kind::StandardGaussian) return {{"kind", "standard-gaussian"}, {"dim", spec.dim()}};
  return {{"kind", "uniform-box"}, {"lower", array_of(spec.lower())}, {"upper", array_of(spec.upper())}};
}

TargetSpec target_from_json(const json& j) {
  require_object(j, "target");
  const auto kind = get<std::string>(j, "kind", "target");
  if (kind == "gaussian") {
    require_keys(j, {"kind", "mean", "variance"}, "target");
    return TargetSpec::gaussian(vector_from(j.at("mean"), "target.mean"), get_or<double>(j, "variance", 1.0, "target"));
  }
  if (kind == "gaussian-mixture") {
    require_keys(j, {"kind", "components"}, "target");
    std::vector<GaussianComponent> comps;
    for (const auto& c : get<json>(j, "components", "target")) {
      require_keys(c, {"weight", "mean", "variance"}, "target.components[]");
      comps.push_back({get<double>(c, "weight", "target.components[]"), vector_from(c.at("mean"), "target.components[].mean"),
                       get_or<double>(c, "variance", 1.0, "target.components[]")});
    }
    return TargetSpec::gaussian_mixture(std::move(comps));
  }
  throw ConfigError("target: unknown kind '" + kind + "' (expected gaussian or gaussian-mixture)");
}

json to_json(const TargetSpec& spec) {
  if (spec.kind() == TargetSpec::Kind::Gaussian) {
    const auto& c = spec.components().front();
    return {{"kind", "gaussian"}, {"mean", array_of(c.mean)}, {"variance", c.variance}};
  }
  json comps = json::array();
  for (const auto& c : spec.components()) {
    comps.push_back({{"weight", c.weight}, {"mean", array_of(c.mean)}, {"variance", c.variance}});
  }
  return {{"kind", "gaussian-mixture"}, {"components", comps}};
}

TargetFamily target_family_from_json(const json& j) {
  require_object(j, "target");
  const auto kind = get<std::string>(j, "kind", "target");
  TargetFamily family;
  if (kind == "gaussian") {
    require_keys(j, {"kind", "center", "variance"}, "target");
    family.components = {{1.0, get_or<double>(j, "center", 0.0, "target"), get_or<double>(j, "variance", 1.0, "target")}};
  } else if (kind == "gaussian-mixture") {
    require_keys(j, {"kind", "components"}, "target");
    family.components.clear();
    for (const auto& c : get<json>(j, "components", "target")) {
      require_keys(c, {"weight", "center", "variance"}, "target.components[]");
      family.components.push_back({get<double>(c, "weight", "target.components[]"),
                                   get_or<double>(c, "center", 0.0, "target.components[]"),
                                   get_or<double>(c, "variance", 1.0, "target.components[]")});
    }
  } else {
    throw ConfigError("target: unknown kind '" + kind + "' (expected gaussian or gaussian-mixture)");
  }
  return family;
}

json to_json(const TargetFamily& family) {
  if (family.components.size() == 1 && family.components[0].weight == 1.0) {
    return {{"kind", "gaussian"}, {"center", family.components[0].center}, {"variance", family.components[0].variance}};
  }
  json comps = json::array();
  for (const auto& c : family.components) {
    comps.push_back({{"weight", c.weight}, {"center", c.center}, {"variance", c.variance}});
  }
  return {{"kind", "gaussian-mixture"}, {"components", comps}};
}

Kernel kernel_from_json(const json& j) {
  require_object(j, "kernel");
  const auto kind = get<std::string>(j, "kind", "kernel");
  if (kind == "gaussian") {
    require_keys(j, {"kind", "bandwidth"}, "kernel");
    return Kernel::gaussian(get_or<double>(j, "bandwidth", 1.0, "kernel"));
  }
  if (kind == "imq") {
    require_keys(j, {"kind", "c", "beta"}, "kernel");
    return Kernel::imq(get_or<double>(j, "c", 1.0, "kernel"), get_or<double>(j, "beta", -0.5, "kernel"));
  }
  throw ConfigError("kernel: unknown kind '" + kind + "' (expected gaussian or imq)");
}

json to_json(const Kernel& kernel) {
  if (kernel.kind() == Kernel::Kind::Gaussian) return {{"kind", "gaussian"}, {"bandwidth", kernel.bandwidth()}};
  return {{"kind", "imq"}, {"c", kernel.c()}, {"beta", kernel.beta()}};
}

SolverConfig solver_from_json(const json& j, SolverConfig base) {
  require_keys(j, {"mc_batch", "max_iters", "step0", "averaging", "grad_tol", "seed", "validation_batch", "check_every"},
               "solver");
  base.mc_batch = get_or<Index>(j, "mc_batch", base.mc_batch, "solver");
  base.max_iters = get_or<Index>(j, "max_iters", base.max_iters, "solver");
  base.step0 = get_or<double>(j, "step0", base.step0, "solver");
  base.averaging = get_or<bool>(j, "averaging", base.averaging, "solver");
  base.grad_tol = get_or<double>(j, "grad_tol", base.grad_tol, "solver");
  base.seed = get_or<std::uint64_t>(j, "seed", base.seed, "solver");
  base.validation_batch = get_or<Index>(j, "validation_batch", base.validation_batch, "solver");
  base.check_every = get_or<Index>(j, "check_every", base.check_every, "solver");
  return base;
}

json to_json(const SolverConfig& c) {
  return {{"mc_batch", c.mc_batch},   {"max_iters", c.max_iters},
          {"step0", c.step0},         {"averaging", c.averaging},
          {"grad_tol", c.grad_tol},   {"seed", c.seed},
          {"validation_batch", c.validation_batch}, {"check_every", c.check_every}};
}

json to_json(const SolveReport& report, const DiscreteMeasure& nu) {
  json atoms = json::array();
  for (Index j = 0; j < nu.size(); ++j) atoms.push_back(array_of(nu.points().row(j).transpose()));
  return {{"psi", array_of(report.psi.values())},
          {"dual_value", round12(report.dual_value)},
          {"grad_norm", round12(report.grad_norm)},
          {"iterations", report.iterations},
          {"converged", report.converged},
          {"atoms", atoms},
          {"weights", array_of(nu.weights())}};
}

LoadedSolve solve_report_from_json(const json& j) {
  require_object(j, "solve report");
  const auto& atoms = get<json>(j, "atoms", "solve report");
  if (!atoms.is_array() || atoms.empty()) throw ConfigError("solve report: atoms must be a nonempty array");
  const Index n = static_cast<Index>(atoms.size());
  const Index d = static_cast<Index>(atoms[0].size());
  PointSet pts(n, d);
  for (Index i = 0; i < n; ++i) {
    const Vector row = vector_from(atoms[static_cast<std::size_t>(i)], "solve report.atoms[]");
    if (row.size() != d) throw ConfigError("solve report: ragged atoms");
    pts.row(i) = row.transpose();
  }
  SolveReport report;
  report.psi = DualPotential(vector_from(get<json>(j, "psi", "solve report"), "solve report.psi"));
  report.dual_value = get_or<double>(j, "dual_value", 0.0, "solve report");
  report.grad_norm = get_or<double>(j, "grad_norm", 0.0, "solve report");
  report.iterations = get_or<Index>(j, "iterations", 0, "solve report");
  report.converged = get_or<bool>(j, "converged", false, "solve report");
  Vector w = j.contains("weights") ? vector_from(j.at("weights"), "solve report.weights")
                                   : Vector::Constant(n, 1.0 / static_cast<double>(n));
  DiscreteMeasure nu(std::move(pts), std::move(w));
  if (report.psi.size() != nu.size()) throw ValidationError("solve report: psi length does not match atoms");
  return {std::move(report), std::move(nu)};
}

json to_json(const BrenierNetwork& net) {
  json layers = json::array();
  for (const auto& layer : net.net.layers()) {
    json w = json::array();
    for (Index r = 0; r < layer.weights.rows(); ++r) w.push_back(array_of(layer.weights.row(r).transpose()));
    layers.push_back({{"W", w}, {"b", array_of(layer.bias)}});
  }
  json coeffs = json::array();
  for (Index j = 0; j < net.coeffs.size(); ++j) {
    coeffs.push_back({{"y", array_of(net.coeffs.slopes.row(j).transpose())}, {"m", net.coeffs.offsets(j)}});
  }
  json widths = json::array();
  for (Index w : net.net.hidden_widths()) widths.push_back(w);
  return {{"d", net.net.input_dim()}, {"n", net.coeffs.size()}, {"depth", net.net.depth()},
          {"widths", widths},         {"layers", layers},        {"coeffs", coeffs}};
}

BrenierNetwork network_from_json(const json& j) {
  require_keys(j, {"d", "n", "depth", "widths", "layers", "coeffs", "meta"}, "network");
  const Index d = get<Index>(j, "d", "network");
  std::vector<DenseLayer<double>> layers;
  for (const auto& lj : get<json>(j, "layers", "network")) {
    require_keys(lj, {"W", "b"}, "network.layers[]");
    const auto& wj = lj.at("W");
    if (!wj.is_array() || wj.empty()) throw ConfigError("network.layers[].W: expected nonempty nested array");
    const Index rows = static_cast<Index>(wj.size());
    const Index cols = static_cast<Index>(wj[0].size());
    DenseLayer<double> layer{Matrix(rows, cols), vector_from(lj.at("b"), "network.layers[].b")};
    for (Index r = 0; r < rows; ++r) {
      const Vector row = vector_from(wj[static_cast<std::size_t>(r)], "network.layers[].W[]");
      if (row.size() != cols) throw ConfigError("network.layers[].W: ragged rows");
      layer.weights.row(r) = row.transpose();
    }
    layers.push_back(std::move(layer));
  }
  const auto& cj = get<json>(j, "coeffs", "network");
  if (!cj.is_array() || cj.empty()) throw ConfigError("network.coeffs: expected nonempty array");
  MaxAffine<double> coeffs;
  coeffs.slopes.resize(static_cast<Index>(cj.size()), d);
  coeffs.offsets.resize(static_cast<Index>(cj.size()));
  for (std::size_t i = 0; i < cj.size(); ++i) {
    require_keys(cj[i], {"y", "m"}, "network.coeffs[]");
    const Vector y = vector_from(cj[i].at("y"), "network.coeffs[].y");
    if (y.size() != d) throw ValidationError("network.coeffs[]: slope dimension differs from d");
    coeffs.slopes.row(static_cast<Index>(i)) = y.transpose();
    coeffs.offsets(static_cast<Index>(i)) = get<double>(cj[i], "m", "network.coeffs[]");
  }
  ReluNetwork<double> net(d, std::move(layers));
  if (net.depth() != get<Index>(j, "depth", "network")) throw ValidationError("network: depth field disagrees with layers");
  return BrenierNetwork(std::move(coeffs), std::move(net));
}

void write_points_csv(const std::filesystem::path& path, const PointSet& points, bool precise) {
  std::ostringstream out;
  for (Index k = 0; k < points.cols(); ++k) out << (k ? "," : "") << 'x' << k;
  out << '\n';
  char buf[40];
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index k = 0; k < points.cols(); ++k) {
      std::snprintf(buf, sizeof buf, precise ? "%.17g" : "%.12g", points(i, k));
      out << (k ? "," : "") << buf;
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

PointSet read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty CSV");
  const Index d = static_cast<Index>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<double> values;
  Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Index cols = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ConfigError(path.string() + ": bad number '" + cell + "'");
      values.push_back(v);
      ++cols;
    }
    if (cols != d) throw ConfigError(path.string() + ": row " + std::to_string(rows + 1) + " has " + std::to_string(cols) + " columns");
    ++rows;
  }
  if (rows == 0) throw ConfigError(path.string() + ": no data rows");
  return Eigen::Map<const PointSet>(values.data(), rows, d);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string config_hash(const json& resolved) {
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << tag(resolved.dump());
  return hex.str();
}

}  // namespace otnet
