#include "otnet/cli.hpp"

#include "otnet/parallel.hpp"
#include "otnet/serialization.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace otnet::cli {

namespace {

const std::vector<std::string> kCommands = {"solve-ot", "compile-net", "eval-net", "metrics", "rate-sweep", "end-to-end"};

enum class FlagType { Int, Double, Bool, String, IntList, StringList };

struct FlagSpec {
  std::string name;
  FlagType type;
  std::string help;
  std::map<std::string, std::string> paths;  // command -> JSON pointer
};

std::map<std::string, std::string> on_all(const std::string& path) {
  std::map<std::string, std::string> m;
  for (const auto& c : kCommands) m[c] = path;
  return m;
}

const std::vector<FlagSpec>& flag_table() {
  static const std::vector<FlagSpec> table = {
      {"seed", FlagType::Int, "master seed", on_all("/seed")},
      {"workers", FlagType::Int, "worker threads (0 = hardware concurrency)", on_all("/workers")},
      {"output", FlagType::String, "primary output path", on_all("/output")},
      {"n", FlagType::Int, "number of target atoms", {{"solve-ot", "/n"}, {"end-to-end", "/n"}}},
      {"atoms", FlagType::String, "CSV of target atoms (uniform weights)", {{"solve-ot", "/atoms_csv"}}},
      {"mc-batch", FlagType::Int, "Monte Carlo batch per gradient step",
       {{"solve-ot", "/solver/mc_batch"}, {"end-to-end", "/solver/mc_batch"}}},
      {"max-iters", FlagType::Int, "maximum ascent iterations",
       {{"solve-ot", "/solver/max_iters"}, {"end-to-end", "/solver/max_iters"}}},
      {"step0", FlagType::Double, "initial step; step t is step0/sqrt(1+t)",
       {{"solve-ot", "/solver/step0"}, {"end-to-end", "/solver/step0"}}},
      {"grad-tol", FlagType::Double, "convergence tolerance on the validation gradient inf-norm",
       {{"solve-ot", "/solver/grad_tol"}, {"end-to-end", "/solver/grad_tol"}}},
      {"averaging", FlagType::Bool, "Polyak averaging (true/false)",
       {{"solve-ot", "/solver/averaging"}, {"end-to-end", "/solver/averaging"}}},
      {"validation-batch", FlagType::Int, "batch for convergence checks (0 = mc-batch)",
       {{"solve-ot", "/solver/validation_batch"}, {"end-to-end", "/solver/validation_batch"}}},
      {"check-every", FlagType::Int, "iterations between convergence checks",
       {{"solve-ot", "/solver/check_every"}, {"end-to-end", "/solver/check_every"}}},
      {"solve-report", FlagType::String, "solve-ot output to compile", {{"compile-net", "/solve_report"}}},
      {"network", FlagType::String, "network JSON to evaluate", {{"eval-net", "/network"}}},
      {"inputs", FlagType::String, "CSV of input points", {{"eval-net", "/inputs"}}},
      {"samples", FlagType::String, "CSV of samples P", {{"metrics", "/samples"}}},
      {"reference", FlagType::String, "CSV of samples Q (default: drawn from target)", {{"metrics", "/reference"}}},
      {"metrics", FlagType::StringList, "metrics to compute: w1, mmd, ksd", {{"metrics", "/metrics"}}},
      {"estimator", FlagType::String, "MMD estimator: biased or unbiased", {{"metrics", "/estimator"}}},
      {"reference-size", FlagType::Int, "target-side reference sample size",
       {{"metrics", "/reference_size"}, {"rate-sweep", "/sweep/reference_size"}}},
      {"kernel", FlagType::String, "kernel kind: gaussian or imq",
       {{"metrics", "/kernel/kind"}, {"rate-sweep", "/kernel/kind"}, {"end-to-end", "/kernel/kind"}}},
      {"bandwidth", FlagType::Double, "gaussian kernel bandwidth",
       {{"metrics", "/kernel/bandwidth"}, {"rate-sweep", "/kernel/bandwidth"}, {"end-to-end", "/kernel/bandwidth"}}},
      {"imq-c", FlagType::Double, "imq kernel offset c > 0",
       {{"metrics", "/kernel/c"}, {"rate-sweep", "/kernel/c"}, {"end-to-end", "/kernel/c"}}},
      {"imq-beta", FlagType::Double, "imq kernel exponent in (-1, 0)",
       {{"metrics", "/kernel/beta"}, {"rate-sweep", "/kernel/beta"}, {"end-to-end", "/kernel/beta"}}},
      {"metric", FlagType::String, "sweep metric: w1, mmd or ksd", {{"rate-sweep", "/sweep/metric"}}},
      {"dims", FlagType::IntList, "sweep dimensions", {{"rate-sweep", "/sweep/dims"}}},
      {"n-grid", FlagType::IntList, "sweep sample counts", {{"rate-sweep", "/sweep/n_grid"}}},
      {"replicates", FlagType::Int, "replicates per (d, n)", {{"rate-sweep", "/sweep/replicates"}}},
      {"slope-output", FlagType::String, "slope report JSON path", {{"rate-sweep", "/slope_output"}}},
      {"eval-size", FlagType::Int, "source draws pushed through the network", {{"end-to-end", "/eval_size"}}},
      {"metric-size", FlagType::Int, "samples per side for the MMD comparison", {{"end-to-end", "/metric_size"}}},
      {"network-output", FlagType::String, "network JSON path", {{"end-to-end", "/network_output"}}},
  };
  return table;
}

json default_source() { return {{"kind", "standard-gaussian"}, {"dim", 2}}; }

json default_mixture_target() {
  return {{"kind", "gaussian-mixture"},
          {"components",
           {{{"weight", 0.5}, {"mean", {-2.0, 0.0}}, {"variance", 1.0}},
            {{"weight", 0.5}, {"mean", {2.0, 0.0}}, {"variance", 1.0}}}}};
}

json default_kernel() { return {{"kind", "gaussian"}, {"bandwidth", 1.0}}; }

json default_config(const std::string& command) {
  json c = {{"command", command}, {"seed", 0}, {"workers", 0}};
  if (command == "solve-ot") {
    c["source"] = default_source();
    c["target"] = {{"kind", "gaussian"}, {"mean", {0.0, 0.0}}, {"variance", 1.0}};
    c["n"] = 64;
    c["solver"] = to_json(SolverConfig{});
    c["output"] = "solve_report.json";
  } else if (command == "compile-net") {
    c["solve_report"] = "solve_report.json";
    c["output"] = "network.json";
  } else if (command == "eval-net") {
    c["network"] = "network.json";
    c["inputs"] = "inputs.csv";
    c["output"] = "eval.csv";
  } else if (command == "metrics") {
    c["samples"] = "samples.csv";
    c["target"] = {{"kind", "gaussian"}, {"mean", {0.0, 0.0}}, {"variance", 1.0}};
    c["metrics"] = {"mmd", "ksd"};
    c["kernel"] = default_kernel();
    c["estimator"] = "biased";
    c["reference_size"] = 0;
    c["output"] = "metrics.json";
  } else if (command == "rate-sweep") {
    SweepConfig s;
    c["sweep"] = {{"metric", "mmd"},
                  {"target", to_json(s.target)},
                  {"dims", s.dims},
                  {"n_grid", s.n_grid},
                  {"replicates", s.replicates},
                  {"reference_size", 0}};
    c["kernel"] = default_kernel();
    c["output"] = "sweep.csv";
    c["slope_output"] = "sweep_slopes.json";
  } else if (command == "end-to-end") {
    EndToEndConfig e;
    SolverConfig solver;
    solver.step0 = 30.0;
    solver.max_iters = 16384;
    solver.validation_batch = 100000;
    solver.grad_tol = 1.5e-3;
    c["source"] = default_source();
    c["target"] = default_mixture_target();
    c["n"] = e.n;
    c["eval_size"] = e.eval_size;
    c["metric_size"] = e.metric_size;
    c["solver"] = to_json(solver);
    c["kernel"] = default_kernel();
    c["output"] = "end_to_end.json";
    c["network_output"] = "end_to_end_network.json";
  }
  return c;
}

/// Overlays `patch` onto `base`, rejecting keys that `base` does not know.
/// Source, target, kernel and sweep.target objects are replaced wholesale
/// since their allowed keys depend on "kind".
void overlay(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where + "." + key;
    if (!base.contains(key)) throw ConfigError(path + ": unknown key");
    static const std::vector<std::string> replaced = {"source", "target", "kernel"};
    const bool wholesale = std::find(replaced.begin(), replaced.end(), key) != replaced.end();
    if (base[key].is_object() && !wholesale) {
      overlay(base[key], value, path);
    } else {
      base[key] = value;
    }
  }
}

json parse_flag(const FlagSpec& spec, const std::string& text) {
  auto split = [&](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) parts.push_back(item);
    }
    return parts;
  };
  try {
    switch (spec.type) {
      case FlagType::Int: {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
      }
      case FlagType::Double: {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
      }
      case FlagType::Bool:
        if (text == "true" || text == "1" || text == "on") return true;
        if (text == "false" || text == "0" || text == "off") return false;
        throw std::invalid_argument(text);
      case FlagType::String:
        return text;
      case FlagType::IntList: {
        json a = json::array();
        for (const auto& p : split(text)) a.push_back(std::stoll(p));
        return a;
      }
      case FlagType::StringList: {
        json a = json::array();
        for (const auto& p : split(text)) a.push_back(p);
        return a;
      }
    }
  } catch (const std::exception&) {
    throw ConfigError("--" + spec.name + ": cannot parse '" + text + "'");
  }
  return nullptr;
}

std::string help_footer() {
  return "Config files are JSON documents whose keys mirror the defaults of each command; flags override file values.\n"
         "Exit codes: 0 ok, 2 config error, 3 validation error, 4 solver non-convergence, 5 I/O error.";
}

struct Context {
  std::string command;
  json config;  // resolved
  std::string hash;
  std::uint64_t seed = 0;
  std::ostream& out;
};

json meta(const Context& ctx) { return {{"seed", ctx.seed}, {"config_hash", ctx.hash}, {"config", ctx.config}}; }

std::filesystem::path path_at(const Context& ctx, const std::string& key) {
  if (!ctx.config.at(key).is_string()) throw ConfigError(key + ": expected a path string");
  return ctx.config.at(key).get<std::string>();
}

SolverConfig solver_of(const Context& ctx) { return solver_from_json(ctx.config.at("solver")); }

Index index_at(const Context& ctx, const std::string& key) {
  try {
    return ctx.config.at(key).get<Index>();
  } catch (const json::exception&) {
    throw ConfigError(key + ": expected an integer");
  }
}

int cmd_solve_ot(const Context& ctx) {
  const SourceSpec source = source_from_json(ctx.config.at("source"));
  PointSet atoms;
  if (ctx.config.contains("atoms_csv") && ctx.config.at("atoms_csv").is_string()) {
    atoms = read_points_csv(path_at(ctx, "atoms_csv"));
  } else {
    const TargetSpec target = target_from_json(ctx.config.at("target"));
    atoms = sample(target, index_at(ctx, "n"), StreamKey::from_seed(ctx.seed).child("atoms"));
  }
  const DiscreteMeasure nu = empirical_measure(atoms);
  SolverConfig solver = solver_of(ctx);
  const SolveReport report = solve(source, nu, solver);
  json j = to_json(report, nu);
  j["meta"] = meta(ctx);
  write_text_file(path_at(ctx, "output"), j.dump(1) + "\n");
  ctx.out << "solve-ot: " << report.iterations << " iterations, grad_norm " << format12(report.grad_norm)
          << (report.converged ? "" : " (not converged)") << '\n';
  if (!report.converged) {
    throw NonConvergenceError("solve-ot: gradient inf-norm " + format12(report.grad_norm) + " > grad_tol " +
                              format12(solver.grad_tol) + " after " + std::to_string(report.iterations) + " iterations");
  }
  return kOk;
}

int cmd_compile_net(const Context& ctx) {
  const auto loaded = solve_report_from_json(read_json_file(path_at(ctx, "solve_report")));
  const BrenierNetwork net(brenier_coefficients(loaded.nu, loaded.report.psi));
  json j = to_json(net);
  j["meta"] = meta(ctx);
  write_text_file(path_at(ctx, "output"), j.dump() + "\n");
  ctx.out << "compile-net: n=" << net.coeffs.size() << " depth=" << net.net.depth() << '\n';
  return kOk;
}

int cmd_eval_net(const Context& ctx) {
  const BrenierNetwork net = network_from_json(read_json_file(path_at(ctx, "network")));
  const PointSet x = read_points_csv(path_at(ctx, "inputs"));
  if (x.cols() != net.net.input_dim()) throw ValidationError("eval-net: inputs have the wrong dimension");
  std::ostringstream csv;
  csv << "value";
  for (Index k = 0; k < x.cols(); ++k) csv << ",grad" << k;
  csv << '\n';
  char buf[40];
  for (Index i = 0; i < x.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", net.net.forward(x.row(i).transpose()));
    csv << buf;
    const Vector g = gradient(net.coeffs, x.row(i).transpose());
    for (Index k = 0; k < g.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", g(k));
      csv << ',' << buf;
    }
    csv << '\n';
  }
  write_text_file(path_at(ctx, "output"), csv.str());
  ctx.out << "eval-net: " << x.rows() << " inputs\n";
  return kOk;
}

int cmd_metrics(const Context& ctx) {
  const PointSet p = read_points_csv(path_at(ctx, "samples"));
  const Kernel kernel = kernel_from_json(ctx.config.at("kernel"));
  const std::string est_name = ctx.config.at("estimator").get<std::string>();
  if (est_name != "biased" && est_name != "unbiased") throw ConfigError("estimator: expected biased or unbiased");
  const MmdEstimator estimator = est_name == "biased" ? MmdEstimator::Biased : MmdEstimator::Unbiased;
  const StreamKey root = StreamKey::from_seed(ctx.seed);

  std::optional<TargetSpec> target;
  if (ctx.config.at("target").is_object()) target = target_from_json(ctx.config.at("target"));
  PointSet q;
  if (ctx.config.contains("reference") && ctx.config.at("reference").is_string()) {
    q = read_points_csv(path_at(ctx, "reference"));
  } else {
    if (!target) throw ConfigError("metrics: need either reference or target");
    Index size = index_at(ctx, "reference_size");
    if (size <= 0) size = 16 * p.rows();
    q = sample(*target, size, root.child("reference"));
  }
  if (q.cols() != p.cols()) throw ValidationError("metrics: samples and reference differ in dimension");

  json records = json::array();
  for (const auto& name_json : ctx.config.at("metrics")) {
    const Metric metric = metric_from_string(name_json.get<std::string>());
    json rec = {{"metric", to_string(metric)}, {"n", p.rows()}, {"d", p.cols()}, {"seed", ctx.seed},
                {"config_hash", ctx.hash}};
    switch (metric) {
      case Metric::W1: {
        // Equal counts: subsample the larger side with the experiment seed.
        const Index n = std::min(p.rows(), q.rows());
        auto take = [&](const PointSet& s, const char* label) {
          if (s.rows() == n) return s;
          PointSet out(n, s.cols());
          std::vector<Index> idx(static_cast<std::size_t>(s.rows()));
          std::iota(idx.begin(), idx.end(), Index{0});
          Stream stream(root.child(label));
          for (Index i = 0; i < n; ++i) {
            const Index j = i + static_cast<Index>(stream.uniform() * static_cast<double>(s.rows() - i));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(std::min(j, s.rows() - 1))]);
            out.row(i) = s.row(idx[static_cast<std::size_t>(i)]);
          }
          return out;
        };
        const PointSet a = take(p, "subsample-p"), b = take(q, "subsample-q");
        rec["value"] = round12(p.cols() == 1 ? w1_1d(a.col(0), b.col(0)) : w1_matching(a, b));
        rec["estimator"] = "exact";
        rec["matched_n"] = n;
        break;
      }
      case Metric::Mmd: {
        const MmdResult r = mmd(p, q, kernel, estimator);
        rec["value"] = round12(r.value);
        rec["estimator"] = est_name;
        rec["squared"] = r.squared;
        rec["kernel"] = to_json(kernel);
        break;
      }
      case Metric::Ksd:
        if (!target) throw ConfigError("metrics: ksd needs a target");
        rec["value"] = round12(ksd(p, *target, kernel));
        rec["estimator"] = "biased";
        rec["kernel"] = to_json(kernel);
        break;
    }
    records.push_back(rec);
  }
  write_text_file(path_at(ctx, "output"), records.dump(1) + "\n");
  ctx.out << "metrics: " << records.size() << " record(s)\n";
  return kOk;
}

SweepConfig sweep_of(const Context& ctx) {
  const json& s = ctx.config.at("sweep");
  require_keys(s, {"metric", "target", "dims", "n_grid", "replicates", "reference_size"}, "sweep");
  SweepConfig sweep;
  try {
    sweep.metric = metric_from_string(s.at("metric").get<std::string>());
    sweep.target = target_family_from_json(s.at("target"));
    sweep.dims = s.at("dims").get<std::vector<Index>>();
    sweep.n_grid = s.at("n_grid").get<std::vector<Index>>();
    sweep.replicates = s.at("replicates").get<Index>();
    sweep.reference_size = s.at("reference_size").get<Index>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  sweep.kernel = kernel_from_json(ctx.config.at("kernel"));
  sweep.seed = ctx.seed;
  return sweep;
}

int cmd_rate_sweep(const Context& ctx) {
  const SweepConfig sweep = sweep_of(ctx);
  const auto rows = run_sweep(sweep);
  std::ostringstream csv;
  csv << "metric,d,n,replicate,value,seed\n";
  for (const auto& r : rows) {
    csv << to_string(sweep.metric) << ',' << r.d << ',' << r.n << ',' << r.replicate << ',' << format12(r.value) << ','
        << ctx.seed << '\n';
  }
  write_text_file(path_at(ctx, "output"), csv.str());

  json fits = json::array();
  json medians = json::array();
  for (Index d : sweep.dims) {
    const SlopeFit fit = fit_loglog_slope(rows, d);
    fits.push_back({{"d", d}, {"slope", round12(fit.slope)}, {"intercept", round12(fit.intercept)},
                    {"r2", round12(fit.r2)}, {"points", fit.points}, {"dropped", fit.dropped}});
    for (Index n : sweep.n_grid) medians.push_back({{"d", d}, {"n", n}, {"median", round12(median_value(rows, d, n))}});
  }
  json report = {{"metric", to_string(sweep.metric)}, {"fits", fits}, {"medians", medians}, {"meta", meta(ctx)}};
  if (sweep.metric == Metric::W1) {
    report["caveat"] = "W1 to the target is estimated against an independent target sample of equal size (two-sample proxy)";
  } else if (sweep.metric == Metric::Mmd) {
    report["caveat"] = "MMD to the target is estimated against one reference sample per dimension";
  }
  write_text_file(path_at(ctx, "slope_output"), report.dump(1) + "\n");
  for (const auto& f : fits) {
    ctx.out << "rate-sweep " << to_string(sweep.metric) << " d=" << f["d"] << " slope=" << f["slope"] << " r2=" << f["r2"]
            << '\n';
  }
  return kOk;
}

int cmd_end_to_end(const Context& ctx) {
  EndToEndConfig e;
  e.source = source_from_json(ctx.config.at("source"));
  e.target = target_from_json(ctx.config.at("target"));
  e.n = index_at(ctx, "n");
  e.eval_size = index_at(ctx, "eval_size");
  e.metric_size = index_at(ctx, "metric_size");
  e.solver = solver_of(ctx);
  e.kernel = kernel_from_json(ctx.config.at("kernel"));
  e.seed = ctx.seed;
  const EndToEndReport r = end_to_end(e);

  json net = to_json(r.network);
  net["meta"] = meta(ctx);
  const auto net_path = path_at(ctx, "network_output");
  write_text_file(net_path, net.dump() + "\n");

  json freq = json::array();
  for (Index j = 0; j < r.frequencies.size(); ++j) freq.push_back(round12(r.frequencies(j)));
  json report = {{"n", e.n},
                 {"d", e.source.dim()},
                 {"solve",
                  {{"iterations", r.solve.iterations},
                   {"grad_norm", round12(r.solve.grad_norm)},
                   {"dual_value", round12(r.solve.dual_value)},
                   {"converged", r.solve.converged}}},
                 {"depth", r.network.net.depth()},
                 {"frequencies", freq},
                 {"expected", round12(r.expected)},
                 {"band", round12(r.band)},
                 {"fraction_within", round12(r.fraction_within)},
                 {"mmd_pushed", round12(r.mmd_pushed)},
                 {"mmd_empirical", round12(r.mmd_empirical)},
                 {"mmd_noise_floor", round12(r.mmd_noise_floor)},
                 {"kernel", to_json(e.kernel)},
                 {"network", net_path.string()},
                 {"meta", meta(ctx)}};
  write_text_file(path_at(ctx, "output"), report.dump(1) + "\n");
  ctx.out << "end-to-end: fraction of atoms within band " << format12(r.fraction_within) << '\n';
  return kOk;
}

void emit_error(std::ostream& err, const char* kind, int code, const std::string& message) {
  err << json{{"error", kind}, {"exit_code", code}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal-transport ReLU network pipeline", "otnet"};
  app.footer(help_footer());
  app.require_subcommand(1, 1);

  std::map<std::string, std::string> config_paths;
  std::map<std::string, std::map<std::string, std::string>> raw;  // command -> flag -> text
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> descriptions = {
      {"solve-ot", "solve the semi-discrete OT dual from a source to an empirical target"},
      {"compile-net", "compile a saved solve report into a ReLU network"},
      {"eval-net", "evaluate a saved network and its gradient on CSV inputs"},
      {"metrics", "compute W1 / MMD / KSD between samples and a reference or target"},
      {"rate-sweep", "sweep sample sizes and fit log-log convergence slopes"},
      {"end-to-end", "sample, solve, compile and push forward in one run"},
  };
  for (const auto& command : kCommands) {
    CLI::App* sub = app.add_subcommand(command, descriptions.at(command));
    sub->add_option("--config", config_paths[command], "JSON config file");
    for (const auto& spec : flag_table()) {
      if (!spec.paths.count(command)) continue;
      sub->add_option("--" + spec.name, raw[command][spec.name], spec.help);
    }
    subs[command] = sub;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    emit_error(err, "config", kConfigError, e.what());
    return kConfigError;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }

  try {
    json config = default_config(command);
    if (!config_paths[command].empty()) {
      json file = read_json_file(config_paths[command]);
      if (!file.is_object()) throw ConfigError("config: expected a JSON object");
      if (file.contains("command") && file.at("command") != command) {
        throw ConfigError("config: file is for command " + file.at("command").dump() + ", not " + command);
      }
      // Optional inputs that have no default.
      for (const char* key : {"atoms_csv", "reference"}) {
        if (file.contains(key) && !config.contains(key)) {
          const bool allowed = (std::string(key) == "atoms_csv" && command == "solve-ot") ||
                               (std::string(key) == "reference" && command == "metrics");
          if (allowed) config[key] = nullptr;
        }
      }
      overlay(config, file, "config");
    }
    for (const auto& spec : flag_table()) {
      const auto it = spec.paths.find(command);
      if (it == spec.paths.end()) continue;
      const std::string& text = raw[command][spec.name];
      if (subs[command]->count("--" + spec.name) == 0) continue;
      const json value = parse_flag(spec, text);
      if (spec.name == "kernel") {
        config["kernel"] = {{"kind", value}};
      } else {
        config[json::json_pointer(it->second)] = value;
      }
    }

    Context ctx{command, config, config_hash(config), 0, out};
    try {
      ctx.seed = config.at("seed").get<std::uint64_t>();
      set_worker_count(config.at("workers").get<int>());
    } catch (const json::exception& e) {
      throw ConfigError(std::string("seed/workers: ") + e.what());
    }

    if (command == "solve-ot") return cmd_solve_ot(ctx);
    if (command == "compile-net") return cmd_compile_net(ctx);
    if (command == "eval-net") return cmd_eval_net(ctx);
    if (command == "metrics") return cmd_metrics(ctx);
    if (command == "rate-sweep") return cmd_rate_sweep(ctx);
    return cmd_end_to_end(ctx);
  } catch (const ConfigError& e) {
    emit_error(err, "config", kConfigError, e.what());
    return kConfigError;
  } catch (const json::exception& e) {
    emit_error(err, "config", kConfigError, e.what());
    return kConfigError;
  } catch (const ValidationError& e) {
    emit_error(err, "validation", kValidationError, e.what());
    return kValidationError;
  } catch (const NonConvergenceError& e) {
    emit_error(err, "non_convergence", kNonConvergence, e.what());
    return kNonConvergence;
  } catch (const IoError& e) {
    emit_error(err, "io", kIoError, e.what());
    return kIoError;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace otnet::cli
