// Command-line surface: detection runs, population-oracle dumps,
// observed-marginal reduction, and the simulation benchmark.
//
// Every command writes a manifest JSON next to its outputs with the fully
// resolved parameter set; `rmlm rerun <manifest>` re-executes the command
// and reproduces the outputs byte-identically.
//
// Exit codes: 0 success, 2 input error, 3 parameter error,
// 4 representability refusal, 5 internal error.

#include "CLI11.hpp"
#include "json.hpp"

#include "rmlm/detection.hpp"
#include "rmlm/hidden.hpp"
#include "rmlm/io.hpp"
#include "rmlm/oracle.hpp"
#include "rmlm/simulation.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

using json = nlohmann::ordered_json;
using namespace rmlm;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitInput = 2;
constexpr int kExitParameter = 3;
constexpr int kExitRepresentability = 4;
constexpr int kExitInternal = 5;

struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_manifest(const std::string& path, const std::string& command,
                    const json& inputs, const json& outputs,
                    const json& params) {
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["timestamp"] = timestamp_utc();
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["params"] = params;
  std::ofstream f(path);
  require(f.good(), "cannot open " + path + " for writing");
  f << m.dump(2) << "\n";
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "cannot open " + path);
  try {
    return json::parse(f);
  } catch (const std::exception& e) {
    throw InvalidInput("invalid JSON in " + path + ": " + e.what());
  }
}

IndexSet parse_node_list(const std::vector<Index>& labels, Index d,
                         const std::string& what) {
  IndexSet out;
  for (Index v : labels) {
    if (v < 1 || v > d)
      throw ParameterError(what + " label " + std::to_string(v) +
                           " out of range 1.." + std::to_string(d));
    out.push_back(v - 1);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

json eps_to_json(const EpsilonConfig& eps) {
  return json{{"eps1", eps.eps1}, {"eps2", eps.eps2}, {"eps3", eps.eps3},
              {"eps4", eps.eps4}, {"eps5", eps.eps5}, {"eps6", eps.eps6},
              {"a", eps.a}};
}

EpsilonConfig eps_from_json(const json& j) {
  EpsilonConfig eps;
  eps.eps1 = j.value("eps1", eps.eps1);
  eps.eps2 = j.value("eps2", eps.eps2);
  eps.eps3 = j.value("eps3", eps.eps3);
  eps.eps4 = j.value("eps4", eps.eps4);
  eps.eps5 = j.value("eps5", eps.eps5);
  eps.eps6 = j.value("eps6", eps.eps6);
  eps.a = j.value("a", eps.a);
  return eps;
}

// ---- detect ----

void run_detect(const json& params) {
  const std::string input = params.at("input");
  const std::string prefix = params.at("out");
  const ThresholdPlan plan{params.at("k1").get<Index>(),
                           params.at("k2").get<Index>()};
  const EpsilonConfig eps = eps_from_json(params.at("eps"));
  const unsigned threads = params.value("threads", default_threads());

  const LabeledMatrix raw = read_matrix_csv(input);
  if (raw.values.cols() < 2)
    throw ParameterError("need at least two data columns");
  if (plan.k1 >= raw.values.rows())
    throw ParameterError("k1 must be smaller than the number of rows");
  try {
    validate(plan, raw.values.rows());
    validate(eps);
  } catch (const InvalidInput& e) {
    throw ParameterError(e.what());
  }

  const Matrix data = frechet2_transform(raw.values);
  const DetectionMatrices m =
      build_detection_matrices(data, plan, eps.a, threads);
  const auto [p_hat, p_star] = algorithm_mwp_indist(m, eps);

  write_matrix_csv(prefix + "_C1.csv", m.C1, raw.labels);
  write_matrix_csv(prefix + "_D1.csv", m.D1, raw.labels);
  write_matrix_csv(prefix + "_D2.csv", m.D2, raw.labels);
  write_matrix_csv(prefix + "_D3.csv", m.D3, raw.labels);
  write_matrix_csv(prefix + "_D4.csv", m.D4, raw.labels);
  write_bool_matrix_csv(prefix + "_Phat.csv", p_hat, raw.labels);
  write_bool_matrix_csv(prefix + "_Pstar.csv", p_star, raw.labels);

  {
    // directed edge m -> i for each detected pair; undirected rows for the
    // indistinguishable matrix (upper triangle only)
    std::ofstream f(prefix + "_edges.csv");
    require(f.good(), "cannot open edge list for writing");
    f << "type,from,to\n";
    for (Index i = 0; i < p_hat.rows(); ++i)
      for (Index j = 0; j < p_hat.cols(); ++j)
        if (i != j && p_hat(i, j))
          f << "directed," << raw.labels[static_cast<size_t>(j)] << ","
            << raw.labels[static_cast<size_t>(i)] << "\n";
    for (Index i = 0; i < p_star.rows(); ++i)
      for (Index j = i + 1; j < p_star.cols(); ++j)
        if (p_star(i, j) && p_star(j, i))
          f << "undirected," << raw.labels[static_cast<size_t>(i)] << ","
            << raw.labels[static_cast<size_t>(j)] << "\n";
  }

  for (const auto& diag : m.diagnostics)
    std::cerr << "note: pair (" << raw.labels[static_cast<size_t>(diag.i)]
              << "," << raw.labels[static_cast<size_t>(diag.m)] << "): "
              << diag.message << "\n";

  write_manifest(prefix + "_manifest.json", "detect", {{"input", input}},
                 {{"prefix", prefix}}, params);
  std::cout << "detect: wrote " << prefix << "_{C1,D1,D2,D3,D4,Phat,Pstar,edges}.csv\n";
}

// ---- oracle ----

void run_oracle(const json& params) {
  const std::string input = params.at("input");
  const std::string out_path = params.at("out");
  const double scale_a = params.value("a", 1.0001);

  const EdgeWeightDag dag = read_dag_csv(input);
  const MlMatrix a_raw = ml_matrix(dag);
  const MlMatrix a = standardize(a_raw);
  const Index d = a.size();
  const BoolMatrix mwp = mwp_ground_truth(a);
  const Matrix sigma = sigma_matrix(a);

  IndexSet pair_filter;
  if (params.contains("pair"))
    for (Index v : params.at("pair").get<std::vector<Index>>())
      pair_filter.push_back(v - 1);

  IndexSet o_kappa;
  if (params.contains("okappa"))
    o_kappa = parse_node_list(params.at("okappa").get<std::vector<Index>>(),
                              d, "okappa");

  auto matrix_to_json = [](const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };

  json pairs = json::array();
  for (Index i = 0; i < d; ++i)
    for (Index m = 0; m < d; ++m) {
      if (i == m) continue;
      if (!pair_filter.empty() &&
          (pair_filter[0] != i || pair_filter[1] != m))
        continue;
      json rec;
      rec["i"] = i + 1;
      rec["m"] = m + 1;
      rec["dependent"] = a.shares_ancestry(i, m);
      rec["mwp_truth"] = static_cast<bool>(mwp(i, m));
      const auto cond = o_kappa.empty()
                            ? cond1_check(a, i, m, scale_a)
                            : cond2_check(a, i, m, o_kappa, scale_a);
      rec["cond1"] = {cond.equality, cond.strict};
      const double s_mim = sigma_max(a, {i, m});
      const double c1 =
          std::min(0.1 + std::sqrt(std::max(0.0, 2.0 - s_mim)), 0.8);
      TransformSpec spec;
      spec.i = i;
      spec.m = m;
      spec.c1 = c1;
      spec.c1_prime = 0.1 * c1;
      spec.c2 = 1.0 / c1;
      spec.o_kappa = o_kappa;
      try {
        rec["sigmaT"] = population_sigma_T(a, spec);
        rec["deltaC"] = delta_c(a, spec);
      } catch (const DegenerateValue& e) {
        rec["sigmaT"] = nullptr;
        rec["deltaC"] = nullptr;
        rec["degenerate"] = e.what();
      }
      rec["sigma_M"] = s_mim;
      pairs.push_back(rec);
    }

  json out;
  out["ml_matrix"] = matrix_to_json(a_raw.coeff);
  out["ml_matrix_standardized"] = matrix_to_json(a.coeff);
  out["sigma"] = matrix_to_json(sigma);
  out["pairs"] = pairs;
  {
    std::ofstream f(out_path);
    require(f.good(), "cannot open " + out_path + " for writing");
    f << out.dump(2) << "\n";
  }
  write_manifest(out_path + ".manifest.json", "oracle", {{"input", input}},
                 {{"out", out_path}}, params);
  std::cout << "oracle: wrote " << out_path << "\n";
}

// ---- reduce ----

void run_reduce(const json& params) {
  const std::string input = params.at("input");
  const std::string prefix = params.at("out");

  const EdgeWeightDag dag = read_dag_csv(input);
  const MlMatrix a = ml_matrix(dag);
  const IndexSet o = parse_node_list(
      params.at("observed").get<std::vector<Index>>(), a.size(), "observed");
  if (o.empty()) throw ParameterError("observed set must be nonempty");

  const ObservableReport report = check_observable(a, o);
  json rj;
  rj["representable"] = report.representable;
  json v0 = json::array();
  for (Index v : report.v0) v0.push_back(v + 1);
  rj["V0_O"] = v0;
  json violations = json::array();
  for (const auto& v : report.violations) {
    json nodes = json::array();
    for (Index n : v.nodes) nodes.push_back(n + 1);
    violations.push_back({{"clause", v.clause}, {"nodes", nodes}});
  }
  rj["violations"] = violations;
  {
    std::ofstream f(prefix + "_report.json");
    require(f.good(), "cannot open report for writing");
    f << rj.dump(2) << "\n";
  }

  if (report.representable) {
    const ObservedModel model = reduced_matrix(a, o);
    std::vector<std::string> labels;
    for (Index v : model.observed) labels.push_back(std::to_string(v + 1));
    write_matrix_csv(prefix + "_reduced.csv", model.reduced, labels);
  }
  write_manifest(prefix + "_manifest.json", "reduce", {{"input", input}},
                 {{"prefix", prefix}}, params);
  if (!report.representable) {
    std::cerr << "reduce: observed marginal is not representable ("
              << report.violations.size() << " violated clauses); see "
              << prefix << "_report.json\n";
    throw DegenerateValue("representability refusal");
  }
  std::cout << "reduce: wrote " << prefix << "_reduced.csv\n";
}

// ---- bench ----

void run_bench(const json& params) {
  const std::string prefix = params.at("out");
  SimConfig cfg;
  cfg.d = params.value("d", cfg.d);
  cfg.p = params.value("p", cfg.p);
  cfg.alpha = params.value("alpha", cfg.alpha);
  cfg.n = params.value("n", cfg.n);
  cfg.reps = params.value("reps", cfg.reps);
  cfg.seed = params.value("seed", cfg.seed);
  cfg.plan.k1 = params.value("k1", cfg.plan.k1);
  cfg.plan.k2 = params.value("k2", cfg.plan.k2);
  cfg.eps = eps_from_json(params.value("eps", json::object()));
  cfg.abs_noise = params.value("abs_noise", false);
  cfg.threads = params.value("threads", default_threads());
  try {
    validate(cfg);
  } catch (const InvalidInput& e) {
    throw ParameterError(e.what());
  }

  const ExperimentResult result = run_experiment(cfg);

  {
    std::ofstream f(prefix + "_metrics.csv");
    require(f.good(), "cannot open metrics CSV for writing");
    f << "rep";
    const char* names[] = {"TPR", "FCCPR", "FDCPR", "FDR",
                           "FDDR", "FDCDR", "FCDDR"};
    for (const char* n : names) f << "," << n << "," << n << "_num," << n << "_den";
    f << ",error\n";
    for (size_t r = 0; r < result.records.size(); ++r) {
      const auto& rec = result.records[r];
      f << (r + 1);
      const MetricsRecord::Ratio* ratios[] = {
          &rec.tpr, &rec.fccpr, &rec.fdcpr, &rec.fdr,
          &rec.fddr, &rec.fdcdr, &rec.fcddr};
      for (const auto* ratio : ratios) {
        f << ",";
        if (auto v = ratio->value()) f << format_number(*v);
        f << "," << ratio->num << "," << ratio->den;
      }
      f << "," << result.failures[r] << "\n";
    }
  }
  {
    std::ofstream f(prefix + "_summary.csv");
    require(f.good(), "cannot open summary CSV for writing");
    f << "metric,defined,min,q1,median,q3,max\n";
    for (const auto& s : summarize(result.records))
      f << s.name << "," << s.defined << "," << format_number(s.min) << ","
        << format_number(s.q1) << "," << format_number(s.median) << ","
        << format_number(s.q3) << "," << format_number(s.max) << "\n";
  }
  write_manifest(prefix + "_manifest.json", "bench", json::object(),
                 {{"prefix", prefix}}, params);
  std::cout << "bench: wrote " << prefix << "_metrics.csv and " << prefix
            << "_summary.csv\n";
}

void dispatch(const std::string& command, const json& params) {
  if (command == "detect")
    run_detect(params);
  else if (command == "oracle")
    run_oracle(params);
  else if (command == "reduce")
    run_reduce(params);
  else if (command == "bench")
    run_bench(params);
  else
    throw InvalidInput("unknown command in manifest: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive max-linear models on DAGs with hidden nodes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // shared detection parameters
  Index k1 = 500, k2 = 200;
  EpsilonConfig eps;
  unsigned threads = default_threads();
  std::string preset;

  auto add_plan_flags = [&](CLI::App* cmd) {
    cmd->add_option("--k1", k1, "first-stage exceedance count");
    cmd->add_option("--k2", k2, "second-stage exceedance count");
    cmd->add_option("--a", eps.a, "scaling constant a > 1");
    cmd->add_option("--eps1", eps.eps1);
    cmd->add_option("--eps2", eps.eps2);
    cmd->add_option("--eps3", eps.eps3);
    cmd->add_option("--eps4", eps.eps4);
    cmd->add_option("--eps5", eps.eps5);
    cmd->add_option("--eps6", eps.eps6);
    cmd->add_option("--threads", threads, "worker thread count");
    cmd->add_option("--preset", preset,
                    "n1000 (k1=200,k2=100) or n5000 (k1=500,k2=200)")
        ->check(CLI::IsMember({"n1000", "n5000"}));
  };
  auto apply_preset = [&]() {
    if (preset == "n1000") {
      k1 = 200;
      k2 = 100;
    } else if (preset == "n5000") {
      k1 = 500;
      k2 = 200;
    }
  };

  // detect
  auto* detect = app.add_subcommand("detect", "run the MWP detection pipeline");
  std::string detect_input, detect_out = "detect";
  detect->add_option("input", detect_input, "observations CSV")->required();
  detect->add_option("--out", detect_out, "output path prefix");
  add_plan_flags(detect);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "population quantities of a DAG");
  std::string oracle_input, oracle_out = "oracle.json";
  std::vector<Index> oracle_pair, oracle_kappa;
  double oracle_a = 1.0001;
  oracle->add_option("input", oracle_input, "DAG CSV")->required();
  oracle->add_option("--out", oracle_out, "output JSON path");
  oracle->add_option("--pair", oracle_pair, "restrict to one ordered pair (i m)")
      ->expected(2);
  oracle->add_option("--okappa", oracle_kappa, "conditioning node set");
  oracle->add_option("--a", oracle_a, "scaling constant a > 1");

  // reduce
  auto* reduce = app.add_subcommand("reduce", "observed-marginal reduction");
  std::string reduce_input, reduce_out = "reduce";
  std::vector<Index> observed;
  reduce->add_option("input", reduce_input, "DAG CSV")->required();
  reduce->add_option("--observed", observed, "observed node labels")
      ->required();
  reduce->add_option("--out", reduce_out, "output path prefix");

  // bench
  auto* bench = app.add_subcommand("bench", "simulation benchmark");
  std::string bench_config, bench_out = "bench";
  SimConfig bench_defaults;
  Index bd = bench_defaults.d, bn = bench_defaults.n,
        breps = bench_defaults.reps;
  double bp = bench_defaults.p;
  int balpha = bench_defaults.alpha;
  std::uint64_t bseed = bench_defaults.seed;
  bool abs_noise = false;
  bench->add_option("config", bench_config, "config JSON (optional)");
  bench->add_option("--out", bench_out, "output path prefix");
  bench->add_option("--d", bd, "dimension");
  bench->add_option("--p", bp, "edge probability");
  bench->add_option("--alpha", balpha, "tail index (2 or 3)");
  bench->add_option("--n", bn, "sample size");
  bench->add_option("--reps", breps, "replication count");
  bench->add_option("--seed", bseed, "master seed");
  bench->add_flag("--abs-noise", abs_noise, "use |noise| instead of signed");
  add_plan_flags(bench);

  // rerun
  auto* rerun = app.add_subcommand("rerun", "re-execute a command from its manifest");
  std::string manifest_path;
  rerun->add_option("manifest", manifest_path, "manifest JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParameter;
  }

  try {
    apply_preset();
    if (detect->parsed()) {
      json params;
      params["input"] = detect_input;
      params["out"] = detect_out;
      params["k1"] = k1;
      params["k2"] = k2;
      params["eps"] = eps_to_json(eps);
      params["threads"] = threads;
      run_detect(params);
    } else if (oracle->parsed()) {
      json params;
      params["input"] = oracle_input;
      params["out"] = oracle_out;
      params["a"] = oracle_a;
      if (!oracle_pair.empty()) params["pair"] = oracle_pair;
      if (!oracle_kappa.empty()) params["okappa"] = oracle_kappa;
      run_oracle(params);
    } else if (reduce->parsed()) {
      json params;
      params["input"] = reduce_input;
      params["out"] = reduce_out;
      params["observed"] = observed;
      run_reduce(params);
    } else if (bench->parsed()) {
      json params = bench_config.empty() ? json::object()
                                         : load_json(bench_config);
      auto set_if = [&](const char* key, auto value, bool changed) {
        if (changed || !params.contains(key)) params[key] = value;
      };
      set_if("out", bench_out, bench->count("--out") > 0);
      set_if("d", bd, bench->count("--d") > 0);
      set_if("p", bp, bench->count("--p") > 0);
      set_if("alpha", balpha, bench->count("--alpha") > 0);
      set_if("n", bn, bench->count("--n") > 0);
      set_if("reps", breps, bench->count("--reps") > 0);
      set_if("seed", bseed, bench->count("--seed") > 0);
      set_if("k1", k1, bench->count("--k1") > 0 || !preset.empty());
      set_if("k2", k2, bench->count("--k2") > 0 || !preset.empty());
      set_if("abs_noise", abs_noise, bench->count("--abs-noise") > 0);
      set_if("threads", threads, bench->count("--threads") > 0);
      if (!params.contains("eps")) params["eps"] = eps_to_json(eps);
      run_bench(params);
    } else if (rerun->parsed()) {
      const json manifest = load_json(manifest_path);
      dispatch(manifest.at("command"), manifest.at("params"));
    }
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitParameter;
  } catch (const DegenerateValue& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitRepresentability;
  } catch (const InvalidInput& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
