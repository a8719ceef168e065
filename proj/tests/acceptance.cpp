// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Criterion 8 drives the CLI binary, whose path arrives as argv[1].

#include "rmlm/detection.hpp"
#include "rmlm/estimation.hpp"
#include "rmlm/hidden.hpp"
#include "rmlm/io.hpp"
#include "rmlm/oracle.hpp"
#include "rmlm/simulation.hpp"

#include "fixtures.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace rmlm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  int id;
  const char* name;
  bool (*run)(std::string& detail);
  double time_limit_s;  // 0 = no limit
};

// ---- 1: tropical closure vs exhaustive enumeration ------------------------

double best_path_weight(const EdgeWeightDag& dag, Index from, Index to,
                        double carried) {
  if (from == to) return carried;
  double best = 0.0;
  for (Index child : children(dag, from))
    best = std::max(best, best_path_weight(dag, child, to,
                                           carried * dag.weights(child, from)));
  return best;
}

EdgeWeightDag random_weighted_dag(Index d, double p, std::mt19937_64& rng,
                                  bool unit_diag) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.3, 1.4);
  EdgeWeightDag dag{Matrix::Zero(d, d)};
  for (Index i = 0; i < d; ++i) {
    dag.weights(i, i) = unit_diag ? 1.0 : 0.5 + unit(rng);
    for (Index k = i + 1; k < d; ++k)
      if (unit(rng) < p) dag.weights(i, k) = weight(rng);
  }
  return dag;
}

bool criterion1(std::string& detail) {
  std::mt19937_64 rng(1001);
  for (int t = 0; t < 200; ++t) {
    const auto dag = random_weighted_dag(2 + t % 7, 0.45, rng, false);
    const Matrix dp = ml_matrix(dag).coeff;
    for (Index i = 0; i < dag.size(); ++i)
      for (Index j = 0; j < dag.size(); ++j) {
        const double brute =
            best_path_weight(dag, j, i, dag.weights(j, j));
        if (!approx_equal(dp(i, j), brute, 1e-12)) {
          detail = "mismatch at DAG " + std::to_string(t);
          return false;
        }
      }
  }
  detail = "200 DAGs, D <= 8, 1e-12 relative";
  return true;
}

// ---- 2: population equivalence of the transformed-pair criterion ----------

bool criterion2(std::string& detail) {
  std::mt19937_64 rng(2002);
  long pairs_checked = 0;
  for (int t = 0; t < 100; ++t) {
    const auto dag = random_weighted_dag(2 + t % 9, 0.4, rng, true);
    const MlMatrix a = standardize(ml_matrix(dag));
    const BoolMatrix mwp = mwp_ground_truth(a);
    for (Index i = 0; i < dag.size(); ++i)
      for (Index m = 0; m < dag.size(); ++m) {
        if (i == m || !a.shares_ancestry(i, m)) continue;
        const auto [eq, strict] = cond1_check(a, i, m, 1.0001);
        if (!eq || !strict) continue;
        ++pairs_checked;
        TransformSpec spec;
        spec.i = i;
        spec.m = m;
        spec.c1 = 0.5;
        spec.c1_prime = 0.05;
        spec.c2 = 2.0;
        const double sigma_t = population_sigma_T(a, spec);
        const bool is_one = std::abs(sigma_t - 1.0) <= 1e-9;
        if (is_one != static_cast<bool>(mwp(i, m))) {
          detail = "equivalence broken at DAG " + std::to_string(t);
          return false;
        }
        if (mwp(i, m) && delta_c(a, spec) > 1e-9) {
          detail = "delta_c nonzero on an MWP pair at DAG " + std::to_string(t);
          return false;
        }
      }
  }
  detail = "100 DAGs, " + std::to_string(pairs_checked) + " eligible pairs";
  return pairs_checked > 100;
}

// ---- 3: Sigma-consistency of the observed reduction ------------------------

bool sigma_consistent(const MlMatrix& a, const IndexSet& o,
                      std::string& detail) {
  if (!check_observable(a, o).representable) {
    detail = "fixture unexpectedly not representable";
    return false;
  }
  const auto model = reduced_matrix(a, o);
  const Matrix full = a.coeff * a.coeff.transpose();
  const Matrix reduced = model.reduced * model.reduced.transpose();
  for (size_t r = 0; r < o.size(); ++r)
    for (size_t c = 0; c < o.size(); ++c)
      if (!approx_equal(reduced(static_cast<Index>(r), static_cast<Index>(c)),
                        full(o[r], o[c]), 1e-9)) {
        detail = "Sigma mismatch";
        return false;
      }
  return true;
}

bool criterion3(std::string& detail) {
  if (!sigma_consistent(ml_matrix(fixtures::d1()), {0, 1}, detail) ||
      !sigma_consistent(ml_matrix(fixtures::d2_mwp()), {0, 1}, detail) ||
      !sigma_consistent(ml_matrix(fixtures::twelve_node(false)),
                        fixtures::twelve_node_observed(), detail))
    return false;
  // closed form for the chain-dominated three-node fixture at O = {0, 1}
  const auto model = reduced_matrix(ml_matrix(fixtures::d2_mwp()), {0, 1});
  const double star11 = std::sqrt(1.0 + 0.81);
  if (!approx_equal(model.reduced(1, 1), star11, 1e-9) ||
      !approx_equal(model.reduced(0, 1), 0.9 * star11, 1e-9) ||
      !approx_equal(model.reduced(0, 0), 1.0, 1e-9) ||
      model.reduced(1, 0) != 0.0) {
    detail = "closed form mismatch";
    return false;
  }
  detail = "3 fixtures + closed form, 1e-9";
  return true;
}

// ---- 4: estimator consistency ----------------------------------------------

Matrix pure_sample(const MlMatrix& a, Index n, std::mt19937_64& rng) {
  std::student_t_distribution<double> innovation(2.0);
  Matrix out(n, a.size());
  Vector z(a.size());
  for (Index r = 0; r < n; ++r) {
    for (Index k = 0; k < a.size(); ++k) z(k) = std::abs(innovation(rng));
    for (Index i = 0; i < a.size(); ++i) {
      double x = 0.0;
      for (Index k = 0; k < a.size(); ++k)
        x = std::max(x, a.coeff(i, k) * z(k));
      out(r, i) = x;
    }
  }
  return out;
}

Matrix pair_columns(const Matrix& data, Index i, Index m) {
  Matrix out(data.rows(), 2);
  out.col(0) = data.col(i);
  out.col(1) = data.col(m);
  return out;
}

bool criterion4(std::string& detail) {
  std::mt19937_64 rng(4020);
  const Index n = 100000, k1 = 2000, k2 = 500;
  double worst = 0.0;
  std::string errs;
  bool ok = true;
  for (const auto& dag :
       {fixtures::d1(), fixtures::d2_mwp(), fixtures::d3()}) {
    const MlMatrix a = standardize(ml_matrix(dag));
    const Matrix data = frechet2_transform(pure_sample(a, n, rng));
    const Matrix pair = pair_columns(data, 0, 1);

    const double m_err = std::abs(estimate_sigma_max_pair(angular(pair), k1) -
                                  sigma_max(a, {0, 1}));
    TransformSpec spec;
    spec.c1 = 0.5;
    spec.c2 = 2.0;
    const Matrix t = transform_T(pair, spec.c1, spec.c2, k1);
    const double t_err =
        std::abs(estimate_sigma_T(t, k2) - population_sigma_T(a, spec));
    worst = std::max({worst, m_err, t_err});
    char buf[64];
    std::snprintf(buf, sizeof(buf), " (M %.4f, T %.4f)", m_err, t_err);
    errs += buf;
    ok = ok && m_err < 0.05 && t_err < 0.05;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst error %.4f vs 0.05;", worst);
  detail = buf + errs;
  return ok;
}

// ---- 5: CLT variance sanity -------------------------------------------------

bool criterion5(std::string& detail) {
  const MlMatrix a = standardize(ml_matrix(fixtures::d2_mwp()));
  Matrix pair_rows(2, 3);
  pair_rows.row(0) = a.coeff.row(0);
  pair_rows.row(1) = a.coeff.row(1);
  const double theory = clt_variance(pair_rows);
  const double sigma12 = (a.coeff * a.coeff.transpose())(0, 1);

  const int reps = 500;
  const Index n = 20000, k2 = 200;
  std::vector<double> stats(reps);
  parallel_for(reps, default_threads(), [&](std::size_t r) {
    std::seed_seq seq{std::uint64_t{5005}, static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(seq);
    const Matrix data = frechet2_transform(pure_sample(a, n, rng));
    const double est =
        estimate_sigma_dep(angular(pair_columns(data, 0, 1)), k2);
    stats[r] = std::sqrt(static_cast<double>(k2)) * (est - sigma12);
  });
  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= reps;
  double var = 0.0;
  for (double s : stats) var += (s - mean) * (s - mean);
  var /= reps - 1;

  const double ratio = var / theory;
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "empirical %.4f vs formula %.4f (ratio %.2f)", var, theory,
                ratio);
  detail = buf;
  return ratio > 0.5 && ratio < 2.0;
}

// ---- 6: desk-scale benchmark replication -----------------------------------

double median_of(const std::vector<MetricSummary>& summary,
                 const std::string& name) {
  for (const auto& s : summary)
    if (s.name == name) return s.median;
  return std::numeric_limits<double>::quiet_NaN();
}

bool criterion6(std::string& detail) {
  SimConfig cfg;
  cfg.d = 20;
  cfg.p = 0.1;
  cfg.alpha = 2;
  cfg.n = 5000;
  cfg.reps = 20;
  cfg.seed = 4;
  cfg.plan = {500, 200};
  const ExperimentResult result = run_experiment(cfg);
  for (const auto& f : result.failures)
    if (!f.empty()) {
      detail = "replication failed: " + f;
      return false;
    }
  const auto summary = summarize(result.records);
  const double tpr = median_of(summary, "TPR");
  const double fdcpr = median_of(summary, "FDCPR");
  const double fccpr = median_of(summary, "FCCPR");
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "median TPR %.3f, FDCPR %.3f, FCCPR %.3f", tpr, fdcpr, fccpr);
  detail = buf;
  return tpr >= 0.75 && fdcpr <= 0.5 && fccpr <= 0.5;
}

// ---- 7: three-node behavioral check ----------------------------------------

int detections_of_01(const EdgeWeightDag& dag, std::uint64_t seed_base) {
  const MlMatrix a = standardize(ml_matrix(dag));
  int hits = 0;
  for (int r = 0; r < 20; ++r) {
    std::seed_seq seq{seed_base, static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(seq);
    const Matrix data =
        frechet2_transform(sample_rmlm(a, 5000, 2, rng));
    const DetectionMatrices m =
        build_detection_matrices(data, {500, 200}, EpsilonConfig{}.a);
    hits += algorithm_mwp(m, EpsilonConfig{})(0, 1);
  }
  return hits;
}

bool criterion7(std::string& detail) {
  const int chain = detections_of_01(fixtures::d1(), 7001);
  const int confounder = detections_of_01(fixtures::d3(), 7003);
  const int chain_dominant = detections_of_01(fixtures::d2_mwp(), 7002);
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "chain %d/20, confounder %d/20, chain+edge %d/20", chain,
                confounder, chain_dominant);
  detail = buf;
  return chain >= 16 && (20 - confounder) >= 16 && chain_dominant >= 16;
}

// ---- 8: manifest-driven determinism ----------------------------------------

std::string g_cli_path;

bool run_cli(const fs::path& work, const std::string& args) {
  const std::string cmd =
      "cd '" + work.string() + "' && '" + g_cli_path + "' " + args +
      " > /dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool criterion8(std::string& detail) {
  if (g_cli_path.empty()) {
    detail = "CLI path not supplied";
    return false;
  }
  const fs::path work =
      fs::temp_directory_path() /
      ("rmlm_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  // bench: run, keep outputs, rerun from the manifest, compare bytes
  if (!run_cli(work, "bench --d 6 --p 0.3 --n 800 --reps 3 --seed 11 "
                     "--k1 120 --k2 60 --threads 2 --out b")) {
    detail = "bench command failed";
    return false;
  }
  const std::string metrics = slurp(work / "b_metrics.csv");
  const std::string summary = slurp(work / "b_summary.csv");
  if (!run_cli(work, "rerun b_manifest.json")) {
    detail = "bench rerun failed";
    return false;
  }
  if (slurp(work / "b_metrics.csv") != metrics ||
      slurp(work / "b_summary.csv") != summary) {
    detail = "bench outputs changed under rerun";
    return false;
  }

  // detect: same protocol on a simulated three-node sample
  {
    std::mt19937_64 rng(8008);
    const MlMatrix a = standardize(ml_matrix(fixtures::d2_mwp()));
    write_matrix_csv((work / "data.csv").string(),
                     sample_rmlm(a, 2000, 2, rng), default_labels(3));
  }
  if (!run_cli(work, "detect data.csv --k1 200 --k2 100 --threads 2 "
                     "--out det")) {
    detail = "detect command failed";
    return false;
  }
  const std::string phat = slurp(work / "det_Phat.csv");
  const std::string d2 = slurp(work / "det_D2.csv");
  if (phat.empty() || d2.empty()) {
    detail = "detect outputs missing";
    return false;
  }
  if (!run_cli(work, "rerun det_manifest.json")) {
    detail = "detect rerun failed";
    return false;
  }
  if (slurp(work / "det_Phat.csv") != phat ||
      slurp(work / "det_D2.csv") != d2) {
    detail = "detect outputs changed under rerun";
    return false;
  }
  fs::remove_all(work);
  detail = "bench and detect byte-identical under rerun";
  return true;
}

const Criterion kCriteria[] = {
    {1, "ML matrix equals exhaustive path enumeration", criterion1, 5.0},
    {2, "population equivalence of the transformed-pair criterion",
     criterion2, 30.0},
    {3, "Sigma-consistency of the observed reduction", criterion3, 0.0},
    {4, "estimator consistency on three-node fixtures", criterion4, 60.0},
    {5, "CLT variance within a factor two of the formula", criterion5, 0.0},
    {6, "benchmark replication d=20 n=5000", criterion6, 900.0},
    {7, "three-node behavioral detection rates", criterion7, 0.0},
    {8, "manifest-driven rerun determinism", criterion8, 0.0},
};

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = fs::absolute(argv[1]).string();
  const long only = argc > 2 ? std::strtol(argv[2], nullptr, 10) : 0;
  int failures = 0;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    std::string detail;
    const auto start = Clock::now();
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (ok && c.time_limit_s > 0.0 && elapsed > c.time_limit_s) {
      ok = false;
      detail += " [time limit exceeded]";
    }
    std::printf("[%s] %d %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                c.name, detail.c_str(), elapsed);
    std::fflush(stdout);
    failures += !ok;
  }
  return failures == 0 ? 0 : 1;
}
