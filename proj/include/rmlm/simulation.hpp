#pragma once

// Simulation benchmark: random well-ordered DAGs, noisy recursive
// max-linear sampling, causal-dependence metrics, and the replication
// runner.

#include "rmlm/common.hpp"
#include "rmlm/detection.hpp"
#include "rmlm/graph.hpp"
#include "rmlm/parallel.hpp"
#include "rmlm/tropical.hpp"

#include <optional>
#include <random>

namespace rmlm {

struct SimConfig {
  Index d = 20;
  double p = 0.1;
  int alpha = 2;          // tail index, 2 or 3
  Index n = 1000;
  Index reps = 50;
  std::uint64_t seed = 1;
  ThresholdPlan plan{200, 100};
  EpsilonConfig eps{};
  bool abs_noise = false;  // take |Z_eps| instead of signed noise
  unsigned threads = default_threads();
};

inline void validate(const SimConfig& cfg) {
  require(cfg.d >= 2, "dimension must be at least 2");
  require(cfg.p > 0.0 && cfg.p < 1.0, "edge probability must lie in (0,1)");
  require(cfg.alpha == 2 || cfg.alpha == 3, "alpha must be 2 or 3");
  require(cfg.n >= 2 && cfg.reps >= 1, "invalid sample size or rep count");
  validate(cfg.plan, cfg.n);
  validate(cfg.eps);
}

// Upper-triangular random DAG in the canonical well-order (parents carry
// larger labels): c_ii = 1, each admissible edge present with probability p
// and squared weight Uniform[0.3, 1.5].
inline EdgeWeightDag sample_dag(Index d, double p, std::mt19937_64& rng) {
  require(d >= 1 && p >= 0.0 && p <= 1.0, "invalid DAG parameters");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight_sq(0.3, 1.5);
  EdgeWeightDag dag{Matrix::Zero(d, d)};
  for (Index i = 0; i < d; ++i) {
    dag.weights(i, i) = 1.0;
    for (Index k = i + 1; k < d; ++k)
      if (unit(rng) < p) dag.weights(i, k) = std::sqrt(weight_sq(rng));
  }
  return dag;
}

// X* = A x_max Z + Z_eps per observation; Z_i = |t_alpha| i.i.d. and the
// noise is 0.5 t_5 (alpha = 2) or 0.5 t_10 (alpha = 3), signed by default.
inline Matrix sample_rmlm(const MlMatrix& a, Index n, int alpha,
                          std::mt19937_64& rng, bool abs_noise = false) {
  require(alpha == 2 || alpha == 3, "alpha must be 2 or 3");
  const Index d = a.size();
  std::student_t_distribution<double> innovation(alpha);
  std::student_t_distribution<double> noise(alpha == 2 ? 5.0 : 10.0);
  Matrix out(n, d);
  Vector z(d);
  for (Index r = 0; r < n; ++r) {
    for (Index k = 0; k < d; ++k) z(k) = std::abs(innovation(rng));
    for (Index i = 0; i < d; ++i) {
      double x = 0.0;
      for (Index k = 0; k < d; ++k)
        x = std::max(x, a.coeff(i, k) * z(k));
      double eps = 0.5 * noise(rng);
      if (abs_noise) eps = std::abs(eps);
      out(r, i) = x + eps;
    }
  }
  return out;
}

struct MetricsRecord {
  // Each ratio carries its exact integer counts; undefined (0 denominator)
  // is an empty optional, never 0.
  struct Ratio {
    long num = 0;
    long den = 0;
    std::optional<double> value() const {
      if (den == 0) return std::nullopt;
      return static_cast<double>(num) / static_cast<double>(den);
    }
  };
  Ratio tpr, fccpr, fdcpr, fdr, fddr, fdcdr, fcddr;
};

// Pairwise classification metrics of a detection matrix against the exact
// model.  Sets are over ordered pairs (i,m), i != m:
//   MWP  max-weighted-path ground truth
//   CP   causal pairs, m in an(i)
//   DP   dependent pairs, shared ancestry (sigma_im^2 > 0)
//   ICP  inverse causal pairs, i in an(m)
inline MetricsRecord compute_metrics(const BoolMatrix& p_hat,
                                     const MlMatrix& a,
                                     double tol = kRelTol) {
  const Index d = a.size();
  require(p_hat.rows() == d && p_hat.cols() == d, "shape mismatch");
  const BoolMatrix mwp = mwp_ground_truth(a, tol);
  MetricsRecord rec;
  for (Index i = 0; i < d; ++i)
    for (Index m = 0; m < d; ++m) {
      if (i == m) continue;
      const bool detected = p_hat(i, m);
      const bool in_mwp = mwp(i, m);
      const bool cp = a.is_ancestor(m, i);
      const bool icp = a.is_ancestor(i, m);
      const bool dp = a.shares_ancestry(i, m);

      rec.tpr.den += in_mwp;
      rec.tpr.num += detected && in_mwp;
      rec.fccpr.den += !in_mwp && cp;
      rec.fccpr.num += detected && !in_mwp && cp;
      rec.fdcpr.den += dp && !cp;
      rec.fdcpr.num += detected && dp && !cp;
      rec.fdr.den += detected;
      rec.fdr.num += detected && !in_mwp;
      rec.fddr.den += detected && dp;
      rec.fddr.num += detected && !in_mwp && dp;
      rec.fdcdr.den += detected && dp;
      rec.fdcdr.num += detected && dp && !cp;
      rec.fcddr.den += detected && dp;
      rec.fcddr.num += detected && icp;
    }
  return rec;
}

struct ExperimentResult {
  std::vector<MetricsRecord> records;          // one per replication
  std::vector<std::string> failures;           // per-rep error messages
};

// Per replication: sample DAG -> ML matrix -> standardize -> noisy sample
// -> rank standardization -> detection matrices -> MWP algorithm ->
// metrics.  Replications use independent seed streams and merge by index.
inline ExperimentResult run_experiment(const SimConfig& cfg) {
  validate(cfg);
  ExperimentResult result;
  result.records.resize(static_cast<size_t>(cfg.reps));
  result.failures.resize(static_cast<size_t>(cfg.reps));
  parallel_for(static_cast<size_t>(cfg.reps), cfg.threads, [&](std::size_t r) {
    try {
      std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(r)};
      std::mt19937_64 rng(seq);
      const EdgeWeightDag dag = sample_dag(cfg.d, cfg.p, rng);
      const MlMatrix a = standardize(ml_matrix(dag));
      const Matrix raw = sample_rmlm(a, cfg.n, cfg.alpha, rng, cfg.abs_noise);
      const Matrix data = frechet2_transform(raw);
      const DetectionMatrices m =
          build_detection_matrices(data, cfg.plan, cfg.eps.a, 1);
      const BoolMatrix p_hat = algorithm_mwp(m, cfg.eps);
      result.records[r] = compute_metrics(p_hat, a);
    } catch (const std::exception& e) {
      result.failures[r] = e.what();
    }
  });
  return result;
}

// Quartiles (min, q1, median, q3, max) of the defined values of one metric.
struct MetricSummary {
  std::string name;
  long defined = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

inline std::vector<MetricSummary> summarize(
    const std::vector<MetricsRecord>& records) {
  const std::vector<
      std::pair<std::string, MetricsRecord::Ratio MetricsRecord::*>>
      fields = {{"TPR", &MetricsRecord::tpr},     {"FCCPR", &MetricsRecord::fccpr},
                {"FDCPR", &MetricsRecord::fdcpr}, {"FDR", &MetricsRecord::fdr},
                {"FDDR", &MetricsRecord::fddr},   {"FDCDR", &MetricsRecord::fdcdr},
                {"FCDDR", &MetricsRecord::fcddr}};
  std::vector<MetricSummary> out;
  for (const auto& [name, field] : fields) {
    std::vector<double> values;
    for (const auto& rec : records)
      if (auto v = (rec.*field).value()) values.push_back(*v);
    std::sort(values.begin(), values.end());
    MetricSummary s;
    s.name = name;
    s.defined = static_cast<long>(values.size());
    if (!values.empty()) {
      s.min = values.front();
      s.q1 = quantile_sorted(values, 0.25);
      s.median = quantile_sorted(values, 0.5);
      s.q3 = quantile_sorted(values, 0.75);
      s.max = values.back();
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace rmlm
