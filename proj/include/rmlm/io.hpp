#pragma once

// File formats: dense matrix CSV (header row of 1-based node labels), DAG
// edge-list CSV with a diagonal section, JSON reports and run manifests.
// All numeric output goes through one formatter so reruns are byte-stable.

#include "rmlm/common.hpp"
#include "rmlm/graph.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rmlm {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& s, const std::string& context) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    require(used == s.size(), "trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("non-numeric value '" + s + "' in " + context);
  }
}

// ---- matrices ----

inline void write_matrix_csv(const std::string& path, const Matrix& m,
                             const std::vector<std::string>& labels) {
  require(static_cast<Index>(labels.size()) == m.cols(),
          "one label per column required");
  std::ofstream f(path);
  require(f.good(), "cannot open " + path + " for writing");
  for (size_t c = 0; c < labels.size(); ++c)
    f << (c ? "," : "") << labels[c];
  f << "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c)
      f << (c ? "," : "") << format_number(m(r, c));
    f << "\n";
  }
}

inline void write_bool_matrix_csv(const std::string& path, const BoolMatrix& m,
                                  const std::vector<std::string>& labels) {
  Matrix num(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) num(r, c) = m(r, c) ? 1.0 : 0.0;
  write_matrix_csv(path, num, labels);
}

struct LabeledMatrix {
  Matrix values;
  std::vector<std::string> labels;
};

inline LabeledMatrix read_matrix_csv(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(f, line)), "empty file " + path);
  LabeledMatrix out;
  out.labels = split_csv_line(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    require(fields.size() == out.labels.size(),
            "ragged row in " + path);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& s : fields) row.push_back(parse_number(s, path));
    rows.push_back(std::move(row));
  }
  out.values.resize(static_cast<Index>(rows.size()),
                    static_cast<Index>(out.labels.size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      out.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return out;
}

// ---- DAGs ----

inline void write_dag_csv(const std::string& path, const EdgeWeightDag& dag) {
  std::ofstream f(path);
  require(f.good(), "cannot open " + path + " for writing");
  f << "from,to,weight\n";
  for (Index i = 0; i < dag.size(); ++i)
    for (Index k = 0; k < dag.size(); ++k)
      if (k != i && dag.weights(i, k) > 0.0)
        f << (k + 1) << "," << (i + 1) << ","
          << format_number(dag.weights(i, k)) << "\n";
  f << "node,c_ii\n";
  for (Index i = 0; i < dag.size(); ++i)
    f << (i + 1) << "," << format_number(dag.weights(i, i)) << "\n";
}

inline EdgeWeightDag read_dag_csv(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(f, line)), "empty file " + path);
  {
    auto header = split_csv_line(line);
    require(header.size() == 3 && header[0] == "from",
            "expected 'from,to,weight' header in " + path);
  }
  struct Edge {
    Index from, to;
    double weight;
  };
  std::vector<Edge> edges;
  std::vector<std::pair<Index, double>> diagonal;
  bool in_diagonal = false;
  Index max_node = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() == 2 && fields[0] == "node") {
      in_diagonal = true;
      continue;
    }
    if (in_diagonal) {
      require(fields.size() == 2, "bad diagonal row in " + path);
      const Index node =
          static_cast<Index>(parse_number(fields[0], path)) - 1;
      diagonal.emplace_back(node, parse_number(fields[1], path));
      max_node = std::max(max_node, node);
    } else {
      require(fields.size() == 3, "bad edge row in " + path);
      Edge e{static_cast<Index>(parse_number(fields[0], path)) - 1,
             static_cast<Index>(parse_number(fields[1], path)) - 1,
             parse_number(fields[2], path)};
      require(e.from >= 0 && e.to >= 0 && e.from != e.to,
              "bad edge in " + path);
      max_node = std::max({max_node, e.from, e.to});
      edges.push_back(e);
    }
  }
  EdgeWeightDag dag{Matrix::Zero(max_node + 1, max_node + 1)};
  dag.weights.diagonal().setOnes();  // default c_ii = 1
  for (const auto& [node, value] : diagonal) {
    require(node >= 0 && node <= max_node, "diagonal node out of range");
    dag.weights(node, node) = value;
  }
  for (const auto& e : edges) {
    require(e.weight > 0.0, "edge weights must be positive");
    dag.weights(e.to, e.from) = e.weight;
  }
  validate(dag);
  return dag;
}

inline std::vector<std::string> default_labels(Index d) {
  std::vector<std::string> out;
  for (Index i = 0; i < d; ++i) out.push_back(std::to_string(i + 1));
  return out;
}

}  // namespace rmlm
