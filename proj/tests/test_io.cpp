#include "doctest.h"
#include "fixtures.hpp"
#include "rmlm/io.hpp"

#include <cstdio>
#include <filesystem>

using namespace rmlm;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("rmlm_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("matrix CSV round trip") {
  TempDir tmp;
  Matrix m(2, 3);
  m << 1.5, -2.25, 0.001, 3, 4, 5;
  write_matrix_csv(tmp.file("m.csv"), m, {"1", "2", "3"});
  const LabeledMatrix back = read_matrix_csv(tmp.file("m.csv"));
  CHECK(back.labels == std::vector<std::string>{"1", "2", "3"});
  CHECK(back.values == m);
}

TEST_CASE("DAG CSV round trip with diagonal section") {
  TempDir tmp;
  EdgeWeightDag dag = fixtures::d2_mwp();
  dag.weights(2, 2) = 1.25;  // non-default diagonal survives the round trip
  write_dag_csv(tmp.file("dag.csv"), dag);
  const EdgeWeightDag back = read_dag_csv(tmp.file("dag.csv"));
  CHECK(back.weights == dag.weights);
}

TEST_CASE("malformed inputs are rejected") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("bad.csv"));
    f << "1,2\n1.0,oops\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(tmp.file("bad.csv")), InvalidInput);
  {
    std::ofstream f(tmp.file("ragged.csv"));
    f << "1,2\n1.0\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(tmp.file("ragged.csv")), InvalidInput);
  {
    std::ofstream f(tmp.file("cycle.csv"));
    f << "from,to,weight\n1,2,0.5\n2,1,0.5\n";
  }
  CHECK_THROWS_AS(read_dag_csv(tmp.file("cycle.csv")), InvalidInput);
  CHECK_THROWS_AS(read_dag_csv(tmp.file("missing.csv")), InvalidInput);
}

TEST_CASE("number formatting is stable") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2.0) == "-2");
}
