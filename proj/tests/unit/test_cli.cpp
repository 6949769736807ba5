#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() { return DIMPUTE_CLI_PATH; }

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "dimpute_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  std::string command = cli() + " " + args + " >/dev/null 2>&1";
  int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("validate exits zero on the product fixture") {
  CHECK(run("validate --schema " + testsupport::data_path("product.schema.json") + " --input " +
            testsupport::data_path("product.csv")) == 0);
}

TEST_CASE("validate exits nonzero on a broken schema document") {
  auto dir = temp_dir();
  auto bad = dir / "bad.schema.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run("validate --schema " + bad.string()) != 0);
}

TEST_CASE("impute happy path writes the completed table and a report") {
  auto dir = temp_dir();
  auto out = dir / "done.csv";
  auto report = dir / "report.txt";
  int code = run("impute --schema " + testsupport::data_path("product.schema.json") +
                 " --input " + testsupport::data_path("product.csv") + " --out " + out.string() +
                 " --k 5 --level-weight incremental --hierarchy-weight dependency --report " +
                 report.string());
  CHECK(code == 0);
  std::string csv = slurp(out);
  CHECK(csv.find("P1,Choco,S1,Sub1,C1") != std::string::npos);
  std::string rep = slurp(report);
  CHECK(rep.find("missing_after=0") != std::string::npos);
}

TEST_CASE("inject then impute with ground truth reports accuracy") {
  auto dir = temp_dir();
  auto masked = dir / "masked.csv";
  auto truth = dir / "truth.csv";
  auto done = dir / "imputed.csv";
  auto report = dir / "acc_report.txt";
  auto prefix = (dir / "synth").string();

  CHECK(run("gen --out-prefix " + prefix + " --rows 120 --groups 4 --children 3 --seed 7") == 0);
  CHECK(run("inject --schema " + prefix + ".schema.json --input " + prefix +
            ".csv --out " + masked.string() + " --truth " + truth.string() +
            " --rate 0.2 --seed 9") == 0);
  CHECK(run("impute --schema " + prefix + ".schema.json --input " + masked.string() +
            " --out " + done.string() + " --truth " + truth.string() + " --report " +
            report.string()) == 0);
  std::string rep = slurp(report);
  CHECK(rep.find("accuracy_overall=") != std::string::npos);
}

TEST_CASE("unknown flags fail with a nonzero exit") {
  CHECK(run("impute --nonsense") != 0);
  CHECK(run("") != 0);  // a subcommand is required
}

TEST_CASE("bench writes identical reports for identical seeds") {
  auto dir = temp_dir();
  auto prefix = (dir / "bench_data").string();
  CHECK(run("gen --out-prefix " + prefix + " --rows 80 --groups 3 --children 3 --seed 1") == 0);
  auto r1 = dir / "bench1.txt";
  auto r2 = dir / "bench2.txt";
  std::string base = "bench --schema " + prefix + ".schema.json --input " + prefix +
                     ".csv --rates 5,10 --repeats 2 --methods h_olapknn,mode --seed 21 --report ";
  CHECK(run(base + r1.string()) == 0);
  CHECK(run(base + r2.string()) == 0);
  std::string a = slurp(r1);
  CHECK(!a.empty());
  CHECK(a == slurp(r2));
}
