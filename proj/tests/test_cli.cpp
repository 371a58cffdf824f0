#include <doctest.h>

#include <fstream>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "mlfd/pipeline.hpp"
#include "test_support.hpp"

using namespace mlfd;
using mlfd::testing::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "mlfd");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t fields(const std::string& line) { return std::count(line.begin(), line.end(), ',') + 1; }

}  // namespace

TEST_CASE("describe prints log volumes") {
  TempDir dir("cli_describe");
  save_pgm(GrayImage(1, 1), dir / "one.pgm");
  const auto r = run({"describe", (dir / "one.pgm").string(), "--rmax", "2"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() > 2);
  CHECK(ls[1] == "1.94591014906,2.94443897917,3.295836866,3.49650756147");

  const auto mld = run({"describe", (dir / "one.pgm").string(), "--rmax", "2", "--method", "mld",
                        "--levels", "1"});
  REQUIRE(mld.code == 0);
  const auto ml = lines(mld.out);
  CHECK(ml[ml.size() - 2] == "K_avg_1,K_avg_2,K_avg_3,K_avg_4,K_dev_1,K_dev_2,K_dev_3,K_dev_4");
  CHECK(fields(ml.back()) == 8);

  const auto files = run({"describe", (dir / "one.pgm").string(), "--rmax", "2", "--method", "mld",
                          "--levels", "1", "--out", (dir / "out").string()});
  REQUIRE(files.code == 0);
  CHECK(slurp(dir / "out" / "curve.csv") == "d_squared,volume\n1,7\n2,19\n3,27\n4,33\n");
  CHECK(std::filesystem::exists(dir / "out" / "efv.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "fd.csv"));
}

TEST_CASE("exit codes") {
  TempDir dir("cli_exit");
  const auto missing = run({"describe", (dir / "nope.pgm").string()});
  CHECK(missing.code == cli::kDataError);
  CHECK(missing.err.find("nope.pgm") != std::string::npos);

  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"describe"}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  save_pgm(GrayImage(4, 4), dir / "a.pgm");
  CHECK(run({"describe", (dir / "a.pgm").string(), "--method", "svm"}).code == cli::kUsage);
  CHECK(run({"describe", (dir / "a.pgm").string(), "--holdout", "2"}).code == cli::kUsage);

  save_pgm(GrayImage(700, 700), dir / "big.pgm");
  const auto limit = run({"describe", (dir / "big.pgm").string(), "--mem-budget", "1"});
  CHECK(limit.code == cli::kResourceLimit);
  CHECK(limit.err.find("voxels") != std::string::npos);
}

TEST_CASE("config file with flag override") {
  TempDir dir("cli_config");
  save_pgm(GrayImage(1, 1), dir / "one.pgm");
  {
    std::ofstream f(dir / "cfg.json");
    f << R"({"r_max": 3, "method": "bm"})";
  }
  const auto from_file = run({"describe", (dir / "one.pgm").string(), "--config", (dir / "cfg.json").string()});
  REQUIRE(from_file.code == 0);
  CHECK(fields(lines(from_file.out)[0]) == achievable_distances(3).size());
  const auto overridden = run({"describe", (dir / "one.pgm").string(), "--config",
                               (dir / "cfg.json").string(), "--rmax", "2"});
  REQUIRE(overridden.code == 0);
  CHECK(fields(lines(overridden.out)[0]) == 4);

  {
    std::ofstream f(dir / "bad.json");
    f << R"({"rmax": 3})";
  }
  CHECK(run({"describe", (dir / "one.pgm").string(), "--config", (dir / "bad.json").string()}).code ==
        cli::kUsage);
}

TEST_CASE("synth, scan, extract and evaluate end to end") {
  TempDir dir("cli_e2e");
  const auto data = (dir / "data").string();
  REQUIRE(run({"synth", "--out", data, "--classes", "3", "--samples", "4", "--size", "48", "--seed", "2"}).code == 0);

  const auto scan = run({"scan", data});
  REQUIRE(scan.code == 0);
  CHECK(lines(scan.out).size() == 13);
  CHECK(lines(scan.out)[0] == "path,label,index");

  const auto f1 = (dir / "f1.csv").string(), f2 = (dir / "f2.csv").string();
  REQUIRE(run({"extract", data, "--rmax", "5", "--out", f1}).code == 0);
  REQUIRE(run({"extract", data, "--rmax", "5", "--workers", "2", "--out", f2}).code == 0);
  CHECK(slurp(f1) == slurp(f2));
  const auto header = lines(slurp(f1))[0];
  CHECK(fields(header) == achievable_distances(5).size() + 1);
  CHECK(header.substr(header.size() - 6) == ",label");

  const auto e1 = (dir / "e1").string(), e2 = (dir / "e2").string();
  REQUIRE(run({"evaluate", f1, "--seed", "4", "--out", e1}).code == 0);
  REQUIRE(run({"evaluate", f1, "--seed", "4", "--out", e2}).code == 0);
  CHECK(slurp(dir / "e1" / "metrics.json") == slurp(dir / "e2" / "metrics.json"));
  CHECK(slurp(dir / "e1" / "confusion.csv") == slurp(dir / "e2" / "confusion.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "e1" / "metrics.json"));
  CHECK(j["config"]["seed"] == 4);
  CHECK(j["metrics"]["ND"] == achievable_distances(5).size());

  const auto stdout_json = run({"evaluate", f1, "--seed", "4"});
  REQUIRE(stdout_json.code == 0);
  CHECK(stdout_json.out == slurp(dir / "e1" / "metrics.json"));

  const auto fm = (dir / "fm.csv").string();
  REQUIRE(run({"extract", data, "--rmax", "5", "--method", "mld", "--levels", "2", "--min-cell", "16", "--out", fm}).code == 0);
  const auto em = run({"evaluate", fm, "--method", "mld"});
  REQUIRE(em.code == 0);
  CHECK(nlohmann::json::parse(em.out)["metrics"]["ND"].get<int>() <= 2 * static_cast<int>(achievable_distances(5).size()));

  std::ofstream(dir / "junk.csv") << "a,b\n1,2\n";
  CHECK(run({"evaluate", (dir / "junk.csv").string()}).code == cli::kDataError);
}
