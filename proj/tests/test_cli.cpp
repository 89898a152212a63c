#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "cdbn_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CDBN_CLI) + " " + args + " >" + (workdir() / "stdout.txt").string() +
                          " 2>" + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string w(const std::string& name) { return (workdir() / name).string(); }

// One simulated replicate shared by several cases.
const fs::path& simulated() {
  static const fs::path rep = [] {
    REQUIRE(run("simulate --replicates 1 --seed 3 --regime fixed --out " + w("sim")) == 0);
    return workdir() / "sim" / "rep_000";
  }();
  return rep;
}

}  // namespace

TEST_CASE("simulate writes a complete replicate") {
  const auto rep = simulated();
  for (const char* f : {"data.csv", "design.json", "truth.csv", "coefficients.csv"})
    CHECK(fs::exists(rep / f));
  CHECK(fs::exists(workdir() / "sim" / "manifest.json"));
  const auto design = nlohmann::json::parse(slurp(rep / "design.json"));
  CHECK(design.size() == 4);
}

TEST_CASE("scheme none equals a design whose conditions have no targets") {
  const auto data = (simulated() / "data.csv").string();
  write(workdir() / "empty.json", R"({"none":[],"Ai":[],"Bi":[],"Ai+Bi":[]})");
  REQUIRE(run("infer --data " + data + " --scheme none --out " + w("inf_none")) == 0);
  REQUIRE(run("infer --data " + data + " --design " + w("empty.json") + " --scheme perfect-fixed --out " +
              w("inf_empty")) == 0);
  CHECK(slurp(workdir() / "inf_none" / "edges.csv") == slurp(workdir() / "inf_empty" / "edges.csv"));
}

TEST_CASE("infer outputs and reruns are byte-identical") {
  const auto data = (simulated() / "data.csv").string();
  const auto design = (simulated() / "design.json").string();
  for (const char* out : {"inf_a", "inf_b"})
    REQUIRE(run("infer --data " + data + " --design " + design + " --dump-design --out " + w(out)) == 0);
  for (const char* f : {"edges.csv", "posterior.json", "fitted.csv", "network.dot"})
    CHECK(slurp(workdir() / "inf_a" / f) == slurp(workdir() / "inf_b" / f));
  CHECK(fs::exists(workdir() / "inf_a" / "designs" / "0_A.csv"));

  const auto m = nlohmann::json::parse(slurp(workdir() / "inf_a" / "manifest.json"));
  const auto m2 = nlohmann::json::parse(slurp(workdir() / "inf_b" / "manifest.json"));
  CHECK(m["config"] == m2["config"]);
  CHECK(m["inputs"] == m2["inputs"]);
  CHECK(m["config"]["scheme"] == "perfect-fixed");
  CHECK(m["inputs"][0]["sha256"].get<std::string>().size() == 64);
  CHECK(!m["version"].get<std::string>().empty());

  const auto post = nlohmann::json::parse(slurp(workdir() / "inf_a" / "posterior.json"));
  CHECK(post.size() == 15);
  CHECK(post[0]["top_models"].size() == 5);
}

TEST_CASE("exit codes") {
  CHECK(run("infer --data " + w("missing.csv") + " --out " + w("x")) == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("infer --data " + (simulated() / "data.csv").string() + " --lambda 2 --out " + w("x")) == 1);
  CHECK(slurp(workdir() / "stderr.txt").find("\"error\":\"input\"") != std::string::npos);
  CHECK(run("infer --data " + (simulated() / "data.csv").string() + " --threshold 1.5 --out " + w("x")) == 1);

  write(workdir() / "bad.csv", "condition,time,X,Y\nc,0,1,abc\nc,1,2,3\n");
  CHECK(run("infer --data " + w("bad.csv") + " --scheme none --out " + w("x")) == 1);

  // A constant node leaves no model with a usable quadratic form.
  write(workdir() / "const.csv", "condition,time,X,Y\nc,0,1,5\nc,1,2,5\nc,2,4,5\nc,3,3,5\nd,0,1,5\nd,1,3,5\nd,2,2,5\nd,3,5,5\n");
  CHECK(run("infer --data " + w("const.csv") + " --scheme none --indegree 1 --out " + w("x")) == 2);
  CHECK(slurp(workdir() / "stderr.txt").find("\"error\":\"numerical\"") != std::string::npos);
}

TEST_CASE("48 nodes with a prior network") {
  std::ostringstream csv, prior;
  csv << "condition,time";
  for (int k = 0; k < 48; ++k) csv << ",P" << k;
  csv << '\n';
  std::mt19937_64 gen(48);
  std::normal_distribution<double> z;
  for (const char* c : {"DMSO", "EGFRi"})
    for (int t = 0; t < 8; ++t) {
      csv << c << ',' << t;
      for (int k = 0; k < 48; ++k) csv << ',' << z(gen);
      csv << '\n';
    }
  write(workdir() / "p48.csv", csv.str());
  prior << "parent,child\n";
  for (int k = 1; k < 48; ++k) prior << "P0,P" << k << '\n';
  write(workdir() / "p48_prior.csv", prior.str());
  write(workdir() / "p48.json", R"({"DMSO":[],"EGFRi":["P0"]})");
  REQUIRE(run("infer --data " + w("p48.csv") + " --design " + w("p48.json") +
              " --scheme perfect-fixed --direction out --indegree 2 --lambda 4 --prior " + w("p48_prior.csv") +
              " --out " + w("p48")) == 0);
  const auto m = nlohmann::json::parse(slurp(workdir() / "p48" / "manifest.json"));
  CHECK(m["config"]["lambda"] == 4.0);
  CHECK(m["config"]["indegree"] == 2);
  const auto post = nlohmann::json::parse(slurp(workdir() / "p48" / "posterior.json"));
  CHECK(post[5]["num_models"].get<int>() + post[5]["excluded"].size() == 1177);
}

TEST_CASE("evaluate edge and descendancy ROC") {
  const auto rep = simulated();
  const auto edges = (workdir() / "inf_a" / "edges.csv").string();
  REQUIRE(run("evaluate --edges " + edges + " --truth " + (rep / "truth.csv").string() + " --out " + w("ev")) == 0);
  const auto s = nlohmann::json::parse(slurp(workdir() / "ev" / "summary.json"));
  CHECK(s["auc"].get<double>() > 0.5);
  CHECK(slurp(workdir() / "ev" / "roc.csv").rfind("threshold,fpr,tpr", 0) == 0);

  REQUIRE(run("evaluate --edges " + edges + " --edges " + edges + " --truth " + (rep / "truth.csv").string() +
              " --truth " + (rep / "truth.csv").string() + " --aggregate --out " + w("ev2")) == 0);
  const auto s2 = nlohmann::json::parse(slurp(workdir() / "ev2" / "summary.json"));
  CHECK(s2["auc"].get<double>() == doctest::Approx(s["auc"].get<double>()));
  CHECK(s2["positives"] == 2 * s["positives"].get<int>());

  CHECK(run("evaluate --edges " + edges + " --mode children --data " + (rep / "data.csv").string() + " --design " +
            (rep / "design.json").string() + " --target A --out " + w("ev3")) == 0);
  CHECK(run("evaluate --edges " + edges + " --mode cousins --data " + (rep / "data.csv").string() + " --design " +
            (rep / "design.json").string() + " --target A --out " + w("ev4")) == 1);
}

TEST_CASE("study: one regime, one method, reproducible") {
  const std::string args = " --replicates 1 --seed 7 --regimes perfect --methods correlations --out ";
  REQUIRE(run("study" + args + w("st1")) == 0);
  REQUIRE(run("study" + args + w("st2")) == 0);
  const auto table = slurp(workdir() / "st1" / "auc_table.csv");
  CHECK(table == slurp(workdir() / "st2" / "auc_table.csv"));
  CHECK(slurp(workdir() / "st1" / "auc_replicates.csv") == slurp(workdir() / "st2" / "auc_replicates.csv"));
  std::istringstream lines(table);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "regime,correlations");
  CHECK(row.rfind("perfect,", 0) == 0);
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(fs::exists(workdir() / "st1" / "roc" / "perfect__correlations.csv"));
}
