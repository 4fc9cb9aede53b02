#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "civp/civp.hpp"

namespace {

std::string env(const char* name) {
  const char* v = std::getenv(name);
  REQUIRE(v != nullptr);
  return v;
}

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  std::string bin = env("CIVP_BIN");
  std::string work = env("CIVP_WORK");
  std::string out_path = work + "/cli_out.txt";
  std::string cmd = bin + " " + args + " > " + out_path + " 2>&1";
  int status = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, ss.str()};
}

std::string problems() { return env("CIVP_PROBLEMS"); }
std::string work() { return env("CIVP_WORK"); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("prove + check round trip on the worked exponential example") {
  std::string cert = work() + "/exp.cert.json";
  auto prove = run("prove " + problems() + "/exp_error.prob --out " + cert);
  INFO(prove.output);
  CHECK(prove.exit_code == 0);
  CHECK(prove.output.find("\"status\":\"proved\"") != std::string::npos);

  auto chk = run("check " + cert);
  INFO(chk.output);
  CHECK(chk.exit_code == 0);
  CHECK(chk.output.find("\"status\":\"accept\"") != std::string::npos);

  // summary values equal certificate bindings exactly
  civp::Certificate parsed = civp::parse_certificate(read_file(cert));
  const civp::RuleApp* lda = civp::checker::find_child(parsed.root, "LDA");
  REQUIRE(lda != nullptr);
  for (const char* key : {"h", "c", "K", "M", "bound"}) {
    std::string line =
        std::string("  ") + key + ": " + lda->rat(key).str() + "\n";
    INFO("looking for ", line);
    CHECK(prove.output.find(line) != std::string::npos);
  }
}

TEST_CASE("check rejects a truncated certificate with the parse exit code") {
  std::string cert = work() + "/exp2.cert.json";
  auto prove = run("prove " + problems() + "/exp_error.prob --out " + cert);
  REQUIRE(prove.exit_code == 0);
  std::string full = read_file(cert);
  std::string broken_path = work() + "/broken.cert.json";
  std::ofstream out(broken_path);
  out << full.substr(0, full.size() / 2);
  out.close();
  auto chk = run("check " + broken_path);
  CHECK(chk.exit_code == 2);
}

TEST_CASE("check flags a tampered certificate with the reject exit code") {
  std::string cert = work() + "/exp3.cert.json";
  auto prove = run("prove " + problems() + "/exp_error.prob --out " + cert);
  REQUIRE(prove.exit_code == 0);
  civp::Certificate parsed = civp::parse_certificate(read_file(cert));
  // weaken: claim a tighter bound than certified
  civp::RuleApp* lda = nullptr;
  for (auto& c : parsed.root.children)
    if (c.rule == "LDA") lda = &c;
  REQUIRE(lda != nullptr);
  lda->rats["target"] = civp::rat_from_string("1/100000000");
  std::string tampered_path = work() + "/tampered.cert.json";
  std::ofstream out(tampered_path);
  out << civp::emit(parsed);
  out.close();
  auto chk = run("check " + tampered_path);
  CHECK(chk.exit_code == 5);
  CHECK(chk.output.find("\"status\":\"reject\"") != std::string::npos);
}

TEST_CASE("blow-up problem exits with the infeasible code and diagnostic") {
  auto res = run("prove " + problems() + "/exp_blowup.prob --max-k 8 --out " +
                 work() + "/nope.cert.json");
  CHECK(res.exit_code == 4);
  CHECK(res.output.find("enclosure-divergence") != std::string::npos);
}

TEST_CASE("picard subcommand prints the iterate") {
  auto res = run("picard " + problems() + "/exp_error.prob --k 3");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("approx x = x0 + x0*t + 1/2*x0*t^2 + 1/6*x0*t^3") !=
        std::string::npos);
}

TEST_CASE("fit subcommand round trip") {
  std::string table_path = work() + "/samples.csv";
  {
    std::ofstream t(table_path);
    t << "x0_1,t,x_1\n";
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; j <= 2; ++j) {
        double x0 = i / 2.0, tt = j / 2.0;
        t << x0 << "," << tt << "," << (x0 + 2 * tt) << "\n";
      }
  }
  auto res = run("fit " + problems() + "/const2.prob --samples " + table_path +
                 " --degree 1");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("approx x = 2*t + x0") != std::string::npos);
}

TEST_CASE("step-exist subcommand reports a duration") {
  // small N for the smoke path; the acceptance suite runs the full N = 10^4
  std::string prob = work() + "/step_small.prob";
  {
    std::ofstream p(prob);
    p << "var x; ode x' = x^2 + 1; init x = 1; horizon [0, 1];"
      << "goal step-exist alpha=1/100 N=100;";
  }
  auto res = run("step-exist " + prob + " --out " + work() + "/step.cert.json");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("duration") != std::string::npos);
  auto chk = run("check " + work() + "/step.cert.json");
  CHECK(chk.exit_code == 0);
}

TEST_CASE("exp-bound subcommand decides both directions") {
  auto ok = run("exp-bound --c 1 --K 1 --dt 5 --M 300");
  CHECK(ok.exit_code == 0);
  auto bad = run("exp-bound --c 11/10 --K 8 --dt 1/50 --M 6/5");
  CHECK(bad.exit_code == 4);
  CHECK(bad.output.find("infeasible") != std::string::npos);
}

TEST_CASE("missing input file exits with the io code") {
  auto res = run("prove /nonexistent/problem.prob");
  CHECK(res.exit_code == 3);
}

TEST_CASE("emit-external writes the export next to the certificate") {
  std::string cert = work() + "/exp4.cert.json";
  auto res = run("prove " + problems() + "/exp_error.prob --emit-external --out " +
                 cert);
  CHECK(res.exit_code == 0);
  std::string kyx = read_file(cert + ".kyx");
  CHECK(kyx.find("Problem") != std::string::npos);
  CHECK(kyx.find("eps(g,t)") != std::string::npos);
}
