#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "civp/civp.hpp"

namespace {

// Exit codes (stable, documented in the README):
//   0 success, 2 parse error, 3 I/O error, 4 infeasible, 5 certificate
//   rejected, 6 budget exhausted, 7 usage error.
enum ExitCode {
  kOk = 0,
  kParseError = 2,
  kIoError = 3,
  kInfeasible = 4,
  kReject = 5,
  kBudget = 6,
  kUsage = 7,
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << content;
}

void print_diag(const std::string& status, const std::string& code,
                const std::string& message) {
  civp::json j{{"status", status}, {"code", code}, {"message", message}};
  std::cout << j.dump() << "\n";
}

int exit_for_infeasible(const civp::Infeasible& inf) {
  print_diag("infeasible", inf.code, inf.message);
  return inf.code == "budget-exhausted" ? kBudget : kInfeasible;
}

struct CommonOpts {
  std::string out;
  long budget_nodes = 400000;
  int max_k = 48;
  int max_n = 600;
  int threads = 1;
  bool emit_external = false;
};

civp::ProverOptions prover_options(const CommonOpts& c) {
  civp::ProverOptions opts;
  opts.engine.oracle_budget = c.budget_nodes;
  opts.engine.max_k = c.max_k;
  opts.engine.exp_n_budget = c.max_n;
  opts.region_budget = std::max(256L, c.budget_nodes / 100);
  return opts;
}

void print_error_summary(const civp::Certificate& cert) {
  const civp::RuleApp* dc = &cert.root;
  if (cert.kind != "error-bound") {
    for (const auto& ch : cert.root.children)
      if (ch.rule == "dC") {
        dc = &ch;
        break;
      }
    if (cert.kind == "liveness") {
      if (const auto* bdg = civp::checker::find_child(cert.root, "BDG<>"))
        if (!bdg->children.empty()) dc = &bdg->children[0];
    }
  }
  const civp::RuleApp* lda = civp::checker::find_child(*dc, "LDA");
  if (!lda) return;
  std::cout << "  k: " << lda->intval("k") << "\n";
  for (const char* key : {"h", "c", "K", "M", "delta", "e0", "bound"})
    std::cout << "  " << key << ": " << lda->rat(key).str() << "\n";
}

int write_certificate(const civp::Certificate& cert, const CommonOpts& opts,
                      const std::string& input_path) {
  std::string path =
      opts.out.empty() ? input_path + ".cert.json" : opts.out;
  std::string bytes = civp::emit(cert);
  write_file(path, bytes);
  std::cout << "certificate: " << path << " (" << bytes.size()
            << " bytes)\n";
  if (opts.emit_external &&
      (cert.kind == "error-bound" || cert.kind == "safety")) {
    std::string kyx = civp::export_external(cert);
    write_file(path + ".kyx", kyx);
    std::cout << "external export: " << path << ".kyx\n";
  }
  return kOk;
}

int cmd_prove(const std::string& input, const CommonOpts& copts) {
  civp::Problem prob = civp::parse_problem(read_file(input));
  civp::ProverOptions opts = prover_options(copts);
  std::cout << "goal: " << civp::goal_kind_name(prob.goal) << "\n";

  if (const auto* g = std::get_if<civp::GoalErrorBound>(&prob.goal)) {
    auto fam = civp::detail::problem_family(prob);
    auto outcome = civp::prove_error_bound_certified(prob, fam, g->epsilon,
                                                     opts.engine);
    if (const auto* inf = std::get_if<civp::Infeasible>(&outcome))
      return exit_for_infeasible(*inf);
    auto& res = std::get<civp::ErrorBoundResult>(outcome);
    print_diag("proved", "error-bound", "certified bound " + res.bound.str());
    print_error_summary(res.certificate);
    return write_certificate(res.certificate, copts, input);
  }
  civp::ProveOutcome outcome;
  if (std::holds_alternative<civp::GoalSafety>(prob.goal)) {
    outcome = civp::prove_bounded_safety(prob, opts);
  } else if (std::holds_alternative<civp::GoalLiveness>(prob.goal)) {
    outcome = civp::prove_liveness(prob, opts);
  } else if (std::holds_alternative<civp::GoalExistsUntil>(prob.goal)) {
    outcome = civp::prove_existence(prob, opts);
  } else {
    const auto& g = std::get<civp::GoalStepExist>(prob.goal);
    auto res = civp::step_existence(prob, g.alpha, g.steps, opts);
    if (const auto* inf = std::get_if<civp::Infeasible>(&res))
      return exit_for_infeasible(*inf);
    auto& sr = std::get<civp::StepExistenceResult>(res);
    print_diag("proved", "step-exist",
               "duration lower bound " + sr.duration.str());
    std::cout << "  duration: " << sr.duration.str() << " (~"
              << sr.duration.to_double() << ")\n";
    return write_certificate(sr.certificate, copts, input);
  }
  if (const auto* inf = std::get_if<civp::Infeasible>(&outcome))
    return exit_for_infeasible(*inf);
  const auto& cert = std::get<civp::Certificate>(outcome);
  print_diag("proved", cert.kind, "certificate assembled");
  print_error_summary(cert);
  return write_certificate(cert, copts, input);
}

int cmd_check(const std::string& input) {
  civp::Certificate cert = civp::parse_certificate(read_file(input));
  civp::CheckResult res = civp::check(cert);
  if (res.ok) {
    print_diag("accept", cert.kind, "all leaves and structure verified");
    return kOk;
  }
  print_diag("reject", res.node, res.reason);
  return kReject;
}

int cmd_picard(const std::string& input, int k, int cap,
               const CommonOpts& copts) {
  civp::Problem prob = civp::parse_problem(read_file(input));
  civp::ApproximantPoly a = civp::picard_iterate(prob.ivp, k, cap);
  std::ostringstream os;
  for (size_t i = 0; i < a.phi.size(); ++i)
    os << "approx " << prob.ivp.state_vars()[i] << " = " << a.phi[i].str()
       << ";\n";
  if (copts.out.empty())
    std::cout << os.str();
  else
    write_file(copts.out, os.str());
  return kOk;
}

int cmd_fit(const std::string& input, const std::string& samples_path,
            int degree, const CommonOpts& copts) {
  civp::Problem prob = civp::parse_problem(read_file(input));
  civp::SampleTable table =
      civp::read_sample_table(read_file(samples_path), prob.ivp.dim());
  civp::ApproximantPoly a = civp::fit_from_samples(table, prob.ivp, degree);
  std::ostringstream os;
  for (size_t i = 0; i < a.phi.size(); ++i)
    os << "approx " << prob.ivp.state_vars()[i] << " = " << a.phi[i].str()
       << ";\n";
  if (copts.out.empty())
    std::cout << os.str();
  else
    write_file(copts.out, os.str());
  return kOk;
}

int cmd_step_exist(const std::string& input, const CommonOpts& copts) {
  civp::Problem prob = civp::parse_problem(read_file(input));
  const auto* g = std::get_if<civp::GoalStepExist>(&prob.goal);
  if (!g) {
    print_diag("error", "usage", "problem goal is not step-exist");
    return kUsage;
  }
  auto res = civp::step_existence(prob, g->alpha, g->steps,
                                  prover_options(copts));
  if (const auto* inf = std::get_if<civp::Infeasible>(&res))
    return exit_for_infeasible(*inf);
  auto& sr = std::get<civp::StepExistenceResult>(res);
  print_diag("proved", "step-exist",
             "duration lower bound " + sr.duration.str());
  std::cout << "  duration: " << sr.duration.str() << " (~"
            << sr.duration.to_double() << ")\n";
  return write_certificate(sr.certificate, copts, input);
}

int cmd_exp_bound(const std::string& c_s, const std::string& k_s,
                  const std::string& dt_s, const std::string& m_s) {
  civp::Rat c = civp::rat_from_string(c_s);
  civp::Rat K = civp::rat_from_string(k_s);
  civp::Rat dt = civp::rat_from_string(dt_s);
  civp::Rat M = civp::rat_from_string(m_s);
  auto res = civp::exp_upper(c, K, dt, M);
  if (const auto* proof = std::get_if<civp::ExpUpperProof>(&res)) {
    print_diag("proved", "exp-bound",
               "n = " + std::to_string(proof->theta.n) + ", certified max " +
                   proof->cert_max.str());
    return kOk;
  }
  if (const auto* inf = std::get_if<civp::ExpInfeasible>(&res)) {
    print_diag("infeasible", "exp-bound",
               "series lower bound " + inf->series_lower.str() + " (~" +
                   std::to_string(inf->series_lower.to_double()) +
                   ") exceeds the requested cap");
    return kInfeasible;
  }
  print_diag("unknown", "exp-bound", "budget exhausted near the boundary");
  return kBudget;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "civp: proof-generating rigorous numerics for polynomial compact "
      "IVPs"};
  app.require_subcommand(1);

  CommonOpts copts;
  std::string input, samples;
  int k = 1, cap = -1, degree = 3;
  std::string ec, eK, edt, eM;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", copts.out, "output path for artifacts");
    cmd->add_option("--budget-nodes", copts.budget_nodes,
                    "oracle subdivision node budget");
    cmd->add_option("--max-k", copts.max_k, "approximant index cap");
    cmd->add_option("--max-n", copts.max_n, "exponential degree cap");
    cmd->add_option("--threads", copts.threads,
                    "worker threads (results are thread-count independent)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--emit-external", copts.emit_external,
                  "also write the external proof-assistant export");
  };

  CLI::App* prove = app.add_subcommand("prove", "prove the goal in a problem file");
  prove->add_option("problem", input, "problem file")->required();
  add_common(prove);

  CLI::App* chk = app.add_subcommand("check", "re-verify a certificate");
  chk->add_option("certificate", input, "certificate file")->required();

  CLI::App* pic = app.add_subcommand("picard", "print a Picard iterate");
  pic->add_option("problem", input)->required();
  pic->add_option("--k", k, "iterate index")->required();
  pic->add_option("--t-degree-cap", cap, "truncate t-degree (-1: none)");
  add_common(pic);

  CLI::App* fit = app.add_subcommand("fit", "fit an approximant from samples");
  fit->add_option("problem", input)->required();
  fit->add_option("--samples", samples, "trajectory sample table")->required();
  fit->add_option("--degree", degree, "fit degree");
  add_common(fit);

  CLI::App* step = app.add_subcommand("step-exist",
                                      "chain Picard existence steps");
  step->add_option("problem", input)->required();
  add_common(step);

  CLI::App* expb = app.add_subcommand("exp-bound",
                                      "decide g=c, g'=Kg |- g<=M on [0,dt]");
  expb->add_option("--c", ec)->required();
  expb->add_option("--K", eK)->required();
  expb->add_option("--dt", edt)->required();
  expb->add_option("--M", eM)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (prove->parsed()) return cmd_prove(input, copts);
    if (chk->parsed()) return cmd_check(input);
    if (pic->parsed()) return cmd_picard(input, k, cap, copts);
    if (fit->parsed()) return cmd_fit(input, samples, degree, copts);
    if (step->parsed()) return cmd_step_exist(input, copts);
    if (expb->parsed()) return cmd_exp_bound(ec, eK, edt, eM);
  } catch (const civp::parse_error& e) {
    print_diag("error", "parse", e.what());
    return kParseError;
  } catch (const std::ios_base::failure& e) {
    print_diag("error", "io", e.what());
    return kIoError;
  } catch (const civp::domain_error& e) {
    print_diag("error", "domain", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    print_diag("error", "internal", e.what());
    return kUsage;
  }
  return kUsage;
}
