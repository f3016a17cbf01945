#include "cfair/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cfair/closure.hpp"
#include "cfair/dsl.hpp"
#include "cfair/engine.hpp"
#include "cfair/proof_io.hpp"

namespace cfair::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

/// Error carrying the exit code it maps to.
struct Failure {
  int code;
  std::string kind;
  std::string message;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kConfigError, "io", "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kConfigError, "io", "cannot write '" + path + "'"};
  out << text;
  if (!out.flush()) throw Failure{kConfigError, "io", "cannot write '" + path + "'"};
}

/// "path:line:col: message" followed by the offending line and a caret.
std::string describe_parse_error(const std::string& path, const std::string& text, const dsl::ParseError& ex) {
  const auto& span = ex.span();
  std::ostringstream ss;
  ss << path << ":" << span.line << ":" << span.column << ": "
     << (ex.expected().empty() ? ex.found() : "expected " + ex.expected() + ", found " + ex.found());
  std::size_t start = 0;
  for (std::size_t l = 1; l < span.line && start < text.size(); ++l) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  auto end = text.find('\n', start);
  auto line = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
  ss << "\n  " << line << "\n  " << std::string(span.column - 1, ' ')
     << std::string(std::max<std::size_t>(span.length, 1), '^');
  return ss.str();
}

Case load_case(const std::string& path) {
  auto text = read_text(path);
  try {
    return dsl::parse_case(text);
  } catch (const dsl::ParseError& ex) {
    throw Failure{kConfigError, "parse", describe_parse_error(path, text, ex)};
  }
}

std::chrono::milliseconds oracle_timeout() {
  if (const char* env = std::getenv("CF_ORACLE_TIMEOUT_MS")) {
    try {
      auto ms = std::stoll(env);
      if (ms > 0) return std::chrono::milliseconds{ms};
    } catch (const std::exception&) {
    }
    throw Failure{kConfigError, "config", std::string("invalid CF_ORACLE_TIMEOUT_MS '") + env + "'"};
  }
  return ExternalCommandOracle::kDefaultTimeout;
}

std::unique_ptr<ClassifierOracle> load_oracle(const std::string& spec) {
  if (spec.empty()) throw Failure{kConfigError, "config", "--oracle is required"};
  try {
    return make_oracle(spec, oracle_timeout());
  } catch (const OracleError& ex) {
    throw Failure{kConfigError, "config", ex.what()};
  } catch (const ModelError& ex) {
    throw Failure{kConfigError, "config", ex.what()};
  }
}

Probability parse_epsilon(const std::string& text) {
  try {
    return Probability::parse_decimal(text);
  } catch (const ModelError& ex) {
    throw Failure{kConfigError, "config", std::string("--epsilon: ") + ex.what()};
  }
}

/// Runs `f`, translating library exceptions into Failures with exit codes.
template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Failure&) {
    throw;
  } catch (const NotCounterfactual& ex) {
    throw Failure{kNotCounterfactual, "not_counterfactual", ex.what()};
  } catch (const OracleError& ex) {
    throw Failure{kOracleError, "oracle", ex.what()};
  } catch (const ConsistencyError& ex) {
    throw Failure{kConfigError, "consistency", ex.what()};
  } catch (const ProofFormatError& ex) {
    throw Failure{kConfigError, "parse", ex.what()};
  } catch (const Error& ex) {
    throw Failure{kConfigError, "model", ex.what()};
  }
}

std::string proof_summary(const Proof& proof) {
  std::ostringstream ss;
  ss << proof.steps.size() << " steps (";
  bool first = true;
  for (auto rule : {RuleId::c_weakening, RuleId::i_cut, RuleId::tri_cut, RuleId::v_cut, RuleId::generic_cut,
                    RuleId::intervention_axiom}) {
    auto n = proof.count(rule);
    if (n == 0) continue;
    ss << (first ? "" : ", ") << n << " " << rule_name(rule);
    first = false;
  }
  ss << ")";
  return ss.str();
}

ordered_json summary_json(const Proof& proof) {
  ordered_json j;
  j["steps"] = proof.steps.size();
  for (auto rule : {RuleId::c_weakening, RuleId::i_cut, RuleId::tri_cut, RuleId::v_cut})
    j[std::string(rule_name(rule))] = proof.count(rule);
  return j;
}

struct CheckOptions {
  std::string oracle;
  std::string epsilon = "0";
  std::string format = "human";
  std::string emit_proof;
  bool lenient = false;
  unsigned jobs = 1;
};

KernelOptions kernel_options(bool lenient) { return {lenient ? EdgeMode::lenient : EdgeMode::strict}; }

struct CaseReport {
  int code = 0;
  std::string human;
  ordered_json json;
};

CaseReport check_one(const std::string& path, const ClassifierOracle& oracle, const Probability& epsilon,
                     const CheckOptions& opts) {
  CaseReport r;
  try {
    auto verdict = guarded([&] {
      auto c = load_case(path);
      return check_case(c, oracle, epsilon, kernel_options(opts.lenient));
    });
    if (!opts.emit_proof.empty()) write_text(opts.emit_proof, write_proof(verdict.proof));
    r.code = verdict.fair ? kFair : kUnfair;
    std::ostringstream ss;
    ss << (verdict.fair ? "FAIR" : "UNFAIR") << " p=" << verdict.p.to_string() << " q=" << verdict.q.to_string()
       << " Δ=" << verdict.difference.to_string() << " ε=" << verdict.epsilon.to_string() << "\n"
       << "counterfactual: " << dsl::render_judgment(verdict.counterfactual_judgment) << "\n"
       << "proof: " << proof_summary(verdict.proof) << "\n";
    r.human = ss.str();
    r.json = ordered_json{
        {"case", path},
        {"verdict", verdict.fair ? "FAIR" : "UNFAIR"},
        {"fair", verdict.fair},
        {"p", verdict.p.to_string()},
        {"q", verdict.q.to_string()},
        {"difference", verdict.difference.to_string()},
        {"epsilon", verdict.epsilon.to_string()},
        {"counterfactual_judgment", dsl::render_judgment(verdict.counterfactual_judgment)},
        {"proof_summary", summary_json(verdict.proof)},
        {"proof", ordered_json::parse(write_proof(verdict.proof))},
        {"exit_code", r.code},
    };
  } catch (const Failure& f) {
    r.code = f.code;
    r.human = (f.code == kNotCounterfactual ? "NOT-COUNTERFACTUAL " : "ERROR ") + f.message + "\n";
    r.json = ordered_json{{"case", path}, {"error", f.kind}, {"message", f.message}, {"exit_code", f.code}};
  }
  return r;
}

int cmd_check(const std::vector<std::string>& files, const CheckOptions& opts, std::ostream& out) {
  if (!opts.emit_proof.empty() && files.size() > 1)
    throw Failure{kConfigError, "config", "--emit-proof takes a single case file"};
  const auto epsilon = parse_epsilon(opts.epsilon);
  const auto oracle = load_oracle(opts.oracle);

  std::vector<CaseReport> reports(files.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(files.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (auto i = next++; i < files.size(); i = next++) reports[i] = check_one(files[i], *oracle, epsilon, opts);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  int code = 0;
  for (const auto& r : reports) code = std::max(code, r.code);
  if (opts.format == "json") {
    if (reports.size() == 1) {
      out << reports.front().json.dump(2) << "\n";
    } else {
      ordered_json all = ordered_json::array();
      for (const auto& r : reports) all.push_back(r.json);
      out << all.dump(2) << "\n";
    }
  } else {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (reports.size() > 1) out << "== " << files[i] << "\n";
      out << reports[i].human;
    }
  }
  return code;
}

int cmd_derive(const std::string& file, const CheckOptions& opts, std::ostream& out) {
  const auto oracle = load_oracle(opts.oracle);
  auto derivation = guarded([&] {
    auto c = load_case(file);
    return derive_counterfactual(c, *oracle, kernel_options(opts.lenient));
  });
  if (!opts.emit_proof.empty()) write_text(opts.emit_proof, write_proof(derivation.proof));
  if (opts.format == "json") {
    out << ordered_json{{"counterfactual_judgment", dsl::render_judgment(derivation.judgment)},
                        {"proof_summary", summary_json(derivation.proof)},
                        {"proof", ordered_json::parse(write_proof(derivation.proof))}}
               .dump(2)
        << "\n";
  } else {
    out << dsl::render_judgment(derivation.judgment) << "\n"
        << "proof: " << proof_summary(derivation.proof) << "\n";
  }
  return kFair;
}

int cmd_closure(const std::string& file, const std::string& of, std::ostream& out) {
  auto text = read_text(file);
  CausalGraph graph;
  try {
    graph = dsl::parse_graph(text);
  } catch (const dsl::ParseError& ex) {
    throw Failure{kConfigError, "parse", describe_parse_error(file, text, ex)};
  }
  if (!of.empty()) {
    auto effects = guarded([&] { return descendants(graph, VariableId{of}); });
    for (const auto& v : effects) out << v.name() << "\n";
    return kFair;
  }
  for (const auto& e : mediate_closure(graph).entries()) {
    out << e.from.name() << " -> " << e.to.name() << " {";
    bool first = true;
    for (const auto& w : e.witnesses) {
      out << (first ? "" : ", ") << w.name();
      first = false;
    }
    out << "}\n";
  }
  return kFair;
}

int cmd_verify_proof(const std::string& proof_file, const std::string& case_file, bool lenient, std::ostream& out) {
  auto c = load_case(case_file);
  auto proof = guarded([&] { return read_proof(read_text(proof_file)); });
  if (auto failure = check_proof_for_case(c, proof, kernel_options(lenient))) {
    out << "REJECTED " << failure->to_string() << "\n";
    return kUnfair;
  }
  out << "OK " << proof_summary(proof) << "\n"
      << "concludes: " << dsl::render_judgment(proof.conclusion()) << "\n";
  return kFair;
}

int cmd_parse(const std::string& file, std::ostream& out) {
  auto c = load_case(file);
  out << dsl::render_case(c);
  return kFair;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual fairness checker for probabilistic classifiers", "cfair"};
  app.require_subcommand(1);

  CheckOptions opts;
  std::vector<std::string> case_files;
  std::string single_case, proof_file, closure_file, of;

  auto add_oracle_flags = [&](CLI::App* sub) {
    sub->add_option("--oracle", opts.oracle, "csv:PATH, db:PATH or cmd:\"PROGRAM ARGS\"")->required();
    sub->add_flag("--lenient-edges", opts.lenient, "Tri-Cut without factual-graph membership");
    sub->add_option("--format", opts.format, "human or json")->check(CLI::IsMember({"human", "json"}));
  };

  auto* check = app.add_subcommand("check", "Decide counterfactual fairness for one or more cases");
  check->add_option("cases", case_files, "case files (.cfc)")->required();
  add_oracle_flags(check);
  check->add_option("--epsilon", opts.epsilon, "threshold on |p - q| (decimal, default 0)");
  check->add_option("--emit-proof", opts.emit_proof, "write the proof file here");
  check->add_option("--jobs", opts.jobs, "check case files concurrently")->check(CLI::PositiveNumber);

  auto* derive = app.add_subcommand("derive", "Derive the counterfactual judgment and its proof");
  derive->add_option("case", single_case, "case file (.cfc)")->required();
  add_oracle_flags(derive);
  derive->add_option("--emit-proof", opts.emit_proof, "write the proof file here");

  auto* closure = app.add_subcommand("closure", "List the mediate causal closure of a graph");
  closure->add_option("file", closure_file, "case file or graph file")->required();
  closure->add_option("--of", of, "only list the effects of this variable");

  auto* verify = app.add_subcommand("verify-proof", "Replay a proof file against a case");
  verify->add_option("proof", proof_file, "proof file")->required();
  verify->add_option("case", single_case, "case file (.cfc)")->required();
  verify->add_flag("--lenient-edges", opts.lenient, "Tri-Cut without factual-graph membership");

  auto* parse = app.add_subcommand("parse", "Parse a case file and print it in canonical form");
  parse->add_option("case", single_case, "case file (.cfc)")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kFair;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kFair;
  } catch (const CLI::ParseError& ex) {
    err << "cfair: " << ex.what() << "\n";
    return kConfigError;
  }

  try {
    if (*check) return cmd_check(case_files, opts, out);
    if (*derive) return cmd_derive(single_case, opts, out);
    if (*closure) return cmd_closure(closure_file, of, out);
    if (*verify) return cmd_verify_proof(proof_file, single_case, opts.lenient, out);
    if (*parse) return cmd_parse(single_case, out);
  } catch (const Failure& f) {
    err << "cfair: " << f.message << "\n";
    return f.code;
  }
  return kConfigError;
}

}  // namespace cfair::cli
