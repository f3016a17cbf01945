// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runs the library in-process and the cfair binary as a subprocess.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "cfair/closure.hpp"
#include "cfair/dsl.hpp"
#include "cfair/engine.hpp"
#include "cfair/oracle.hpp"
#include "cfair/proof_io.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cfair;
using namespace cfair::testing;

namespace {

// Pinned limits.
constexpr auto kMaxCheckTime = std::chrono::milliseconds(1000);
constexpr int kClosureTrials = 250;
constexpr int kCommuteTrials = 150;
constexpr int kMutationsPerProof = 20;
constexpr int kFrequencyTrials = 300;
constexpr int kRoundTrips = 600;
constexpr int kFuzzInputs = 1000;

struct Outcome {
  bool ok = true;
  std::ostringstream note;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) note << what;
    ok = ok && cond;
  }
};

struct Run {
  int code;
  std::string out;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

Run run_cli(const std::string& args) {
  const auto cmd = quote(CFAIR_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string fx(const char* name) { return quote(fixture_path(name)); }

OracleQuery query(std::vector<Attribution> as, const char* target, const ValueTerm& value) {
  return OracleQuery{DataPoint{std::move(as)}, var(target), value};
}

Judgment with_prob(const Judgment& j, Probability p) { return Judgment{j.context(), j.target(), j.value(), p}; }

// --- criteria ---------------------------------------------------------------

void loan_case_is_fair(Outcome& o) {
  const auto c = dsl::parse_case(read_fixture("loan_ms.cfc"));
  const auto oracle = JudgmentDbOracle::load(fixture_path("loan_ms.db"));
  const auto v = check_case(c, oracle, Probability::zero());
  o.require(v.fair, "verdict not fair; ");
  o.require(v.p == Probability::ratio(3, 5) && v.q == Probability::ratio(3, 5), "p or q is not 3/5; ");
  o.require(!check_proof(v.proof) && !check_proof_for_case(c, v.proof), "proof does not replay; ");
  o.require(v.proof.count(RuleId::c_weakening) == 1 && v.proof.count(RuleId::i_cut) == 1 &&
                v.proof.count(RuleId::tri_cut) == 9 && v.proof.count(RuleId::v_cut) == 3,
            "step counts differ from 1/1/9/3; ");

  const auto start = std::chrono::steady_clock::now();
  auto r = run_cli("check " + fx("loan_ms.cfc") + " --oracle " + quote("db:" + fixture_path("loan_ms.db")) +
                   " --format json");
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  o.require(r.code == 0, "cli exit " + std::to_string(r.code) + "; ");
  auto doc = nlohmann::json::parse(r.out, nullptr, false);
  o.require(!doc.is_discarded() && doc.value("verdict", "") == "FAIR", "cli verdict; ");
  o.require(elapsed < kMaxCheckTime, "took " + std::to_string(elapsed.count()) + " ms; ");
  o.note << "p=q=" << v.q.to_string() << ", " << v.proof.steps.size() << " steps, cli " << elapsed.count() << " ms";
}

void unfair_db_and_threshold(Outcome& o) {
  const auto c = dsl::parse_case(read_fixture("loan_ms.cfc"));
  const auto oracle = JudgmentDbOracle::load(fixture_path("loan_ms_unfair.db"));
  const auto v = check_case(c, oracle, Probability::zero());
  o.require(!v.fair && v.difference == Probability::ratio(1, 10), "difference is not exactly 1/10; ");
  const auto db = quote("db:" + fixture_path("loan_ms_unfair.db"));
  auto strict = run_cli("check " + fx("loan_ms.cfc") + " --oracle " + db + " --format json");
  auto doc = nlohmann::json::parse(strict.out, nullptr, false);
  o.require(strict.code == 1, "exit " + std::to_string(strict.code) + " at epsilon 0; ");
  o.require(!doc.is_discarded() && doc.value("difference", "") == "0.10", "reported difference; ");
  auto loose = run_cli("check " + fx("loan_ms.cfc") + " --oracle " + db + " --epsilon 0.10");
  o.require(loose.code == 0 && loose.out.starts_with("FAIR"), "not fair at epsilon 0.10; ");
  o.note << "difference " << v.difference.to_string() << ", exits " << strict.code << "/" << loose.code;
}

void closure_matches_path_enumeration(Outcome& o) {
  Rng rng{1001};
  int mismatches = 0;
  for (int i = 0; i < kClosureTrials; ++i) {
    const auto n = uniform(rng, 1, 10);
    const auto g = random_dag(rng, n, uniform(rng, 0, 50) / 100.0);
    if (mediate_closure(g).raw() != brute_force_closure(g)) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches; ");
  o.note << kClosureTrials << " graphs, " << mismatches << " mismatches";
}

void loan_effects_and_candidate(Outcome& o) {
  auto r = run_cli("closure " + fx("loan_ms.cfc") + " --of MS");
  o.require(r.code == 0 && r.out == "Exp\nGAI\nLoan\nMS\n", "closure --of MS printed '" + r.out + "'; ");
  const auto cand = build_candidate(loan_case());
  const std::set<Attribution> got(cand.datapoint.begin(), cand.datapoint.end());
  const std::set<Attribution> want{attr("MS", "div"), attr("G", "m"), attr("SAT", "1100"), attr("Deg", "PhD")};
  o.require(got == want, "candidate data point differs; ");
  o.note << "effects {Exp, GAI, Loan, MS}, candidate of size " << got.size();
}

void cut_commutes_with_axiom(Outcome& o) {
  Rng rng{1002};
  int agreed = 0;
  for (int i = 0; i < kCommuteTrials; ++i) {
    const auto e = random_intervention_expr(rng);
    std::vector<ContextItem> rest{e.intervention().as_attribution()};
    for (const auto& edge : e.graph().edges())
      if (coin(rng)) rest.emplace_back(edge);
    for (const auto& a : e.datapoint())
      if (coin(rng) && !(a.var == e.intervention().var)) rest.emplace_back(a);
    std::shuffle(rest.begin(), rest.end(), rng);
    const VariableId target{"T"};
    const auto value = random_value_term(rng);
    const auto p = random_probability(rng);

    std::vector<ContextItem> full = rest;
    full.insert(full.begin() + static_cast<std::ptrdiff_t>(uniform(rng, 0, full.size())), e);
    const Judgment j{full, target, value, p};
    const Judgment without{rest, target, value, p};
    const auto via_cut = generic_cut(intervention_axiom(e), without);
    const auto via_rule = apply_i_cut(j);
    if (same_multiset(via_cut.context(), via_rule.context()) && via_cut.same_conclusion(via_rule)) ++agreed;
  }
  o.require(agreed == kCommuteTrials, std::to_string(kCommuteTrials - agreed) + " disagreements; ");
  o.note << agreed << "/" << kCommuteTrials << " judgments agree";
}

struct Mutation {
  std::string name;
  Proof proof;
  std::size_t step;
  Violation expected;
};

std::vector<Mutation> mutations_of(const Case& c, const Proof& proof) {
  std::vector<Mutation> out;
  const auto& iv = c.intervention.var;
  const auto effects = descendants(c.graph, iv);
  std::vector<Attribution> effect_attrs;
  for (const auto& a : c.factual)
    if (effects.contains(a.var)) effect_attrs.push_back(a);
  const auto base = proof.assumptions.size();

  for (std::size_t s = 0; s < proof.steps.size(); ++s) {
    const auto& step = proof.steps[s];
    if (step.rule == RuleId::tri_cut) {
      auto m = proof;
      m.steps[s].item = Edge{step.item.edge().from, iv};
      out.push_back({"retarget edge", std::move(m), s, Violation::condition_star});
    }
    if (step.rule != RuleId::c_weakening && !effect_attrs.empty()) {
      auto m = proof;
      m.steps[s].rule = RuleId::v_cut;
      m.steps[s].item = effect_attrs[s % effect_attrs.size()];
      out.push_back({"cut an effect", std::move(m), s, Violation::condition_double_star});
    }
    {
      auto m = proof;
      const auto& j = step.conclusion;
      auto bumped = j.prob() == Probability::one() ? Probability::zero() : Probability::one();
      m.steps[s].conclusion = with_prob(j, bumped);
      out.push_back({"edit probability", std::move(m), s, Violation::conclusion_mismatch});
    }
    {
      auto m = proof;
      m.steps[s].premises = {base + s};
      out.push_back({"premise on itself", std::move(m), s, Violation::premise_order});
    }
    if (s + 1 < proof.steps.size()) {
      auto m = proof;
      m.steps[s].premises = {base + s + 1};
      out.push_back({"premise on a later step", std::move(m), s, Violation::premise_order});
    }
    if (s + 1 < proof.steps.size() && step.rule == proof.steps[s + 1].rule &&
        (step.rule == RuleId::tri_cut || step.rule == RuleId::v_cut)) {
      auto m = proof;
      std::swap(m.steps[s].item, m.steps[s + 1].item);
      out.push_back({"swap items", std::move(m), s, Violation::conclusion_mismatch});
    }
  }
  return out;
}

void mutated_proofs_rejected(Outcome& o) {
  const std::vector<std::pair<const char*, const char*>> fixtures{{"loan_ms.cfc", "loan_ms.db"},
                                                                  {"loan_gender.cfc", "loan_gender.db"},
                                                                  {"loan_override.cfc", "loan_ms.db"},
                                                                  {"age.cfc", "age.db"}};
  std::size_t total = 0, rejected = 0;
  for (const auto& [file, db] : fixtures) {
    const auto c = dsl::parse_case(read_fixture(file));
    const auto d = derive_counterfactual(c, JudgmentDbOracle::load(fixture_path(db)));
    // The proof file is the unit under test, so mutate what a reader sees.
    const auto proof = read_proof(write_proof(d.proof));
    const auto ms = mutations_of(c, proof);
    o.require(ms.size() >= kMutationsPerProof, std::string(file) + ": only " + std::to_string(ms.size()) + " mutations; ");
    for (const auto& m : ms) {
      ++total;
      const auto failure = check_proof(m.proof);
      if (failure && failure->step == m.step && failure->reason == m.expected) {
        ++rejected;
      } else {
        o.require(false, std::string(file) + ": " + m.name + " at step " + std::to_string(m.step) + " gave " +
                             (failure ? failure->to_string() : "acceptance") + "; ");
      }
    }
  }
  o.note << rejected << "/" << total << " mutations rejected with the expected label";
}

void frequencies_are_exact(Outcome& o) {
  const auto table = CsvTable::load(fixture_path("loans20.csv"));
  const auto yes = atom("yes");
  const auto sum = [](const char* a, const char* b) { return ValueTerm::sum({atom(a), atom(b)}); };
  const auto cmp = [](const ValueTerm& t) { return ValueTerm::complement(t); };
  const std::vector<std::pair<OracleQuery, Probability>> hand{
      {query({attr("G", "m")}, "Loan", yes), Probability::ratio(5, 11)},
      {query({attr("G", "m"), {var("MS"), sum("married", "divorced")}}, "Loan", yes), Probability::ratio(4, 7)},
      {query({{var("Etn"), cmp(atom("white"))}}, "Loan", yes), Probability::ratio(6, 11)},
      {query({{var("MS"), cmp(sum("single", "widowed"))}, attr("Etn", "white")}, "Loan", yes), Probability::ratio(2, 3)},
      {query({}, "Loan", yes), Probability::ratio(11, 20)},
      {query({attr("G", "f")}, "Loan", cmp(yes)), Probability::ratio(1, 3)},
      {query({{var("Age"), sum("27", "35")}, {var("G"), cmp(atom("m"))}}, "Loan", yes), Probability::ratio(2, 3)},
  };
  for (const auto& [q, want] : hand)
    o.require(csv_frequency_query(table, q) == want, "hand count " + want.to_string() + " differs; ");

  Rng rng{1003};
  const std::vector<std::string> cells{"a", "b", "c"};
  int mismatches = 0;
  for (int i = 0; i < kFrequencyTrials; ++i) {
    const auto ncols = uniform(rng, 2, 5);
    std::vector<std::string> header;
    for (std::size_t col = 0; col < ncols; ++col) header.push_back("C" + std::to_string(col));
    std::vector<std::vector<std::string>> rows(uniform(rng, 1, 50));
    for (auto& row : rows)
      for (std::size_t col = 0; col < ncols; ++col) row.push_back(cells[uniform(rng, 0, cells.size() - 1)]);
    const CsvTable t{header, rows};
    auto term = [&] {
      auto v = ValueTerm::atom(cells[uniform(rng, 0, cells.size() - 1)]);
      return coin(rng, 0.3) ? ValueTerm::complement(v) : v;
    };
    const auto target = uniform(rng, 0, ncols - 1);
    std::vector<Attribution> as;
    for (std::size_t col = 0; col < ncols; ++col)
      if (col != target && coin(rng, 0.4)) as.push_back({VariableId{header[col]}, term()});
    const OracleQuery q{DataPoint{as}, VariableId{header[target]}, term()};
    const auto want = brute_force_frequency(t, q);
    try {
      const auto got = csv_frequency_query(t, q);
      if (!want || got != Probability::ratio(want->first, want->second)) ++mismatches;
    } catch (const OracleError& ex) {
      if (want || ex.kind() != OracleError::Kind::undefined) ++mismatches;
    }
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " random tables disagree; ");
  o.note << hand.size() << " hand counts, " << kFrequencyTrials << " random tables, " << mismatches << " mismatches";
}

void round_trips_and_spans(Outcome& o) {
  Rng rng{1004};
  int bad = 0;
  for (int i = 0; i < kRoundTrips; ++i) {
    const auto j = random_judgment(rng);
    const auto c = random_case(rng);
    try {
      if (!(dsl::parse_judgment(dsl::render_judgment(j)) == j)) ++bad;
      if (!(dsl::parse_case(dsl::render_case(c)) == c)) ++bad;
    } catch (const Error&) {
      ++bad;
    }
  }
  o.require(bad == 0, std::to_string(bad) + " round-trip failures; ");

  const std::string noise = "{}[]();,=+!@/-|># xA\n";
  int errors = 0, out_of_bounds = 0;
  for (int i = 0; i < kFuzzInputs; ++i) {
    auto text = i % 2 ? dsl::render_case(random_case(rng)) : dsl::render_judgment(random_judgment(rng));
    const auto pos = uniform(rng, 0, text.size() - 1);
    if (coin(rng)) text.erase(pos, 1);
    else text.insert(pos, 1, noise[uniform(rng, 0, noise.size() - 1)]);
    try {
      if (i % 2) dsl::parse_case(text);
      else dsl::parse_judgment(text);
    } catch (const dsl::ParseError& ex) {
      ++errors;
      const auto& s = ex.span();
      if (s.line < 1 || s.column < 1 || s.offset + s.length > text.size() || s.offset >= text.size()) ++out_of_bounds;
    }
  }
  o.require(out_of_bounds == 0, std::to_string(out_of_bounds) + " spans out of bounds; ");
  o.note << kRoundTrips << " judgments and cases round-trip, " << errors << " parse errors with in-bounds spans";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"loan case is fair with a replayable 14-step proof", loan_case_is_fair},
      {"unfair judgment db and epsilon threshold", unfair_db_and_threshold},
      {"mediate closure matches path enumeration", closure_matches_path_enumeration},
      {"effects of MS and the counterfactual candidate", loan_effects_and_candidate},
      {"I-Cut equals a cut against the intervention axiom", cut_commutes_with_axiom},
      {"mutated proofs are rejected with the right label", mutated_proofs_rejected},
      {"classifier frequencies are exact", frequencies_are_exact},
      {"DSL round-trips and parse error spans", round_trips_and_spans},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& ex) {
      o.require(false, std::string("exception: ") + ex.what());
    }
    failed += !o.ok;
    std::cout << (o.ok ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].first << " (" << o.note.str() << ")\n";
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
