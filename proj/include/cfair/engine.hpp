#pragma once

#include <string>
#include <variant>
#include <vector>

#include "cfair/case.hpp"
#include "cfair/kernel.hpp"
#include "cfair/oracle.hpp"

namespace cfair {

/// Counterfactual candidate: the intervened graph and the data point made of
/// the imposed value plus every factual attribution that is not an effect
/// of the intervened variable.
struct Candidate {
  CausalGraph graph;
  DataPoint datapoint;
};

Candidate build_candidate(const Case& c);

/// The judgment `graph', sigma' |- target = value @ q`.
Judgment candidate_judgment(const CausalGraph& graph, const DataPoint& datapoint, const VariableId& target,
                            const ValueTerm& value, const Probability& q);

struct NonErasable {
  ContextItem item;
  Violation reason;
  std::string detail;
};

/// Every context item of a candidate that no rule can erase.
struct CandidateFailure {
  std::vector<NonErasable> items;
  std::string to_string() const;
};

/// C-Weakening followed by exhaustive erasure in a fixed order: I-Cut, then
/// Tri-Cuts in lexicographic edge order, then V-Cuts in context order.
/// Succeeds iff only the intervention expression is left.
std::variant<Proof, CandidateFailure> verify_candidate(const Case& c, const Judgment& candidate,
                                                       const KernelOptions& options = {});

/// The candidate is not the counterfactual of the factual case.
class NotCounterfactual : public Error {
 public:
  explicit NotCounterfactual(CandidateFailure failure);
  const CandidateFailure& failure() const noexcept { return failure_; }

 private:
  CandidateFailure failure_;
};

struct Derivation {
  Judgment judgment;  ///< [graph, factual] I(a_j = alpha) |- target = value @ q
  Proof proof;
};

/// Builds (or takes the override) candidate, asks the oracle for q and
/// derives the pure counterfactual judgment. Throws OracleError or
/// NotCounterfactual.
Derivation derive_counterfactual(const Case& c, const ClassifierOracle& oracle, const KernelOptions& options = {});

struct Verdict {
  bool fair;
  Probability p;
  Probability q;
  Probability difference;
  Probability epsilon;
  Judgment counterfactual_judgment;
  Proof proof;
};

/// fair iff |p - q| <= epsilon, computed exactly.
Verdict cf_verdict(const Probability& p, const Probability& q, const Probability& epsilon, Judgment cf_judgment,
                   Proof proof);

/// factual_prob from the case and from the oracle disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Factual probability p: the case's factual_prob, cross-checked against the
/// oracle when the oracle can answer; otherwise the oracle's answer.
Probability factual_probability(const Case& c, const ClassifierOracle& oracle);

/// derive_counterfactual + cf_verdict.
Verdict check_case(const Case& c, const ClassifierOracle& oracle, const Probability& epsilon,
                   const KernelOptions& options = {});

/// check_proof plus: the single assumption carries no intervention, and the
/// final conclusion is `[case graph, case factual] I(...) |- target = value @ q`
/// with nothing else in the context.
std::optional<ProofFailure> check_proof_for_case(const Case& c, const Proof& proof, const KernelOptions& options = {});

}  // namespace cfair
