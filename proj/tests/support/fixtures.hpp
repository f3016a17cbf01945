#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "cfair/case.hpp"
#include "cfair/dsl.hpp"
#include "cfair/model.hpp"

namespace cfair::testing {

inline std::string fixture_path(const std::string& name) { return std::string(CFAIR_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline VariableId var(const char* name) { return VariableId{name}; }
inline ValueTerm atom(const char* token) { return ValueTerm::atom(token); }
inline Attribution attr(const char* v, const char* value) { return {VariableId{v}, ValueTerm::atom(value)}; }
inline Edge edge(const char* from, const char* to) { return {VariableId{from}, VariableId{to}}; }

/// Loan graph: gender, marital status, SAT score, degree, experience, income.
inline CausalGraph loan_graph() {
  return CausalGraph::from_edges({
      edge("G", "MS"), edge("G", "Deg"), edge("G", "Exp"), edge("Deg", "Exp"), edge("Deg", "GAI"),
      edge("Exp", "GAI"), edge("MS", "Loan"), edge("GAI", "Loan"), edge("SAT", "Deg"), edge("MS", "Exp"),
  });
}

inline DataPoint loan_factual() {
  return DataPoint{{attr("G", "m"), attr("MS", "mar"), attr("SAT", "1100"), attr("GAI", "65K"), attr("Deg", "PhD"),
                    attr("Exp", "5y")}};
}

inline Case loan_case(const char* iv_var = "MS", const char* iv_value = "div") {
  return Case{loan_graph(),
              loan_factual(),
              Probability::ratio(3, 5),
              Intervention{var(iv_var), atom(iv_value)},
              var("Loan"),
              atom("yes"),
              std::nullopt};
}

/// The reduced data point the classifier is asked about after I(MS=div).
inline DataPoint loan_candidate() {
  return DataPoint{{attr("MS", "div"), attr("G", "m"), attr("SAT", "1100"), attr("Deg", "PhD")}};
}

}  // namespace cfair::testing
