#include "cfair/proof_io.hpp"

#include "json.hpp"

#include "cfair/dsl.hpp"

namespace cfair {

std::string write_proof(const Proof& proof) {
  nlohmann::ordered_json doc;
  doc["assumptions"] = nlohmann::ordered_json::array();
  for (const auto& a : proof.assumptions) doc["assumptions"].push_back(dsl::render_judgment(a));
  doc["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : proof.steps) {
    doc["steps"].push_back(nlohmann::ordered_json{
        {"rule", rule_name(s.rule)},
        {"item", dsl::render_item(s.item)},
        {"premise", s.premises},
        {"conclusion", dsl::render_judgment(s.conclusion)},
    });
  }
  return doc.dump(2) + "\n";
}

namespace {

template <typename F>
auto field(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const dsl::ParseError& ex) {
    throw ProofFormatError(where + ": " + ex.what());
  } catch (const nlohmann::json::exception& ex) {
    throw ProofFormatError(where + ": " + ex.what());
  }
}

}  // namespace

Proof read_proof(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ProofFormatError(std::string("proof file is not valid JSON: ") + ex.what());
  }
  if (!doc.is_object() || !doc.contains("assumptions") || !doc.contains("steps") || !doc["assumptions"].is_array() ||
      !doc["steps"].is_array())
    throw ProofFormatError("proof file needs \"assumptions\" and \"steps\" arrays");

  Proof proof;
  for (std::size_t i = 0; i < doc["assumptions"].size(); ++i) {
    auto where = "assumption " + std::to_string(i);
    proof.assumptions.push_back(
        field(where, [&] { return dsl::parse_judgment(doc["assumptions"][i].get<std::string>()); }));
  }
  for (std::size_t i = 0; i < doc["steps"].size(); ++i) {
    const auto& s = doc["steps"][i];
    auto where = "step " + std::to_string(i);
    if (!s.is_object()) throw ProofFormatError(where + ": not an object");
    auto name = field(where, [&] { return s.at("rule").get<std::string>(); });
    auto rule = parse_rule_name(name);
    if (!rule) throw ProofFormatError(where + ": unknown rule '" + name + "'");
    auto item = field(where + " item", [&] { return dsl::parse_context_item(s.at("item").get<std::string>()); });
    auto premises = field(where, [&] { return s.at("premise").get<std::vector<std::size_t>>(); });
    auto conclusion =
        field(where + " conclusion", [&] { return dsl::parse_judgment(s.at("conclusion").get<std::string>()); });
    proof.steps.push_back({*rule, std::move(item), std::move(premises), std::move(conclusion)});
  }
  return proof;
}

}  // namespace cfair
