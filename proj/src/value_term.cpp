#include "cfair/value_term.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "cfair/error.hpp"

namespace cfair {

struct ValueTerm::Node {
  Kind kind;
  std::string token;
  std::vector<ValueTerm> children;
};

bool is_token(std::string_view text) noexcept {
  if (text.empty()) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

ValueTerm ValueTerm::atom(std::string token) {
  if (!is_token(token)) throw ModelError("invalid value token '" + token + "'");
  return ValueTerm{std::make_shared<const Node>(Node{Kind::atom, std::move(token), {}})};
}

ValueTerm ValueTerm::sum(std::vector<ValueTerm> members) {
  if (members.size() < 2) throw ModelError("a sum needs at least two members");
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (members[i] == members[j])
        throw ModelError("duplicate sum member '" + members[i].to_string() + "'");
  return ValueTerm{std::make_shared<const Node>(Node{Kind::sum, {}, std::move(members)})};
}

ValueTerm ValueTerm::complement(ValueTerm operand) {
  std::vector<ValueTerm> children;
  children.push_back(std::move(operand));
  return ValueTerm{std::make_shared<const Node>(Node{Kind::complement, {}, std::move(children)})};
}

ValueTerm::Kind ValueTerm::kind() const noexcept { return node_->kind; }

const std::string& ValueTerm::token() const {
  if (node_->kind != Kind::atom) throw ModelError("value term is not an atom");
  return node_->token;
}

std::span<const ValueTerm> ValueTerm::members() const {
  if (node_->kind != Kind::sum) throw ModelError("value term is not a sum");
  return node_->children;
}

const ValueTerm& ValueTerm::operand() const {
  if (node_->kind != Kind::complement) throw ModelError("value term is not a complement");
  return node_->children.front();
}

std::string ValueTerm::to_string() const {
  switch (node_->kind) {
    case Kind::atom:
      return node_->token;
    case Kind::complement: {
      const auto& op = operand();
      if (op.kind() == Kind::sum) return "!(" + op.to_string() + ")";
      return "!" + op.to_string();
    }
    case Kind::sum: {
      std::string out;
      for (const auto& m : node_->children) {
        if (!out.empty()) out += " + ";
        out += m.kind() == Kind::sum ? "(" + m.to_string() + ")" : m.to_string();
      }
      return out;
    }
  }
  return {};
}

bool operator==(const ValueTerm& a, const ValueTerm& b) {
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const ValueTerm& a, const ValueTerm& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.node_->kind <=> b.node_->kind; c != 0) return c;
  if (auto c = a.node_->token <=> b.node_->token; c != 0) return c;
  return std::lexicographical_compare_three_way(a.node_->children.begin(), a.node_->children.end(),
                                                b.node_->children.begin(), b.node_->children.end());
}

bool value_matches(const ValueTerm& term, std::string_view observed) {
  switch (term.kind()) {
    case ValueTerm::Kind::atom:
      return term.token() == observed;
    case ValueTerm::Kind::sum:
      return std::any_of(term.members().begin(), term.members().end(),
                         [&](const ValueTerm& m) { return value_matches(m, observed); });
    case ValueTerm::Kind::complement:
      return !value_matches(term.operand(), observed);
  }
  return false;
}

}  // namespace cfair
