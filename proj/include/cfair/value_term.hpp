#pragma once

#include <compare>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfair {

/// True for a non-empty run of letters, digits, '_' and '.'.
bool is_token(std::string_view text) noexcept;

/// Value language: atoms, sums (`married + divorced`) and complements
/// (`!white`). Immutable; copies share structure.
class ValueTerm {
 public:
  enum class Kind { atom, sum, complement };

  static ValueTerm atom(std::string token);
  /// At least two members, no two structurally equal.
  static ValueTerm sum(std::vector<ValueTerm> members);
  static ValueTerm complement(ValueTerm operand);

  Kind kind() const noexcept;
  bool is_atom() const noexcept { return kind() == Kind::atom; }

  const std::string& token() const;               // atom only
  std::span<const ValueTerm> members() const;     // sum only
  const ValueTerm& operand() const;               // complement only

  /// Surface syntax: `!` binds tighter than `+`, nested sums are
  /// parenthesized, no simplification is performed.
  std::string to_string() const;

  friend bool operator==(const ValueTerm& a, const ValueTerm& b);
  friend std::strong_ordering operator<=>(const ValueTerm& a, const ValueTerm& b);

 private:
  struct Node;
  explicit ValueTerm(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Atom matches its own token, a sum matches if any member does, a
/// complement matches exactly when its operand does not.
bool value_matches(const ValueTerm& term, std::string_view observed);

}  // namespace cfair
