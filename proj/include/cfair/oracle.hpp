#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cfair/error.hpp"
#include "cfair/model.hpp"

namespace cfair {

/// "Probability that target = target_value given these attributions?"
struct OracleQuery {
  OracleQuery(DataPoint attributions, VariableId target, ValueTerm target_value);

  DataPoint attributions;
  VariableId target;
  ValueTerm target_value;
};

class OracleError : public Error {
 public:
  enum class Kind {
    unknown_column,   // query mentions a variable the dataset lacks
    undefined,        // no row matches the conditioning attributions
    no_match,         // judgment db holds no judgment for this context
    conflict,         // judgment db holds contradictory judgments
    command_failed,   // external process failed, timed out or exited nonzero
    malformed,        // unparseable data or response
    out_of_range,     // response probability outside [0, 1]
  };

  OracleError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Anything that can answer classifier queries. Implementations are
/// deterministic: the same query always yields the same answer.
class ClassifierOracle {
 public:
  virtual ~ClassifierOracle() = default;
  virtual Probability query(const OracleQuery& q) const = 0;
};

/// Header + rows of raw string cells.
class CsvTable {
 public:
  CsvTable(std::vector<std::string> header, std::vector<std::vector<std::string>> rows);

  /// RFC 4180 style: comma separated, optional double quotes with "" escapes.
  /// Rows must have exactly one cell per column and no empty cells.
  static CsvTable parse(std::string_view text);
  static CsvTable load(const std::string& path);

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  /// Column index, or throws OracleError(unknown_column).
  std::size_t column(const VariableId& var) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::map<std::string, std::size_t> index_;
};

/// Conditional frequency P(target | attributions) counted over rows.
Probability csv_frequency_query(const CsvTable& table, const OracleQuery& q);

class CsvFrequencyOracle : public ClassifierOracle {
 public:
  explicit CsvFrequencyOracle(CsvTable table) : table_(std::move(table)) {}
  Probability query(const OracleQuery& q) const override { return csv_frequency_query(table_, q); }

 private:
  CsvTable table_;
};

/// Looks up the unique judgment whose context attributions equal the query
/// attributions as a set and whose conclusion is (target, target_value).
Probability judgment_db_query(const std::vector<Judgment>& db, const OracleQuery& q);

class JudgmentDbOracle : public ClassifierOracle {
 public:
  /// Throws OracleError(malformed) if a judgment has edges or an
  /// intervention expression in its context.
  explicit JudgmentDbOracle(std::vector<Judgment> db);
  static JudgmentDbOracle load(const std::string& path);

  Probability query(const OracleQuery& q) const override { return judgment_db_query(db_, q); }
  const std::vector<Judgment>& judgments() const noexcept { return db_; }

 private:
  std::vector<Judgment> db_;
};

/// Request line sent to an external classifier:
/// {"attributions":[{"var":"MS","value":"div"}],"target":"Loan","value":"yes"}
std::string encode_request(const OracleQuery& q);
/// Parses {"probability":"0.60"}.
Probability decode_response(std::string_view line);

/// Runs `/bin/sh -c command` once per query, writes one request line to its
/// stdin and reads one response line from its stdout. Queries are
/// serialized and memoized.
class ExternalCommandOracle : public ClassifierOracle {
 public:
  static constexpr std::chrono::milliseconds kDefaultTimeout{10'000};

  explicit ExternalCommandOracle(std::string command, std::chrono::milliseconds timeout = kDefaultTimeout);

  Probability query(const OracleQuery& q) const override;

 private:
  std::string command_;
  std::chrono::milliseconds timeout_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Probability> cache_;
};

/// Parses an oracle spec: `csv:PATH`, `db:PATH` or `cmd:PROGRAM ARGS`
/// (surrounding double quotes around the command are stripped).
std::unique_ptr<ClassifierOracle> make_oracle(std::string_view spec,
                                              std::chrono::milliseconds timeout = ExternalCommandOracle::kDefaultTimeout);

}  // namespace cfair
