#include "cfair/oracle.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "cfair/dsl.hpp"

namespace cfair {

OracleQuery::OracleQuery(DataPoint attrs, VariableId t, ValueTerm tv)
    : attributions(std::move(attrs)), target(std::move(t)), target_value(std::move(tv)) {
  if (attributions.find(target) != nullptr)
    throw ModelError("query target '" + target.name() + "' is also an attribution");
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool quoted = false, cell_started = false;
  auto end_cell = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_record = [&] {
    end_cell();
    // A line with nothing on it is skipped rather than read as one empty cell.
    if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (cell_started && !cell.empty())
          throw OracleError(OracleError::Kind::malformed, "stray quote inside unquoted CSV cell");
        quoted = true;
        cell_started = true;
        break;
      case ',': end_cell(); break;
      case '\r': break;
      case '\n': end_record(); break;
      default:
        cell += c;
        cell_started = true;
    }
  }
  if (quoted) throw OracleError(OracleError::Kind::malformed, "unterminated quoted CSV cell");
  if (cell_started || !record.empty()) end_record();
  return records;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OracleError(OracleError::Kind::malformed, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header, std::vector<std::vector<std::string>> rows)
    : header_(std::move(header)), rows_(std::move(rows)) {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (!index_.emplace(header_[i], i).second)
      throw OracleError(OracleError::Kind::malformed, "duplicate CSV column '" + header_[i] + "'");
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != header_.size())
      throw OracleError(OracleError::Kind::malformed, "CSV row " + std::to_string(r + 2) + " has " +
                                                          std::to_string(rows_[r].size()) + " cells, expected " +
                                                          std::to_string(header_.size()));
    for (std::size_t c = 0; c < header_.size(); ++c)
      if (rows_[r][c].empty())
        throw OracleError(OracleError::Kind::malformed,
                          "CSV row " + std::to_string(r + 2) + " has an empty cell in column '" + header_[c] + "'");
  }
}

CsvTable CsvTable::parse(std::string_view text) {
  auto records = split_csv(text);
  if (records.empty()) throw OracleError(OracleError::Kind::malformed, "CSV input has no header");
  auto header = std::move(records.front());
  records.erase(records.begin());
  return CsvTable{std::move(header), std::move(records)};
}

CsvTable CsvTable::load(const std::string& path) { return parse(read_file(path)); }

std::size_t CsvTable::column(const VariableId& var) const {
  auto it = index_.find(var.name());
  if (it == index_.end()) throw OracleError(OracleError::Kind::unknown_column, "unknown column '" + var.name() + "'");
  return it->second;
}

Probability csv_frequency_query(const CsvTable& table, const OracleQuery& q) {
  std::vector<std::pair<std::size_t, const ValueTerm*>> filters;
  for (const auto& a : q.attributions) filters.emplace_back(table.column(a.var), &a.value);
  const std::size_t target_col = table.column(q.target);

  std::int64_t matching = 0, hits = 0;
  for (const auto& row : table.rows()) {
    bool ok = std::all_of(filters.begin(), filters.end(),
                          [&](const auto& f) { return value_matches(*f.second, row[f.first]); });
    if (!ok) continue;
    ++matching;
    if (value_matches(q.target_value, row[target_col])) ++hits;
  }
  if (matching == 0)
    throw OracleError(OracleError::Kind::undefined, "undefined probability: no row matches the attributions");
  return Probability::ratio(hits, matching);
}

// ---------------------------------------------------------------------------
// Judgment database

Probability judgment_db_query(const std::vector<Judgment>& db, const OracleQuery& q) {
  const std::set<Attribution> wanted(q.attributions.begin(), q.attributions.end());
  const Judgment* found = nullptr;
  for (const auto& j : db) {
    if (j.target() != q.target || j.value() != q.target_value) continue;
    std::set<Attribution> have;
    for (const auto& item : j.context())
      if (item.is_attribution()) have.insert(item.attribution());
    if (have != wanted) continue;
    if (found != nullptr && found->prob() != j.prob())
      throw OracleError(OracleError::Kind::conflict, "conflicting judgments: " + dsl::render_judgment(*found) +
                                                         " vs " + dsl::render_judgment(j));
    found = &j;
  }
  if (found == nullptr) {
    std::string ctx;
    for (const auto& a : q.attributions) ctx += (ctx.empty() ? "" : ", ") + a.to_string();
    throw OracleError(OracleError::Kind::no_match, "no judgment for " + ctx + " |- " + q.target.name() + " = " +
                                                       q.target_value.to_string());
  }
  return found->prob();
}

JudgmentDbOracle::JudgmentDbOracle(std::vector<Judgment> db) : db_(std::move(db)) {
  for (const auto& j : db_)
    for (const auto& item : j.context())
      if (!item.is_attribution())
        throw OracleError(OracleError::Kind::malformed,
                          "judgment db entries must have attribution-only contexts: " + dsl::render_judgment(j));
}

JudgmentDbOracle JudgmentDbOracle::load(const std::string& path) {
  auto text = read_file(path);
  try {
    return JudgmentDbOracle{dsl::parse_judgment_db(text)};
  } catch (const dsl::ParseError& ex) {
    throw OracleError(OracleError::Kind::malformed, path + ": " + ex.what());
  }
}

// ---------------------------------------------------------------------------
// External command

std::string encode_request(const OracleQuery& q) {
  nlohmann::ordered_json attrs = nlohmann::ordered_json::array();
  for (const auto& a : q.attributions)
    attrs.push_back(nlohmann::ordered_json{{"var", a.var.name()}, {"value", a.value.to_string()}});
  nlohmann::ordered_json req{{"attributions", attrs}, {"target", q.target.name()}, {"value", q.target_value.to_string()}};
  return req.dump();
}

Probability decode_response(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    throw OracleError(OracleError::Kind::malformed, "malformed oracle response: " + std::string(ex.what()));
  }
  if (!doc.is_object() || !doc.contains("probability") || !doc["probability"].is_string())
    throw OracleError(OracleError::Kind::malformed, "oracle response lacks a string \"probability\" field");
  const auto text = doc["probability"].get<std::string>();
  try {
    return dsl::parse_probability(text);
  } catch (const dsl::ParseError& ex) {
    const std::string what = ex.what();
    if (what.find("out of range") != std::string::npos)
      throw OracleError(OracleError::Kind::out_of_range, "oracle probability " + text + " outside [0,1]");
    throw OracleError(OracleError::Kind::malformed, "oracle probability '" + text + "': " + what);
  }
}

namespace {

struct Fd {
  int fd = -1;
  Fd() = default;
  explicit Fd(int f) : fd(f) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

struct RunResult {
  std::string out;
  std::string err;
  int status = 0;
  bool timed_out = false;
};

RunResult run_command(const std::string& command, const std::string& input, std::chrono::milliseconds timeout) {
  int in_pair[2], out_pipe[2], err_pipe[2];
  // stdin is a socket so an early-exiting child cannot SIGPIPE us.
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0 ||
      ::pipe2(err_pipe, O_CLOEXEC) != 0)
    throw OracleError(OracleError::Kind::command_failed, "cannot create pipes for oracle command");
  Fd in_parent(in_pair[0]), in_child(in_pair[1]);
  Fd out_read(out_pipe[0]), out_write(out_pipe[1]);
  Fd err_read(err_pipe[0]), err_write(err_pipe[1]);

  pid_t pid = ::fork();
  if (pid < 0) throw OracleError(OracleError::Kind::command_failed, "fork failed");
  if (pid == 0) {
    ::dup2(in_child.fd, STDIN_FILENO);
    ::dup2(out_write.fd, STDOUT_FILENO);
    ::dup2(err_write.fd, STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  in_child.reset();
  out_write.reset();
  err_write.reset();

  RunResult result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t written = 0;
  while (written < input.size()) {
    auto n = ::send(in_parent.fd, input.data() + written, input.size() - written, MSG_NOSIGNAL);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  ::shutdown(in_parent.fd, SHUT_WR);

  bool out_open = true, err_open = true;
  char buf[4096];
  while (out_open || err_open) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd fds[2] = {{out_open ? out_read.fd : -1, POLLIN, 0}, {err_open ? err_read.fd : -1, POLLIN, 0}};
    int rc = ::poll(fds, 2, static_cast<int>(left.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) continue;
    for (int k = 0; k < 2; ++k) {
      if (fds[k].fd < 0 || !(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      auto n = ::read(fds[k].fd, buf, sizeof buf);
      if (n <= 0) {
        (k == 0 ? out_open : err_open) = false;
      } else {
        (k == 0 ? result.out : result.err).append(buf, static_cast<std::size_t>(n));
      }
    }
  }
  if (result.timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.status = status;
  return result;
}

}  // namespace

ExternalCommandOracle::ExternalCommandOracle(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  if (command_.empty()) throw OracleError(OracleError::Kind::command_failed, "empty oracle command");
}

Probability ExternalCommandOracle::query(const OracleQuery& q) const {
  const auto request = encode_request(q);
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(request); it != cache_.end()) return it->second;

  auto run = run_command(command_, request + "\n", timeout_);
  if (run.timed_out)
    throw OracleError(OracleError::Kind::command_failed,
                      "oracle command timed out after " + std::to_string(timeout_.count()) + " ms");
  if (!WIFEXITED(run.status) || WEXITSTATUS(run.status) != 0) {
    std::string why = WIFEXITED(run.status) ? "exit status " + std::to_string(WEXITSTATUS(run.status))
                                            : "terminated by signal";
    auto diag = run.err;
    while (!diag.empty() && (diag.back() == '\n' || diag.back() == '\r')) diag.pop_back();
    throw OracleError(OracleError::Kind::command_failed, "oracle command failed (" + why + "): " + diag);
  }
  auto line = std::string_view(run.out).substr(0, run.out.find('\n'));
  auto prob = decode_response(line);
  cache_.emplace(request, prob);
  return prob;
}

std::unique_ptr<ClassifierOracle> make_oracle(std::string_view spec, std::chrono::milliseconds timeout) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw OracleError(OracleError::Kind::malformed, "oracle spec must be csv:PATH, db:PATH or cmd:COMMAND");
  auto scheme = spec.substr(0, colon);
  std::string rest(spec.substr(colon + 1));
  if (scheme == "csv") return std::make_unique<CsvFrequencyOracle>(CsvTable::load(rest));
  if (scheme == "db") return std::make_unique<JudgmentDbOracle>(JudgmentDbOracle::load(rest));
  if (scheme == "cmd") {
    if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"') rest = rest.substr(1, rest.size() - 2);
    return std::make_unique<ExternalCommandOracle>(rest, timeout);
  }
  throw OracleError(OracleError::Kind::malformed, "unknown oracle scheme '" + std::string(scheme) + "'");
}

}  // namespace cfair
