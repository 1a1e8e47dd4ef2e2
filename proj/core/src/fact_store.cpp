#include "ndb/fact_store.hpp"

#include <array>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ndb/errors.hpp"
#include "ndb/text.hpp"

namespace ndb {

InputKind classify_input(std::string_view text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) raise(ErrorCode::EmptyText, "cannot classify blank input");
  std::size_t end = text.find_last_not_of(" \t\r\n");
  std::string_view body = text.substr(begin, end - begin + 1);
  if (body.back() == '?') return InputKind::Query;

  static constexpr std::array interrogatives = {
      "who",  "whom", "whose", "what", "where", "when", "which", "why",  "how",
      "is",   "are",  "was",   "were", "do",    "does", "did",   "has",  "have",
      "list", "count"};
  const std::vector<std::string> tokens = tokenize(body);
  if (!tokens.empty()) {
    for (const char* w : interrogatives) {
      if (tokens.front() == w) return InputKind::Query;
    }
  }
  return InputKind::Update;
}

Database::Database(const Database& other) {
  std::lock_guard lock(other.mu_);
  facts_ = other.facts_;
}

Database& Database::operator=(const Database& other) {
  if (this == &other) return *this;
  std::vector<Fact> copy;
  {
    std::lock_guard lock(other.mu_);
    copy = other.facts_;
  }
  std::lock_guard lock(mu_);
  facts_ = std::move(copy);
  return *this;
}

FactId Database::append_fact(std::string text, Timestamp timestamp) {
  if (tokenize(text).empty()) raise(ErrorCode::EmptyText, "facts need at least one token");
  std::lock_guard lock(mu_);
  if (!facts_.empty() && timestamp < facts_.back().timestamp) {
    raise(ErrorCode::NonMonotonicTimestamp,
          "timestamp " + std::to_string(timestamp) + " precedes log tail " +
              std::to_string(facts_.back().timestamp));
  }
  const FactId id = facts_.size();
  facts_.push_back({id, std::move(text), timestamp, false});
  return id;
}

void Database::invalidate_fact(FactId id) {
  std::lock_guard lock(mu_);
  if (id >= facts_.size()) raise(ErrorCode::UnknownFactId, "no fact " + std::to_string(id));
  facts_[id].invalidated = true;
}

std::vector<Fact> Database::visible_facts(Timestamp as_of) const {
  std::lock_guard lock(mu_);
  std::vector<Fact> out;
  out.reserve(facts_.size());
  for (const Fact& f : facts_) {
    if (f.timestamp <= as_of && !f.invalidated) out.push_back(f);
  }
  return out;
}

Snapshot Database::snapshot(Timestamp as_of) const {
  return std::make_shared<const std::vector<Fact>>(visible_facts(as_of));
}

std::vector<Fact> Database::all_facts() const {
  std::lock_guard lock(mu_);
  return facts_;
}

Fact Database::fact(FactId id) const {
  std::lock_guard lock(mu_);
  if (id >= facts_.size()) raise(ErrorCode::UnknownFactId, "no fact " + std::to_string(id));
  return facts_[id];
}

std::size_t Database::size() const {
  std::lock_guard lock(mu_);
  return facts_.size();
}

Timestamp Database::max_timestamp() const {
  std::lock_guard lock(mu_);
  return facts_.empty() ? 0 : facts_.back().timestamp;
}

void Database::save_jsonl(std::ostream& out) const {
  std::lock_guard lock(mu_);
  for (const Fact& f : facts_) {
    nlohmann::json line = {
        {"id", f.id}, {"text", f.text}, {"timestamp", f.timestamp}, {"invalidated", f.invalidated}};
    out << line.dump() << '\n';
  }
}

Database Database::load_jsonl(std::istream& in) {
  Database db;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    const std::string where = " at line " + std::to_string(line_no);
    if (record.is_discarded() || !record.is_object()) {
      raise(ErrorCode::MalformedRecord, "fact log is not JSONL" + where);
    }
    if (record.size() != 4 || !record.contains("id") || !record.contains("text") ||
        !record.contains("timestamp") || !record.contains("invalidated")) {
      raise(ErrorCode::MalformedRecord, "fact record needs exactly id/text/timestamp/invalidated" + where);
    }
    if (!record["id"].is_number_unsigned() || !record["text"].is_string() ||
        !record["timestamp"].is_number_integer() || !record["invalidated"].is_boolean()) {
      raise(ErrorCode::MalformedRecord, "fact record field types are wrong" + where);
    }
    const auto id = record["id"].get<FactId>();
    if (id != db.facts_.size()) {
      raise(ErrorCode::MalformedRecord, "fact ids must be dense and ordered" + where);
    }
    const FactId stored = db.append_fact(record["text"].get<std::string>(),
                                         record["timestamp"].get<Timestamp>());
    if (record["invalidated"].get<bool>()) db.invalidate_fact(stored);
  }
  return db;
}

}  // namespace ndb
