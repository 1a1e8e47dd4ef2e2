#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace ndb {

using FactId = std::uint64_t;
using Timestamp = std::int64_t;

// A stored sentence. Facts are never rewritten: updates append, retractions
// flip `invalidated`, and ids stay dense (id == position in the log).
struct Fact {
  FactId id = 0;
  std::string text;
  Timestamp timestamp = 0;
  bool invalidated = false;
};

enum class InputKind { Update, Query };

// Deterministic surface-form routing: interrogative lead word or a trailing
// question mark means Query, anything else is an Update.
InputKind classify_input(std::string_view text);

// Immutable view of the visible facts at some timestamp; safe to share across
// worker threads without further locking.
using Snapshot = std::shared_ptr<const std::vector<Fact>>;

class Database {
 public:
  Database() = default;
  Database(const Database& other);
  Database& operator=(const Database& other);

  // Returns the id of the stored fact. Timestamps must be non-decreasing in
  // append order; text must be non-empty.
  FactId append_fact(std::string text, Timestamp timestamp);

  // Marks a fact as retracted; the tombstone keeps its id and timestamp.
  void invalidate_fact(FactId id);

  // Facts with timestamp <= as_of that are not invalidated, in id order.
  std::vector<Fact> visible_facts(Timestamp as_of) const;
  Snapshot snapshot(Timestamp as_of) const;

  std::vector<Fact> all_facts() const;
  Fact fact(FactId id) const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  // Largest appended timestamp; 0 for an empty database.
  Timestamp max_timestamp() const;

  // One JSON object per line with keys {id, text, timestamp, invalidated}.
  void save_jsonl(std::ostream& out) const;
  static Database load_jsonl(std::istream& in);

 private:
  mutable std::mutex mu_;
  std::vector<Fact> facts_;
};

}  // namespace ndb
