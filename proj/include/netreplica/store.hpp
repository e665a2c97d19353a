#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netreplica/types.hpp"

namespace netreplica::store {

class QueryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Comparator { Lt, Le, Eq, Ge, Gt };

struct Predicate {
  std::string attribute;
  Comparator cmp = Comparator::Eq;
  double number = 0.0;                 // numeric attributes
  std::optional<Direction> direction;  // set when attribute == "direction"
};

struct ProfileQuery {
  std::vector<Predicate> predicates;  // conjunction
  std::optional<uint64_t> limit;
  std::string order_by;      // empty -> id ascending
  bool order_desc = false;

  // Parses "pmr95>=1 && mean_throughput_bps>1e6". Comparators: < <= = == >= >.
  // Unknown attributes are rejected.
  static ProfileQuery parse(const std::string& filter, std::optional<uint64_t> limit = {},
                            const std::string& order_by = "");
};

// Attributes valid in queries and order_by: every ProfileMetrics field plus
// window_duration_s and direction.
bool is_indexed_attribute(const std::string& name);

// Numeric value of an indexed attribute (direction maps UP->0, DOWN->1).
double attribute_value(const CrossTrafficProfile& p, const std::string& name);

// Embedded profile store: the JSONL file itself is the persistence; a
// sidecar "<path>.idx.json" holds the indexed attribute columns and byte
// offsets so selection does not re-parse every profile. The sidecar is
// rebuilt automatically when missing or stale. Single writer, readers see
// the last committed ingest.
class ProfileStore {
 public:
  explicit ProfileStore(std::string path);

  const std::string& path() const { return path_; }

  // Merges a JSONL stream into the store. Duplicate ids dedup, last write
  // wins (later lines override earlier ones and everything already stored).
  // A malformed line aborts with its line number and leaves the store
  // untouched. Returns the number of stored profiles after commit.
  uint64_t ingest_file(const std::string& jsonl_path);
  uint64_t ingest(const std::vector<CrossTrafficProfile>& profiles);

  std::vector<CrossTrafficProfile> select(const ProfileQuery& q) const;

  std::optional<CrossTrafficProfile> find_by_id(const std::string& id) const;

  uint64_t size() const;

 private:
  std::string path_;
};

}  // namespace netreplica::store
