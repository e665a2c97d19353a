#include "netreplica/store.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "netreplica/ingest.hpp"
#include "netreplica/profile_io.hpp"

namespace netreplica::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string>& indexed_attributes() {
  static const std::vector<std::string> names = {
      "mean_throughput_bps", "max_throughput_bps", "pmr",       "pmr95",
      "cov",                 "host_count",         "flow_count", "asymmetry",
      "toggle_count",        "window_duration_s",  "direction"};
  return names;
}

std::string index_path(const std::string& store_path) { return store_path + ".idx.json"; }

struct IndexData {
  uint64_t store_bytes = 0;
  std::vector<std::string> ids;
  std::vector<uint64_t> offsets;
  std::vector<uint64_t> lengths;
  std::map<std::string, std::vector<double>> columns;

  size_t size() const { return ids.size(); }
};

IndexData build_index_data(const std::string& store_path) {
  IndexData idx;
  std::ifstream in(store_path, std::ios::binary);
  if (!in) return idx;  // empty store
  for (const auto& name : indexed_attributes()) idx.columns[name] = {};

  std::string line;
  uint64_t offset = 0;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const uint64_t length = line.size();
    if (!line.empty()) {
      CrossTrafficProfile p;
      try {
        p = profile_from_jsonl_line(line);
      } catch (const std::exception& e) {
        throw ingest::ParseError(
            "bad profile at line " + std::to_string(lineno) + ": " + e.what(), lineno);
      }
      idx.ids.push_back(p.id);
      idx.offsets.push_back(offset);
      idx.lengths.push_back(length);
      for (const auto& name : indexed_attributes()) {
        idx.columns[name].push_back(attribute_value(p, name));
      }
    }
    offset += length + 1;
  }
  idx.store_bytes = fs::file_size(store_path);
  return idx;
}

void write_index(const std::string& store_path, const IndexData& idx) {
  json j;
  j["version"] = 1;
  j["store_bytes"] = idx.store_bytes;
  j["ids"] = idx.ids;
  j["offsets"] = idx.offsets;
  j["lengths"] = idx.lengths;
  j["columns"] = idx.columns;
  const std::string tmp = index_path(store_path) + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << j.dump();
  }
  fs::rename(tmp, index_path(store_path));
}

std::optional<IndexData> try_load_index(const std::string& store_path) {
  std::ifstream in(index_path(store_path), std::ios::binary);
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
    IndexData idx;
    idx.store_bytes = j.at("store_bytes").get<uint64_t>();
    idx.ids = j.at("ids").get<std::vector<std::string>>();
    idx.offsets = j.at("offsets").get<std::vector<uint64_t>>();
    idx.lengths = j.at("lengths").get<std::vector<uint64_t>>();
    idx.columns = j.at("columns").get<std::map<std::string, std::vector<double>>>();
    return idx;
  } catch (const std::exception&) {
    return std::nullopt;  // stale or corrupt; caller rebuilds
  }
}

// Loads the sidecar if it matches the store file, else rebuilds it.
IndexData load_or_build_index(const std::string& store_path) {
  const uint64_t actual =
      fs::exists(store_path) ? static_cast<uint64_t>(fs::file_size(store_path)) : 0;
  if (auto idx = try_load_index(store_path); idx && idx->store_bytes == actual) {
    return *std::move(idx);
  }
  IndexData idx = build_index_data(store_path);
  if (actual > 0) write_index(store_path, idx);
  return idx;
}

bool compare(double lhs, Comparator cmp, double rhs) {
  switch (cmp) {
    case Comparator::Lt:
      return lhs < rhs;
    case Comparator::Le:
      return lhs <= rhs;
    case Comparator::Eq:
      return lhs == rhs;
    case Comparator::Ge:
      return lhs >= rhs;
    case Comparator::Gt:
      return lhs > rhs;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

bool is_indexed_attribute(const std::string& name) {
  const auto& names = indexed_attributes();
  return std::find(names.begin(), names.end(), name) != names.end();
}

double attribute_value(const CrossTrafficProfile& p, const std::string& name) {
  if (name == "mean_throughput_bps") return p.metrics.mean_throughput_bps;
  if (name == "max_throughput_bps") return p.metrics.max_throughput_bps;
  if (name == "pmr") return p.metrics.pmr;
  if (name == "pmr95") return p.metrics.pmr95;
  if (name == "cov") return p.metrics.cov;
  if (name == "host_count") return static_cast<double>(p.metrics.host_count);
  if (name == "flow_count") return static_cast<double>(p.metrics.flow_count);
  if (name == "asymmetry") return p.metrics.asymmetry;
  if (name == "toggle_count") return static_cast<double>(p.metrics.toggle_count);
  if (name == "window_duration_s") return p.window_duration_s;
  if (name == "direction") return p.direction == Direction::Up ? 0.0 : 1.0;
  throw QueryError("unknown attribute: " + name);
}

ProfileQuery ProfileQuery::parse(const std::string& filter, std::optional<uint64_t> limit,
                                 const std::string& order_by) {
  ProfileQuery q;
  q.limit = limit;

  if (!order_by.empty()) {
    std::string attr = order_by;
    if (const auto colon = order_by.find(':'); colon != std::string::npos) {
      attr = order_by.substr(0, colon);
      const std::string dir = order_by.substr(colon + 1);
      if (dir == "desc") {
        q.order_desc = true;
      } else if (dir != "asc") {
        throw QueryError("order direction must be asc or desc: " + order_by);
      }
    }
    if (!is_indexed_attribute(attr)) throw QueryError("unknown order_by attribute: " + attr);
    q.order_by = attr;
  }

  std::string_view rest = trim(filter);
  while (!rest.empty()) {
    std::string_view term = rest;
    if (const auto amp = rest.find("&&"); amp != std::string_view::npos) {
      term = trim(rest.substr(0, amp));
      rest = trim(rest.substr(amp + 2));
      if (rest.empty()) throw QueryError("dangling && in filter");
    } else {
      rest = {};
    }
    if (term.empty()) throw QueryError("empty term in filter");

    const auto op_pos = term.find_first_of("<>=!");
    if (op_pos == std::string_view::npos) throw QueryError("missing comparator in: " + std::string(term));

    Predicate pred;
    pred.attribute = std::string(trim(term.substr(0, op_pos)));
    if (!is_indexed_attribute(pred.attribute)) {
      throw QueryError("unknown attribute: " + pred.attribute);
    }

    size_t op_len = 1;
    const char c0 = term[op_pos];
    const char c1 = op_pos + 1 < term.size() ? term[op_pos + 1] : '\0';
    if (c0 == '<') {
      pred.cmp = c1 == '=' ? (op_len = 2, Comparator::Le) : Comparator::Lt;
    } else if (c0 == '>') {
      pred.cmp = c1 == '=' ? (op_len = 2, Comparator::Ge) : Comparator::Gt;
    } else if (c0 == '=') {
      pred.cmp = Comparator::Eq;
      if (c1 == '=') op_len = 2;
    } else {
      throw QueryError("bad comparator in: " + std::string(term));
    }

    const std::string_view value = trim(term.substr(op_pos + op_len));
    if (value.empty()) throw QueryError("missing value in: " + std::string(term));

    if (pred.attribute == "direction") {
      if (pred.cmp != Comparator::Eq) throw QueryError("direction supports only equality");
      if (value == "UP") {
        pred.direction = Direction::Up;
        pred.number = 0.0;
      } else if (value == "DOWN") {
        pred.direction = Direction::Down;
        pred.number = 1.0;
      } else {
        throw QueryError("direction must be UP or DOWN");
      }
    } else {
      double v = 0.0;
      const auto* begin = value.data();
      const auto* end = value.data() + value.size();
      auto [p, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc{} || p != end) {
        throw QueryError("bad numeric value in: " + std::string(term));
      }
      pred.number = v;
    }
    q.predicates.push_back(std::move(pred));
  }
  return q;
}

ProfileStore::ProfileStore(std::string path) : path_(std::move(path)) {}

uint64_t ProfileStore::ingest_file(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + jsonl_path);
  std::vector<CrossTrafficProfile> incoming;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      incoming.push_back(profile_from_jsonl_line(line));
    } catch (const std::exception& e) {
      throw ingest::ParseError(
          "bad profile at line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
  return ingest(incoming);
}

uint64_t ProfileStore::ingest(const std::vector<CrossTrafficProfile>& profiles) {
  // Existing content first, then the new stream; later ids win.
  std::vector<CrossTrafficProfile> merged;
  if (fs::exists(path_)) merged = read_profiles_jsonl(path_);
  merged.insert(merged.end(), profiles.begin(), profiles.end());

  std::unordered_map<std::string, size_t> last;
  for (size_t i = 0; i < merged.size(); ++i) last[merged[i].id] = i;

  std::vector<CrossTrafficProfile> kept;
  kept.reserve(last.size());
  for (size_t i = 0; i < merged.size(); ++i) {
    if (last.at(merged[i].id) == i) kept.push_back(std::move(merged[i]));
  }
  std::sort(kept.begin(), kept.end(),
            [](const CrossTrafficProfile& a, const CrossTrafficProfile& b) { return a.id < b.id; });

  const std::string tmp = path_ + ".tmp";
  write_profiles_jsonl(tmp, kept);
  fs::rename(tmp, path_);
  write_index(path_, build_index_data(path_));
  return kept.size();
}

uint64_t ProfileStore::size() const { return load_or_build_index(path_).size(); }

std::optional<CrossTrafficProfile> ProfileStore::find_by_id(const std::string& id) const {
  const IndexData idx = load_or_build_index(path_);
  const auto it = std::find(idx.ids.begin(), idx.ids.end(), id);
  if (it == idx.ids.end()) return std::nullopt;
  const auto row = static_cast<size_t>(it - idx.ids.begin());
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path_);
  in.seekg(static_cast<std::streamoff>(idx.offsets[row]));
  std::string buf(idx.lengths[row], '\0');
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!in) throw std::runtime_error("short read from " + path_);
  return profile_from_jsonl_line(buf);
}

std::vector<CrossTrafficProfile> ProfileStore::select(const ProfileQuery& q) const {
  for (const auto& pred : q.predicates) {
    if (!is_indexed_attribute(pred.attribute)) {
      throw QueryError("unknown attribute: " + pred.attribute);
    }
  }
  if (!q.order_by.empty() && !is_indexed_attribute(q.order_by)) {
    throw QueryError("unknown order_by attribute: " + q.order_by);
  }

  const IndexData idx = load_or_build_index(path_);

  std::vector<size_t> rows;
  for (size_t row = 0; row < idx.size(); ++row) {
    bool ok = true;
    for (const auto& pred : q.predicates) {
      if (!compare(idx.columns.at(pred.attribute)[row], pred.cmp, pred.number)) {
        ok = false;
        break;
      }
    }
    if (ok) rows.push_back(row);
  }

  if (q.order_by.empty()) {
    std::sort(rows.begin(), rows.end(),
              [&](size_t a, size_t b) { return idx.ids[a] < idx.ids[b]; });
  } else {
    const auto& col = idx.columns.at(q.order_by);
    std::sort(rows.begin(), rows.end(), [&](size_t a, size_t b) {
      if (col[a] != col[b]) return q.order_desc ? col[a] > col[b] : col[a] < col[b];
      return idx.ids[a] < idx.ids[b];  // stable tie-break
    });
  }
  if (q.limit && rows.size() > *q.limit) rows.resize(*q.limit);

  std::ifstream in(path_, std::ios::binary);
  if (!in && !rows.empty()) throw std::runtime_error("cannot open " + path_);
  std::vector<CrossTrafficProfile> out;
  out.reserve(rows.size());
  std::string buf;
  for (const size_t row : rows) {
    in.seekg(static_cast<std::streamoff>(idx.offsets[row]));
    buf.resize(idx.lengths[row]);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!in) throw std::runtime_error("short read from " + path_);
    out.push_back(profile_from_jsonl_line(buf));
  }
  return out;
}

}  // namespace netreplica::store
