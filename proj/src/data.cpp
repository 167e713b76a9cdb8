#include "gbgcn/data.hpp"

#include "gbgcn/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace gbgcn {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

struct RawRecord {
  std::uint64_t initiator;
  std::uint64_t item;
  std::vector<std::uint64_t> participants;
  bool success;
  std::size_t line;
};

RawRecord parse_behavior_line(std::string_view line, const std::string& name, std::size_t lineno) {
  const auto fields = split_fields(line, '\t');
  if (fields.size() != 4) {
    throw ParseError(name, lineno, "expected 4 tab-separated fields, got " +
                                       std::to_string(fields.size()));
  }
  RawRecord r{};
  r.line = lineno;
  if (!parse_u64(fields[0], r.initiator)) throw ParseError(name, lineno, "bad initiator id");
  if (!parse_u64(fields[1], r.item)) throw ParseError(name, lineno, "bad item id");
  if (fields[2] != "-") {
    for (auto p : split_fields(fields[2], ',')) {
      std::uint64_t id;
      if (!parse_u64(p, id)) throw ParseError(name, lineno, "bad participant id");
      r.participants.push_back(id);
    }
  }
  if (fields[3] == "1") {
    r.success = true;
  } else if (fields[3] == "0") {
    r.success = false;
  } else {
    throw ParseError(name, lineno, "success flag must be 0 or 1");
  }
  return r;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = strip_cr(line);
    if (view.empty()) continue;
    fn(view, lineno);
  }
}

}  // namespace

BehaviorLog BehaviorLog::from_records(std::vector<BehaviorRecord> records) {
  BehaviorLog log;
  log.records = std::move(records);
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    (log.records[i].success ? log.successful : log.failed).push_back(i);
  }
  return log;
}

SocialGraph::SocialGraph(Index users, std::span<const std::pair<UserId, UserId>> edges) {
  std::vector<std::pair<UserId, UserId>> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [a, b] : edges) {
    if (a.value < 0 || b.value < 0 || a.index() >= users || b.index() >= users) {
      throw Error("social edge references user outside [0, " + std::to_string(users) + ")");
    }
    if (a == b) continue;
    directed.emplace_back(a, b);
    directed.emplace_back(b, a);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  offsets_.assign(static_cast<std::size_t>(users) + 1, 0);
  friends_.reserve(directed.size());
  for (const auto& [a, b] : directed) {
    ++offsets_[a.value + 1];
    friends_.push_back(b);
  }
  for (Index u = 0; u < users; ++u) offsets_[u + 1] += offsets_[u];
}

std::span<const UserId> SocialGraph::friends(UserId u) const {
  return {friends_.data() + offsets_[u.value], friends_.data() + offsets_[u.value + 1]};
}

bool SocialGraph::connected(UserId a, UserId b) const {
  const auto f = friends(a);
  return std::binary_search(f.begin(), f.end(), b);
}

std::vector<std::pair<UserId, UserId>> SocialGraph::edges() const {
  std::vector<std::pair<UserId, UserId>> out;
  out.reserve(friends_.size() / 2);
  for (Index u = 0; u < users(); ++u) {
    const UserId a(u);
    for (UserId b : friends(a)) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

IdMap IdMap::from_originals(std::vector<std::uint64_t> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  IdMap map;
  map.original = std::move(ids);
  map.lookup_.reserve(map.original.size());
  for (std::size_t i = 0; i < map.original.size(); ++i) {
    map.lookup_.emplace(map.original[i], static_cast<std::int32_t>(i));
  }
  return map;
}

std::int64_t IdMap::dense(std::uint64_t original_id) const {
  const auto it = lookup_.find(original_id);
  return it == lookup_.end() ? -1 : it->second;
}

Dataset ingest(const std::filesystem::path& behavior_path,
               const std::filesystem::path& social_path) {
  std::ifstream behaviors(behavior_path);
  if (!behaviors) throw Error("cannot open behavior file " + behavior_path.string());
  std::ifstream social(social_path);
  if (!social) throw Error("cannot open social file " + social_path.string());
  return ingest(behaviors, social, behavior_path.string(), social_path.string());
}

Dataset ingest(std::istream& behaviors, std::istream& social, const std::string& behavior_name,
               const std::string& social_name) {
  Dataset ds;
  std::vector<RawRecord> raw;
  for_each_line(behaviors, [&](std::string_view line, std::size_t lineno) {
    RawRecord r = parse_behavior_line(line, behavior_name, lineno);
    std::sort(r.participants.begin(), r.participants.end());
    const auto last = std::unique(r.participants.begin(), r.participants.end());
    const auto dupes = std::distance(last, r.participants.end());
    if (dupes > 0) {
      ds.stats.duplicate_participants += dupes;
      r.participants.erase(last, r.participants.end());
    }
    if (std::binary_search(r.participants.begin(), r.participants.end(), r.initiator)) {
      log::warn(behavior_name + ":" + std::to_string(lineno) +
                ": participant equals initiator, record rejected");
      ++ds.stats.rejected_records;
      return;
    }
    raw.push_back(std::move(r));
  });
  if (raw.empty()) throw Error(behavior_name + ": no records");

  std::vector<std::uint64_t> user_ids, item_ids;
  for (const auto& r : raw) {
    user_ids.push_back(r.initiator);
    user_ids.insert(user_ids.end(), r.participants.begin(), r.participants.end());
    item_ids.push_back(r.item);
  }
  ds.users = IdMap::from_originals(std::move(user_ids));
  ds.items = IdMap::from_originals(std::move(item_ids));

  std::vector<BehaviorRecord> records;
  records.reserve(raw.size());
  for (const auto& r : raw) {
    BehaviorRecord rec;
    rec.initiator = UserId(static_cast<std::int32_t>(ds.users.dense(r.initiator)));
    rec.item = ItemId(static_cast<std::int32_t>(ds.items.dense(r.item)));
    rec.success = r.success;
    rec.participants.reserve(r.participants.size());
    // Dense ids preserve the order of original ids, so the list stays sorted.
    for (auto p : r.participants) {
      rec.participants.emplace_back(static_cast<std::int32_t>(ds.users.dense(p)));
    }
    records.push_back(std::move(rec));
  }
  ds.log = BehaviorLog::from_records(std::move(records));

  std::vector<std::pair<UserId, UserId>> edges;
  for_each_line(social, [&](std::string_view line, std::size_t lineno) {
    const auto fields = split_fields(line, '\t');
    std::uint64_t a, b;
    if (fields.size() != 2 || !parse_u64(fields[0], a) || !parse_u64(fields[1], b)) {
      throw ParseError(social_name, lineno, "expected `user_a<TAB>user_b`");
    }
    const auto da = ds.users.dense(a);
    const auto db = ds.users.dense(b);
    if (da < 0 || db < 0 || da == db) {
      ++ds.stats.dropped_social_edges;
      return;
    }
    edges.emplace_back(UserId(static_cast<std::int32_t>(da)),
                       UserId(static_cast<std::int32_t>(db)));
  });
  ds.social = SocialGraph(ds.users.size(), edges);

  ds.stats.users = ds.users.size();
  ds.stats.items = ds.items.size();
  ds.stats.social_edges = ds.social.edge_count();
  ds.stats.records = static_cast<Index>(ds.log.size());
  ds.stats.successful = static_cast<Index>(ds.log.successful.size());
  ds.stats.failed = static_cast<Index>(ds.log.failed.size());
  return ds;
}

void write_behaviors(std::ostream& out, std::span<const BehaviorRecord> records,
                     const IdMap* users, const IdMap* items) {
  const auto uid = [&](UserId u) -> std::uint64_t {
    return users ? users->original[u.value] : static_cast<std::uint64_t>(u.value);
  };
  const auto iid = [&](ItemId n) -> std::uint64_t {
    return items ? items->original[n.value] : static_cast<std::uint64_t>(n.value);
  };
  for (const auto& r : records) {
    out << uid(r.initiator) << '\t' << iid(r.item) << '\t';
    if (r.participants.empty()) {
      out << '-';
    } else {
      for (std::size_t i = 0; i < r.participants.size(); ++i) {
        if (i) out << ',';
        out << uid(r.participants[i]);
      }
    }
    out << '\t' << (r.success ? '1' : '0') << '\n';
  }
}

void write_social(std::ostream& out, const SocialGraph& social, const IdMap* users) {
  for (const auto& [a, b] : social.edges()) {
    if (users) {
      out << users->original[a.value] << '\t' << users->original[b.value] << '\n';
    } else {
      out << a.value << '\t' << b.value << '\n';
    }
  }
}

void write_id_map(std::ostream& out, const IdMap& map) {
  for (std::size_t i = 0; i < map.original.size(); ++i) out << i << '\t' << map.original[i] << '\n';
}

IdMap read_id_map(std::istream& in, const std::string& name) {
  std::vector<std::uint64_t> ids;
  for_each_line(in, [&](std::string_view line, std::size_t lineno) {
    const auto fields = split_fields(line, '\t');
    std::uint64_t dense, orig;
    if (fields.size() != 2 || !parse_u64(fields[0], dense) || !parse_u64(fields[1], orig) ||
        dense != ids.size()) {
      throw ParseError(name, lineno, "expected `dense<TAB>original` in dense order");
    }
    ids.push_back(orig);
  });
  IdMap map = IdMap::from_originals(ids);
  if (map.original != ids) throw Error(name + ": id map is not strictly increasing");
  return map;
}

std::vector<BehaviorRecord> read_dense_behaviors(std::istream& in, const std::string& name,
                                                 Index users, Index items) {
  std::vector<BehaviorRecord> out;
  for_each_line(in, [&](std::string_view line, std::size_t lineno) {
    const RawRecord r = parse_behavior_line(line, name, lineno);
    const auto check_user = [&](std::uint64_t u) {
      if (u >= static_cast<std::uint64_t>(users)) throw ParseError(name, lineno, "user id out of range");
      return UserId(static_cast<std::int32_t>(u));
    };
    if (r.item >= static_cast<std::uint64_t>(items)) throw ParseError(name, lineno, "item id out of range");
    BehaviorRecord rec;
    rec.initiator = check_user(r.initiator);
    rec.item = ItemId(static_cast<std::int32_t>(r.item));
    rec.success = r.success;
    for (auto p : r.participants) rec.participants.push_back(check_user(p));
    if (!std::is_sorted(rec.participants.begin(), rec.participants.end()) ||
        std::adjacent_find(rec.participants.begin(), rec.participants.end()) != rec.participants.end()) {
      throw ParseError(name, lineno, "participants must be sorted and unique");
    }
    out.push_back(std::move(rec));
  });
  return out;
}

void write_stats_text(std::ostream& out, const DatasetStats& s) {
  out << "users: " << s.users << '\n'
      << "items: " << s.items << '\n'
      << "social_edges: " << s.social_edges << '\n'
      << "behaviors: " << s.records << '\n'
      << "successful: " << s.successful << '\n'
      << "failed: " << s.failed << '\n'
      << "rejected_records: " << s.rejected_records << '\n'
      << "duplicate_participants: " << s.duplicate_participants << '\n'
      << "dropped_social_edges: " << s.dropped_social_edges << '\n';
}

std::string stats_json(const DatasetStats& s) {
  nlohmann::ordered_json j;
  j["users"] = s.users;
  j["items"] = s.items;
  j["social_edges"] = s.social_edges;
  j["behaviors"] = s.records;
  j["successful"] = s.successful;
  j["failed"] = s.failed;
  j["rejected_records"] = s.rejected_records;
  j["duplicate_participants"] = s.duplicate_participants;
  j["dropped_social_edges"] = s.dropped_social_edges;
  return j.dump(2) + "\n";
}

InteractionIndex::InteractionIndex(Index users, std::span<const BehaviorRecord> records)
    : items_(static_cast<std::size_t>(users)) {
  add(records);
}

void InteractionIndex::add(std::span<const BehaviorRecord> records) {
  for (const auto& r : records) {
    items_[r.initiator.value].push_back(r.item);
    for (UserId p : r.participants) items_[p.value].push_back(r.item);
  }
  for (auto& v : items_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

bool InteractionIndex::contains(UserId u, ItemId n) const {
  const auto& v = items_[u.value];
  return std::binary_search(v.begin(), v.end(), n);
}

std::uint64_t DatasetSplit::negatives_digest() const {
  Digest d;
  for (const auto& [user, items] : eval_negatives) {
    d.update_value(user.value);
    const auto n = static_cast<std::uint64_t>(items.size());
    d.update_value(n);
    for (ItemId i : items) d.update_value(i.value);
  }
  return d.value();
}

std::vector<ItemId> draw_unobserved(const InteractionIndex& observed, UserId user,
                                    ItemId positive, Index items, int k, bool allow_repeats,
                                    Rng& rng) {
  const auto seen = observed.items_of(user);
  const Index free = items - static_cast<Index>(seen.size());
  std::vector<ItemId> out;
  out.reserve(static_cast<std::size_t>(k));

  if (free <= 0 || (!allow_repeats && free < k)) {
    if (allow_repeats) return out;
    // Exhausted: uniform over every item other than the positive.
    if (items < 2) throw Error("cannot sample a negative from a single-item universe");
    while (static_cast<int>(out.size()) < k) {
      const ItemId n(static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(items))));
      if (n != positive) out.push_back(n);
    }
    return out;
  }

  if (free < k) {
    // Fewer unobserved items than requested: draw with replacement.
    std::vector<ItemId> pool;
    pool.reserve(static_cast<std::size_t>(free));
    for (Index n = 0, j = 0; n < items; ++n) {
      if (j < static_cast<Index>(seen.size()) && seen[j].index() == n) {
        ++j;
        continue;
      }
      pool.emplace_back(static_cast<std::int32_t>(n));
    }
    for (int i = 0; i < k; ++i) out.push_back(pool[rng.below(pool.size())]);
    return out;
  }

  if (2 * static_cast<Index>(seen.size()) < items && 2 * k <= free) {
    // Mostly unobserved universe: rejection sampling.
    while (static_cast<int>(out.size()) < k) {
      const ItemId n(static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(items))));
      if (std::binary_search(seen.begin(), seen.end(), n)) continue;
      if (std::find(out.begin(), out.end(), n) != out.end()) continue;
      out.push_back(n);
    }
    return out;
  }

  std::vector<ItemId> pool;
  pool.reserve(static_cast<std::size_t>(free));
  for (Index n = 0, j = 0; n < items; ++n) {
    if (j < static_cast<Index>(seen.size()) && seen[j].index() == n) {
      ++j;
      continue;
    }
    pool.emplace_back(static_cast<std::int32_t>(n));
  }
  for (int i = 0; i < k; ++i) {
    const auto j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

std::vector<NegativeSample> sample_negatives(const BehaviorLog& log,
                                             const InteractionIndex& observed, Index items, int k,
                                             Rng& rng) {
  if (k < 1) throw Error("negative sampling ratio must be at least 1");
  std::vector<NegativeSample> out;
  out.reserve(log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& r = log.records[i];
    out.push_back({i, draw_unobserved(observed, r.initiator, r.item, items, k, false, rng)});
  }
  return out;
}

DatasetSplit split_leave_one_out(const BehaviorLog& log, Index users, Index items,
                                 std::uint64_t seed, int eval_negatives) {
  Rng rng(seed);
  DatasetSplit split;
  split.users = users;
  split.items = items;
  split.interactions = InteractionIndex(users, log.records);

  std::vector<std::vector<std::size_t>> by_user(static_cast<std::size_t>(users));
  for (std::size_t i = 0; i < log.size(); ++i) by_user[log.records[i].initiator.value].push_back(i);

  std::vector<bool> held_out(log.size(), false);
  for (Index u = 0; u < users; ++u) {
    auto& mine = by_user[u];
    if (mine.size() < 2) continue;
    // No timestamps: the held-out record is a seeded uniform choice.
    const auto t = rng.below(mine.size());
    held_out[mine[t]] = true;
    split.test.emplace(UserId(u), log.records[mine[t]]);
    mine.erase(mine.begin() + static_cast<std::ptrdiff_t>(t));
    if (mine.size() < 2) continue;
    const auto v = rng.below(mine.size());
    held_out[mine[v]] = true;
    split.validation.emplace(UserId(u), log.records[mine[v]]);
  }

  std::vector<BehaviorRecord> train;
  train.reserve(log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (!held_out[i]) train.push_back(log.records[i]);
  }
  split.train = BehaviorLog::from_records(std::move(train));

  for (const auto& [user, record] : split.test) {
    split.eval_negatives.emplace(
        user, draw_unobserved(split.interactions, user, record.item, items, eval_negatives, true, rng));
  }
  return split;
}

}  // namespace gbgcn

namespace gbgcn {

namespace {

std::ofstream create(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

}  // namespace

void write_prepared(const std::filesystem::path& dir, const Dataset& dataset,
                    const DatasetSplit& split, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const auto held = [](const std::map<UserId, BehaviorRecord>& m) {
    std::vector<BehaviorRecord> out;
    for (const auto& [_, r] : m) out.push_back(r);
    return out;
  };
  {
    auto f = create(dir / "train.tsv");
    write_behaviors(f, split.train.records);
  }
  {
    auto f = create(dir / "validation.tsv");
    write_behaviors(f, held(split.validation));
  }
  {
    auto f = create(dir / "test.tsv");
    write_behaviors(f, held(split.test));
  }
  {
    auto f = create(dir / "social.tsv");
    write_social(f, dataset.social);
  }
  {
    auto f = create(dir / "negatives.tsv");
    for (const auto& [user, items] : split.eval_negatives) {
      f << user.value << '\t';
      for (std::size_t i = 0; i < items.size(); ++i) f << (i ? "," : "") << items[i].value;
      f << '\n';
    }
  }
  {
    auto f = create(dir / "user_map.tsv");
    write_id_map(f, dataset.users);
  }
  {
    auto f = create(dir / "item_map.tsv");
    write_id_map(f, dataset.items);
  }
  {
    auto f = create(dir / "stats.json");
    f << stats_json(dataset.stats);
  }
  {
    nlohmann::ordered_json j;
    j["users"] = split.users;
    j["items"] = split.items;
    j["seed"] = seed;
    j["test_users"] = split.test.size();
    j["validation_users"] = split.validation.size();
    j["negatives_digest"] = hex(split.negatives_digest());
    auto f = create(dir / "split.json");
    f << j.dump(2) << '\n';
  }
}

PreparedData read_prepared(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  PreparedData out;
  nlohmann::json meta;
  {
    auto f = open_input(dir / "split.json");
    try {
      meta = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw Error((dir / "split.json").string() + ": " + e.what());
    }
  }
  const Index users = meta.at("users").get<Index>();
  const Index items = meta.at("items").get<Index>();
  {
    auto f = open_input(dir / "user_map.tsv");
    out.users = read_id_map(f, (dir / "user_map.tsv").string());
    auto g = open_input(dir / "item_map.tsv");
    out.items = read_id_map(g, (dir / "item_map.tsv").string());
  }
  if (out.users.size() != users || out.items.size() != items) {
    throw Error(dir.string() + ": id maps disagree with split.json");
  }

  const auto read_records = [&](const char* name) {
    auto f = open_input(dir / name);
    return read_dense_behaviors(f, (dir / name).string(), users, items);
  };
  DatasetSplit& split = out.split;
  split.users = users;
  split.items = items;
  split.train = BehaviorLog::from_records(read_records("train.tsv"));
  std::vector<BehaviorRecord> all = split.train.records;
  for (const auto& [name, target] : {std::pair{"validation.tsv", &split.validation},
                                     std::pair{"test.tsv", &split.test}}) {
    for (auto& r : read_records(name)) {
      all.push_back(r);
      if (!target->emplace(r.initiator, r).second) {
        throw Error((dir / name).string() + ": more than one record for user " +
                    std::to_string(r.initiator.value));
      }
    }
  }
  split.interactions = InteractionIndex(users, all);

  {
    const auto path = dir / "negatives.tsv";
    auto f = open_input(path);
    for_each_line(f, [&](std::string_view line, std::size_t lineno) {
      const auto fields = split_fields(line, '\t');
      std::uint64_t u = 0;
      if (fields.size() != 2 || !parse_u64(fields[0], u) || u >= static_cast<std::uint64_t>(users)) {
        throw ParseError(path.string(), lineno, "expected `user<TAB>item,item,...`");
      }
      std::vector<ItemId> negs;
      for (auto x : split_fields(fields[1], ',')) {
        std::uint64_t n = 0;
        if (!parse_u64(x, n) || n >= static_cast<std::uint64_t>(items)) {
          throw ParseError(path.string(), lineno, "bad item id");
        }
        negs.emplace_back(static_cast<std::int32_t>(n));
      }
      if (!split.eval_negatives.emplace(UserId(static_cast<std::int32_t>(u)), std::move(negs)).second) {
        throw ParseError(path.string(), lineno, "duplicate user " + std::to_string(u));
      }
    });
  }
  if (hex(split.negatives_digest()) != meta.at("negatives_digest").get<std::string>()) {
    throw Error(dir.string() + ": frozen negatives do not match their recorded digest");
  }
  for (const auto& [u, _] : split.test) {
    if (!split.eval_negatives.contains(u)) {
      throw Error(dir.string() + ": test user " + std::to_string(u.value) + " has no negatives");
    }
  }

  {
    const auto path = dir / "social.tsv";
    auto f = open_input(path);
    std::vector<std::pair<UserId, UserId>> edges;
    for_each_line(f, [&](std::string_view line, std::size_t lineno) {
      const auto fields = split_fields(line, '\t');
      std::uint64_t a = 0, b = 0;
      if (fields.size() != 2 || !parse_u64(fields[0], a) || !parse_u64(fields[1], b) ||
          a >= static_cast<std::uint64_t>(users) || b >= static_cast<std::uint64_t>(users)) {
        throw ParseError(path.string(), lineno, "expected `user_a<TAB>user_b` with dense ids");
      }
      edges.emplace_back(UserId(static_cast<std::int32_t>(a)), UserId(static_cast<std::int32_t>(b)));
    });
    out.social = SocialGraph(users, edges);
  }
  {
    auto f = open_input(dir / "stats.json");
    try {
      const auto j = nlohmann::json::parse(f);
      auto& s = out.stats;
      s.users = j.at("users").get<Index>();
      s.items = j.at("items").get<Index>();
      s.social_edges = j.at("social_edges").get<Index>();
      s.records = j.at("behaviors").get<Index>();
      s.successful = j.at("successful").get<Index>();
      s.failed = j.at("failed").get<Index>();
      s.rejected_records = j.value("rejected_records", Index{0});
      s.duplicate_participants = j.value("duplicate_participants", Index{0});
      s.dropped_social_edges = j.value("dropped_social_edges", Index{0});
    } catch (const nlohmann::json::exception& e) {
      throw Error((dir / "stats.json").string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace gbgcn
