#pragma once

#include "gbgcn/rng.hpp"
#include "gbgcn/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gbgcn {

/// One group-buying event: an initiator launches `item`, the participants join.
/// Participants are sorted ascending, unique, and never contain the initiator.
struct BehaviorRecord {
  UserId initiator;
  ItemId item;
  std::vector<UserId> participants;
  bool success = false;

  bool operator==(const BehaviorRecord&) const = default;
};

/// Records plus their successful/failed partition (indices into `records`).
struct BehaviorLog {
  std::vector<BehaviorRecord> records;
  std::vector<std::size_t> successful;
  std::vector<std::size_t> failed;

  static BehaviorLog from_records(std::vector<BehaviorRecord> records);

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  bool operator==(const BehaviorLog&) const = default;
};

/// Symmetric, loop-free friendship relation stored as sorted adjacency lists.
class SocialGraph {
 public:
  SocialGraph() = default;
  SocialGraph(Index users, std::span<const std::pair<UserId, UserId>> edges);

  Index users() const { return static_cast<Index>(offsets_.size()) - 1; }
  std::span<const UserId> friends(UserId u) const;
  Index degree(UserId u) const { return offsets_[u.value + 1] - offsets_[u.value]; }
  bool connected(UserId a, UserId b) const;
  /// Undirected edges; each friendship counted once.
  Index edge_count() const { return static_cast<Index>(friends_.size()) / 2; }
  std::vector<std::pair<UserId, UserId>> edges() const;

  bool operator==(const SocialGraph&) const = default;

 private:
  std::vector<Index> offsets_{0};
  std::vector<UserId> friends_;
};

/// Bijective mapping between ids found in the input files and dense ids.
/// Dense ids follow ascending order of the original ids.
struct IdMap {
  std::vector<std::uint64_t> original;

  static IdMap from_originals(std::vector<std::uint64_t> ids);
  Index size() const { return static_cast<Index>(original.size()); }
  /// -1 when unknown.
  std::int64_t dense(std::uint64_t original_id) const;

  bool operator==(const IdMap& o) const { return original == o.original; }

 private:
  std::unordered_map<std::uint64_t, std::int32_t> lookup_;
};

struct DatasetStats {
  Index users = 0;
  Index items = 0;
  Index social_edges = 0;
  Index records = 0;
  Index successful = 0;
  Index failed = 0;
  Index rejected_records = 0;
  Index duplicate_participants = 0;
  Index dropped_social_edges = 0;

  bool operator==(const DatasetStats&) const = default;
};

struct Dataset {
  BehaviorLog log;
  SocialGraph social;
  IdMap users;
  IdMap items;
  DatasetStats stats;
};

Dataset ingest(const std::filesystem::path& behavior_path,
               const std::filesystem::path& social_path);
Dataset ingest(std::istream& behaviors, std::istream& social,
               const std::string& behavior_name = "behaviors",
               const std::string& social_name = "social");

/// Writes records in the behavior file grammar. With `ids`, dense ids are mapped
/// back to the original ones.
void write_behaviors(std::ostream& out, std::span<const BehaviorRecord> records,
                     const IdMap* users = nullptr, const IdMap* items = nullptr);
void write_social(std::ostream& out, const SocialGraph& social, const IdMap* users = nullptr);
void write_id_map(std::ostream& out, const IdMap& map);
IdMap read_id_map(std::istream& in, const std::string& name);

/// Parses already-dense files (as written by `prepare`) without remapping.
std::vector<BehaviorRecord> read_dense_behaviors(std::istream& in, const std::string& name,
                                                 Index users, Index items);

void write_stats_text(std::ostream& out, const DatasetStats& stats);
std::string stats_json(const DatasetStats& stats);

/// All items a user touched in any role, sorted and unique.
class InteractionIndex {
 public:
  InteractionIndex() = default;
  InteractionIndex(Index users, std::span<const BehaviorRecord> records);
  void add(std::span<const BehaviorRecord> records);

  std::span<const ItemId> items_of(UserId u) const { return items_[u.value]; }
  bool contains(UserId u, ItemId n) const;
  Index users() const { return static_cast<Index>(items_.size()); }

 private:
  std::vector<std::vector<ItemId>> items_;
};

struct DatasetSplit {
  Index users = 0;
  Index items = 0;
  BehaviorLog train;
  std::map<UserId, BehaviorRecord> validation;
  std::map<UserId, BehaviorRecord> test;
  std::map<UserId, std::vector<ItemId>> eval_negatives;
  InteractionIndex interactions;

  /// Digest of the frozen negatives; equal digests mean paired evaluations.
  std::uint64_t negatives_digest() const;
};

constexpr int kEvalNegatives = 999;

/// Leave-one-out split. Users with at least two initiator records get a test
/// record; those with at least two remaining also get a validation record.
DatasetSplit split_leave_one_out(const BehaviorLog& log, Index users, Index items,
                                 std::uint64_t seed, int eval_negatives = kEvalNegatives);

struct NegativeSample {
  std::size_t record;
  std::vector<ItemId> items;
};

/// k unobserved items per record, distinct within a record when possible.
std::vector<NegativeSample> sample_negatives(const BehaviorLog& log,
                                             const InteractionIndex& observed, Index items,
                                             int k, Rng& rng);

/// Draws k items for one user; used by `sample_negatives` and the split.
std::vector<ItemId> draw_unobserved(const InteractionIndex& observed, UserId user,
                                    ItemId positive, Index items, int k, bool allow_repeats,
                                    Rng& rng);

/// The directory written by `prepare`: dense-id behavior splits, the social
/// graph, frozen evaluation negatives, id maps and statistics.
struct PreparedData {
  DatasetSplit split;
  SocialGraph social;
  IdMap users;
  IdMap items;
  DatasetStats stats;
};

void write_prepared(const std::filesystem::path& dir, const Dataset& dataset,
                    const DatasetSplit& split, std::uint64_t seed);
PreparedData read_prepared(const std::filesystem::path& dir);

}  // namespace gbgcn
