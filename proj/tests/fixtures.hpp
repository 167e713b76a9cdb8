#pragma once

#include "gbgcn/data.hpp"
#include "gbgcn/graph.hpp"
#include "gbgcn/rng.hpp"

#include <algorithm>
#include <vector>

namespace fixtures {

using namespace gbgcn;

struct Instance {
  Index users = 0;
  Index items = 0;
  BehaviorLog log;
  SocialGraph social;
  HeteroGraphBundle graphs;
};

// Small random world. Some users and items stay isolated on purpose so empty
// neighborhoods get exercised.
inline Instance random_instance(std::uint64_t seed, Index users, Index items, int records,
                                double friend_prob = 0.3, int max_participants = 3) {
  Rng rng(seed);
  Instance inst;
  inst.users = users;
  inst.items = items;
  std::vector<BehaviorRecord> recs;
  for (int i = 0; i < records; ++i) {
    BehaviorRecord r;
    r.initiator = UserId(static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(users))));
    r.item = ItemId(static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(items))));
    const auto k = rng.below(static_cast<std::uint64_t>(max_participants) + 1);
    for (std::uint64_t j = 0; j < k; ++j) {
      const UserId p(static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(users))));
      if (p != r.initiator) r.participants.push_back(p);
    }
    std::sort(r.participants.begin(), r.participants.end());
    r.participants.erase(std::unique(r.participants.begin(), r.participants.end()),
                         r.participants.end());
    r.success = !r.participants.empty() && rng.uniform() < 0.6;
    recs.push_back(std::move(r));
  }
  std::vector<std::pair<UserId, UserId>> edges;
  for (Index a = 0; a < users; ++a) {
    for (Index b = a + 1; b < users; ++b) {
      if (rng.uniform() < friend_prob) edges.emplace_back(UserId(a), UserId(b));
    }
  }
  inst.social = SocialGraph(users, edges);
  inst.log = BehaviorLog::from_records(std::move(recs));
  inst.graphs = build_graphs(inst.log, users, items);
  return inst;
}

// One negative per record, never the record's own item.
inline std::vector<NegativeSample> one_negative_each(const Instance& inst, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NegativeSample> out;
  for (std::size_t i = 0; i < inst.log.size(); ++i) {
    ItemId n;
    do {
      n = ItemId(static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(inst.items))));
    } while (n == inst.log.records[i].item);
    out.push_back({i, {n}});
  }
  return out;
}

}  // namespace fixtures
