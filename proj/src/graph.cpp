#include "gbgcn/graph.hpp"

#include <algorithm>
#include <fstream>

namespace gbgcn {

Csr Csr::from_pairs(Index rows, std::vector<std::pair<std::int32_t, std::int32_t>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  Csr csr;
  csr.offsets.assign(static_cast<std::size_t>(rows) + 1, 0);
  csr.targets.reserve(pairs.size());
  for (const auto& [r, c] : pairs) {
    ++csr.offsets[r + 1];
    csr.targets.push_back(c);
  }
  for (Index r = 0; r < rows; ++r) csr.offsets[r + 1] += csr.offsets[r];
  return csr;
}

namespace {

using Pairs = std::vector<std::pair<std::int32_t, std::int32_t>>;

Pairs flipped(const Pairs& p) {
  Pairs out;
  out.reserve(p.size());
  for (const auto& [a, b] : p) out.emplace_back(b, a);
  return out;
}

}  // namespace

HeteroGraphBundle build_graphs(const BehaviorLog& train, Index users, Index items,
                               const GraphOptions& options) {
  Pairs launched, joined, shared;
  for (const auto& r : train.records) {
    if (r.initiator.index() >= users || r.item.index() >= items) {
      throw Error("training record references ids outside the graph dimensions");
    }
    launched.emplace_back(r.initiator.value, r.item.value);
    if (!r.success && options.exclude_failed_participants) continue;
    for (UserId p : r.participants) {
      joined.emplace_back(p.value, r.item.value);
      shared.emplace_back(r.initiator.value, p.value);
    }
  }

  HeteroGraphBundle g;
  g.users = users;
  g.items = items;
  g.initiator_item = Csr::from_pairs(items, flipped(launched));
  g.initiator_user = Csr::from_pairs(users, std::move(launched));
  g.participant_item = Csr::from_pairs(items, flipped(joined));
  g.participant_user = Csr::from_pairs(users, std::move(joined));
  g.sharing_in = Csr::from_pairs(users, flipped(shared));
  g.sharing_out = Csr::from_pairs(users, std::move(shared));
  return g;
}

NeighborView neighbors(const HeteroGraphBundle& bundle, Graph graph, Side side, Index vertex) {
  const Csr* csr = nullptr;
  switch (graph) {
    case Graph::initiator:
      csr = side == Side::user ? &bundle.initiator_user : &bundle.initiator_item;
      break;
    case Graph::participant:
      csr = side == Side::user ? &bundle.participant_user : &bundle.participant_item;
      break;
    case Graph::sharing_in:
    case Graph::sharing_out:
      if (side != Side::user) throw Error("the sharing graph has user vertices only");
      csr = graph == Graph::sharing_in ? &bundle.sharing_in : &bundle.sharing_out;
      break;
  }
  if (vertex < 0 || vertex >= csr->rows()) {
    throw Error("vertex " + std::to_string(vertex) + " out of range [0, " +
                std::to_string(csr->rows()) + ")");
  }
  return {csr->neighbors(vertex)};
}

void dump_edge_lists(const HeteroGraphBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto dump = [&](const Csr& csr, const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    for (Index r = 0; r < csr.rows(); ++r) {
      for (auto c : csr.neighbors(r)) out << r << '\t' << c << '\n';
    }
  };
  dump(bundle.initiator_user, "initiator_view.tsv");
  dump(bundle.participant_user, "participant_view.tsv");
  dump(bundle.sharing_out, "sharing.tsv");
}

}  // namespace gbgcn
