#pragma once

#include "gbgcn/data.hpp"
#include "gbgcn/types.hpp"

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace gbgcn {

/// Compressed adjacency: row r's neighbors are targets[offsets[r] .. offsets[r+1]).
/// Rows are sorted and duplicate-free.
struct Csr {
  std::vector<Index> offsets{0};
  std::vector<std::int32_t> targets;

  static Csr from_pairs(Index rows, std::vector<std::pair<std::int32_t, std::int32_t>> pairs);

  Index rows() const { return static_cast<Index>(offsets.size()) - 1; }
  Index edges() const { return static_cast<Index>(targets.size()); }
  Index degree(Index r) const { return offsets[r + 1] - offsets[r]; }
  std::span<const std::int32_t> neighbors(Index r) const {
    return {targets.data() + offsets[r], targets.data() + offsets[r + 1]};
  }

  bool operator==(const Csr&) const = default;
};

enum class Graph { initiator, participant, sharing_in, sharing_out };
enum class Side { user, item };

struct NeighborView {
  std::span<const std::int32_t> neighbors;
  Index degree() const { return static_cast<Index>(neighbors.size()); }
};

struct GraphOptions {
  /// Failed records still contribute their participant and sharing edges unless set.
  bool exclude_failed_participants = false;
};

/// The initiator view, participant view and sharing graph of a training log.
struct HeteroGraphBundle {
  Index users = 0;
  Index items = 0;
  Csr initiator_user;    // user -> items launched
  Csr initiator_item;    // item -> initiators
  Csr participant_user;  // user -> items joined
  Csr participant_item;  // item -> participants
  Csr sharing_out;       // initiator -> participants
  Csr sharing_in;        // participant -> initiators

  const Csr& view_users(View v) const {
    return v == View::initiator ? initiator_user : participant_user;
  }
  const Csr& view_items(View v) const {
    return v == View::initiator ? initiator_item : participant_item;
  }

  bool operator==(const HeteroGraphBundle&) const = default;
};

HeteroGraphBundle build_graphs(const BehaviorLog& train, Index users, Index items,
                               const GraphOptions& options = {});

/// Throws when `vertex` is out of range or the side does not exist for the graph.
NeighborView neighbors(const HeteroGraphBundle& bundle, Graph graph, Side side, Index vertex);

/// One edge list per graph, `a<TAB>b` per line, for diffing.
void dump_edge_lists(const HeteroGraphBundle& bundle, const std::filesystem::path& dir);

}  // namespace gbgcn
