#pragma once

// Row-restricted forward and reverse passes. A RowPlan lists, per stage, the
// rows whose values some requested final embedding depends on; everything else
// is left untouched. The full plan reproduces the plain forward pass.

#include "gbgcn/graph.hpp"
#include "gbgcn/model.hpp"

#include <array>
#include <vector>

namespace gbgcn {

struct BranchSpec {
  Transform transform;
  Side target;
  View target_view;
  Side source;
  View source_view;
};

/// One entry per transformation, in Transform order.
const std::array<BranchSpec, kTransforms>& branch_specs();
const Csr& branch_adjacency(const HeteroGraphBundle& graphs, Transform t);

struct RowPlan {
  /// [view][layer] rows to aggregate; layer 0 (raw copy) is always complete.
  std::array<std::vector<std::vector<std::int32_t>>, kViews> user_rows;
  std::array<std::vector<std::vector<std::int32_t>>, kViews> item_rows;
  /// Target rows with a non-empty neighborhood for each transformation.
  std::array<std::vector<std::int32_t>, kTransforms> branch_rows;
};

/// Requested final rows per view, as 0/1 masks.
struct RowRequest {
  std::array<std::vector<char>, kViews> users;
  std::array<std::vector<char>, kViews> items;

  RowRequest(Index user_count, Index item_count);
  void user(View v, std::int32_t r) { users[view_index(v)][r] = 1; }
  void item(View v, std::int32_t r) { items[view_index(v)][r] = 1; }
};

RowPlan full_plan(const HeteroGraphBundle& graphs, const ModelConfig& config);
RowPlan plan_rows(const HeteroGraphBundle& graphs, const ModelConfig& config,
                  const RowRequest& request);

/// Per-transformation aggregated inputs and pre-activations, kept for the reverse pass.
template <typename Scalar>
struct CrossViewCache {
  std::array<Matrix<Scalar>, kTransforms> inputs;
  std::array<Matrix<Scalar>, kTransforms> preactivations;
};

/// Computes the planned rows of `emb` (resized as needed). Rows outside the
/// plan hold unspecified values.
template <typename Scalar>
void propagate(const HeteroGraphBundle& graphs, const ModelParams<Scalar>& params,
               const ModelConfig& config, const RowPlan& plan, ViewEmbeddings<Scalar>& emb,
               CrossViewCache<Scalar>* cache = nullptr);

/// Reverse pass. `grad` holds d(loss)/d(final embeddings) on entry (shaped like
/// the embeddings, zero outside the plan) and is consumed as scratch.
/// Parameter gradients are accumulated into `out`.
template <typename Scalar>
void backpropagate(const HeteroGraphBundle& graphs, const ModelParams<Scalar>& params,
                   const ModelConfig& config, const RowPlan& plan,
                   const CrossViewCache<Scalar>& cache, ViewEmbeddings<Scalar>& grad,
                   ModelParams<Scalar>& out);

}  // namespace gbgcn
