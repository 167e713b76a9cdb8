#pragma once

#include "gbgcn/data.hpp"
#include "gbgcn/graph.hpp"
#include "gbgcn/hyperparams.hpp"
#include "gbgcn/rng.hpp"
#include "gbgcn/types.hpp"

#include <array>
#include <span>
#include <string_view>

namespace gbgcn {

/// Cross-view transformations, named source -> target. The order is part of
/// the checkpoint layout.
enum class Transform : int { vi_ui, up_ui, ui_vi, vp_up, ui_up, up_vp };
constexpr int kTransforms = 6;
std::string_view transform_name(Transform t);

template <typename Scalar>
struct ModelParams {
  Matrix<Scalar> users;  // P x d raw embeddings
  Matrix<Scalar> items;  // Q x d raw embeddings
  std::array<Matrix<Scalar>, kTransforms> weights;  // (L+1)d square, empty for baselines
  std::array<Vector<Scalar>, kTransforms> biases;

  static ModelParams zeros(Index users, Index items, int dim, int layers, bool transforms = true);
  /// Uniform in +-sqrt(6 / (fan_in + fan_out)); biases start at zero.
  static ModelParams xavier(Index users, Index items, int dim, int layers, bool transforms,
                            Rng& rng);

  Index user_count() const { return users.rows(); }
  Index item_count() const { return items.rows(); }
  int dim() const { return static_cast<int>(users.cols()); }
  bool has_transforms() const { return weights[0].size() > 0; }
  /// Recovered from the transformation width; 0 for baselines.
  int layers() const;

  Matrix<Scalar>& weight(Transform t) { return weights[static_cast<int>(t)]; }
  const Matrix<Scalar>& weight(Transform t) const { return weights[static_cast<int>(t)]; }
  Vector<Scalar>& bias(Transform t) { return biases[static_cast<int>(t)]; }
  const Vector<Scalar>& bias(Transform t) const { return biases[static_cast<int>(t)]; }

  void set_zero();
  bool all_finite() const;
  Scalar squared_norm() const;
  bool same_shape(const ModelParams& o) const;

  /// Applies fn(span) to every tensor, in checkpoint order, as its row-major storage.
  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    fn(std::span<Scalar>(users.data(), users.size()));
    fn(std::span<Scalar>(items.data(), items.size()));
    if (!has_transforms()) return;
    for (auto& w : weights) fn(std::span<Scalar>(w.data(), w.size()));
    for (auto& b : biases) fn(std::span<Scalar>(b.data(), b.size()));
  }
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    fn(std::span<const Scalar>(users.data(), users.size()));
    fn(std::span<const Scalar>(items.data(), items.size()));
    if (!has_transforms()) return;
    for (const auto& w : weights) fn(std::span<const Scalar>(w.data(), w.size()));
    for (const auto& b : biases) fn(std::span<const Scalar>(b.data(), b.size()));
  }

  template <typename To>
  ModelParams<To> cast() const {
    ModelParams<To> out;
    out.users = users.template cast<To>();
    out.items = items.template cast<To>();
    for (int t = 0; t < kTransforms; ++t) {
      out.weights[t] = weights[t].template cast<To>();
      out.biases[t] = biases[t].template cast<To>();
    }
    return out;
  }

  bool operator==(const ModelParams& o) const;
};

/// The forward-pass knobs, derived from Hyperparams for a given model kind.
struct ModelConfig {
  int dim = 32;
  int layers = 2;
  bool cross_view = true;
  Activation activation = Activation::leaky_relu;
  double leaky_slope = 0.2;
  double alpha = 0.6;
  bool renormalize_alpha = false;
  int threads = 1;

  static ModelConfig from(const Hyperparams& hp);
  /// The propagation-free variant used for pre-training and GBMF.
  ModelConfig simplified() const;

  Index inview_width() const { return static_cast<Index>(layers + 1) * dim; }
  Index final_width() const { return cross_view ? 2 * inview_width() : inview_width(); }
};

/// Per-view user and item matrices. Columns hold layers 0..L (the in-view
/// concatenation) followed, when cross-view propagation is on, by the
/// cross-view output; the full row is the final embedding.
template <typename Scalar>
struct ViewEmbeddings {
  int dim = 0;
  int layers = 0;
  bool cross_view = false;
  std::array<Matrix<Scalar>, kViews> users;
  std::array<Matrix<Scalar>, kViews> items;

  Index inview_width() const { return static_cast<Index>(layers + 1) * dim; }

  auto user_layer(View v, int l) const { return users[view_index(v)].middleCols(l * dim, dim); }
  auto item_layer(View v, int l) const { return items[view_index(v)].middleCols(l * dim, dim); }
  auto user_inview(View v) const { return users[view_index(v)].leftCols(inview_width()); }
  auto item_inview(View v) const { return items[view_index(v)].leftCols(inview_width()); }
  auto user_crossview(View v) const { return users[view_index(v)].rightCols(inview_width()); }
  auto item_crossview(View v) const { return items[view_index(v)].rightCols(inview_width()); }
  const Matrix<Scalar>& user_final(View v) const { return users[view_index(v)]; }
  const Matrix<Scalar>& item_final(View v) const { return items[view_index(v)]; }
};

template <typename Scalar>
Scalar activate(Scalar z, const ModelConfig& config);
template <typename Scalar>
Scalar activate_derivative(Scalar z, const ModelConfig& config);

/// Layers 0..L of both views; mean aggregation, no transformation. Cross-view
/// columns (if any) are zero until `crossview_propagate` runs.
template <typename Scalar>
ViewEmbeddings<Scalar> inview_propagate(const HeteroGraphBundle& graphs,
                                        const ModelParams<Scalar>& params,
                                        const ModelConfig& config);

/// Fills the cross-view columns of `emb` from its in-view columns.
template <typename Scalar>
void crossview_propagate(const HeteroGraphBundle& graphs, ViewEmbeddings<Scalar>& emb,
                         const ModelParams<Scalar>& params, const ModelConfig& config);

/// Full forward pass over every vertex.
template <typename Scalar>
ViewEmbeddings<Scalar> forward(const HeteroGraphBundle& graphs, const ModelParams<Scalar>& params,
                               const ModelConfig& config);

/// Horizontal concatenation of equally tall blocks, in order.
template <typename Scalar>
Matrix<Scalar> concat_layers(std::span<const Matrix<Scalar>> layers);

template <typename Scalar>
Matrix<Scalar> concat_views(const Matrix<Scalar>& inview, const Matrix<Scalar>& crossview);

/// Initiator-view affinity blended with the friends' mean participant-view
/// affinity. Users without friends keep only the initiator term, scaled by
/// (1 - alpha) unless `renormalize_alpha` is set.
template <typename Scalar>
Scalar predict(const ViewEmbeddings<Scalar>& emb, const SocialGraph& social,
               const ModelConfig& config, UserId user, ItemId item);

/// `predict` for many candidates at once.
template <typename Scalar>
Vector<Scalar> score_items(const ViewEmbeddings<Scalar>& emb, const SocialGraph& social,
                           const ModelConfig& config, UserId user,
                           std::span<const ItemId> candidates);

/// Participant-view inner product, used by the role-specific loss variant.
template <typename Scalar>
Scalar participant_affinity(const ViewEmbeddings<Scalar>& emb, UserId user, ItemId item);

/// Weight on the initiator term for `user`.
double initiator_coefficient(const SocialGraph& social, const ModelConfig& config, UserId user);

}  // namespace gbgcn
