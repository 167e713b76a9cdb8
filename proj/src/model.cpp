#include "gbgcn/model.hpp"

#include "gbgcn/parallel.hpp"
#include "gbgcn/propagation.hpp"

#include <cmath>

namespace gbgcn {

std::string_view transform_name(Transform t) {
  switch (t) {
    case Transform::vi_ui: return "vi_ui";
    case Transform::up_ui: return "up_ui";
    case Transform::ui_vi: return "ui_vi";
    case Transform::vp_up: return "vp_up";
    case Transform::ui_up: return "ui_up";
    case Transform::up_vp: return "up_vp";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// ModelParams

template <typename Scalar>
ModelParams<Scalar> ModelParams<Scalar>::zeros(Index users, Index items, int dim, int layers,
                                               bool transforms) {
  ModelParams p;
  p.users = Matrix<Scalar>::Zero(users, dim);
  p.items = Matrix<Scalar>::Zero(items, dim);
  if (transforms) {
    const Index w = static_cast<Index>(layers + 1) * dim;
    for (int t = 0; t < kTransforms; ++t) {
      p.weights[t] = Matrix<Scalar>::Zero(w, w);
      p.biases[t] = Vector<Scalar>::Zero(w);
    }
  }
  return p;
}

template <typename Scalar>
ModelParams<Scalar> ModelParams<Scalar>::xavier(Index users, Index items, int dim, int layers,
                                                bool transforms, Rng& rng) {
  ModelParams p = zeros(users, items, dim, layers, transforms);
  const auto fill = [&rng](Matrix<Scalar>& m, Index fan_in, Index fan_out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
  };
  // Embedding tables follow the (num_embeddings, dim) fan convention.
  fill(p.users, dim, users);
  fill(p.items, dim, items);
  if (transforms) {
    for (auto& w : p.weights) fill(w, w.rows(), w.cols());
  }
  return p;
}

template <typename Scalar>
int ModelParams<Scalar>::layers() const {
  if (!has_transforms() || dim() == 0) return 0;
  return static_cast<int>(weights[0].rows() / dim()) - 1;
}

template <typename Scalar>
void ModelParams<Scalar>::set_zero() {
  for_each_tensor([](std::span<Scalar> t) { std::fill(t.begin(), t.end(), Scalar(0)); });
}

template <typename Scalar>
bool ModelParams<Scalar>::all_finite() const {
  bool ok = true;
  for_each_tensor([&ok](std::span<const Scalar> t) {
    for (Scalar x : t) ok = ok && std::isfinite(x);
  });
  return ok;
}

template <typename Scalar>
Scalar ModelParams<Scalar>::squared_norm() const {
  Scalar s = 0;
  for_each_tensor([&s](std::span<const Scalar> t) {
    for (Scalar x : t) s += x * x;
  });
  return s;
}

template <typename Scalar>
bool ModelParams<Scalar>::same_shape(const ModelParams& o) const {
  const auto same = [](const auto& a, const auto& b) { return a.rows() == b.rows() && a.cols() == b.cols(); };
  if (!same(users, o.users) || !same(items, o.items)) return false;
  for (int t = 0; t < kTransforms; ++t) {
    if (!same(weights[t], o.weights[t]) || !same(biases[t], o.biases[t])) return false;
  }
  return true;
}

template <typename Scalar>
bool ModelParams<Scalar>::operator==(const ModelParams& o) const {
  if (!same_shape(o)) return false;
  if (users != o.users || items != o.items) return false;
  for (int t = 0; t < kTransforms; ++t) {
    if (weights[t] != o.weights[t] || biases[t] != o.biases[t]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// ModelConfig

ModelConfig ModelConfig::from(const Hyperparams& hp) {
  ModelConfig c;
  c.dim = hp.dim;
  c.layers = hp.layers;
  c.activation = hp.activation;
  c.leaky_slope = hp.leaky_slope;
  c.alpha = hp.alpha;
  c.renormalize_alpha = hp.renormalize_alpha;
  c.threads = hp.threads;
  switch (hp.model) {
    case ModelKind::gbgcn:
      break;
    case ModelKind::gbmf:
      c = c.simplified();
      break;
    case ModelKind::mf:
      c = c.simplified();
      c.alpha = 0.0;
      break;
  }
  return c;
}

ModelConfig ModelConfig::simplified() const {
  ModelConfig c = *this;
  c.layers = 0;
  c.cross_view = false;
  return c;
}

template <typename Scalar>
Scalar activate(Scalar z, const ModelConfig& config) {
  switch (config.activation) {
    case Activation::leaky_relu:
      return z > Scalar(0) ? z : static_cast<Scalar>(config.leaky_slope) * z;
    case Activation::tanh:
      return std::tanh(z);
    case Activation::identity:
      break;
  }
  return z;
}

template <typename Scalar>
Scalar activate_derivative(Scalar z, const ModelConfig& config) {
  switch (config.activation) {
    case Activation::leaky_relu:
      return z > Scalar(0) ? Scalar(1) : static_cast<Scalar>(config.leaky_slope);
    case Activation::tanh: {
      const Scalar t = std::tanh(z);
      return Scalar(1) - t * t;
    }
    case Activation::identity:
      break;
  }
  return Scalar(1);
}

// ---------------------------------------------------------------------------
// Row plans

const std::array<BranchSpec, kTransforms>& branch_specs() {
  static const std::array<BranchSpec, kTransforms> specs{{
      {Transform::vi_ui, Side::user, View::initiator, Side::item, View::initiator},
      {Transform::up_ui, Side::user, View::initiator, Side::user, View::participant},
      {Transform::ui_vi, Side::item, View::initiator, Side::user, View::initiator},
      {Transform::vp_up, Side::user, View::participant, Side::item, View::participant},
      {Transform::ui_up, Side::user, View::participant, Side::user, View::initiator},
      {Transform::up_vp, Side::item, View::participant, Side::user, View::participant},
  }};
  return specs;
}

const Csr& branch_adjacency(const HeteroGraphBundle& g, Transform t) {
  switch (t) {
    case Transform::vi_ui: return g.initiator_user;
    case Transform::up_ui: return g.sharing_out;
    case Transform::ui_vi: return g.initiator_item;
    case Transform::vp_up: return g.participant_user;
    case Transform::ui_up: return g.sharing_in;
    case Transform::up_vp: return g.participant_item;
  }
  throw Error("unknown transform");
}

RowRequest::RowRequest(Index user_count, Index item_count) {
  for (int v = 0; v < kViews; ++v) {
    users[v].assign(static_cast<std::size_t>(user_count), 0);
    items[v].assign(static_cast<std::size_t>(item_count), 0);
  }
}

namespace {

std::vector<std::int32_t> mask_rows(const std::vector<char>& mask) {
  std::vector<std::int32_t> rows;
  for (std::size_t r = 0; r < mask.size(); ++r) {
    if (mask[r]) rows.push_back(static_cast<std::int32_t>(r));
  }
  return rows;
}

std::vector<std::int32_t> all_rows(Index n) {
  std::vector<std::int32_t> rows(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) rows[r] = static_cast<std::int32_t>(r);
  return rows;
}

}  // namespace

RowPlan full_plan(const HeteroGraphBundle& graphs, const ModelConfig& config) {
  RowPlan plan;
  for (int v = 0; v < kViews; ++v) {
    plan.user_rows[v].assign(config.layers + 1, {});
    plan.item_rows[v].assign(config.layers + 1, {});
    for (int l = 1; l <= config.layers; ++l) {
      plan.user_rows[v][l] = all_rows(graphs.users);
      plan.item_rows[v][l] = all_rows(graphs.items);
    }
  }
  if (config.cross_view) {
    for (const auto& spec : branch_specs()) {
      const Csr& adj = branch_adjacency(graphs, spec.transform);
      auto& rows = plan.branch_rows[static_cast<int>(spec.transform)];
      for (Index r = 0; r < adj.rows(); ++r) {
        if (adj.degree(r) > 0) rows.push_back(static_cast<std::int32_t>(r));
      }
    }
  }
  return plan;
}

RowPlan plan_rows(const HeteroGraphBundle& graphs, const ModelConfig& config,
                  const RowRequest& request) {
  RowPlan plan;
  auto inview_users = request.users;
  auto inview_items = request.items;

  if (config.cross_view) {
    for (const auto& spec : branch_specs()) {
      const int tv = view_index(spec.target_view);
      const int sv = view_index(spec.source_view);
      const auto& wanted = spec.target == Side::user ? request.users[tv] : request.items[tv];
      auto& sources = spec.source == Side::user ? inview_users[sv] : inview_items[sv];
      const Csr& adj = branch_adjacency(graphs, spec.transform);
      auto& rows = plan.branch_rows[static_cast<int>(spec.transform)];
      for (std::size_t r = 0; r < wanted.size(); ++r) {
        if (!wanted[r] || adj.degree(static_cast<Index>(r)) == 0) continue;
        rows.push_back(static_cast<std::int32_t>(r));
        for (auto c : adj.neighbors(static_cast<Index>(r))) sources[c] = 1;
      }
    }
  }

  const int L = config.layers;
  for (int v = 0; v < kViews; ++v) {
    const View view = static_cast<View>(v);
    // Every layer is part of the concatenation, so each starts from the same mask.
    std::vector<std::vector<char>> users(L + 1, inview_users[v]);
    std::vector<std::vector<char>> items(L + 1, inview_items[v]);
    for (int l = L; l >= 1; --l) {
      const Csr& ua = graphs.view_users(view);
      const Csr& ia = graphs.view_items(view);
      for (std::size_t r = 0; r < users[l].size(); ++r) {
        if (!users[l][r]) continue;
        for (auto c : ua.neighbors(static_cast<Index>(r))) items[l - 1][c] = 1;
      }
      for (std::size_t r = 0; r < items[l].size(); ++r) {
        if (!items[l][r]) continue;
        for (auto c : ia.neighbors(static_cast<Index>(r))) users[l - 1][c] = 1;
      }
    }
    plan.user_rows[v].assign(L + 1, {});
    plan.item_rows[v].assign(L + 1, {});
    for (int l = 1; l <= L; ++l) {
      plan.user_rows[v][l] = mask_rows(users[l]);
      plan.item_rows[v][l] = mask_rows(items[l]);
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Forward

namespace {

template <typename Scalar>
void check_shapes(const HeteroGraphBundle& graphs, const ModelParams<Scalar>& params,
                  const ModelConfig& config) {
  if (params.users.rows() != graphs.users || params.items.rows() != graphs.items) {
    throw Error("parameter tables do not match the graph (" + std::to_string(params.users.rows()) +
                "x" + std::to_string(params.items.rows()) + " vs " + std::to_string(graphs.users) +
                "x" + std::to_string(graphs.items) + ")");
  }
  if (params.users.cols() != config.dim || params.items.cols() != config.dim) {
    throw Error("embedding width does not match dim=" + std::to_string(config.dim));
  }
  if (config.cross_view) {
    const Index w = config.inview_width();
    for (int t = 0; t < kTransforms; ++t) {
      if (params.weights[t].rows() != w || params.weights[t].cols() != w ||
          params.biases[t].size() != w) {
        throw Error("transformation " + std::string(transform_name(static_cast<Transform>(t))) +
                    " is not " + std::to_string(w) + "x" + std::to_string(w));
      }
    }
  }
}

template <typename Scalar>
void resize_embeddings(const HeteroGraphBundle& graphs, const ModelConfig& config,
                       ViewEmbeddings<Scalar>& emb) {
  emb.dim = config.dim;
  emb.layers = config.layers;
  emb.cross_view = config.cross_view;
  const Index fw = config.final_width();
  for (int v = 0; v < kViews; ++v) {
    if (emb.users[v].rows() != graphs.users || emb.users[v].cols() != fw) {
      emb.users[v] = Matrix<Scalar>::Zero(graphs.users, fw);
    }
    if (emb.items[v].rows() != graphs.items || emb.items[v].cols() != fw) {
      emb.items[v] = Matrix<Scalar>::Zero(graphs.items, fw);
    }
  }
}

// dst = mean of src rows `neighbors` restricted to columns [col, col + width).
template <typename Dst, typename Scalar>
void gather_mean(Dst&& dst, const Matrix<Scalar>& src, std::span<const std::int32_t> neighbors,
                 Index col, Index width) {
  dst.setZero();
  for (auto c : neighbors) dst += src.row(c).segment(col, width);
  if (!neighbors.empty()) dst /= static_cast<Scalar>(neighbors.size());
}

template <typename Scalar>
void propagate_inview(const HeteroGraphBundle& graphs, const ModelParams<Scalar>& params,
                      const ModelConfig& config, const RowPlan& plan, ViewEmbeddings<Scalar>& emb) {
  const Index d = config.dim;
  for (int v = 0; v < kViews; ++v) {
    emb.users[v].leftCols(d) = params.users;
    emb.items[v].leftCols(d) = params.items;
  }
  for (int l = 1; l <= config.layers; ++l) {
    for (int v = 0; v < kViews; ++v) {
      const View view = static_cast<View>(v);
      auto& users = emb.users[v];
      auto& items = emb.items[v];
      const Csr& ua = graphs.view_users(view);
      const Csr& ia = graphs.view_items(view);
      const auto& urows = plan.user_rows[v][l];
      const auto& irows = plan.item_rows[v][l];
      parallel_for(urows.size(), config.threads, [&](std::size_t j) {
        const auto r = urows[j];
        gather_mean(users.row(r).segment(l * d, d), items, ua.neighbors(r), (l - 1) * d, d);
      });
      parallel_for(irows.size(), config.threads, [&](std::size_t j) {
        const auto r = irows[j];
        gather_mean(items.row(r).segment(l * d, d), users, ia.neighbors(r), (l - 1) * d, d);
      });
    }
  }
}

template <typename Scalar>
void propagate_crossview(const HeteroGraphBundle& graphs, const ModelParams<Scalar>& params,
                         const ModelConfig& config, const RowPlan& plan,
                         ViewEmbeddings<Scalar>& emb, CrossViewCache<Scalar>* cache) {
  const Index w = config.inview_width();
  for (int v = 0; v < kViews; ++v) {
    emb.users[v].rightCols(w).setZero();
    emb.items[v].rightCols(w).setZero();
  }
  for (const auto& spec : branch_specs()) {
    const int t = static_cast<int>(spec.transform);
    const auto& rows = plan.branch_rows[t];
    const Csr& adj = branch_adjacency(graphs, spec.transform);
    const auto& source = spec.source == Side::user ? emb.users[view_index(spec.source_view)]
                                                   : emb.items[view_index(spec.source_view)];
    auto& target = spec.target == Side::user ? emb.users[view_index(spec.target_view)]
                                             : emb.items[view_index(spec.target_view)];

    Matrix<Scalar> inputs(static_cast<Index>(rows.size()), w);
    parallel_for(rows.size(), config.threads, [&](std::size_t j) {
      gather_mean(inputs.row(static_cast<Index>(j)), source, adj.neighbors(rows[j]), 0, w);
    });
    Matrix<Scalar> pre = inputs * params.weights[t];
    pre.rowwise() += params.biases[t].transpose();
    for (std::size_t j = 0; j < rows.size(); ++j) {
      auto out = target.row(rows[j]).tail(w);
      for (Index k = 0; k < w; ++k) out(k) += activate(pre(static_cast<Index>(j), k), config);
    }
    if (cache != nullptr) {
      cache->inputs[t] = std::move(inputs);
      cache->preactivations[t] = std::move(pre);
    }
  }
}

}  // namespace

template <typename Scalar>
void propagate(const HeteroGraphBundle& graphs, const ModelParams<Scalar>& params,
               const ModelConfig& config, const RowPlan& plan, ViewEmbeddings<Scalar>& emb,
               CrossViewCache<Scalar>* cache) {
  check_shapes(graphs, params, config);
  resize_embeddings(graphs, config, emb);
  propagate_inview(graphs, params, config, plan, emb);
  if (config.cross_view) propagate_crossview(graphs, params, config, plan, emb, cache);
}

template <typename Scalar>
void backpropagate(const HeteroGraphBundle& graphs, const ModelParams<Scalar>& params,
                   const ModelConfig& config, const RowPlan& plan,
                   const CrossViewCache<Scalar>& cache, ViewEmbeddings<Scalar>& grad,
                   ModelParams<Scalar>& out) {
  const Index d = config.dim;
  const Index w = config.inview_width();

  if (config.cross_view) {
    for (const auto& spec : branch_specs()) {
      const int t = static_cast<int>(spec.transform);
      const auto& rows = plan.branch_rows[t];
      if (rows.empty()) continue;
      const Csr& adj = branch_adjacency(graphs, spec.transform);
      const auto& target = spec.target == Side::user ? grad.users[view_index(spec.target_view)]
                                                     : grad.items[view_index(spec.target_view)];
      auto& source = spec.source == Side::user ? grad.users[view_index(spec.source_view)]
                                               : grad.items[view_index(spec.source_view)];
      const auto& pre = cache.preactivations[t];

      Matrix<Scalar> dpre(static_cast<Index>(rows.size()), w);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto jj = static_cast<Index>(j);
        for (Index k = 0; k < w; ++k) {
          dpre(jj, k) = target(rows[j], w + k) * activate_derivative(pre(jj, k), config);
        }
      }
      out.weights[t].noalias() += cache.inputs[t].transpose() * dpre;
      out.biases[t] += dpre.colwise().sum().transpose();
      const Matrix<Scalar> dinputs = dpre * params.weights[t].transpose();
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto nb = adj.neighbors(rows[j]);
        const RowVector<Scalar> g = dinputs.row(static_cast<Index>(j)) / static_cast<Scalar>(nb.size());
        for (auto c : nb) source.row(c).head(w) += g;
      }
    }
  }

  for (int l = config.layers; l >= 1; --l) {
    for (int v = 0; v < kViews; ++v) {
      const View view = static_cast<View>(v);
      auto& gu = grad.users[v];
      auto& gi = grad.items[v];
      const Csr& ua = graphs.view_users(view);
      const Csr& ia = graphs.view_items(view);
      for (auto r : plan.user_rows[v][l]) {
        const auto nb = ua.neighbors(r);
        if (nb.empty()) continue;
        const RowVector<Scalar> g = gu.row(r).segment(l * d, d) / static_cast<Scalar>(nb.size());
        for (auto c : nb) gi.row(c).segment((l - 1) * d, d) += g;
      }
      for (auto r : plan.item_rows[v][l]) {
        const auto nb = ia.neighbors(r);
        if (nb.empty()) continue;
        const RowVector<Scalar> g = gi.row(r).segment(l * d, d) / static_cast<Scalar>(nb.size());
        for (auto c : nb) gu.row(c).segment((l - 1) * d, d) += g;
      }
    }
  }

  for (int v = 0; v < kViews; ++v) {
    out.users += grad.users[v].leftCols(d);
    out.items += grad.items[v].leftCols(d);
  }
}

template <typename Scalar>
ViewEmbeddings<Scalar> inview_propagate(const HeteroGraphBundle& graphs,
                                        const ModelParams<Scalar>& params,
                                        const ModelConfig& config) {
  check_shapes(graphs, params, config);
  ViewEmbeddings<Scalar> emb;
  resize_embeddings(graphs, config, emb);
  propagate_inview(graphs, params, config, full_plan(graphs, config), emb);
  return emb;
}

template <typename Scalar>
void crossview_propagate(const HeteroGraphBundle& graphs, ViewEmbeddings<Scalar>& emb,
                         const ModelParams<Scalar>& params, const ModelConfig& config) {
  check_shapes(graphs, params, config);
  if (!config.cross_view) return;
  if (emb.users[0].cols() != config.final_width() || emb.users[0].rows() != graphs.users) {
    throw Error("embeddings were not produced for this configuration");
  }
  propagate_crossview(graphs, params, config, full_plan(graphs, config), emb,
                      static_cast<CrossViewCache<Scalar>*>(nullptr));
}

template <typename Scalar>
ViewEmbeddings<Scalar> forward(const HeteroGraphBundle& graphs, const ModelParams<Scalar>& params,
                               const ModelConfig& config) {
  ViewEmbeddings<Scalar> emb;
  propagate(graphs, params, config, full_plan(graphs, config), emb);
  return emb;
}

template <typename Scalar>
Matrix<Scalar> concat_layers(std::span<const Matrix<Scalar>> layers) {
  if (layers.empty()) return {};
  Index cols = 0;
  for (const auto& m : layers) {
    if (m.rows() != layers.front().rows()) throw Error("concatenated blocks differ in height");
    cols += m.cols();
  }
  Matrix<Scalar> out(layers.front().rows(), cols);
  Index at = 0;
  for (const auto& m : layers) {
    out.middleCols(at, m.cols()) = m;
    at += m.cols();
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> concat_views(const Matrix<Scalar>& inview, const Matrix<Scalar>& crossview) {
  const std::array<Matrix<Scalar>, 2> parts{inview, crossview};
  return concat_layers<Scalar>(parts);
}

// ---------------------------------------------------------------------------
// Prediction

double initiator_coefficient(const SocialGraph& social, const ModelConfig& config, UserId user) {
  if (config.renormalize_alpha && social.degree(user) == 0) return 1.0;
  return 1.0 - config.alpha;
}

template <typename Scalar>
Vector<Scalar> score_items(const ViewEmbeddings<Scalar>& emb, const SocialGraph& social,
                           const ModelConfig& config, UserId user,
                           std::span<const ItemId> candidates) {
  const auto& ui = emb.user_final(View::initiator);
  const auto& vi = emb.item_final(View::initiator);
  const auto& up = emb.user_final(View::participant);
  const auto& vp = emb.item_final(View::participant);
  if (user.value < 0 || user.index() >= ui.rows() || social.users() != ui.rows()) {
    throw Error("user " + std::to_string(user.value) + " out of range");
  }
  for (ItemId n : candidates) {
    if (n.value < 0 || n.index() >= vi.rows()) throw Error("item " + std::to_string(n.value) + " out of range");
  }

  const auto me = ui.row(user.index());
  const auto coef = static_cast<Scalar>(initiator_coefficient(social, config, user));
  const auto friends = social.friends(user);
  const bool social_term = config.alpha != 0.0 && !friends.empty();
  RowVector<Scalar> friend_mean;
  if (social_term) {
    friend_mean = RowVector<Scalar>::Zero(up.cols());
    for (UserId f : friends) friend_mean += up.row(f.index());
    friend_mean /= static_cast<Scalar>(friends.size());
  }
  const auto a = static_cast<Scalar>(config.alpha);

  Vector<Scalar> out(static_cast<Index>(candidates.size()));
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const Index n = candidates[j].index();
    Scalar y = coef * me.dot(vi.row(n));
    if (social_term) y += a * friend_mean.dot(vp.row(n));
    out(static_cast<Index>(j)) = y;
  }
  return out;
}

template <typename Scalar>
Scalar predict(const ViewEmbeddings<Scalar>& emb, const SocialGraph& social,
               const ModelConfig& config, UserId user, ItemId item) {
  const std::array<ItemId, 1> one{item};
  return score_items(emb, social, config, user, std::span<const ItemId>(one))(0);
}

template <typename Scalar>
Scalar participant_affinity(const ViewEmbeddings<Scalar>& emb, UserId user, ItemId item) {
  return emb.user_final(View::participant).row(user.index()).dot(
      emb.item_final(View::participant).row(item.index()));
}

#define GBGCN_INSTANTIATE(S)                                                                        \
  template struct ModelParams<S>;                                                                   \
  template S activate<S>(S, const ModelConfig&);                                                    \
  template S activate_derivative<S>(S, const ModelConfig&);                                         \
  template void propagate<S>(const HeteroGraphBundle&, const ModelParams<S>&, const ModelConfig&,   \
                             const RowPlan&, ViewEmbeddings<S>&, CrossViewCache<S>*);               \
  template void backpropagate<S>(const HeteroGraphBundle&, const ModelParams<S>&,                   \
                                 const ModelConfig&, const RowPlan&, const CrossViewCache<S>&,      \
                                 ViewEmbeddings<S>&, ModelParams<S>&);                              \
  template ViewEmbeddings<S> inview_propagate<S>(const HeteroGraphBundle&, const ModelParams<S>&,   \
                                                 const ModelConfig&);                               \
  template void crossview_propagate<S>(const HeteroGraphBundle&, ViewEmbeddings<S>&,                \
                                       const ModelParams<S>&, const ModelConfig&);                  \
  template ViewEmbeddings<S> forward<S>(const HeteroGraphBundle&, const ModelParams<S>&,            \
                                        const ModelConfig&);                                        \
  template Matrix<S> concat_layers<S>(std::span<const Matrix<S>>);                                  \
  template Matrix<S> concat_views<S>(const Matrix<S>&, const Matrix<S>&);                           \
  template Vector<S> score_items<S>(const ViewEmbeddings<S>&, const SocialGraph&,                   \
                                    const ModelConfig&, UserId, std::span<const ItemId>);           \
  template S predict<S>(const ViewEmbeddings<S>&, const SocialGraph&, const ModelConfig&, UserId,   \
                        ItemId);                                                                    \
  template S participant_affinity<S>(const ViewEmbeddings<S>&, UserId, ItemId);

GBGCN_INSTANTIATE(float)
GBGCN_INSTANTIATE(double)

#undef GBGCN_INSTANTIATE

}  // namespace gbgcn
