#include "gbgcn/gradient.hpp"

#include <cmath>

namespace gbgcn {

template <typename Scalar>
GradientEngine<Scalar>::GradientEngine(const HeteroGraphBundle& graphs, const SocialGraph& social,
                                       ModelConfig model, LossConfig loss)
    : graphs_(graphs), social_(social), model_(model), loss_(loss) {
  if (social.users() != graphs.users) throw Error("social graph and behavior graphs disagree on users");
}

template <typename Scalar>
LossBreakdown GradientEngine<Scalar>::compute(const BehaviorLog& log,
                                              std::span<const NegativeSample> batch,
                                              const ModelParams<Scalar>& params,
                                              GradientTape<Scalar>& grad, double data_scale) {
  const Index users = graphs_.users;
  const Index items = graphs_.items;
  const bool social_term = model_.alpha != 0.0;
  constexpr int I = view_index(View::initiator);
  constexpr int P = view_index(View::participant);

  terms_.clear();
  term_positive_.clear();
  for (const auto& entry : batch) {
    const auto& record = log.records.at(entry.record);
    for (ItemId neg : entry.items) {
      expand_terms(record, neg, social_, loss_, terms_);
      term_positive_.resize(terms_.size(), record.success ? 1 : 0);
    }
  }

  RowRequest request(users, items);
  for (const auto& t : terms_) {
    if (t.kind == ScoreKind::composite) {
      request.user(View::initiator, t.user.value);
      request.item(View::initiator, t.preferred.value);
      request.item(View::initiator, t.other.value);
      if (social_term && social_.degree(t.user) > 0) {
        for (UserId f : social_.friends(t.user)) request.user(View::participant, f.value);
        request.item(View::participant, t.preferred.value);
        request.item(View::participant, t.other.value);
      }
    } else {
      request.user(View::participant, t.user.value);
      request.item(View::participant, t.preferred.value);
      request.item(View::participant, t.other.value);
    }
  }
  const RowPlan plan = full_forward ? full_plan(graphs_, model_) : plan_rows(graphs_, model_, request);
  propagate(graphs_, params, model_, plan, emb_, &cache_);

  const Index fw = model_.final_width();
  const auto& ui = emb_.users[I];
  const auto& vi = emb_.items[I];
  const auto& up = emb_.users[P];
  const auto& vp = emb_.items[P];

  // Friends' mean participant-view embedding per composite-scored user.
  std::vector<std::int32_t> slot(static_cast<std::size_t>(users), -1);
  std::vector<UserId> slotted;
  if (social_term) {
    for (const auto& t : terms_) {
      if (t.kind == ScoreKind::composite && slot[t.user.value] < 0 && social_.degree(t.user) > 0) {
        slot[t.user.value] = static_cast<std::int32_t>(slotted.size());
        slotted.push_back(t.user);
      }
    }
  }
  Matrix<Scalar> friend_mean = Matrix<Scalar>::Zero(static_cast<Index>(slotted.size()), fw);
  Matrix<Scalar> friend_mean_grad = Matrix<Scalar>::Zero(static_cast<Index>(slotted.size()), fw);
  for (std::size_t s = 0; s < slotted.size(); ++s) {
    const auto friends = social_.friends(slotted[s]);
    for (UserId f : friends) friend_mean.row(static_cast<Index>(s)) += up.row(f.index());
    friend_mean.row(static_cast<Index>(s)) /= static_cast<Scalar>(friends.size());
  }

  for (int v = 0; v < kViews; ++v) {
    grad_emb_.users[v].setZero(users, fw);
    grad_emb_.items[v].setZero(items, fw);
  }
  auto& gui = grad_emb_.users[I];
  auto& gvi = grad_emb_.items[I];
  auto& gup = grad_emb_.users[P];
  auto& gvp = grad_emb_.items[P];
  const auto alpha = static_cast<Scalar>(model_.alpha);

  const auto score = [&](const PairTerm& t, ItemId n) -> Scalar {
    const Index a = t.user.index();
    if (t.kind == ScoreKind::participant) return up.row(a).dot(vp.row(n.index()));
    const auto coef = static_cast<Scalar>(initiator_coefficient(social_, model_, t.user));
    Scalar y = coef * ui.row(a).dot(vi.row(n.index()));
    if (const auto s = slot[a]; s >= 0) y += alpha * friend_mean.row(s).dot(vp.row(n.index()));
    return y;
  };
  const auto push_back_score = [&](const PairTerm& t, ItemId n, Scalar upstream) {
    const Index a = t.user.index();
    const Index x = n.index();
    if (t.kind == ScoreKind::participant) {
      gup.row(a) += upstream * vp.row(x);
      gvp.row(x) += upstream * up.row(a);
      return;
    }
    const auto coef = static_cast<Scalar>(initiator_coefficient(social_, model_, t.user));
    gui.row(a) += (upstream * coef) * vi.row(x);
    gvi.row(x) += (upstream * coef) * ui.row(a);
    if (const auto s = slot[a]; s >= 0) {
      friend_mean_grad.row(s) += (upstream * alpha) * vp.row(x);
      gvp.row(x) += (upstream * alpha) * friend_mean.row(s);
    }
  };

  LossBreakdown out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    const double gap = static_cast<double>(score(t, t.other)) - static_cast<double>(score(t, t.preferred));
    (term_positive_[i] ? out.loss_pos : out.loss_neg) += t.weight * softplus(gap);
    const auto g = static_cast<Scalar>(data_scale * t.weight * sigmoid(gap));
    push_back_score(t, t.other, g);
    push_back_score(t, t.preferred, -g);
  }
  for (std::size_t s = 0; s < slotted.size(); ++s) {
    const auto friends = social_.friends(slotted[s]);
    const RowVector<Scalar> share =
        friend_mean_grad.row(static_cast<Index>(s)) / static_cast<Scalar>(friends.size());
    for (UserId f : friends) gup.row(f.index()) += share;
  }

  if (!grad.same_shape(params)) {
    grad = ModelParams<Scalar>::zeros(params.user_count(), params.item_count(), params.dim(),
                                      params.layers(), params.has_transforms());
  } else {
    grad.set_zero();
  }
  backpropagate(graphs_, params, model_, plan, cache_, grad_emb_, grad);
  add_regularizer_gradients(params, social_, loss_, grad);

  out.l2_term = l2_penalty(params, loss_.l2);
  out.social_term = social_penalty(params.users, social_, loss_.social_reg);
  out.finish();
  if (!std::isfinite(out.total) || !grad.all_finite()) {
    throw NonFiniteGradient("non-finite loss or gradient (loss=" + std::to_string(out.total) + ")");
  }
  return out;
}

template <typename Scalar>
GradientTape<Scalar> backward(const HeteroGraphBundle& graphs, const SocialGraph& social,
                              const BehaviorLog& log, std::span<const NegativeSample> batch,
                              const ModelParams<Scalar>& params, const ModelConfig& model,
                              const LossConfig& loss, LossBreakdown* breakdown) {
  GradientEngine<Scalar> engine(graphs, social, model, loss);
  GradientTape<Scalar> grad;
  const auto b = engine.compute(log, batch, params, grad);
  if (breakdown != nullptr) *breakdown = b;
  return grad;
}

template class GradientEngine<float>;
template class GradientEngine<double>;
template GradientTape<float> backward<float>(const HeteroGraphBundle&, const SocialGraph&,
                                             const BehaviorLog&, std::span<const NegativeSample>,
                                             const ModelParams<float>&, const ModelConfig&,
                                             const LossConfig&, LossBreakdown*);
template GradientTape<double> backward<double>(const HeteroGraphBundle&, const SocialGraph&,
                                               const BehaviorLog&, std::span<const NegativeSample>,
                                               const ModelParams<double>&, const ModelConfig&,
                                               const LossConfig&, LossBreakdown*);

}  // namespace gbgcn
