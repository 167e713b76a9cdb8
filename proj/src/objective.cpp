#include "gbgcn/objective.hpp"

namespace gbgcn {

LossConfig LossConfig::from(const Hyperparams& hp) {
  LossConfig c;
  c.kind = hp.model == ModelKind::gbgcn ? LossKind::double_pairwise : LossKind::bpr;
  c.beta = hp.beta;
  c.semantics = hp.score_semantics;
  c.l2 = hp.l2;
  c.social_reg = hp.social_reg;
  return c;
}

void expand_terms(const BehaviorRecord& record, ItemId negative, const SocialGraph& social,
                  const LossConfig& config, std::vector<PairTerm>& out) {
  out.push_back({record.initiator, record.item, negative, 1.0, ScoreKind::composite});
  if (config.kind == LossKind::bpr) return;
  const ScoreKind others =
      config.semantics == ScoreSemantics::role ? ScoreKind::participant : ScoreKind::composite;
  if (record.success) {
    for (UserId p : record.participants) out.push_back({p, record.item, negative, 1.0, others});
  } else if (config.beta != 0.0) {
    for (UserId f : social.friends(record.initiator)) {
      out.push_back({f, negative, record.item, config.beta, others});
    }
  }
}

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
  loss_pos += o.loss_pos;
  loss_neg += o.loss_neg;
  l2_term += o.l2_term;
  social_term += o.social_term;
  total += o.total;
  return *this;
}

template <typename Scalar>
double l2_penalty(const ModelParams<Scalar>& params, double coeff) {
  if (coeff == 0.0) return 0.0;
  double s = 0.0;
  params.for_each_tensor([&s](std::span<const Scalar> t) {
    for (Scalar x : t) s += static_cast<double>(x) * static_cast<double>(x);
  });
  return coeff * s;
}

template <typename Scalar>
double social_penalty(const Matrix<Scalar>& users, const SocialGraph& social, double coeff) {
  if (coeff == 0.0) return 0.0;
  double s = 0.0;
  RowVector<Scalar> mean(users.cols());
  for (Index m = 0; m < users.rows(); ++m) {
    const auto friends = social.friends(UserId(m));
    if (friends.empty()) continue;
    mean.setZero();
    for (UserId f : friends) mean += users.row(f.index());
    mean /= static_cast<Scalar>(friends.size());
    s += static_cast<double>((users.row(m) - mean).squaredNorm());
  }
  return coeff * s;
}

template <typename Scalar>
void add_regularizer_gradients(const ModelParams<Scalar>& params, const SocialGraph& social,
                               const LossConfig& config, ModelParams<Scalar>& grad) {
  if (config.l2 != 0.0) {
    const auto c = static_cast<Scalar>(2.0 * config.l2);
    grad.users += c * params.users;
    grad.items += c * params.items;
    if (params.has_transforms() && grad.has_transforms()) {
      for (int t = 0; t < kTransforms; ++t) {
        grad.weights[t] += c * params.weights[t];
        grad.biases[t] += c * params.biases[t];
      }
    }
  }
  if (config.social_reg != 0.0) {
    const auto c = static_cast<Scalar>(2.0 * config.social_reg);
    RowVector<Scalar> residual(params.users.cols());
    for (Index m = 0; m < params.users.rows(); ++m) {
      const auto friends = social.friends(UserId(m));
      if (friends.empty()) continue;
      residual.setZero();
      for (UserId f : friends) residual += params.users.row(f.index());
      residual = params.users.row(m) - residual / static_cast<Scalar>(friends.size());
      grad.users.row(m) += c * residual;
      const RowVector<Scalar> share = c * residual / static_cast<Scalar>(friends.size());
      for (UserId f : friends) grad.users.row(f.index()) -= share;
    }
  }
}

template double l2_penalty<float>(const ModelParams<float>&, double);
template double l2_penalty<double>(const ModelParams<double>&, double);
template double social_penalty<float>(const Matrix<float>&, const SocialGraph&, double);
template double social_penalty<double>(const Matrix<double>&, const SocialGraph&, double);
template void add_regularizer_gradients<float>(const ModelParams<float>&, const SocialGraph&,
                                               const LossConfig&, ModelParams<float>&);
template void add_regularizer_gradients<double>(const ModelParams<double>&, const SocialGraph&,
                                                const LossConfig&, ModelParams<double>&);

}  // namespace gbgcn
