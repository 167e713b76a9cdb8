#pragma once

#include "gbgcn/data.hpp"
#include "gbgcn/hyperparams.hpp"
#include "gbgcn/model.hpp"

#include <cmath>
#include <concepts>
#include <span>
#include <vector>

namespace gbgcn {

/// -ln(sigmoid(-x)), computed without overflow or log(0).
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

enum class LossKind {
  double_pairwise,  // initiator term plus participant/friend terms
  bpr,              // initiator term only (baselines)
};

struct LossConfig {
  LossKind kind = LossKind::double_pairwise;
  double beta = 0.05;
  ScoreSemantics semantics = ScoreSemantics::composite;
  double l2 = 0.0;
  double social_reg = 0.0;

  static LossConfig from(const Hyperparams& hp);
};

enum class ScoreKind { composite, participant };

/// weight * softplus(y(user, other) - y(user, preferred)): a pairwise ranking
/// term asserting `user` prefers `preferred` over `other`.
struct PairTerm {
  UserId user;
  ItemId preferred;
  ItemId other;
  double weight;
  ScoreKind kind;
};

/// The pairwise terms one (record, negative) pair contributes.
void expand_terms(const BehaviorRecord& record, ItemId negative, const SocialGraph& social,
                  const LossConfig& config, std::vector<PairTerm>& out);

template <typename P>
concept ScoreProvider = requires(const P& p, UserId u, ItemId n) {
  { p.score(u, n) } -> std::convertible_to<double>;
  { p.participant_score(u, n) } -> std::convertible_to<double>;
};

template <ScoreProvider P>
double term_loss(const PairTerm& t, const P& scores) {
  const auto y = [&](ItemId n) -> double {
    return t.kind == ScoreKind::composite ? scores.score(t.user, n)
                                          : scores.participant_score(t.user, n);
  };
  return t.weight * softplus(y(t.other) - y(t.preferred));
}

template <ScoreProvider P>
double record_loss(const BehaviorRecord& record, ItemId negative, const P& scores,
                   const SocialGraph& social, const LossConfig& config) {
  std::vector<PairTerm> terms;
  expand_terms(record, negative, social, config, terms);
  double sum = 0.0;
  for (const auto& t : terms) sum += term_loss(t, scores);
  return sum;
}

/// Failed behavior: the initiator prefers the item, each friend disprefers it
/// (weighted by beta).
template <ScoreProvider P>
double loss_failed(const BehaviorRecord& record, ItemId negative, const P& scores,
                   const SocialGraph& social, const LossConfig& config) {
  if (record.success) throw Error("loss_failed called on a successful behavior");
  return record_loss(record, negative, scores, social, config);
}

/// Successful behavior: the initiator and every participant prefer the item.
template <ScoreProvider P>
double loss_success(const BehaviorRecord& record, ItemId negative, const P& scores,
                    const LossConfig& config) {
  if (!record.success) throw Error("loss_success called on a failed behavior");
  return record_loss(record, negative, scores, SocialGraph{}, config);
}

struct LossBreakdown {
  double loss_pos = 0.0;
  double loss_neg = 0.0;
  double l2_term = 0.0;
  double social_term = 0.0;
  double total = 0.0;

  LossBreakdown& operator+=(const LossBreakdown& o);
  void finish() { total = loss_pos + loss_neg + l2_term + social_term; }
};

/// coeff * squared L2 norm of every parameter.
template <typename Scalar>
double l2_penalty(const ModelParams<Scalar>& params, double coeff);

/// coeff * sum over users with friends of |u_m - mean_friends u|^2, on raw embeddings.
template <typename Scalar>
double social_penalty(const Matrix<Scalar>& users, const SocialGraph& social, double coeff);

/// Accumulates the gradients of both penalties into `grad`.
template <typename Scalar>
void add_regularizer_gradients(const ModelParams<Scalar>& params, const SocialGraph& social,
                               const LossConfig& config, ModelParams<Scalar>& grad);

/// Data terms summed over the batch plus both regularizers.
template <ScoreProvider P, typename Scalar>
LossBreakdown total_loss(const BehaviorLog& log, std::span<const NegativeSample> batch,
                         const P& scores, const SocialGraph& social, const ModelParams<Scalar>& params,
                         const LossConfig& config) {
  LossBreakdown out;
  for (const auto& entry : batch) {
    const auto& record = log.records[entry.record];
    for (ItemId neg : entry.items) {
      (record.success ? out.loss_pos : out.loss_neg) += record_loss(record, neg, scores, social, config);
    }
  }
  out.l2_term = l2_penalty(params, config.l2);
  out.social_term = social_penalty(params.users, social, config.social_reg);
  out.finish();
  return out;
}

/// Adapts model embeddings to the ScoreProvider interface.
template <typename Scalar>
struct EmbeddingScores {
  const ViewEmbeddings<Scalar>& emb;
  const SocialGraph& social;
  const ModelConfig& config;

  double score(UserId u, ItemId n) const { return predict(emb, social, config, u, n); }
  double participant_score(UserId u, ItemId n) const { return participant_affinity(emb, u, n); }
};

}  // namespace gbgcn
