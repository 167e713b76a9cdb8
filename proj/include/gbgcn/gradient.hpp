#pragma once

#include "gbgcn/data.hpp"
#include "gbgcn/graph.hpp"
#include "gbgcn/model.hpp"
#include "gbgcn/objective.hpp"
#include "gbgcn/propagation.hpp"

#include <span>
#include <vector>

namespace gbgcn {

/// Gradient buffers, shaped exactly like the parameters they belong to.
template <typename Scalar>
using GradientTape = ModelParams<Scalar>;

class NonFiniteGradient : public Error {
 public:
  using Error::Error;
};

/// Exact reverse-mode gradients of the training objective over a static
/// computation graph. Only the receptive field of the batch is propagated
/// unless `full_forward` is set. Workspaces are reused between calls.
template <typename Scalar>
class GradientEngine {
 public:
  GradientEngine(const HeteroGraphBundle& graphs, const SocialGraph& social, ModelConfig model,
                 LossConfig loss);

  /// Overwrites `grad` with d/dparams of
  ///   data_scale * (sum of pair terms over the batch) + regularizers.
  /// Returns the unscaled breakdown. Throws NonFiniteGradient on inf/NaN.
  LossBreakdown compute(const BehaviorLog& log, std::span<const NegativeSample> batch,
                        const ModelParams<Scalar>& params, GradientTape<Scalar>& grad,
                        double data_scale = 1.0);

  bool full_forward = false;

  const ModelConfig& model_config() const { return model_; }
  const LossConfig& loss_config() const { return loss_; }

 private:
  const HeteroGraphBundle& graphs_;
  const SocialGraph& social_;
  ModelConfig model_;
  LossConfig loss_;

  std::vector<PairTerm> terms_;
  std::vector<char> term_positive_;
  ViewEmbeddings<Scalar> emb_;
  ViewEmbeddings<Scalar> grad_emb_;
  CrossViewCache<Scalar> cache_;
};

/// One-shot convenience wrapper around GradientEngine.
template <typename Scalar>
GradientTape<Scalar> backward(const HeteroGraphBundle& graphs, const SocialGraph& social,
                              const BehaviorLog& log, std::span<const NegativeSample> batch,
                              const ModelParams<Scalar>& params, const ModelConfig& model,
                              const LossConfig& loss, LossBreakdown* breakdown = nullptr);

}  // namespace gbgcn
