#pragma once

#include "gbgcn/data.hpp"
#include "gbgcn/evaluator.hpp"
#include "gbgcn/graph.hpp"
#include "gbgcn/hyperparams.hpp"
#include "gbgcn/model.hpp"
#include "gbgcn/objective.hpp"
#include "gbgcn/optim.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gbgcn {

/// Everything a training run reads: the split, the friendship graph and the
/// behavior graphs built from the training records.
struct TrainData {
  const DatasetSplit& split;
  const SocialGraph& social;
  HeteroGraphBundle graphs;

  TrainData(const DatasetSplit& split, const SocialGraph& social, const Hyperparams& hp);
};

struct EpochRecord {
  std::string stage;  // "pretrain", "finetune" or "train"
  int epoch = 0;      // 1-based within the stage
  LossBreakdown loss;
  std::optional<MetricReport> validation;
  double wall_seconds = 0.0;

  /// Validation NDCG@10, or -1 when nothing was evaluated.
  double selection_metric() const;
};

/// One JSON object per epoch. The digest covers every field except wall time,
/// so equal digests mean bit-identical training trajectories.
struct TrainingLog {
  std::vector<EpochRecord> epochs;

  std::string line(const EpochRecord& e, bool with_time = true) const;
  void write_jsonl(std::ostream& out) const;
  std::uint64_t digest() const;
  std::string digest_hex() const;
};

struct TrainResult {
  ModelParams<float> params;
  TrainingLog log;
  int best_epoch = 0;  // 0: no epoch was selected (nothing evaluated or no epochs)
  double best_validation = -1.0;
  std::optional<AdamState<float>> adam;
};

/// Called after every epoch; lets the CLI stream progress.
using EpochCallback = std::function<void(const EpochRecord&)>;

/// Validation metrics for `params` under `config`; nullopt without validation users.
std::optional<MetricReport> validate(const TrainData& data, const ModelParams<float>& params,
                                     const ModelConfig& config, std::span<const int> ks, int threads);

/// Xavier initialization, Adam on the propagation-free model, then every raw
/// embedding row scaled to unit length. Returns params with transformations
/// (Xavier weights, zero biases) when the target model has them.
ModelParams<float> pretrain(const TrainData& data, const Hyperparams& hp, std::uint64_t seed,
                            TrainingLog* log = nullptr, const EpochCallback& on_epoch = {});

/// Plain SGD on the full model with per-epoch negative resampling and
/// best-validation selection.
TrainResult finetune(ModelParams<float> pretrained, const TrainData& data, const Hyperparams& hp,
                     std::uint64_t seed, const EpochCallback& on_epoch = {});

/// Adam on a baseline (GBMF or MF) with best-validation selection.
TrainResult train_baseline(const TrainData& data, const Hyperparams& hp, std::uint64_t seed,
                           const EpochCallback& on_epoch = {});

/// The full pipeline for hp.model: pretrain + finetune for GBGCN, or a baseline.
TrainResult train(const TrainData& data, const Hyperparams& hp, const EpochCallback& on_epoch = {});

/// Scorer for trained params (full forward over the training graphs).
Scorer model_scorer(const TrainData& data, const ModelParams<float>& params, const ModelConfig& config);

}  // namespace gbgcn
