#include "gbgcn/trainer.hpp"

#include "gbgcn/baselines.hpp"
#include "gbgcn/gradient.hpp"
#include "gbgcn/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace gbgcn {

TrainData::TrainData(const DatasetSplit& s, const SocialGraph& soc, const Hyperparams& hp)
    : split(s),
      social(soc),
      graphs(build_graphs(s.train, s.users, s.items,
                          {.exclude_failed_participants = hp.exclude_failed_participants})) {
  if (soc.users() != s.users) throw Error("social graph and split disagree on the number of users");
}

double EpochRecord::selection_metric() const {
  if (!validation) return -1.0;
  return validation->ndcg_at(10);
}

std::string TrainingLog::line(const EpochRecord& e, bool with_time) const {
  nlohmann::ordered_json j;
  j["stage"] = e.stage;
  j["epoch"] = e.epoch;
  j["loss_pos"] = e.loss.loss_pos;
  j["loss_neg"] = e.loss.loss_neg;
  j["l2"] = e.loss.l2_term;
  j["social"] = e.loss.social_term;
  j["total"] = e.loss.total;
  if (e.validation) {
    nlohmann::ordered_json v;
    for (std::size_t i = 0; i < e.validation->ks.size(); ++i) {
      v["recall@" + std::to_string(e.validation->ks[i])] = e.validation->recall[i];
    }
    for (std::size_t i = 0; i < e.validation->ks.size(); ++i) {
      v["ndcg@" + std::to_string(e.validation->ks[i])] = e.validation->ndcg[i];
    }
    j["validation"] = v;
  } else {
    j["validation"] = nullptr;
  }
  if (with_time) j["wall_seconds"] = e.wall_seconds;
  return j.dump();
}

void TrainingLog::write_jsonl(std::ostream& out) const {
  for (const auto& e : epochs) out << line(e) << '\n';
}

std::uint64_t TrainingLog::digest() const {
  Digest d;
  for (const auto& e : epochs) {
    const std::string s = line(e, false) + "\n";
    d.update(s.data(), s.size());
  }
  return d.value();
}

std::string TrainingLog::digest_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest()));
  return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<int> selection_ks(const Hyperparams& hp) {
  std::vector<int> ks = hp.eval_k;
  if (std::find(ks.begin(), ks.end(), 10) == ks.end()) ks.push_back(10);
  std::sort(ks.begin(), ks.end());
  return ks;
}

// One pass over `log` in shuffled mini-batches with fresh negatives. The
// logged data losses are means per (record, negative) pair; the penalties are
// those at the last step.
template <typename StepFn>
LossBreakdown run_epoch(const BehaviorLog& log, const TrainData& data, const Hyperparams& hp,
                        Rng& rng, GradientEngine<float>& engine, ModelParams<float>& params,
                        StepFn&& step) {
  const auto negatives = sample_negatives(log, data.split.interactions, data.split.items,
                                          hp.neg_ratio, rng);
  std::vector<std::size_t> order(negatives.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  LossBreakdown sum;
  std::size_t pairs = 0;
  GradientTape<float> grad;
  std::vector<NegativeSample> batch;
  const auto batch_size = static_cast<std::size_t>(hp.batch_size);
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    batch.clear();
    std::size_t count = 0;
    for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) {
      batch.push_back(negatives[order[i]]);
      count += batch.back().items.size();
    }
    if (count == 0) continue;
    const auto b = engine.compute(log, batch, params, grad, 1.0 / static_cast<double>(count));
    sum.loss_pos += b.loss_pos;
    sum.loss_neg += b.loss_neg;
    sum.l2_term = b.l2_term;
    sum.social_term = b.social_term;
    pairs += count;
    step(params, grad);
  }
  if (pairs > 0) {
    sum.loss_pos /= static_cast<double>(pairs);
    sum.loss_neg /= static_cast<double>(pairs);
  }
  sum.finish();
  if (!std::isfinite(sum.total)) throw NonFiniteGradient("training diverged (loss is not finite)");
  return sum;
}

void unit_rows(Matrix<float>& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    const float n = m.row(r).norm();
    if (n > 0.0f) m.row(r) /= n;
  }
}

}  // namespace

std::optional<MetricReport> validate(const TrainData& data, const ModelParams<float>& params,
                                     const ModelConfig& config, std::span<const int> ks, int threads) {
  if (data.split.validation.empty()) return std::nullopt;
  return evaluate(model_scorer(data, params, config), data.split, EvalSet::validation, ks, threads);
}

Scorer model_scorer(const TrainData& data, const ModelParams<float>& params, const ModelConfig& config) {
  auto emb = std::make_shared<const ViewEmbeddings<float>>(forward(data.graphs, params, config));
  return embedding_scorer(std::move(emb), data.social, config);
}

ModelParams<float> pretrain(const TrainData& data, const Hyperparams& hp, std::uint64_t seed,
                            TrainingLog* log, const EpochCallback& on_epoch) {
  Rng root(seed);
  Rng init = root.fork(1);
  Rng epochs = root.fork(2);

  const ModelConfig full = ModelConfig::from(hp);
  const ModelConfig simple = full.simplified();
  const LossConfig loss = LossConfig::from(hp);
  const Index P = data.split.users;
  const Index Q = data.split.items;

  // Transformations are drawn first so their values do not depend on the
  // number of pre-training epochs.
  ModelParams<float> merged = ModelParams<float>::xavier(P, Q, hp.dim, hp.layers, full.cross_view, init);
  ModelParams<float> params = ModelParams<float>::xavier(P, Q, hp.dim, 0, false, init);

  GradientEngine<float> engine(data.graphs, data.social, simple, loss);
  Adam<float> adam({hp.adam_lr, hp.adam_beta1, hp.adam_beta2, hp.adam_eps});
  const auto ks = selection_ks(hp);
  const bool watch = hp.pretrain_patience > 0 && !data.split.validation.empty();
  ModelParams<float> best = params;
  double best_metric = -1.0;
  int since_best = 0;

  for (int epoch = 1; epoch <= hp.pretrain_epochs; ++epoch) {
    const auto t0 = Clock::now();
    Rng rng = epochs.fork(static_cast<std::uint64_t>(epoch));
    EpochRecord rec;
    rec.stage = "pretrain";
    rec.epoch = epoch;
    rec.loss = run_epoch(data.split.train, data, hp, rng, engine, params,
                         [&](ModelParams<float>& p, const GradientTape<float>& g) { adam.step(p, g); });
    if (watch) rec.validation = validate(data, params, simple, ks, hp.threads);
    rec.wall_seconds = seconds_since(t0);
    if (log != nullptr) log->epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (watch) {
      if (rec.selection_metric() > best_metric) {
        best_metric = rec.selection_metric();
        best = params;
        since_best = 0;
      } else if (++since_best >= hp.pretrain_patience) {
        break;
      }
    }
  }
  if (watch && best_metric >= 0.0) params = std::move(best);

  unit_rows(params.users);
  unit_rows(params.items);
  merged.users = std::move(params.users);
  merged.items = std::move(params.items);
  return merged;
}

TrainResult finetune(ModelParams<float> pretrained, const TrainData& data, const Hyperparams& hp,
                     std::uint64_t seed, const EpochCallback& on_epoch) {
  const ModelConfig config = ModelConfig::from(hp);
  const auto expect = ModelParams<float>::zeros(data.split.users, data.split.items, hp.dim, hp.layers,
                                                config.cross_view);
  if (!pretrained.same_shape(expect)) throw Error("pre-trained parameters do not match the model shape");

  Rng root(seed);
  Rng epochs = root.fork(3);
  GradientEngine<float> engine(data.graphs, data.social, config, LossConfig::from(hp));
  const Sgd<float> sgd(hp.sgd_lr);
  const auto ks = selection_ks(hp);

  TrainResult result;
  result.params = pretrained;
  ModelParams<float> params = std::move(pretrained);
  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    const auto t0 = Clock::now();
    Rng rng = epochs.fork(static_cast<std::uint64_t>(epoch));
    EpochRecord rec;
    rec.stage = "finetune";
    rec.epoch = epoch;
    rec.loss = run_epoch(data.split.train, data, hp, rng, engine, params,
                         [&](ModelParams<float>& p, const GradientTape<float>& g) { sgd.step(p, g); });
    rec.validation = validate(data, params, config, ks, hp.threads);
    rec.wall_seconds = seconds_since(t0);
    result.log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (!rec.validation) {
      result.params = params;
      result.best_epoch = 0;
    } else if (rec.selection_metric() > result.best_validation) {
      result.best_validation = rec.selection_metric();
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  return result;
}

TrainResult train_baseline(const TrainData& data, const Hyperparams& hp, std::uint64_t seed,
                           const EpochCallback& on_epoch) {
  if (hp.model == ModelKind::gbgcn) throw Error("train_baseline needs a baseline model kind");
  const ModelConfig config = ModelConfig::from(hp);
  const LossConfig loss = LossConfig::from(hp);
  const BehaviorLog flat =
      hp.model == ModelKind::mf ? flatten_interactions(data.split.train, hp.mf_roles) : BehaviorLog{};
  const BehaviorLog& log = hp.model == ModelKind::mf ? flat : data.split.train;

  Rng root(seed);
  Rng init = root.fork(1);
  Rng epochs = root.fork(2);
  ModelParams<float> params =
      ModelParams<float>::xavier(data.split.users, data.split.items, hp.dim, 0, false, init);
  GradientEngine<float> engine(data.graphs, data.social, config, loss);
  Adam<float> adam({hp.adam_lr, hp.adam_beta1, hp.adam_beta2, hp.adam_eps});
  const auto ks = selection_ks(hp);

  TrainResult result;
  result.params = params;
  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    const auto t0 = Clock::now();
    Rng rng = epochs.fork(static_cast<std::uint64_t>(epoch));
    EpochRecord rec;
    rec.stage = "train";
    rec.epoch = epoch;
    rec.loss = run_epoch(log, data, hp, rng, engine, params,
                         [&](ModelParams<float>& p, const GradientTape<float>& g) { adam.step(p, g); });
    rec.validation = validate(data, params, config, ks, hp.threads);
    rec.wall_seconds = seconds_since(t0);
    result.log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (!rec.validation) {
      result.params = params;
      result.adam = adam.state();
    } else if (rec.selection_metric() > result.best_validation) {
      result.best_validation = rec.selection_metric();
      result.best_epoch = epoch;
      result.params = params;
      result.adam = adam.state();
    }
  }
  return result;
}

TrainResult train(const TrainData& data, const Hyperparams& hp, const EpochCallback& on_epoch) {
  if (const auto errors = hp.validate(); !errors.empty()) {
    throw Error("invalid hyperparameters: " + errors.front());
  }
  if (hp.model != ModelKind::gbgcn) return train_baseline(data, hp, hp.seed, on_epoch);
  TrainingLog pre_log;
  auto pretrained = pretrain(data, hp, hp.seed, &pre_log, on_epoch);
  TrainResult result = finetune(std::move(pretrained), data, hp, hp.seed, on_epoch);
  result.log.epochs.insert(result.log.epochs.begin(), pre_log.epochs.begin(), pre_log.epochs.end());
  return result;
}

}  // namespace gbgcn
