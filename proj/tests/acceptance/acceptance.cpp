// End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per criterion
// and exits non-zero if any criterion fails. `acceptance 3 7` runs a subset.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "gbgcn/checkpoint.hpp"
#include "gbgcn/evaluator.hpp"
#include "gbgcn/gradient.hpp"
#include "gbgcn/parallel.hpp"
#include "gbgcn/synth.hpp"
#include "gbgcn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

using namespace gbgcn;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1: gradient ----

struct OracleScores {
  const oracle::Final& f;
  const SocialGraph& social;
  const ModelConfig& c;
  double score(UserId u, ItemId n) const { return oracle::predict(f, social, c, u.value, n.value); }
  double participant_score(UserId u, ItemId n) const { return f.up.row(u.value).dot(f.vp.row(n.value)); }
};

Outcome gradient_check() {
  const auto t0 = Clock::now();
  auto inst = fixtures::random_instance(101, 10, 8, 15, 0.35);
  const auto batch = fixtures::one_negative_each(inst, 102);
  ModelConfig mc;
  mc.dim = 4;
  mc.layers = 2;
  mc.alpha = 0.6;
  LossConfig lc;
  lc.beta = 0.3;
  lc.l2 = 1e-3;
  lc.social_reg = 0.01;

  Rng rng(103);
  auto params = ModelParams<double>::xavier(10, 8, mc.dim, mc.layers, true, rng);
  params.users *= 3.0;
  params.items *= 3.0;
  for (auto& b : params.biases) {
    for (Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-0.2, 0.2);
  }
  const auto adj = oracle::adjacency(inst.log.records, 10, 8);
  const auto loss = [&](const ModelParams<double>& p) {
    const auto f = oracle::forward(adj, p, mc);
    return total_loss(inst.log, std::span<const NegativeSample>(batch), OracleScores{f, inst.social, mc},
                      inst.social, p, lc)
        .total;
  };

  const auto grad = backward(inst.graphs, inst.social, inst.log, batch, params, mc, lc);
  std::vector<std::span<const double>> analytic;
  grad.for_each_tensor([&](std::span<const double> t) { analytic.push_back(t); });
  ModelParams<double> probe = params;
  std::vector<std::span<double>> slots;
  probe.for_each_tensor([&](std::span<double> t) { slots.push_back(t); });

  const double h = 1e-3;
  double worst = 0.0;
  std::size_t worst_tensor = 0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    double diff = 0.0, na = 0.0, nf = 0.0;
    for (std::size_t i = 0; i < slots[k].size(); ++i) {
      const double keep = slots[k][i];
      slots[k][i] = keep + h;
      const double up = loss(probe);
      slots[k][i] = keep - h;
      const double down = loss(probe);
      slots[k][i] = keep;
      const double fd = (up - down) / (2 * h);
      diff += (fd - analytic[k][i]) * (fd - analytic[k][i]);
      na += analytic[k][i] * analytic[k][i];
      nf += fd * fd;
    }
    const double rel = std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nf), 1e-12});
    if (rel > worst) {
      worst = rel;
      worst_tensor = k;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < 1e-4 && secs < 30.0;
  return {ok ? Status::pass : Status::fail,
          fmt("%zu tensors, worst relative error %.2e (tensor %zu), %.1f s", slots.size(), worst,
              worst_tensor, secs)};
}

// ---- 2: forward oracle ----

Outcome forward_oracle() {
  double worst = 0.0;
  int largest = 0;
  for (int i = 0; i < 20; ++i) {
    Rng pick(200 + i);
    const Index users = 5 + static_cast<Index>(pick.below(50));
    const Index items = 3 + static_cast<Index>(pick.below(static_cast<std::uint64_t>(100 - users - 2)));
    largest = std::max(largest, static_cast<int>(users + items));
    auto inst = fixtures::random_instance(300 + i, users, items, static_cast<int>(2 * (users + items)),
                                          0.2);
    ModelConfig mc;
    mc.dim = 1 + static_cast<int>(pick.below(6));
    mc.layers = static_cast<int>(pick.below(4));
    mc.activation = i % 3 == 0 ? Activation::tanh : Activation::leaky_relu;
    Rng rng(400 + i);
    auto p = ModelParams<double>::xavier(users, items, mc.dim, mc.layers, true, rng);
    for (auto& b : p.biases) {
      for (Index k = 0; k < b.size(); ++k) b(k) = rng.uniform(-0.3, 0.3);
    }
    const auto emb = forward(inst.graphs, p, mc);
    const auto want = oracle::forward(oracle::adjacency(inst.log.records, users, items), p, mc);
    worst = std::max({worst, (emb.user_final(View::initiator) - want.ui).cwiseAbs().maxCoeff(),
                      (emb.item_final(View::initiator) - want.vi).cwiseAbs().maxCoeff(),
                      (emb.user_final(View::participant) - want.up).cwiseAbs().maxCoeff(),
                      (emb.item_final(View::participant) - want.vp).cwiseAbs().maxCoeff()});
  }
  return {worst < 1e-6 ? Status::pass : Status::fail,
          fmt("20 instances up to %d nodes, max abs diff %.2e", largest, worst)};
}

// ---- 3: prediction degeneracies ----

Outcome prediction_degeneracies() {
  auto inst = fixtures::random_instance(500, 30, 25, 80);
  ModelConfig mc;
  mc.dim = 5;
  mc.layers = 2;
  mc.alpha = 0.0;
  Rng rng(501);
  const auto p = ModelParams<double>::xavier(30, 25, mc.dim, mc.layers, true, rng);
  const auto emb = forward(inst.graphs, p, mc);
  int mismatches = 0;
  for (Index m = 0; m < 30; ++m) {
    for (Index n = 0; n < 25; ++n) {
      const double own = emb.user_final(View::initiator).row(m).dot(emb.item_final(View::initiator).row(n));
      if (predict(emb, inst.social, mc, UserId(m), ItemId(n)) != own) ++mismatches;
    }
  }

  ModelConfig flat;
  flat.dim = 5;
  flat.layers = 0;
  flat.alpha = 0.0;
  flat.activation = Activation::identity;
  auto q = ModelParams<double>::xavier(30, 25, flat.dim, 0, true, rng);
  for (auto& w : q.weights) w.setZero();
  const auto flat_emb = forward(inst.graphs, q, flat);
  // The two sides sum the same products in a different order (the model's
  // rows carry a zero cross-view half), so identity is judged against the
  // rounding bound of a dot product: gap <= 2 * width * eps * sum |u_k v_k|.
  double mf_gap = 0.0, worst_ratio = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (Index m = 0; m < 30; ++m) {
    for (Index n = 0; n < 25; ++n) {
      const double mf = q.users.row(m).dot(q.items.row(n));
      const double abs_sum = q.users.row(m).cwiseProduct(q.items.row(n)).cwiseAbs().sum();
      const double gap = std::abs(predict(flat_emb, inst.social, flat, UserId(m), ItemId(n)) - mf);
      mf_gap = std::max(mf_gap, gap);
      worst_ratio = std::max(worst_ratio, gap / (2.0 * 2 * flat.dim * eps * std::max(abs_sum, 1e-300)));
    }
  }
  const bool ok = mismatches == 0 && worst_ratio <= 1.0;
  return {ok ? Status::pass : Status::fail,
          fmt("alpha=0 mismatches %d of 750; degenerate model vs MF max gap %.1e (%.2f of rounding bound)",
              mismatches, mf_gap, worst_ratio)};
}

// ---- 4: loss degeneracies ----

struct FixedScores {
  double pos, neg;
  double score(UserId u, ItemId n) const { return u.value == 0 ? (n.value == 0 ? pos : neg) : 0.7 * n.value; }
  double participant_score(UserId u, ItemId n) const { return score(u, n); }
};

Outcome loss_degeneracies() {
  const BehaviorRecord r{UserId(0), ItemId(0), {}, false};
  std::vector<std::pair<UserId, UserId>> e{{UserId(0), UserId(1)}, {UserId(0), UserId(2)}};
  const SocialGraph social(3, e);
  LossConfig c;
  c.beta = 0.0;
  double worst = 0.0;
  Rng rng(600);
  for (int i = 0; i < 1000; ++i) {
    const FixedScores s{rng.uniform(-30, 30), rng.uniform(-30, 30)};
    const double bpr = softplus(s.neg - s.pos);
    const double got = loss_failed(r, ItemId(1), s, social, c);
    worst = std::max(worst, std::abs(got - bpr) / std::max(1.0, std::abs(bpr)));
  }
  c.beta = 0.05;
  const FixedScores tie{0.37, 0.37};
  const double at_zero = loss_failed(r, ItemId(1), tie, SocialGraph(3, {}), c);
  const bool ok = worst <= 2.2e-16 && at_zero == std::log(2.0);
  return {ok ? Status::pass : Status::fail,
          fmt("beta=0 vs BPR max relative diff %.1e over 1000 gaps; gap 0 gives %.17g (ln 2 = %.17g)", worst,
              at_zero, std::log(2.0))};
}

// ---- 5: metrics ----

Outcome metric_units() {
  std::vector<std::string> bad;
  if (ndcg_at(0, 10) != 1.0) bad.push_back("rank 0");
  if (std::abs(ndcg_at(9, 10) - 1.0 / std::log2(11.0)) > 1e-15) bad.push_back("rank 9");
  if (ndcg_at(10, 10) != 0.0) bad.push_back("rank 10");
  if (recall_at(9, 10) != 1.0 || recall_at(10, 10) != 0.0) bad.push_back("recall cutoff");

  Rng rng(700);
  const std::vector<int> ks{1, 3, 5, 10, 20, 50, 100};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> ranks(1 + rng.below(300));
    for (int& r : ranks) r = static_cast<int>(rng.below(1000));
    const auto rep = compute_metrics(ranks, ks);
    for (std::size_t i = 1; i < ks.size(); ++i) {
      if (rep.recall[i] < rep.recall[i - 1] || rep.ndcg[i] < rep.ndcg[i - 1]) {
        bad.push_back(fmt("trial %d not monotone", trial));
        break;
      }
    }
    try {
      rep.check_invariants();
    } catch (const Error& e) {
      bad.push_back(e.what());
    }
  }
  std::string detail = "rank examples and 200 random rank vectors";
  for (const auto& b : bad) detail += "; " + b;
  return {bad.empty() ? Status::pass : Status::fail, detail};
}

// ---- 6: random scorer ----

Outcome random_calibration() {
  const Index users = 20000, chunk = 2000;
  const Scorer random = [](UserId u, std::span<const ItemId> c) {
    Rng rng(0x5eed0000ull + static_cast<std::uint64_t>(u.value));
    std::vector<double> s(c.size());
    for (double& x : s) x = rng.uniform();
    return s;
  };
  double hits = 0.0;
  for (Index start = 0; start < users; start += chunk) {
    DatasetSplit split;
    split.users = start + chunk;
    split.items = 1000;
    for (Index u = start; u < start + chunk; ++u) {
      split.test[UserId(u)] = BehaviorRecord{UserId(u), ItemId(0), {}, false};
      std::vector<ItemId> negs;
      for (Index n = 1; n < 1000; ++n) negs.emplace_back(n);
      split.eval_negatives[UserId(u)] = std::move(negs);
    }
    const auto rep = evaluate(random, split, EvalSet::test, std::vector<int>{10}, default_threads());
    hits += rep.recall_at(10) * static_cast<double>(rep.users);
  }
  const double recall = hits / static_cast<double>(users);
  const bool ok = std::abs(recall - 0.01) <= 0.003;
  return {ok ? Status::pass : Status::fail,
          fmt("%lld user evaluations, mean Recall@10 = %.4f (want 0.010 +- 0.003)", static_cast<long long>(users),
              recall)};
}

// ---- 7 and 8: synthetic end-to-end ----

// Fine-tuning settings picked on a separate tuning seed (7); the acceptance
// runs below use other seeds.
Hyperparams gbgcn_settings() {
  Hyperparams hp;
  hp.model = ModelKind::gbgcn;
  hp.score_semantics = ScoreSemantics::role;
  hp.alpha = 0.2;
  hp.adam_lr = 0.01;
  hp.sgd_lr = 10.0;
  hp.pretrain_epochs = 100;
  hp.epochs = 100;
  hp.threads = default_threads();
  return hp;
}

Hyperparams mf_settings() {
  Hyperparams hp;
  hp.model = ModelKind::mf;
  hp.mf_roles = MfRoles::both;
  hp.adam_lr = 0.01;
  hp.epochs = 200;
  hp.threads = default_threads();
  return hp;
}

struct SynthRun {
  MetricReport test;
  int best_epoch = 0;
  double seconds = 0.0;
};

SynthRun run_synthetic(std::uint64_t synth_seed, const Hyperparams& hp) {
  const auto t0 = Clock::now();
  SynthConfig sc;  // 500 users, 200 items, 20000 launches
  sc.seed = synth_seed;
  const auto ds = generate(sc);
  const auto log = BehaviorLog::from_records(ds.records);
  const auto split = split_leave_one_out(log, sc.users, sc.items, hp.seed);
  const TrainData data(split, ds.planted.social, hp);
  const auto result = train(data, hp);
  SynthRun r;
  r.test = evaluate(model_scorer(data, result.params, ModelConfig::from(hp)), split, EvalSet::test,
                    std::vector<int>{10}, hp.threads);
  r.best_epoch = result.best_epoch;
  r.seconds = seconds_since(t0);
  return r;
}

Outcome planted_recovery() {
  const auto hp = gbgcn_settings();
  const auto r = run_synthetic(21, hp);
  const double recall = r.test.recall_at(10), ndcg = r.test.ndcg_at(10);
  const bool ok = recall >= 0.10 && ndcg >= 0.05 && r.seconds < 600.0;
  return {ok ? Status::pass : Status::fail,
          fmt("synthetic seed 21, %d+%d epochs: test Recall@10 %.3f, NDCG@10 %.3f, best epoch %d, %.0f s",
              hp.pretrain_epochs, hp.epochs, recall, ndcg, r.best_epoch, r.seconds)};
}

Outcome multiview_advantage() {
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed : {11, 12, 13}) {
    const double g = run_synthetic(seed, gbgcn_settings()).test.ndcg_at(10);
    const double m = run_synthetic(seed, mf_settings()).test.ndcg_at(10);
    const double lift = m > 0 ? g / m - 1.0 : 0.0;
    if (lift >= 0.05) ++wins;
    detail += fmt("%sseed %d: GBGCN %.3f vs MF %.3f (%+.1f%%)", detail.empty() ? "" : "; ", static_cast<int>(seed),
                  g, m, 100.0 * lift);
  }
  return {wins >= 2 ? Status::pass : Status::fail, fmt("%d/3 seeds >= +5%%; ", wins) + detail};
}

// ---- 9: published dataset ----

Outcome dataset_counts() {
  const char* dir = std::getenv("GBGCN_BEIBEI_DIR");
  if (dir == nullptr || *dir == '\0') {
    return {Status::skip, "set GBGCN_BEIBEI_DIR to a directory holding behaviors.tsv and social.tsv"};
  }
  const std::filesystem::path root(dir);
  const auto ds = ingest(root / "behaviors.tsv", root / "social.tsv");
  const auto& s = ds.stats;
  const bool ok = s.users == 190080 && s.items == 30782 && s.social_edges == 748233 && s.records == 932896 &&
                  s.successful == 721605 && s.failed == 211291;
  return {ok ? Status::pass : Status::fail,
          fmt("users %lld, items %lld, social %lld, behaviors %lld (%lld successful, %lld failed)",
              static_cast<long long>(s.users), static_cast<long long>(s.items),
              static_cast<long long>(s.social_edges), static_cast<long long>(s.records),
              static_cast<long long>(s.successful), static_cast<long long>(s.failed))};
}

// ---- 10: determinism ----

Outcome determinism() {
  SynthConfig sc;
  sc.users = 150;
  sc.items = 80;
  sc.records = 3000;
  sc.seed = 31;
  const auto ds = generate(sc);
  const auto log = BehaviorLog::from_records(ds.records);
  const auto split = split_leave_one_out(log, sc.users, sc.items, 5);
  Hyperparams hp;
  hp.dim = 16;
  hp.pretrain_epochs = 5;
  hp.epochs = 5;
  hp.threads = 1;
  const TrainData data(split, ds.planted.social, hp);
  const auto a = train(data, hp);
  const auto b = train(data, hp);

  const auto dir = std::filesystem::temp_directory_path() / "gbgcn_acceptance";
  std::filesystem::create_directories(dir);
  const auto read = [](const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  };
  const auto ckpt = make_checkpoint(hp, a.params, a.adam);
  save_checkpoint(dir / "a.ckpt", ckpt);
  const auto loaded = load_checkpoint(dir / "a.ckpt");
  save_checkpoint(dir / "b.ckpt", loaded);
  const bool bytes_equal = read(dir / "a.ckpt") == read(dir / "b.ckpt") && serialize(loaded) == serialize(ckpt);
  std::filesystem::remove_all(dir);

  const bool ok = a.log.digest() == b.log.digest() && a.params == b.params && bytes_equal && loaded == ckpt;
  return {ok ? Status::pass : Status::fail,
          fmt("log digests %s / %s; checkpoint round trip %s", a.log.digest_hex().c_str(),
              b.log.digest_hex().c_str(), bytes_equal ? "byte-identical" : "differs")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {1, "gradient correctness", gradient_check},
      {2, "forward oracle equivalence", forward_oracle},
      {3, "prediction degeneracies", prediction_degeneracies},
      {4, "loss degeneracy", loss_degeneracies},
      {5, "metric unit tests", metric_units},
      {6, "random-scorer calibration", random_calibration},
      {7, "planted-model recovery", planted_recovery},
      {8, "multi-view advantage", multiview_advantage},
      {9, "dataset ingestion counts", dataset_counts},
      {10, "determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    std::cout << tag << "  " << c.id << ". " << c.name << ": " << o.detail << std::endl;
    failed += o.status == Status::fail;
  }
  return failed == 0 ? 0 : 1;
}
