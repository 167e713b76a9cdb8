#include "gbgcn/cli.hpp"

#include "gbgcn/checkpoint.hpp"
#include "gbgcn/data.hpp"
#include "gbgcn/evaluator.hpp"
#include "gbgcn/log.hpp"
#include "gbgcn/parallel.hpp"
#include "gbgcn/synth.hpp"
#include "gbgcn/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace gbgcn {

namespace {

namespace fs = std::filesystem;

// Configuration problems, reported together.
struct ConfigErrors {
  std::vector<std::string> messages;
};

struct Settings {
  std::string config_file;
  std::vector<std::string> assignments;     // --set key=value
  std::map<std::string, std::string> flags;  // --key value
};

// Registers --config, --set and one flag per key in `keys`.
void add_settings(CLI::App* cmd, Settings& s, const std::vector<std::string>& keys) {
  cmd->add_option("--config", s.config_file, "flat key = value file")->check(CLI::ExistingFile);
  cmd->add_option("--set", s.assignments, "key=value override (repeatable)");
  for (const auto& key : keys) {
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    const std::string names = dashed == key ? "--" + key : "--" + key + ",--" + dashed;
    cmd->add_option(names, s.flags[key]);
  }
}

// File values, then --set, then dedicated flags.
ConfigMap collect(CLI::App* cmd, const Settings& s, std::vector<std::string>& errors) {
  ConfigMap values;
  if (!s.config_file.empty()) {
    try {
      values = read_config_file(s.config_file);
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
  }
  for (const auto& a : s.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      errors.push_back("--set expects key=value, got '" + a + "'");
      continue;
    }
    values[a.substr(0, eq)] = a.substr(eq + 1);
  }
  for (const auto& [key, value] : s.flags) {
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (cmd->get_option("--" + dashed)->count() > 0) values[key] = value;
  }
  return values;
}

std::vector<std::string> hyperparam_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : Hyperparams{}.to_map()) keys.push_back(k);
  return keys;
}

Hyperparams resolve_hyperparams(CLI::App* cmd, const Settings& s) {
  std::vector<std::string> errors;
  Hyperparams base;
  base.threads = default_threads();
  const ConfigMap values = collect(cmd, s, errors);
  Hyperparams hp = apply_config(base, values, errors);
  for (auto& e : hp.validate()) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigErrors{errors};
  return hp;
}

std::vector<int> parse_ks(const std::string& text) {
  std::vector<int> ks;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    int k = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), k);
    if (ec != std::errc{} || ptr != item.data() + item.size() || k < 1) {
      throw ConfigErrors{{"invalid K value '" + item + "' (expected positive integers)"}};
    }
    ks.push_back(k);
  }
  if (ks.empty()) throw ConfigErrors{{"K list is empty"}};
  return ks;
}

std::ofstream create(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

// ---- prepare ----

struct PrepareArgs {
  std::string behaviors, social, out;
  std::uint64_t seed = 2021;
  int negatives = kEvalNegatives;
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out) {
  const Dataset ds = ingest(a.behaviors, a.social);
  const DatasetSplit split = split_leave_one_out(ds.log, ds.stats.users, ds.stats.items, a.seed, a.negatives);
  write_prepared(a.out, ds, split, a.seed);
  write_stats_text(out, ds.stats);
  out << "train records: " << split.train.size() << '\n'
      << "validation users: " << split.validation.size() << '\n'
      << "test users: " << split.test.size() << '\n'
      << "negatives digest: " << hex(split.negatives_digest()) << '\n';
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string data, out;
  Settings settings;
};

int cmd_train(CLI::App* cmd, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const Hyperparams hp = resolve_hyperparams(cmd, a.settings);
  const PreparedData prepared = read_prepared(a.data);
  const TrainData data(prepared.split, prepared.social, hp);
  fs::create_directories(a.out);

  auto log_file = create(fs::path(a.out) / "training_log.jsonl");
  TrainingLog stream;
  const auto on_epoch = [&](const EpochRecord& e) {
    log_file << stream.line(e) << '\n';
    log_file.flush();
    err << e.stage << " epoch " << e.epoch << " loss " << e.loss.total;
    if (e.validation) err << " val ndcg@10 " << e.selection_metric();
    err << '\n';
  };
  const TrainResult result = train(data, hp, on_epoch);

  save_checkpoint(fs::path(a.out) / "model.ckpt", make_checkpoint(hp, result.params, result.adam));
  nlohmann::ordered_json summary;
  summary["model"] = to_string(hp.model);
  summary["epochs_run"] = result.log.epochs.size();
  summary["best_epoch"] = result.best_epoch;
  summary["best_validation_ndcg@10"] = result.best_validation;
  summary["log_digest"] = result.log.digest_hex();
  summary["negatives_digest"] = hex(prepared.split.negatives_digest());
  auto f = create(fs::path(a.out) / "train_summary.json");
  f << summary.dump(2) << '\n';
  out << summary.dump(2) << '\n';
  return 0;
}

// ---- evaluate / recommend ----

struct Loaded {
  PreparedData prepared;
  Checkpoint ckpt;
  Hyperparams hp;
};

Loaded load_model(const std::string& checkpoint, const std::string& data_dir, int threads) {
  Loaded l{read_prepared(data_dir), load_checkpoint(checkpoint), {}};
  check_dimensions(l.ckpt, l.prepared.split.users, l.prepared.split.items);
  l.hp = l.ckpt.settings();
  if (threads > 0) l.hp.threads = threads;
  return l;
}

struct EvaluateArgs {
  std::string checkpoint, data, out, ranks, similarity, ks = "3,5,10,20", set = "test", stage = "final";
  int threads = 0;
  int bins = 20;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto ks = parse_ks(a.ks);
  const EvalSet set = a.set == "validation" ? EvalSet::validation : EvalSet::test;
  const Loaded l = load_model(a.checkpoint, a.data, a.threads > 0 ? a.threads : default_threads());
  const TrainData data(l.prepared.split, l.prepared.social, l.hp);
  const ModelConfig config = ModelConfig::from(l.hp);
  const MetricReport report = evaluate(model_scorer(data, l.ckpt.params, config), data.split, set, ks, l.hp.threads);

  write_report_text(out, report);
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    auto f = create(fs::path(a.out) / "metrics.json");
    f << report_json(report);
  }
  if (!a.ranks.empty()) {
    auto f = create(a.ranks);
    write_rank_dump(f, report);
  }
  if (!a.similarity.empty()) {
    const auto emb = forward(data.graphs, l.ckpt.params, config);
    const EmbeddingStage stage = a.stage == "inview"      ? EmbeddingStage::inview
                                 : a.stage == "crossview" ? EmbeddingStage::crossview
                                                          : EmbeddingStage::final;
    auto f = create(a.similarity);
    f << similarity_json(view_similarity_profile(emb, stage, a.bins));
  }
  return 0;
}

struct RecommendArgs {
  std::string checkpoint, data;
  std::uint64_t user = 0;
  int k = 10;
};

int cmd_recommend(const RecommendArgs& a, std::ostream& out) {
  if (a.k < 1) throw ConfigErrors{{"--k must be positive"}};
  const Loaded l = load_model(a.checkpoint, a.data, 1);
  const auto dense = l.prepared.users.dense(a.user);
  if (dense < 0) throw Error("unknown user id " + std::to_string(a.user));
  const UserId user(static_cast<std::int32_t>(dense));

  const TrainData data(l.prepared.split, l.prepared.social, l.hp);
  const Scorer scorer = model_scorer(data, l.ckpt.params, ModelConfig::from(l.hp));
  std::vector<ItemId> candidates;
  for (Index n = 0; n < l.prepared.split.items; ++n) {
    if (!l.prepared.split.interactions.contains(user, ItemId(n))) candidates.emplace_back(n);
  }
  const std::vector<double> scores = scorer(user, candidates);
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto top = std::min<std::size_t>(static_cast<std::size_t>(a.k), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](auto x, auto y) { return scores[x] > scores[y] || (scores[x] == scores[y] && x < y); });
  out << std::setprecision(9);
  for (std::size_t i = 0; i < top; ++i) {
    out << l.prepared.items.original[candidates[order[i]].value] << '\t' << scores[order[i]] << '\n';
  }
  return 0;
}

// ---- synth ----

struct SynthArgs {
  std::string out;
  Settings settings;
};

int cmd_synth(CLI::App* cmd, const SynthArgs& a, std::ostream& out) {
  std::vector<std::string> errors;
  const ConfigMap values = collect(cmd, a.settings, errors);
  const SynthConfig config = apply_synth_config(SynthConfig{}, values, errors);
  for (auto& e : config.validate()) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigErrors{errors};

  const SynthDataset ds = generate(config);
  write_synth(ds, a.out);
  const auto& c = ds.counters;
  out << "records: " << c.records << '\n'
      << "successful: " << c.successful << '\n'
      << "failed: " << c.failed << '\n'
      << "users: " << c.users_used << '\n'
      << "items: " << c.items_used << '\n'
      << "social_edges: " << c.social_edges << '\n'
      << "joins: " << c.joins << '\n';
  return 0;
}

std::vector<std::string> synth_keys() {
  return {"users", "items", "records", "rank", "role_divergence", "activity_sigma",
          "min_degree", "max_degree", "temperature", "join_scale", "join_bias",
          "threshold_min", "threshold_max", "seed"};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group-buying recommendation: data preparation, training and evaluation", "gbgcn"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "ingest raw files and write the leave-one-out split");
  prepare->add_option("--behaviors", prep.behaviors, "behavior file")->required();
  prepare->add_option("--social", prep.social, "social file")->required();
  prepare->add_option("--out", prep.out, "output directory")->required();
  prepare->add_option("--seed", prep.seed, "split and negative sampling seed");
  prepare->add_option("--eval-negatives", prep.negatives, "negatives per held-out record")
      ->check(CLI::PositiveNumber);

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "pre-train and fine-tune a model");
  train_cmd->add_option("--data", tr.data, "prepared data directory")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--out", tr.out, "output directory")->required();
  add_settings(train_cmd, tr.settings, hyperparam_keys());

  EvaluateArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "rank held-out items against frozen negatives");
  eval_cmd->add_option("--checkpoint", ev.checkpoint)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", ev.data)->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--k", ev.ks, "comma-separated cutoffs");
  eval_cmd->add_option("--split", ev.set, "test or validation")->check(CLI::IsMember({"test", "validation"}));
  eval_cmd->add_option("--out", ev.out, "directory for metrics.json");
  eval_cmd->add_option("--ranks", ev.ranks, "per-user rank dump (TSV)");
  eval_cmd->add_option("--similarity", ev.similarity, "view-similarity histogram output (JSON)");
  eval_cmd->add_option("--stage", ev.stage, "embedding stage for --similarity")
      ->check(CLI::IsMember({"inview", "crossview", "final"}));
  eval_cmd->add_option("--bins", ev.bins)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--threads", ev.threads)->check(CLI::NonNegativeNumber);

  RecommendArgs rec;
  auto* rec_cmd = app.add_subcommand("recommend", "top-K unseen items for one user");
  rec_cmd->add_option("--checkpoint", rec.checkpoint)->required()->check(CLI::ExistingFile);
  rec_cmd->add_option("--data", rec.data)->required()->check(CLI::ExistingDirectory);
  rec_cmd->add_option("--user", rec.user, "user id as in the raw files")->required();
  rec_cmd->add_option("--k", rec.k);

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset from a planted model");
  synth_cmd->add_option("--out", sy.out, "output directory")->required();
  add_settings(synth_cmd, sy.settings, synth_keys());

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  auto previous = log::set_warning_sink([&err](const std::string& m) { err << "warning: " << m << '\n'; });
  int code = 1;
  try {
    if (*prepare) code = cmd_prepare(prep, out);
    else if (*train_cmd) code = cmd_train(train_cmd, tr, out, err);
    else if (*eval_cmd) code = cmd_evaluate(ev, out);
    else if (*rec_cmd) code = cmd_recommend(rec, out);
    else if (*synth_cmd) code = cmd_synth(synth_cmd, sy, out);
  } catch (const ConfigErrors& e) {
    for (const auto& m : e.messages) err << "config error: " << m << '\n';
    code = 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = 1;
  }
  log::set_warning_sink(std::move(previous));
  return code;
}

}  // namespace gbgcn
