#include "doctest.h"

#include "gbgcn/checkpoint.hpp"
#include "gbgcn/cli.hpp"
#include "gbgcn/trainer.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gbgcn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Shared workspace: a small synthetic dataset, prepared once.
struct Workspace {
  fs::path root = fs::temp_directory_path() / "gbgcn_test_cli";
  fs::path raw = root / "raw";
  fs::path data = root / "data";

  Workspace() {
    fs::remove_all(root);
    const auto s = cli({"synth", "--out", raw.string(), "--users", "50", "--items", "30", "--records",
                        "500", "--max-degree", "6", "--seed", "4"});
    REQUIRE(s.code == 0);
    const auto p = cli({"prepare", "--behaviors", (raw / "behaviors.tsv").string(), "--social",
                        (raw / "social.tsv").string(), "--out", data.string(), "--seed", "3"});
    REQUIRE(p.code == 0);
  }
};

Workspace& workspace() {
  static Workspace w;
  return w;
}

std::vector<std::string> quick_train(const fs::path& out, const std::string& pretrain = "2",
                                     const std::string& epochs = "2") {
  return {"train", "--data", workspace().data.string(), "--out", out.string(), "--layers", "1",
          "--pretrain-epochs", pretrain, "--epochs", epochs, "--batch-size", "64", "--threads", "1"};
}

}  // namespace

TEST_CASE("synth prints its counters") {
  const auto s = cli({"synth", "--out", (workspace().root / "s2").string(), "--set", "users=20",
                      "--set", "items=10", "--records", "50", "--max_degree", "4"});
  CHECK(s.code == 0);
  CHECK(s.out.find("records: 50") != std::string::npos);
}

TEST_CASE("prepare is deterministic") {
  auto& w = workspace();
  const auto again = w.root / "data2";
  const auto p = cli({"prepare", "--behaviors", (w.raw / "behaviors.tsv").string(), "--social",
                      (w.raw / "social.tsv").string(), "--out", again.string(), "--seed", "3"});
  REQUIRE(p.code == 0);
  CHECK(p.out.find("behaviors: 500") != std::string::npos);
  for (const auto& entry : fs::directory_iterator(w.data)) {
    CHECK(slurp(entry.path()) == slurp(again / entry.path().filename()));
  }
}

TEST_CASE("prepare reports a missing file with its path") {
  auto& w = workspace();
  const auto r = cli({"prepare", "--behaviors", (w.raw / "behaviors.tsv").string(), "--social",
                      (w.raw / "nope.tsv").string(), "--out", (w.root / "x").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("nope.tsv") != std::string::npos);
}

TEST_CASE("config errors are listed together") {
  auto args = quick_train(workspace().root / "bad");
  args.insert(args.end(), {"--alpha", "1.5", "--set", "bogus=1", "--set", "dim=0"});
  const auto r = cli(args);
  CHECK(r.code == 2);
  CHECK(r.err.find("alpha") != std::string::npos);
  CHECK(r.err.find("bogus") != std::string::npos);
  CHECK(r.err.find("dim") != std::string::npos);
  CHECK_FALSE(fs::exists(workspace().root / "bad" / "model.ckpt"));

  CHECK(cli({"train"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
}

TEST_CASE("config file with flag overrides") {
  auto& w = workspace();
  const auto cfg = w.root / "run.conf";
  {
    std::ofstream f(cfg);
    f << "# quick\nalpha = 0.3\nbeta = 0.1\n";
  }
  auto args = quick_train(w.root / "cfg");
  args.insert(args.end(), {"--config", cfg.string(), "--beta", "0.2"});
  REQUIRE(cli(args).code == 0);
  const auto hp = load_checkpoint(w.root / "cfg" / "model.ckpt").settings();
  CHECK(hp.alpha == 0.3);
  CHECK(hp.beta == 0.2);
}

TEST_CASE("train, evaluate and recommend") {
  auto& w = workspace();
  const auto run = w.root / "run";
  const auto t = cli(quick_train(run));
  REQUIRE(t.code == 0);
  CHECK(t.out.find("\"log_digest\"") != std::string::npos);
  std::ifstream log(run / "training_log.jsonl");
  int lines = 0;
  for (std::string l; std::getline(log, l);) ++lines;
  CHECK(lines == 4);

  const std::string ckpt = (run / "model.ckpt").string();
  const auto e1 = cli({"evaluate", "--checkpoint", ckpt, "--data", w.data.string(), "--out",
                       (run / "e1").string(), "--ranks", (run / "ranks.tsv").string()});
  const auto e2 = cli({"evaluate", "--checkpoint", ckpt, "--data", w.data.string(), "--out",
                       (run / "e2").string(), "--threads", "3"});
  REQUIRE(e1.code == 0);
  REQUIRE(e2.code == 0);
  CHECK(e1.out == e2.out);
  CHECK(slurp(run / "e1" / "metrics.json") == slurp(run / "e2" / "metrics.json"));
  CHECK(e1.out.find("recall@20") != std::string::npos);

  const auto sim = cli({"evaluate", "--checkpoint", ckpt, "--data", w.data.string(), "--similarity",
                        (run / "sim.json").string(), "--stage", "inview"});
  CHECK(sim.code == 0);
  CHECK(fs::exists(run / "sim.json"));

  // recommend agrees with the evaluation scorer
  const auto prepared = read_prepared(w.data);
  const auto c = load_checkpoint(ckpt);
  const auto hp = c.settings();
  const TrainData data(prepared.split, prepared.social, hp);
  const auto scorer = model_scorer(data, c.params, ModelConfig::from(hp));
  for (std::int32_t u : {0, 7, 21}) {
    const auto original = prepared.users.original[u];
    const auto r = cli({"recommend", "--checkpoint", ckpt, "--data", w.data.string(), "--user",
                        std::to_string(original), "--k", "3"});
    REQUIRE(r.code == 0);
    std::vector<ItemId> all;
    for (Index n = 0; n < prepared.split.items; ++n) {
      if (!prepared.split.interactions.contains(UserId(u), ItemId(n))) all.emplace_back(n);
    }
    const auto scores = scorer(UserId(u), all);
    const double best = *std::max_element(scores.begin(), scores.end());
    std::istringstream in(r.out);
    std::uint64_t item = 0;
    double score = 0.0, previous = 1e300;
    int rows = 0;
    while (in >> item >> score) {
      const auto dense = prepared.items.dense(item);
      REQUIRE(dense >= 0);
      CHECK_FALSE(prepared.split.interactions.contains(UserId(u), ItemId(static_cast<std::int32_t>(dense))));
      CHECK(score <= previous);
      if (rows == 0) CHECK(score == doctest::Approx(best).epsilon(1e-6));
      previous = score;
      ++rows;
    }
    CHECK(rows == 3);
  }

  const auto unknown = cli({"recommend", "--checkpoint", ckpt, "--data", w.data.string(), "--user",
                            "999999"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("unknown user") != std::string::npos);
}

TEST_CASE("zero epochs writes a pretrain-only checkpoint") {
  auto& w = workspace();
  REQUIRE(cli(quick_train(w.root / "pre", "2", "0")).code == 0);
  const auto c = load_checkpoint(w.root / "pre" / "model.ckpt");
  CHECK(c.params.has_transforms());
  CHECK(c.params.users.row(0).norm() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("checkpoint and data dimensions must agree") {
  auto& w = workspace();
  const auto other_raw = w.root / "raw_other";
  REQUIRE(cli({"synth", "--out", other_raw.string(), "--users", "30", "--items", "20", "--records",
               "200", "--max-degree", "5"}).code == 0);
  const auto other = w.root / "data_other";
  REQUIRE(cli({"prepare", "--behaviors", (other_raw / "behaviors.tsv").string(), "--social",
               (other_raw / "social.tsv").string(), "--out", other.string()}).code == 0);
  REQUIRE(cli(quick_train(w.root / "dims", "1", "0")).code == 0);
  const auto r = cli({"evaluate", "--checkpoint", (w.root / "dims" / "model.ckpt").string(), "--data",
                      other.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("users") != std::string::npos);
}
