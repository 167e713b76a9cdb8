#include "doctest.h"

#include "gbgcn/data.hpp"
#include "gbgcn/log.hpp"
#include "gbgcn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

using namespace gbgcn;

namespace {

SynthConfig tiny(std::uint64_t seed = 1) {
  SynthConfig c;
  c.users = 40;
  c.items = 20;
  c.records = 300;
  c.min_degree = 2;
  c.max_degree = 8;
  c.seed = seed;
  return c;
}

// Success probability by brute force: naive softmax and every subset of friends.
double brute_success(const PlantedModel& pm, UserId m, ItemId n) {
  const auto& c = pm.config;
  double z = 0.0;
  for (Index j = 0; j < c.items; ++j) z += std::exp(pm.initiator.row(m.value).dot(pm.items.row(j)) / c.temperature);
  const double launch = std::exp(pm.initiator.row(m.value).dot(pm.items.row(n.value)) / c.temperature) / z;

  const auto friends = pm.social.friends(m);
  std::vector<double> p;
  for (UserId f : friends) {
    const double a = pm.participant.row(f.value).dot(pm.items.row(n.value));
    p.push_back(1.0 / (1.0 + std::exp(-(a - c.join_bias) / c.join_scale)));
  }
  double clinch = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << p.size()); ++mask) {
    double prob = 1.0;
    int joins = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (mask & (1u << i)) {
        prob *= p[i];
        ++joins;
      } else {
        prob *= 1.0 - p[i];
      }
    }
    if (joins >= pm.thresholds[n.value]) clinch += prob;
  }
  return launch * clinch;
}

}  // namespace

TEST_CASE("labels are consistent with the planted thresholds") {
  const auto ds = generate(tiny());
  CHECK(ds.records.size() == 300);
  Index joins = 0, successful = 0;
  for (const auto& r : ds.records) {
    CHECK(r.success == (static_cast<int>(r.participants.size()) >= ds.planted.thresholds[r.item.value]));
    CHECK(std::is_sorted(r.participants.begin(), r.participants.end()));
    for (UserId p : r.participants) {
      CHECK(p != r.initiator);
      CHECK(ds.planted.social.connected(p, r.initiator));
    }
    joins += static_cast<Index>(r.participants.size());
    successful += r.success;
  }
  CHECK(ds.counters.joins == joins);
  CHECK(ds.counters.successful == successful);
  CHECK(ds.counters.failed == 300 - successful);
  CHECK(ds.counters.users_used == 40);
  for (Index m = 0; m < 40; ++m) CHECK(ds.planted.social.degree(UserId(m)) <= 8);
}

TEST_CASE("threshold zero makes every record successful") {
  auto c = tiny();
  c.threshold_min = 0;
  c.threshold_max = 0;
  for (const auto& r : generate(c).records) CHECK(r.success);
}

TEST_CASE("temperature zero launches the argmax item") {
  auto c = tiny();
  c.temperature = 0.0;
  const auto ds = generate(c);
  for (const auto& r : ds.records) {
    Index best = 0;
    (ds.planted.items * ds.planted.initiator.row(r.initiator.value).transpose()).maxCoeff(&best);
    CHECK(r.item.value == best);
  }
}

TEST_CASE("generation is deterministic per seed") {
  const auto a = generate(tiny(5));
  const auto b = generate(tiny(5));
  CHECK(a.records == b.records);
  CHECK(a.planted.social == b.planted.social);
  CHECK(planted_json(a.planted) == planted_json(b.planted));
  CHECK(generate(tiny(6)).records != a.records);
}

TEST_CASE("role divergence zero gives identical role vectors") {
  auto c = tiny();
  c.role_divergence = 0.0;
  const auto ds = generate(c);
  CHECK(ds.planted.initiator == ds.planted.participant);
}

TEST_CASE("written files re-ingest without warnings and match the counters") {
  const auto ds = generate(tiny(2));
  const auto dir = std::filesystem::temp_directory_path() / "gbgcn_test_synth";
  std::filesystem::remove_all(dir);
  write_synth(ds, dir);
  int warnings = 0;
  const auto previous = log::set_warning_sink([&](const std::string&) { ++warnings; });
  const auto back = ingest(dir / "behaviors.tsv", dir / "social.tsv");
  log::set_warning_sink(previous);
  CHECK(warnings == 0);
  CHECK(back.stats.records == ds.counters.records);
  CHECK(back.stats.successful == ds.counters.successful);
  CHECK(back.stats.failed == ds.counters.failed);
  CHECK(back.stats.users == ds.counters.users_used);
  CHECK(back.stats.items == ds.counters.items_used);
  CHECK(back.stats.social_edges == ds.counters.social_edges);
  CHECK(back.stats.rejected_records == 0);
  CHECK(std::filesystem::exists(dir / "planted.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("oracle ranking agrees with exhaustive enumeration") {
  const auto ds = generate(tiny(9));
  const auto& pm = ds.planted;
  for (Index m = 0; m < 10; ++m) {
    std::vector<double> s(20);
    for (Index n = 0; n < 20; ++n) {
      s[n] = brute_success(pm, UserId(m), ItemId(n));
      CHECK(pm.launch_probabilities(UserId(m))[n] * pm.clinch_probability(UserId(m), ItemId(n)) ==
            doctest::Approx(s[n]).epsilon(1e-9));
    }
    std::vector<int> order(20);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s[a] > s[b]; });
    const auto top = oracle_topk(pm, UserId(m), 20);
    REQUIRE(top.size() == 20);
    for (int i = 0; i < 20; ++i) CHECK(top[i].value == order[i]);
    CHECK(oracle_topk(pm, UserId(m), 5) == std::vector<ItemId>(top.begin(), top.begin() + 5));
  }
}

TEST_CASE("bad configs are reported") {
  auto c = tiny();
  c.records = 10;
  c.threshold_min = 3;
  c.threshold_max = 1;
  CHECK(c.validate().size() == 2);
  CHECK_THROWS_AS(generate(c), Error);

  std::vector<std::string> errors;
  apply_synth_config(SynthConfig{}, {{"users", "x"}, {"bogus", "1"}}, errors);
  CHECK(errors.size() == 2);
}
