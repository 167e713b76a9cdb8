#include "gbgcn/synth.hpp"

#include "gbgcn/objective.hpp"
#include "gbgcn/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace gbgcn {

namespace {

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::size_t sample_cumulative(const std::vector<double>& cumulative, Rng& rng) {
  const double x = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

SocialGraph random_social(const SynthConfig& c, Rng& rng) {
  std::vector<std::set<std::int32_t>> adj(static_cast<std::size_t>(c.users));
  const auto span = static_cast<std::uint64_t>(c.max_degree - c.min_degree + 1);
  for (Index m = 0; m < c.users; ++m) {
    const auto want = static_cast<std::size_t>(c.min_degree) + rng.below(span);
    for (int attempt = 0; adj[m].size() < want && attempt < 20 * c.max_degree; ++attempt) {
      const auto v = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(c.users)));
      if (v == m || adj[v].size() >= static_cast<std::size_t>(c.max_degree)) continue;
      adj[m].insert(v);
      adj[v].insert(static_cast<std::int32_t>(m));
    }
  }
  std::vector<std::pair<UserId, UserId>> edges;
  for (Index m = 0; m < c.users; ++m) {
    for (auto v : adj[m]) {
      if (v > m) edges.emplace_back(UserId(m), UserId(v));
    }
  }
  return SocialGraph(c.users, edges);
}

// Distribution of the number of successes among independent trials.
std::vector<double> poisson_binomial(const std::vector<double>& p) {
  std::vector<double> dist{1.0};
  for (double q : p) {
    dist.push_back(0.0);
    for (std::size_t k = dist.size() - 1; k > 0; --k) dist[k] = dist[k] * (1 - q) + dist[k - 1] * q;
    dist[0] *= 1 - q;
  }
  return dist;
}

}  // namespace

std::vector<std::string> SynthConfig::validate() const {
  std::vector<std::string> e;
  const auto require = [&](bool ok, const std::string& msg) {
    if (!ok) e.push_back(msg);
  };
  require(users >= 2, "users must be at least 2");
  require(items >= 2, "items must be at least 2");
  require(records >= users, "records must be at least users (every user launches once)");
  require(rank >= 1, "rank must be positive");
  require(role_divergence >= 0 && role_divergence <= 1, "role_divergence must be in [0, 1]");
  require(activity_sigma >= 0, "activity_sigma must be non-negative");
  require(min_degree >= 0 && min_degree <= max_degree, "need 0 <= min_degree <= max_degree");
  require(max_degree < users, "max_degree must be below users");
  require(temperature >= 0, "temperature must be non-negative");
  require(join_scale > 0, "join_scale must be positive");
  require(threshold_min >= 0 && threshold_min <= threshold_max,
          "need 0 <= threshold_min <= threshold_max");
  return e;
}

SynthConfig apply_synth_config(SynthConfig c, const ConfigMap& values, std::vector<std::string>& errors) {
  for (const auto& [key, value] : values) {
    bool ok = true;
    if (key == "users") ok = parse_number(value, c.users);
    else if (key == "items") ok = parse_number(value, c.items);
    else if (key == "records") ok = parse_number(value, c.records);
    else if (key == "rank") ok = parse_number(value, c.rank);
    else if (key == "role_divergence") ok = parse_number(value, c.role_divergence);
    else if (key == "activity_sigma") ok = parse_number(value, c.activity_sigma);
    else if (key == "min_degree") ok = parse_number(value, c.min_degree);
    else if (key == "max_degree") ok = parse_number(value, c.max_degree);
    else if (key == "temperature") ok = parse_number(value, c.temperature);
    else if (key == "join_scale") ok = parse_number(value, c.join_scale);
    else if (key == "join_bias") ok = parse_number(value, c.join_bias);
    else if (key == "threshold_min") ok = parse_number(value, c.threshold_min);
    else if (key == "threshold_max") ok = parse_number(value, c.threshold_max);
    else if (key == "seed") ok = parse_number(value, c.seed);
    else {
      errors.push_back("unknown synth key '" + key + "'");
      continue;
    }
    if (!ok) errors.push_back("invalid value '" + value + "' for " + key);
  }
  return c;
}

std::vector<double> PlantedModel::launch_probabilities(UserId m) const {
  const Vector<double> aff = items * initiator.row(m.index()).transpose();
  std::vector<double> p(static_cast<std::size_t>(aff.size()), 0.0);
  if (config.temperature == 0.0) {
    Index best = 0;
    aff.maxCoeff(&best);  // first maximum
    p[static_cast<std::size_t>(best)] = 1.0;
    return p;
  }
  const double top = aff.maxCoeff();
  double sum = 0.0;
  for (Index n = 0; n < aff.size(); ++n) {
    p[n] = std::exp((aff(n) - top) / config.temperature);
    sum += p[n];
  }
  for (double& x : p) x /= sum;
  return p;
}

double PlantedModel::join_probability(UserId f, ItemId n) const {
  const double aff = participant.row(f.index()).dot(items.row(n.index()));
  return sigmoid((aff - config.join_bias) / config.join_scale);
}

double PlantedModel::clinch_probability(UserId m, ItemId n) const {
  const int t = thresholds[n.value];
  if (t == 0) return 1.0;
  std::vector<double> p;
  for (UserId f : social.friends(m)) p.push_back(join_probability(f, n));
  const auto dist = poisson_binomial(p);
  double tail = 0.0;
  for (std::size_t k = static_cast<std::size_t>(t); k < dist.size(); ++k) tail += dist[k];
  return std::clamp(tail, 0.0, 1.0);
}

SynthDataset generate(const SynthConfig& c) {
  if (const auto errors = c.validate(); !errors.empty()) {
    throw Error("invalid synth config: " + errors.front());
  }
  Rng rng(c.seed);
  SynthDataset out;
  PlantedModel& pm = out.planted;
  pm.config = c;
  pm.initiator.resize(c.users, c.rank);
  pm.participant.resize(c.users, c.rank);
  pm.items.resize(c.items, c.rank);
  const double keep = std::sqrt(1.0 - c.role_divergence);
  const double fresh = std::sqrt(c.role_divergence);
  for (Index m = 0; m < c.users; ++m) {
    for (int k = 0; k < c.rank; ++k) {
      const double a = rng.normal();
      const double b = rng.normal();
      pm.initiator(m, k) = a;
      pm.participant(m, k) = keep * a + fresh * b;
    }
  }
  const double item_scale = 1.0 / std::sqrt(static_cast<double>(c.rank));
  for (Index n = 0; n < c.items; ++n) {
    for (int k = 0; k < c.rank; ++k) pm.items(n, k) = item_scale * rng.normal();
  }
  pm.activity.resize(static_cast<std::size_t>(c.users));
  for (double& a : pm.activity) a = std::exp(c.activity_sigma * rng.normal());
  pm.thresholds.resize(static_cast<std::size_t>(c.items));
  for (int& t : pm.thresholds) {
    t = c.threshold_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(c.threshold_max - c.threshold_min + 1)));
  }
  pm.social = random_social(c, rng);

  std::vector<double> activity_cdf(pm.activity.size());
  std::partial_sum(pm.activity.begin(), pm.activity.end(), activity_cdf.begin());
  std::vector<std::vector<double>> launch_cdf(static_cast<std::size_t>(c.users));

  std::vector<char> user_seen(static_cast<std::size_t>(c.users), 0);
  std::vector<char> item_seen(static_cast<std::size_t>(c.items), 0);
  out.records.reserve(static_cast<std::size_t>(c.records));
  for (Index i = 0; i < c.records; ++i) {
    const UserId m(i < c.users ? i : static_cast<Index>(sample_cumulative(activity_cdf, rng)));
    auto& cdf = launch_cdf[m.value];
    if (cdf.empty()) {
      cdf = pm.launch_probabilities(m);
      std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
    }
    const ItemId n(static_cast<Index>(sample_cumulative(cdf, rng)));
    BehaviorRecord r{m, n, {}, false};
    for (UserId f : pm.social.friends(m)) {
      if (rng.uniform() < pm.join_probability(f, n)) r.participants.push_back(f);
    }
    r.success = static_cast<int>(r.participants.size()) >= pm.thresholds[n.value];

    auto& k = out.counters;
    ++k.records;
    ++(r.success ? k.successful : k.failed);
    k.joins += static_cast<Index>(r.participants.size());
    user_seen[m.value] = 1;
    for (UserId f : r.participants) user_seen[f.value] = 1;
    item_seen[n.value] = 1;
    out.records.push_back(std::move(r));
  }
  out.counters.users_used = std::count(user_seen.begin(), user_seen.end(), 1);
  out.counters.items_used = std::count(item_seen.begin(), item_seen.end(), 1);
  out.counters.social_edges = pm.social.edge_count();
  return out;
}

std::vector<ItemId> oracle_topk(const PlantedModel& planted, UserId user, Index k) {
  const auto launch = planted.launch_probabilities(user);
  std::vector<std::pair<double, std::int32_t>> scored;
  scored.reserve(launch.size());
  for (std::size_t n = 0; n < launch.size(); ++n) {
    const ItemId item(static_cast<std::int32_t>(n));
    scored.emplace_back(launch[n] * planted.clinch_probability(user, item), item.value);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<ItemId> out;
  for (Index i = 0; i < std::min<Index>(k, static_cast<Index>(scored.size())); ++i) {
    out.emplace_back(scored[static_cast<std::size_t>(i)].second);
  }
  return out;
}

std::string planted_json(const PlantedModel& pm) {
  const auto rows = [](const Matrix<double>& m) {
    nlohmann::json a = nlohmann::json::array();
    for (Index r = 0; r < m.rows(); ++r) a.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    return a;
  };
  const auto& c = pm.config;
  nlohmann::ordered_json j;
  j["config"] = {{"users", c.users},
                 {"items", c.items},
                 {"records", c.records},
                 {"rank", c.rank},
                 {"role_divergence", c.role_divergence},
                 {"activity_sigma", c.activity_sigma},
                 {"min_degree", c.min_degree},
                 {"max_degree", c.max_degree},
                 {"temperature", c.temperature},
                 {"join_scale", c.join_scale},
                 {"join_bias", c.join_bias},
                 {"threshold_min", c.threshold_min},
                 {"threshold_max", c.threshold_max},
                 {"seed", c.seed}};
  j["initiator"] = rows(pm.initiator);
  j["participant"] = rows(pm.participant);
  j["items"] = rows(pm.items);
  j["activity"] = pm.activity;
  j["thresholds"] = pm.thresholds;
  return j.dump() + "\n";
}

void write_synth(const SynthDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("behaviors.tsv");
    write_behaviors(f, data.records);
  }
  {
    auto f = open("social.tsv");
    write_social(f, data.planted.social);
  }
  {
    auto f = open("planted.json");
    f << planted_json(data.planted);
  }
}

}  // namespace gbgcn
