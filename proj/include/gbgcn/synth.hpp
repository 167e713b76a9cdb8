#pragma once

// Synthetic group-buying data from a planted latent model. Each launch picks
// an initiator by activity, an item by a softmax over initiator-role
// affinities, and lets every friend join independently with a logistic
// probability of their participant-role affinity. The group clinches when the
// number of joins reaches the item's threshold.

#include "gbgcn/data.hpp"
#include "gbgcn/hyperparams.hpp"
#include "gbgcn/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gbgcn {

struct SynthConfig {
  Index users = 500;
  Index items = 200;
  Index records = 20000;
  int rank = 8;                  // latent dimension
  double role_divergence = 0.5;  // 0: same vector for both roles, 1: independent
  double activity_sigma = 0.5;   // log-normal spread of launch activity
  int min_degree = 3;            // friendships each user starts
  int max_degree = 12;           // cap on any user's friend count
  double temperature = 0.5;      // item softmax temperature; 0 picks the argmax
  double join_scale = 0.5;       // logistic temperature of joining
  double join_bias = 0.5;        // subtracted from the affinity before the logistic
  int threshold_min = 1;
  int threshold_max = 2;
  std::uint64_t seed = 7;

  std::vector<std::string> validate() const;
};

SynthConfig apply_synth_config(SynthConfig base, const ConfigMap& values,
                               std::vector<std::string>& errors);

struct PlantedModel {
  SynthConfig config;
  Matrix<double> initiator;    // P x rank
  Matrix<double> participant;  // P x rank
  Matrix<double> items;        // Q x rank
  std::vector<double> activity;
  std::vector<int> thresholds;
  SocialGraph social;

  /// Softmax launch distribution of user m over all items.
  std::vector<double> launch_probabilities(UserId m) const;
  double join_probability(UserId friend_id, ItemId n) const;
  /// P(at least threshold(n) of m's friends join n).
  double clinch_probability(UserId m, ItemId n) const;
};

struct SynthCounters {
  Index records = 0;
  Index successful = 0;
  Index failed = 0;
  Index users_used = 0;
  Index items_used = 0;
  Index social_edges = 0;
  Index joins = 0;
};

struct SynthDataset {
  PlantedModel planted;
  std::vector<BehaviorRecord> records;
  SynthCounters counters;
};

SynthDataset generate(const SynthConfig& config);

/// Items ranked by planted success probability: launch probability times
/// clinch probability. Ties go to the lower item id.
std::vector<ItemId> oracle_topk(const PlantedModel& planted, UserId user, Index k);

/// Writes behaviors.tsv, social.tsv and planted.json into `dir`.
void write_synth(const SynthDataset& data, const std::filesystem::path& dir);

std::string planted_json(const PlantedModel& planted);

}  // namespace gbgcn
