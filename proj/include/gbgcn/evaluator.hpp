#pragma once

#include "gbgcn/data.hpp"
#include "gbgcn/model.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gbgcn {

/// Scores `candidates` for `user`; one score per candidate, in order.
using Scorer = std::function<std::vector<double>(UserId user, std::span<const ItemId> candidates)>;

/// Scorer over precomputed embeddings; keeps them alive.
Scorer embedding_scorer(std::shared_ptr<const ViewEmbeddings<float>> emb, const SocialGraph& social,
                        const ModelConfig& config);

enum class EvalSet { validation, test };

/// Candidates strictly better than the held-out item plus ties: ties count
/// against the held-out item.
int pessimistic_rank(double target, std::span<const double> others);

/// Rank of the user's held-out item among its frozen negatives; nullopt when
/// the user has no held-out record in `set`.
std::optional<int> rank_test_item(const Scorer& scorer, const DatasetSplit& split, UserId user,
                                  EvalSet set = EvalSet::test);

struct MetricReport {
  std::vector<int> ks;
  std::vector<double> recall;
  std::vector<double> ndcg;
  Index users = 0;
  /// Per-user ranks, filled by `evaluate`.
  std::vector<std::pair<UserId, int>> ranks;

  double recall_at(int k) const;
  double ndcg_at(int k) const;
  /// Throws if a metric is outside [0, 1], ndcg exceeds recall, or either
  /// decreases with K.
  void check_invariants() const;
};

double recall_at(int rank, int k);
double ndcg_at(int rank, int k);

MetricReport compute_metrics(std::span<const int> ranks, std::span<const int> ks);

MetricReport evaluate(const Scorer& scorer, const DatasetSplit& split, EvalSet set,
                      std::span<const int> ks, int threads = 1);

void write_report_text(std::ostream& out, const MetricReport& report);
std::string report_json(const MetricReport& report);
void write_rank_dump(std::ostream& out, const MetricReport& report);

struct Histogram {
  double lo = -1.0;
  double hi = 1.0;
  std::vector<Index> counts;
  Index total() const;
};

struct SimilarityProfile {
  Histogram users;
  Histogram items;
  Index skipped_users = 0;  // zero vector in either view
  Index skipped_items = 0;
};

enum class EmbeddingStage { inview, crossview, final };

/// Cosine similarity between each entity's initiator-view and participant-view
/// vectors at `stage`, binned over [-1, 1].
template <typename Scalar>
SimilarityProfile view_similarity_profile(const ViewEmbeddings<Scalar>& emb, EmbeddingStage stage,
                                          int bins = 20);

std::string similarity_json(const SimilarityProfile& profile);

}  // namespace gbgcn
