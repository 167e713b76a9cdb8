#include "gbgcn/evaluator.hpp"

#include "gbgcn/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gbgcn {

Scorer embedding_scorer(std::shared_ptr<const ViewEmbeddings<float>> emb, const SocialGraph& social,
                        const ModelConfig& config) {
  return [emb = std::move(emb), &social, config](UserId user, std::span<const ItemId> candidates) {
    const Vector<float> s = score_items(*emb, social, config, user, candidates);
    return std::vector<double>(s.data(), s.data() + s.size());
  };
}

int pessimistic_rank(double target, std::span<const double> others) {
  int rank = 0;
  for (double s : others) {
    // NaN compares false both ways and is treated as a loss for the target.
    if (!(s < target)) ++rank;
  }
  return rank;
}

std::optional<int> rank_test_item(const Scorer& scorer, const DatasetSplit& split, UserId user,
                                  EvalSet set) {
  const auto& held = set == EvalSet::test ? split.test : split.validation;
  const auto it = held.find(user);
  if (it == held.end()) return std::nullopt;
  const auto neg = split.eval_negatives.find(user);
  std::vector<ItemId> candidates{it->second.item};
  if (neg != split.eval_negatives.end()) {
    candidates.insert(candidates.end(), neg->second.begin(), neg->second.end());
  }
  const std::vector<double> scores = scorer(user, candidates);
  return pessimistic_rank(scores.front(), std::span<const double>(scores).subspan(1));
}

double recall_at(int rank, int k) { return rank < k ? 1.0 : 0.0; }

double ndcg_at(int rank, int k) { return rank < k ? 1.0 / std::log2(rank + 2.0) : 0.0; }

double MetricReport::recall_at(int k) const {
  const auto it = std::find(ks.begin(), ks.end(), k);
  if (it == ks.end()) throw Error("K=" + std::to_string(k) + " was not evaluated");
  return recall[static_cast<std::size_t>(it - ks.begin())];
}

double MetricReport::ndcg_at(int k) const {
  const auto it = std::find(ks.begin(), ks.end(), k);
  if (it == ks.end()) throw Error("K=" + std::to_string(k) + " was not evaluated");
  return ndcg[static_cast<std::size_t>(it - ks.begin())];
}

void MetricReport::check_invariants() const {
  std::vector<std::size_t> order(ks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ks[a] < ks[b]; });
  constexpr double slack = 1e-12;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto i = order[j];
    if (recall[i] < 0.0 || recall[i] > 1.0) throw Error("recall outside [0, 1]");
    if (ndcg[i] < 0.0 || ndcg[i] > recall[i] + slack) throw Error("ndcg exceeds recall");
    if (j > 0) {
      const auto p = order[j - 1];
      if (recall[i] + slack < recall[p] || ndcg[i] + slack < ndcg[p]) {
        throw Error("metrics decrease with K");
      }
    }
  }
}

MetricReport compute_metrics(std::span<const int> ranks, std::span<const int> ks) {
  if (ranks.empty()) throw Error("no users to evaluate");
  MetricReport r;
  r.ks.assign(ks.begin(), ks.end());
  r.users = static_cast<Index>(ranks.size());
  for (int k : ks) {
    double rec = 0.0, nd = 0.0;
    for (int rank : ranks) {
      rec += recall_at(rank, k);
      nd += ndcg_at(rank, k);
    }
    r.recall.push_back(rec / static_cast<double>(ranks.size()));
    r.ndcg.push_back(nd / static_cast<double>(ranks.size()));
  }
  r.check_invariants();
  return r;
}

MetricReport evaluate(const Scorer& scorer, const DatasetSplit& split, EvalSet set,
                      std::span<const int> ks, int threads) {
  const auto& held = set == EvalSet::test ? split.test : split.validation;
  std::vector<UserId> users;
  users.reserve(held.size());
  for (const auto& [u, _] : held) users.push_back(u);

  std::vector<int> ranks(users.size());
  parallel_for(users.size(), threads, [&](std::size_t i) {
    ranks[i] = *rank_test_item(scorer, split, users[i], set);
  });
  MetricReport report = compute_metrics(ranks, ks);
  report.ranks.reserve(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) report.ranks.emplace_back(users[i], ranks[i]);
  return report;
}

void write_report_text(std::ostream& out, const MetricReport& report) {
  out << "users: " << report.users << '\n';
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    out << "recall@" << report.ks[i] << ": " << report.recall[i] << '\n';
  }
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    out << "ndcg@" << report.ks[i] << ": " << report.ndcg[i] << '\n';
  }
}

std::string report_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["users"] = report.users;
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    j["recall@" + std::to_string(report.ks[i])] = report.recall[i];
  }
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    j["ndcg@" + std::to_string(report.ks[i])] = report.ndcg[i];
  }
  return j.dump(2) + "\n";
}

void write_rank_dump(std::ostream& out, const MetricReport& report) {
  for (const auto& [u, rank] : report.ranks) out << u.value << '\t' << rank << '\n';
}

Index Histogram::total() const {
  Index t = 0;
  for (auto c : counts) t += c;
  return t;
}

namespace {

template <typename A, typename B>
void profile_rows(const A& first, const B& second, int bins, Histogram& hist, Index& skipped) {
  hist.counts.assign(static_cast<std::size_t>(bins), 0);
  for (Index r = 0; r < first.rows(); ++r) {
    const double na = static_cast<double>(first.row(r).norm());
    const double nb = static_cast<double>(second.row(r).norm());
    if (na == 0.0 || nb == 0.0) {
      ++skipped;
      continue;
    }
    const double cos = std::clamp(static_cast<double>(first.row(r).dot(second.row(r))) / (na * nb), -1.0, 1.0);
    auto bin = static_cast<int>((cos - hist.lo) / (hist.hi - hist.lo) * bins);
    ++hist.counts[static_cast<std::size_t>(std::clamp(bin, 0, bins - 1))];
  }
}

}  // namespace

template <typename Scalar>
SimilarityProfile view_similarity_profile(const ViewEmbeddings<Scalar>& emb, EmbeddingStage stage,
                                          int bins) {
  if (bins < 1) throw Error("histogram needs at least one bin");
  if (stage == EmbeddingStage::crossview && !emb.cross_view) {
    throw Error("embeddings have no cross-view stage");
  }
  SimilarityProfile p;
  const auto run = [&](const auto& ui, const auto& up, const auto& vi, const auto& vp) {
    profile_rows(ui, up, bins, p.users, p.skipped_users);
    profile_rows(vi, vp, bins, p.items, p.skipped_items);
  };
  switch (stage) {
    case EmbeddingStage::inview:
      run(emb.user_inview(View::initiator), emb.user_inview(View::participant),
          emb.item_inview(View::initiator), emb.item_inview(View::participant));
      break;
    case EmbeddingStage::crossview:
      run(emb.user_crossview(View::initiator), emb.user_crossview(View::participant),
          emb.item_crossview(View::initiator), emb.item_crossview(View::participant));
      break;
    case EmbeddingStage::final:
      run(emb.user_final(View::initiator), emb.user_final(View::participant),
          emb.item_final(View::initiator), emb.item_final(View::participant));
      break;
  }
  return p;
}

template SimilarityProfile view_similarity_profile<float>(const ViewEmbeddings<float>&, EmbeddingStage, int);
template SimilarityProfile view_similarity_profile<double>(const ViewEmbeddings<double>&, EmbeddingStage, int);

std::string similarity_json(const SimilarityProfile& p) {
  nlohmann::ordered_json j;
  j["lo"] = p.users.lo;
  j["hi"] = p.users.hi;
  j["users"] = p.users.counts;
  j["items"] = p.items.counts;
  j["skipped_users"] = p.skipped_users;
  j["skipped_items"] = p.skipped_items;
  return j.dump(2) + "\n";
}

}  // namespace gbgcn
