#include "gbgcn/baselines.hpp"

#include <algorithm>
#include <string>

namespace gbgcn {

namespace {

template <typename Scalar>
void check_ids(const MFParams<Scalar>& p, UserId m, ItemId n) {
  if (m.value < 0 || m.index() >= p.user_count()) {
    throw Error("user " + std::to_string(m.value) + " out of range");
  }
  if (n.value < 0 || n.index() >= p.item_count()) {
    throw Error("item " + std::to_string(n.value) + " out of range");
  }
}

}  // namespace

template <typename Scalar>
Scalar mf_score(const MFParams<Scalar>& params, UserId m, ItemId n) {
  check_ids(params, m, n);
  return params.users.row(m.index()).dot(params.items.row(n.index()));
}

template <typename Scalar>
Scalar gbmf_score(const MFParams<Scalar>& params, const SocialGraph& social, double alpha,
                  UserId m, ItemId n, bool renormalize_alpha) {
  check_ids(params, m, n);
  const Scalar own = params.users.row(m.index()).dot(params.items.row(n.index()));
  const auto friends = social.friends(m);
  if (friends.empty()) return static_cast<Scalar>(renormalize_alpha ? 1.0 : 1.0 - alpha) * own;
  Scalar sum = 0;
  for (UserId f : friends) sum += params.users.row(f.index()).dot(params.items.row(n.index()));
  return static_cast<Scalar>(1.0 - alpha) * own +
         static_cast<Scalar>(alpha) * sum / static_cast<Scalar>(friends.size());
}

BehaviorLog flatten_interactions(const BehaviorLog& log, MfRoles roles) {
  std::vector<std::pair<UserId, ItemId>> pairs;
  for (const auto& r : log.records) {
    pairs.emplace_back(r.initiator, r.item);
    if (roles == MfRoles::both) {
      for (UserId p : r.participants) pairs.emplace_back(p, r.item);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<BehaviorRecord> out;
  out.reserve(pairs.size());
  for (const auto& [u, n] : pairs) out.push_back({u, n, {}, false});
  return BehaviorLog::from_records(std::move(out));
}

template float mf_score<float>(const MFParams<float>&, UserId, ItemId);
template double mf_score<double>(const MFParams<double>&, UserId, ItemId);
template float gbmf_score<float>(const MFParams<float>&, const SocialGraph&, double, UserId, ItemId, bool);
template double gbmf_score<double>(const MFParams<double>&, const SocialGraph&, double, UserId, ItemId, bool);

}  // namespace gbgcn
