#pragma once

// MF-BPR and GBMF share ModelParams without transformations: one raw user and
// item matrix, no views, no propagation.

#include "gbgcn/data.hpp"
#include "gbgcn/hyperparams.hpp"
#include "gbgcn/model.hpp"

namespace gbgcn {

template <typename Scalar>
using MFParams = ModelParams<Scalar>;

template <typename Scalar>
Scalar mf_score(const MFParams<Scalar>& params, UserId m, ItemId n);

/// Own affinity blended with the friends' mean affinity on the same embeddings.
template <typename Scalar>
Scalar gbmf_score(const MFParams<Scalar>& params, const SocialGraph& social, double alpha,
                  UserId m, ItemId n, bool renormalize_alpha = false);

/// User-item pairs as initiator-only records, deduplicated. With `both`, every
/// participant's join also becomes a pair.
BehaviorLog flatten_interactions(const BehaviorLog& log, MfRoles roles);

}  // namespace gbgcn
