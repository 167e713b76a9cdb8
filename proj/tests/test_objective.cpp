#include "doctest.h"
#include "fixtures.hpp"

#include "gbgcn/objective.hpp"

#include <cmath>
#include <map>

using namespace gbgcn;

namespace {

// Scores from a lookup table; missing entries are zero.
struct TableScores {
  std::map<std::pair<std::int32_t, std::int32_t>, double> composite;
  std::map<std::pair<std::int32_t, std::int32_t>, double> participant;

  double score(UserId u, ItemId n) const {
    auto it = composite.find({u.value, n.value});
    return it == composite.end() ? 0.0 : it->second;
  }
  double participant_score(UserId u, ItemId n) const {
    auto it = participant.find({u.value, n.value});
    return it == participant.end() ? 0.0 : it->second;
  }
};

double naive_nll(double gap) { return -std::log(1.0 / (1.0 + std::exp(-gap))); }

SocialGraph star(Index users) {
  std::vector<std::pair<UserId, UserId>> e;
  for (Index f = 1; f < users; ++f) e.emplace_back(UserId(0), UserId(f));
  return SocialGraph(users, e);
}

}  // namespace

TEST_CASE("softplus is stable and matches the naive form where that is finite") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(softplus(-20.0) < 1e-3);
  CHECK(std::isfinite(softplus(40.0)));
  CHECK(softplus(40.0) == doctest::Approx(40.0));
  CHECK(std::isfinite(softplus(800.0)));
  CHECK(softplus(-800.0) >= 0.0);
  for (double gap = -15.0; gap <= 15.0; gap += 0.5) {
    CHECK(softplus(-gap) == doctest::Approx(naive_nll(gap)).epsilon(1e-10));
  }
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("pair loss at fixed gaps") {
  const BehaviorRecord r{UserId(0), ItemId(0), {}, false};
  const SocialGraph none(1, {});
  LossConfig c;
  TableScores s;
  s.composite[{0, 0}] = 0.0;
  CHECK(loss_failed(r, ItemId(1), s, none, c) == doctest::Approx(std::log(2.0)));
  s.composite[{0, 0}] = 20.0;
  CHECK(loss_failed(r, ItemId(1), s, none, c) < 1e-3);
  s.composite[{0, 0}] = -40.0;
  const double l = loss_failed(r, ItemId(1), s, none, c);
  CHECK(std::isfinite(l));
  CHECK(l == doctest::Approx(40.0));
}

TEST_CASE("successful behavior: hand-evaluated") {
  const BehaviorRecord r{UserId(0), ItemId(3), {UserId(1), UserId(2)}, true};
  TableScores s;
  s.composite[{0, 3}] = 1.0;
  s.composite[{0, 7}] = 0.5;
  s.composite[{1, 3}] = -0.2;
  s.composite[{1, 7}] = 0.3;
  s.composite[{2, 3}] = 2.0;
  LossConfig c;
  const double want = naive_nll(0.5) + naive_nll(-0.5) + naive_nll(2.0);
  CHECK(loss_success(r, ItemId(7), s, c) == doctest::Approx(want).epsilon(1e-12));

  // role semantics reads the participant table for the joiners only
  c.semantics = ScoreSemantics::role;
  s.participant[{1, 3}] = 1.5;
  const double want_role = naive_nll(0.5) + naive_nll(1.5) + naive_nll(0.0);
  CHECK(loss_success(r, ItemId(7), s, c) == doctest::Approx(want_role).epsilon(1e-12));

  CHECK_THROWS_AS(loss_failed(r, ItemId(7), s, SocialGraph(3, {}), c), Error);
}

TEST_CASE("failed behavior: friends disprefer the item") {
  const BehaviorRecord r{UserId(0), ItemId(1), {}, false};
  const auto social = star(3);
  TableScores s;
  s.composite[{0, 1}] = 0.4;
  s.composite[{1, 1}] = 0.9;
  s.composite[{1, 2}] = 0.1;
  s.composite[{2, 2}] = -0.3;
  LossConfig c;
  c.beta = 0.5;
  const double want = naive_nll(0.4) + 0.5 * (naive_nll(0.1 - 0.9) + naive_nll(-0.3 - 0.0));
  CHECK(loss_failed(r, ItemId(2), s, social, c) == doctest::Approx(want).epsilon(1e-12));

  SUBCASE("beta zero reduces to BPR") {
    c.beta = 0.0;
    CHECK(loss_failed(r, ItemId(2), s, social, c) == doctest::Approx(naive_nll(0.4)));
  }
  SUBCASE("BPR kind ignores friends") {
    c.kind = LossKind::bpr;
    CHECK(loss_failed(r, ItemId(2), s, social, c) == doctest::Approx(naive_nll(0.4)));
  }
  SUBCASE("an initiator without friends contributes only the launch term") {
    CHECK(loss_failed(r, ItemId(2), s, SocialGraph(3, {}), c) == doctest::Approx(naive_nll(0.4)));
  }
  CHECK_THROWS_AS(loss_success(r, ItemId(2), s, c), Error);
}

TEST_CASE("term count follows record shape") {
  const auto social = star(5);
  LossConfig c;
  std::vector<PairTerm> terms;
  expand_terms({UserId(0), ItemId(0), {UserId(1), UserId(2), UserId(3)}, true}, ItemId(1), social, c,
               terms);
  CHECK(terms.size() == 4);
  terms.clear();
  expand_terms({UserId(0), ItemId(0), {UserId(1)}, false}, ItemId(1), social, c, terms);
  CHECK(terms.size() == 5);  // initiator plus 4 friends
  for (std::size_t i = 1; i < terms.size(); ++i) {
    CHECK(terms[i].preferred == ItemId(1));
    CHECK(terms[i].other == ItemId(0));
    CHECK(terms[i].weight == c.beta);
  }
}

TEST_CASE("total loss is additive over behaviors") {
  auto inst = fixtures::random_instance(13, 15, 10, 30);
  const auto batch = fixtures::one_negative_each(inst, 3);
  Rng rng(1);
  auto params = ModelParams<double>::xavier(15, 10, 4, 1, true, rng);
  Hyperparams hp;
  hp.dim = 4;
  hp.layers = 1;
  const auto mc = ModelConfig::from(hp);
  const auto emb = forward(inst.graphs, params, mc);
  EmbeddingScores<double> scores{emb, inst.social, mc};
  LossConfig c = LossConfig::from(hp);
  c.l2 = 0.0;

  const auto whole = total_loss(inst.log, std::span<const NegativeSample>(batch), scores, inst.social,
                                params, c);
  LossBreakdown parts;
  for (const auto& entry : batch) {
    parts += total_loss(inst.log, std::span<const NegativeSample>(&entry, 1), scores, inst.social,
                        params, c);
  }
  CHECK(parts.loss_pos == doctest::Approx(whole.loss_pos).epsilon(1e-12));
  CHECK(parts.loss_neg == doctest::Approx(whole.loss_neg).epsilon(1e-12));
  CHECK(whole.total == doctest::Approx(whole.loss_pos + whole.loss_neg));
  CHECK(whole.loss_pos > 0.0);
  CHECK(whole.loss_neg > 0.0);
}

TEST_CASE("regularizers") {
  auto p = ModelParams<double>::zeros(3, 2, 2, 1, false);
  p.users << 1, 0, 0, 1, 2, 2;
  p.items << 1, 1, 0, 0;
  CHECK(l2_penalty(p, 0.5) == doctest::Approx(0.5 * (1 + 1 + 8 + 2)));
  CHECK(l2_penalty(p, 0.0) == 0.0);

  const SocialGraph s(3, std::vector<std::pair<UserId, UserId>>{{UserId(0), UserId(1)}});
  // users 0 and 1 are each other's only friend: |u0-u1|^2 twice; user 2 has none
  CHECK(social_penalty(p.users, s, 1.0) == doctest::Approx(4.0));

  LossConfig c;
  c.l2 = 0.5;
  c.social_reg = 1.0;
  auto g = ModelParams<double>::zeros(3, 2, 2, 1, false);
  add_regularizer_gradients(p, s, c, g);
  // finite differences on every raw entry
  const double h = 1e-6;
  for (Index r = 0; r < 3; ++r) {
    for (Index k = 0; k < 2; ++k) {
      auto up = p, dn = p;
      up.users(r, k) += h;
      dn.users(r, k) -= h;
      const auto f = [&](const ModelParams<double>& q) {
        return l2_penalty(q, c.l2) + social_penalty(q.users, s, c.social_reg);
      };
      CHECK(g.users(r, k) == doctest::Approx((f(up) - f(dn)) / (2 * h)).epsilon(1e-6));
    }
  }
  CHECK(g.items(0, 0) == doctest::Approx(1.0));
}
