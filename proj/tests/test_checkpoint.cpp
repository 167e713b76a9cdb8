#include "doctest.h"

#include "gbgcn/checkpoint.hpp"

#include <cstring>
#include <filesystem>

using namespace gbgcn;

namespace {

Checkpoint sample(ModelKind kind, bool with_adam) {
  Hyperparams hp;
  hp.model = kind;
  hp.dim = 3;
  hp.layers = 1;
  hp.alpha = 0.25;
  Rng rng(4);
  auto p = ModelParams<float>::xavier(5, 4, 3, 1, kind == ModelKind::gbgcn, rng);
  std::optional<AdamState<float>> adam;
  if (with_adam) {
    AdamState<float> s{ModelParams<float>::zeros(5, 4, 3, 1, kind == ModelKind::gbgcn),
                       ModelParams<float>::zeros(5, 4, 3, 1, kind == ModelKind::gbgcn), 17};
    s.m.users(1, 2) = 0.5f;
    s.v.items(3, 0) = 2.0f;
    adam = s;
  }
  return make_checkpoint(hp, p, adam);
}

}  // namespace

TEST_CASE("round trip is exact and re-serialization byte-identical") {
  for (auto kind : {ModelKind::gbgcn, ModelKind::gbmf, ModelKind::mf}) {
    for (bool adam : {false, true}) {
      const auto c = sample(kind, adam);
      const auto bytes = serialize(c);
      const auto back = deserialize(bytes);
      CHECK(back == c);
      CHECK(serialize(back) == bytes);
      CHECK(back.settings().alpha == 0.25);
      CHECK(back.adam.has_value() == adam);
    }
  }
}

TEST_CASE("header layout") {
  const auto bytes = serialize(sample(ModelKind::gbgcn, false));
  CHECK(bytes.substr(0, 4) == "GBGC");
  std::uint32_t version = 0;
  std::memcpy(&version, bytes.data() + 4, 4);
  CHECK(version == Checkpoint::kVersion);
}

TEST_CASE("corrupt inputs are rejected") {
  const auto good = serialize(sample(ModelKind::gbgcn, true));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_WITH_AS(deserialize(bad_magic), doctest::Contains("magic"), Error);

  auto bad_version = good;
  bad_version[4] = 9;
  CHECK_THROWS_WITH_AS(deserialize(bad_version), doctest::Contains("version"), Error);

  CHECK_THROWS_WITH_AS(deserialize(good.substr(0, good.size() - 3)), doctest::Contains("truncated"),
                       Error);
  CHECK_THROWS_AS(deserialize(good.substr(0, 10)), Error);
  CHECK_THROWS_WITH_AS(deserialize(good + "x"), doctest::Contains("trailing"), Error);
  CHECK_THROWS_AS(deserialize(""), Error);
}

TEST_CASE("dimension and settings checks") {
  const auto c = sample(ModelKind::gbgcn, false);
  CHECK_NOTHROW(check_dimensions(c, 5, 4));
  CHECK_THROWS_AS(check_dimensions(c, 6, 4), Error);
  CHECK_THROWS_AS(check_dimensions(c, 5, 3), Error);

  Hyperparams hp = c.settings();
  CHECK_NOTHROW(check_settings(c, hp));
  hp.dim = 4;
  CHECK_THROWS_AS(check_settings(c, hp), Error);
  hp = c.settings();
  hp.model = ModelKind::mf;
  CHECK_THROWS_AS(check_settings(c, hp), Error);
}

TEST_CASE("file save and load") {
  const auto path = std::filesystem::temp_directory_path() / "gbgcn_test.ckpt";
  const auto c = sample(ModelKind::mf, true);
  save_checkpoint(path, c);
  CHECK(load_checkpoint(path) == c);
  std::filesystem::remove(path);
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("gbgcn_test.ckpt"), Error);
}
