#pragma once

// Binary layout, all integers and floats little-endian:
//   "GBGC" | u32 version | u32 model tag | u64 users | u64 items | u32 dim | u32 layers
//   | u64 n + n bytes of `key=value\n` hyperparameters
//   | u32 tensor count | per tensor: u64 rows, u64 cols, rows*cols f32 row-major
//   | u8 has_adam [ | i64 step | first-moment tensors | second-moment tensors ]

#include "gbgcn/hyperparams.hpp"
#include "gbgcn/model.hpp"
#include "gbgcn/optim.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace gbgcn {

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  ModelKind model = ModelKind::gbgcn;
  Index users = 0;
  Index items = 0;
  int dim = 0;
  int layers = 0;
  ConfigMap hyperparams;
  ModelParams<float> params;
  std::optional<AdamState<float>> adam;

  /// Rebuilds the hyperparameters from the snapshot.
  Hyperparams settings() const;

  bool operator==(const Checkpoint&) const = default;
};

Checkpoint make_checkpoint(const Hyperparams& hp, ModelParams<float> params,
                           std::optional<AdamState<float>> adam = std::nullopt);

std::string serialize(const Checkpoint& ckpt);
Checkpoint deserialize(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws when the checkpoint does not fit the given dataset dimensions.
void check_dimensions(const Checkpoint& ckpt, Index users, Index items);

/// Throws when model kind, dimension or depth differ from `expected`.
void check_settings(const Checkpoint& ckpt, const Hyperparams& expected);

}  // namespace gbgcn
