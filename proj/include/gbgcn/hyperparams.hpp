#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gbgcn {

enum class ModelKind { gbgcn, gbmf, mf };
enum class Activation { leaky_relu, identity, tanh };
/// How friend and participant scores inside the loss are evaluated.
enum class ScoreSemantics { composite, role };
/// Which interactions the MF baseline is trained on.
enum class MfRoles { initiator, both };

struct Hyperparams {
  ModelKind model = ModelKind::gbgcn;

  int dim = 32;
  int layers = 2;
  double alpha = 0.6;
  double beta = 0.05;
  Activation activation = Activation::leaky_relu;
  double leaky_slope = 0.2;
  ScoreSemantics score_semantics = ScoreSemantics::composite;
  bool renormalize_alpha = false;
  bool exclude_failed_participants = false;
  MfRoles mf_roles = MfRoles::both;

  int neg_ratio = 1;
  double l2 = 1e-4;
  double social_reg = 0.0;

  int batch_size = 4096;
  int pretrain_epochs = 50;
  int pretrain_patience = 0;  // 0 disables early stopping
  double adam_lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 500;
  double sgd_lr = 1.0;

  std::vector<int> eval_k{3, 5, 10, 20};
  int eval_negatives = 999;
  int threads = 1;
  std::uint64_t seed = 2021;

  /// Every violated constraint, one message each.
  std::vector<std::string> validate() const;

  std::map<std::string, std::string> to_map() const;
};

using ConfigMap = std::map<std::string, std::string>;

/// Applies `values` over `base`. Unknown keys and unparsable values are
/// collected into `errors` rather than thrown, so all problems surface at once.
Hyperparams apply_config(Hyperparams base, const ConfigMap& values,
                         std::vector<std::string>& errors);

/// Flat `key = value` file; `#` starts a comment.
ConfigMap read_config_file(const std::filesystem::path& path);

std::string to_string(ModelKind k);
std::string to_string(Activation a);

}  // namespace gbgcn
