#pragma once

#include "gbgcn/model.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace gbgcn {

namespace detail {

template <typename Scalar>
std::vector<std::span<Scalar>> tensors(ModelParams<Scalar>& p) {
  std::vector<std::span<Scalar>> out;
  p.for_each_tensor([&out](std::span<Scalar> t) { out.push_back(t); });
  return out;
}

template <typename Scalar>
std::vector<std::span<const Scalar>> tensors(const ModelParams<Scalar>& p) {
  std::vector<std::span<const Scalar>> out;
  p.for_each_tensor([&out](std::span<const Scalar> t) { out.push_back(t); });
  return out;
}

}  // namespace detail

/// Plain, momentum-free gradient descent: p -= lr * g.
template <typename Scalar>
class Sgd {
 public:
  explicit Sgd(double lr) : lr_(lr) {}

  void step(ModelParams<Scalar>& params, const ModelParams<Scalar>& grad) const {
    if (!params.same_shape(grad)) throw Error("gradient does not match parameter shapes");
    const auto lr = static_cast<Scalar>(lr_);
    auto p = detail::tensors(params);
    const auto g = detail::tensors(grad);
    for (std::size_t k = 0; k < p.size(); ++k) {
      for (std::size_t i = 0; i < p[k].size(); ++i) p[k][i] -= lr * g[k][i];
    }
  }

 private:
  double lr_;
};

template <typename Scalar>
struct AdamState {
  ModelParams<Scalar> m;
  ModelParams<Scalar> v;
  std::int64_t step = 0;

  bool operator==(const AdamState&) const = default;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename Scalar>
class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}

  void step(ModelParams<Scalar>& params, const ModelParams<Scalar>& grad) {
    if (!params.same_shape(grad)) throw Error("gradient does not match parameter shapes");
    if (!state_.m.same_shape(params)) {
      state_.m = ModelParams<Scalar>::zeros(params.user_count(), params.item_count(), params.dim(),
                                            params.layers(), params.has_transforms());
      state_.v = state_.m;
      state_.step = 0;
    }
    ++state_.step;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(state_.step));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(state_.step));
    const auto b1 = static_cast<Scalar>(config_.beta1);
    const auto b2 = static_cast<Scalar>(config_.beta2);
    const auto rate = static_cast<Scalar>(config_.lr * std::sqrt(c2) / c1);
    const auto eps = static_cast<Scalar>(config_.eps * std::sqrt(c2));

    auto p = detail::tensors(params);
    const auto g = detail::tensors(grad);
    auto m = detail::tensors(state_.m);
    auto v = detail::tensors(state_.v);
    for (std::size_t k = 0; k < p.size(); ++k) {
      for (std::size_t i = 0; i < p[k].size(); ++i) {
        const Scalar gi = g[k][i];
        m[k][i] = b1 * m[k][i] + (1 - b1) * gi;
        v[k][i] = b2 * v[k][i] + (1 - b2) * gi * gi;
        p[k][i] -= rate * m[k][i] / (std::sqrt(v[k][i]) + eps);
      }
    }
  }

  const AdamState<Scalar>& state() const { return state_; }
  void set_state(AdamState<Scalar> s) { state_ = std::move(s); }

 private:
  AdamConfig config_;
  AdamState<Scalar> state_;
};

}  // namespace gbgcn
