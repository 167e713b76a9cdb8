#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace gbgcn {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Dense, zero-based identifier. The tag keeps users and items from mixing.
template <typename Tag>
struct DenseId {
  std::int32_t value = 0;

  constexpr DenseId() = default;
  constexpr explicit DenseId(std::int32_t v) : value(v) {}
  constexpr explicit DenseId(Index v) requires(!std::is_same_v<Index, std::int32_t>)
      : value(static_cast<std::int32_t>(v)) {}

  constexpr Index index() const { return value; }
  constexpr auto operator<=>(const DenseId&) const = default;
};

struct UserTag {};
struct ItemTag {};
using UserId = DenseId<UserTag>;
using ItemId = DenseId<ItemTag>;

enum class View : int { initiator = 0, participant = 1 };
constexpr int kViews = 2;

constexpr int view_index(View v) { return static_cast<int>(v); }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gbgcn

template <typename Tag>
struct std::hash<gbgcn::DenseId<Tag>> {
  std::size_t operator()(const gbgcn::DenseId<Tag>& id) const noexcept {
    return std::hash<std::int32_t>{}(id.value);
  }
};
