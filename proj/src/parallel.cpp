#include "gbgcn/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace gbgcn {

int default_threads() {
  const char* env = std::getenv("GBGCN_THREADS");
  if (env == nullptr) return 1;
  int n = 0;
  const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), n);
  return (ec == std::errc{} && n >= 1) ? n : 1;
}

}  // namespace gbgcn
