#pragma once

#include <cstddef>
#include <string>

#include "trajclust/error.hpp"

namespace trajclust::detail {

inline void check_cluster_count(std::size_t k, std::size_t n, const char* algorithm) {
  if (k < 2 || k > n) {
    throw ConfigError(std::string(algorithm) + ": k=" + std::to_string(k) +
                      " must lie in [2, n] with n=" + std::to_string(n));
  }
}

}  // namespace trajclust::detail
