// Copyright 2026 The FleetWatt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "fleetwatt/error.hpp"

namespace fleetwatt::queueing {

/// Erlang-C probability that an arrival waits, for c servers at offered load
/// a = lambda / mu (requires a < c). Uses the Erlang-B recursion.
inline double erlang_c(std::int64_t c, double a) {
  if (c < 1 || !(a >= 0.0)) throw DomainError("erlang_c: need c >= 1 and a >= 0");
  if (a >= static_cast<double>(c)) return 1.0;
  double b = 1.0;
  for (std::int64_t k = 1; k <= c; ++k) b = a * b / (static_cast<double>(k) + a * b);
  const double rho = a / static_cast<double>(c);
  return b / (1.0 - rho + rho * b);
}

/// Waiting-time percentile of M/M/c: P(Wq > t) = C * exp(-(c*mu - lambda) t).
inline double wait_percentile(double erlang_c_prob, std::int64_t c, double lambda, double mu,
                              double percentile) {
  const double tail = 1.0 - percentile;
  if (erlang_c_prob <= tail) return 0.0;
  const double drain = static_cast<double>(c) * mu - lambda;
  if (!(drain > 0.0)) return std::numeric_limits<double>::infinity();
  return std::log(erlang_c_prob / tail) / drain;
}

/// Smallest c with lambda / (c mu) < 1 and the `percentile` queue wait at or
/// below `bound_s`. Returns nullopt when no c up to max_servers qualifies.
inline std::optional<std::int64_t> min_servers(double lambda, double mu, double percentile,
                                               double bound_s, std::int64_t max_servers) {
  if (!(lambda >= 0.0) || !(mu > 0.0) || !(percentile > 0.0 && percentile < 1.0) ||
      !(bound_s > 0.0)) {
    throw DomainError("min_servers: invalid queue parameters");
  }
  if (lambda == 0.0) return 1;
  const double a = lambda / mu;
  // Erlang-B at c0 - 1 via recursion, then step c upwards incrementally.
  std::int64_t c = static_cast<std::int64_t>(std::floor(a)) + 1;
  if (c > max_servers) return std::nullopt;
  double b = 1.0;
  for (std::int64_t k = 1; k <= c; ++k) b = a * b / (static_cast<double>(k) + a * b);
  for (; c <= max_servers; ++c) {
    if (c > static_cast<std::int64_t>(std::floor(a)) + 1) {
      b = a * b / (static_cast<double>(c) + a * b);
    }
    const double rho = a / static_cast<double>(c);
    const double pc = b / (1.0 - rho + rho * b);
    if (wait_percentile(pc, c, lambda, mu, percentile) <= bound_s) return c;
  }
  return std::nullopt;
}

}  // namespace fleetwatt::queueing
