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


// Prints tok/W against context window for a profile computed from specs.

#include <cstdio>

#include "fleetwatt/fleetwatt.hpp"

int main() {
  using namespace fleetwatt;
  const auto p = build_computed_profile(catalog::h200_sxm(), catalog::llama31_70b());
  std::printf("%s  W=%.2f ms  H0=%.4f ms\n", p.name.c_str(), p.w_ms, p.h0_ms);
  for (const auto& op : context_sweep(p, {2048, 4096, 8192, 16384, 32768, 65536, 131072})) {
    std::printf("%7lld  n_max %5lld  %7.1f W  %7.2f tok/W\n", static_cast<long long>(op.ctx_window),
                static_cast<long long>(op.n_max), op.power, op.tok_per_watt);
  }
}
