/*
Copyright 2026 The sylkit Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Acceptance gate: one PASS/FAIL line per criterion; nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <fmt/core.h>

#include "criteria.hpp"

int main() {
  const std::vector<std::pair<std::string, std::function<criteria::Outcome()>>> checks = {
      {"synthetic corpus end-to-end", [] { return criteria::synthetic_end_to_end(); }},
      {"matching oracle", [] { return criteria::matching_oracle(); }},
      {"mincut oracle", [] { return criteria::mincut_oracle(); }},
      {"peakdetect state machine", [] { return criteria::peakdetect_oracle(); }},
      {"greedy cosine change points", [] { return criteria::greedy_recovery(); }},
      {"envelope analytics", [] { return criteria::envelope_analytics(); }},
      {"evaluation boundary conditions", [] { return criteria::eval_boundaries(); }},
      {"round-trips", [] { return criteria::round_trips(); }},
      {"throughput trend", [] { return criteria::throughput_trend(); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    criteria::Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double dt = criteria::seconds_since(t0);
    fmt::print("{} {} ({:.2f} s): {}\n", o.pass ? "PASS" : "FAIL", name, dt, o.detail);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  fmt::print("{} of {} criteria passed\n", checks.size() - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
