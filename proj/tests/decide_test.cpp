// Copyright 2026 The flowalert Authors
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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "flowalert/decide.hpp"
#include "flowalert/error.hpp"
#include "oracles.hpp"

using namespace flowalert::decide;
using flowalert::Error;
using flowalert::ErrorCode;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

TEST_CASE("cost threshold table") {
  CHECK(round3(elkan_threshold(CostSpec::from_ratio(1))) == 0.5);
  CHECK(round3(elkan_threshold(CostSpec::from_ratio(5))) == 0.167);
  CHECK(round3(elkan_threshold(CostSpec::from_ratio(10))) == 0.091);
  CHECK(round3(elkan_threshold(CostSpec::from_ratio(25))) == 0.038);
  CHECK(round3(elkan_threshold(CostSpec::from_ratio(50))) == 0.020);
  CHECK(elkan_threshold({2.0, 6.0}) == 0.25);
  CHECK(code_of([] { elkan_threshold({0.0, 1.0}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { elkan_threshold({1.0, -1.0}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("overshoot bound") {
  CHECK(overshoot_bound(1) == 1.0);
  CHECK(std::fabs(overshoot_bound(12404) - 1.61e-4) <= 1e-6);
  CHECK(std::fabs(overshoot_bound(187188) - 1.07e-5) <= 1e-7);
}

TEST_CASE("generous budget gives tau zero") {
  const std::vector<double> neg{0.2, 0.4, 0.9};
  const auto r = crc_threshold(neg, 1.0);
  CHECK(r.feasible);
  CHECK(r.tau == 0.0);
}

TEST_CASE("small n0 cannot meet a tight budget") {
  const std::vector<double> neg(10, 0.9);
  const auto r = crc_threshold(neg, 0.01);
  CHECK_FALSE(r.feasible);
  const auto t = compute_thresholds(CostSpec{}, neg, 0.01);
  CHECK_FALSE(t.tau_crc.has_value());
  CHECK(t.to_json().find("\"tau_crc\": null") != std::string::npos);
}

TEST_CASE("grid example leaves four negatives at or above tau") {
  std::vector<double> neg;
  for (int i = 0; i < 100; ++i) neg.push_back(0.005 + 0.01 * i);
  const auto r = crc_threshold(neg, 0.05);
  REQUIRE(r.feasible);
  CHECK(r.tau == neg[96]);
  CHECK(r.negatives_at_or_above == 4);
  const auto ref = oracle::crc_scan(neg, 0.05);
  CHECK(ref.feasible);
  CHECK(ref.tau == r.tau);
}

TEST_CASE("matches an exhaustive scan") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n0 = 1 + static_cast<std::size_t>(u(rng) * 500);
    std::vector<double> neg(n0);
    const bool ties = trial % 3 == 0;
    for (auto& v : neg) v = ties ? std::round(u(rng) * 10) / 10 : u(rng);
    if (trial % 7 == 0) neg[0] = 1.0;
    const double alpha = std::pow(10.0, -3.0 * u(rng));
    const auto got = crc_threshold(neg, alpha);
    const auto want = oracle::crc_scan(neg, alpha);
    REQUIRE(got.feasible == want.feasible);
    if (got.feasible) CHECK(got.tau == want.tau);
  }
}

TEST_CASE("threshold is monotone in alpha") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> neg(400);
  for (auto& v : neg) v = u(rng) * u(rng);
  double prev = INFINITY;
  for (double a = 0.001; a < 0.5; a *= 1.3) {
    const auto r = crc_threshold(neg, a);
    const double tau = r.feasible ? r.tau : INFINITY;
    CHECK(tau <= prev);
    prev = tau;
  }
}

TEST_CASE("infeasible whenever alpha is below 1/(n0+1)") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n0 = 1 + static_cast<std::size_t>(u(rng) * 300);
    std::vector<double> neg(n0);
    for (auto& v : neg) v = u(rng);
    const double alpha = (1.0 / (static_cast<double>(n0) + 1.0)) * (0.01 + 0.98 * u(rng));
    CHECK_FALSE(crc_threshold(neg, alpha).feasible);
  }
}

TEST_CASE("concentrated negatives trip the density check") {
  std::vector<double> neg(200);
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = 0.3 * static_cast<double>(i) / 199.0;
  const auto r = crc_threshold(neg, 0.005);
  REQUIRE(r.feasible);
  CHECK(r.tau > 0.3);
  const auto d = collapse_diagnostics(neg, 0.005, r);
  CHECK(d.density_collapse);
  CHECK(d.negatives_at_or_above == 0);
  CHECK_FALSE(d.overshoot_ok);

  const std::vector<double> tied(200, 0.3);
  const auto t = compute_thresholds(CostSpec{}, tied, 0.01);
  CHECK(t.feasible);
  CHECK(t.density_collapse);
  CHECK(*t.tau_crc > 0.3);
}

TEST_CASE("a spread-out set does not collapse") {
  std::vector<double> neg;
  for (int i = 0; i < 1000; ++i) neg.push_back(i / 999.0);
  const auto t = compute_thresholds(CostSpec{}, neg, 0.05);
  CHECK(t.feasible);
  CHECK_FALSE(t.density_collapse);
  CHECK(t.overshoot_ok);
  CHECK(t.n0 == 1000);
  CHECK(t.overshoot_bound == 2.0 / 1001.0);
}

TEST_CASE("crc preconditions") {
  CHECK(code_of([] { crc_threshold(std::vector<double>{}, 0.1); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { crc_threshold(std::vector<double>{0.5}, 0.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { crc_threshold(std::vector<double>{1.5}, 0.1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("tie conventions") {
  CHECK(classify(0.10, 0.091, TieRule::kStrict));
  CHECK_FALSE(classify(0.05, 0.091, TieRule::kStrict));
  CHECK_FALSE(classify(0.3, 0.3, TieRule::kStrict));
  CHECK(classify(0.3, 0.3, TieRule::kInclusive));
  const AlertRule never{0.0, TieRule::kInclusive, true};
  CHECK_FALSE(never.fires(1.0));
}

TEST_CASE("threshold report keys") {
  std::vector<double> neg;
  for (int i = 0; i < 500; ++i) neg.push_back(i / 500.0);
  const auto json = compute_thresholds(CostSpec::from_ratio(10), neg, 0.01).to_json();
  const char* keys[] = {"tau_star", "tau_crc", "alpha", "n0", "overshoot_bound", "feasible", "density_collapse"};
  std::size_t pos = 0;
  for (const char* k : keys) {
    const auto at = json.find(std::string("\"") + k + "\"");
    REQUIRE(at != std::string::npos);
    CHECK(at >= pos);
    pos = at;
  }
}
