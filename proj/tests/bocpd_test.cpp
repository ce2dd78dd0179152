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
#include <vector>

#include "doctest.h"
#include "flowalert/bocpd.hpp"
#include "flowalert/error.hpp"
#include "oracles.hpp"

using flowalert::Error;
using flowalert::ErrorCode;
using flowalert::bocpd::BocpdConfig;
using flowalert::bocpd::Detector;

namespace {

BocpdConfig config(std::size_t dim, std::size_t L = 500) {
  BocpdConfig c;
  c.dim = dim;
  c.max_run_length = L;
  return c;
}

double normal_pdf(double x, double m, double v) { return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2 * M_PI * v); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

}  // namespace

TEST_CASE("fresh detector holds one hypothesis with the prior") {
  Detector det(config(3));
  CHECK(det.hypothesis_count() == 1);
  CHECK(det.weights()[0] == doctest::Approx(1.0));
  const auto mean = det.run_mean(0);
  REQUIRE(mean.size() == 3);
  for (const double m : mean) CHECK(m == 0.5);
  CHECK(det.predictive_variance(0, 2) == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("config validation") {
  auto bad = config(2);
  bad.hazard = 0.0;
  CHECK(code_of([&] { Detector d(bad); }) == ErrorCode::kInvalidArgument);
  bad = config(2);
  bad.max_run_length = 0;
  CHECK(code_of([&] { Detector d(bad); }) == ErrorCode::kInvalidArgument);
  bad = config(2);
  bad.variance_floor = 0.0;
  CHECK(code_of([&] { Detector d(bad); }) == ErrorCode::kInvalidArgument);
  bad = config(2);
  bad.prior_var = {0.1};
  CHECK(code_of([&] { Detector d(bad); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("L = 1 saturates after the first growth, traced by hand") {
  Detector det(config(1, 1));
  const double H = 1e-3;
  const double v0 = 1.0 / 12.0;
  const double x1 = 0.2;
  const double x2 = 0.9;
  const std::vector<double> a{x1};
  const std::vector<double> b{x2};

  CHECK(det.update(a) == doctest::Approx(H).epsilon(1e-12));
  CHECK(det.hypothesis_count() == 2);

  // Both hypotheses now hold the single observation x1 and use the prior
  // variance; their weights sum to one once folded into the last bucket.
  const double p_new = H * normal_pdf(x2, 0.5, v0);
  const double p_grow = (1 - H) * normal_pdf(x2, x1, v0);
  CHECK(det.update(b) == doctest::Approx(p_new / (p_new + p_grow)).epsilon(1e-12));
  CHECK(det.hypothesis_count() == 2);
  CHECK(det.run_count(1) == 2.0);
}

TEST_CASE("weights stay normalised and bounded") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Detector det(config(4, 40));
  for (int t = 0; t < 300; ++t) {
    std::vector<double> x(4);
    for (auto& v : x) v = t < 150 ? 0.2 + 0.05 * u(rng) : 0.7 + 0.1 * u(rng);
    const double s = det.update(x);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    const auto w = det.weights();
    double sum = 0.0;
    for (const double v : w) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(det.hypothesis_count() <= 41);
    CHECK(det.anomaly_mass(0) == s);
    CHECK(det.anomaly_mass(det.hypothesis_count()) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("matches the untruncated oracle while the run fits") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + trial % 4;
    const std::size_t T = 20 + static_cast<std::size_t>(u(rng) * 60);
    Detector det(config(d, T + trial % 3));
    oracle::ExactBocpd ref(1e-3, 1e-4, std::vector<double>(d, 0.5), std::vector<double>(d, 1.0 / 12.0));
    double level = u(rng);
    for (std::size_t t = 0; t < T; ++t) {
      if (u(rng) < 0.05) level = u(rng);
      std::vector<double> x(d);
      for (auto& v : x) v = level + 0.03 * (u(rng) - 0.5);
      const double got = det.update(x);
      const double want = ref.update(x);
      REQUIRE(std::fabs(got - want) <= 1e-9);
      CHECK(std::fabs(det.anomaly_mass(5) - ref.mass_upto(5)) <= 1e-9);
    }
  }
}

TEST_CASE("constant stream: score falls monotonically below the hazard") {
  Detector det(config(1));
  oracle::ExactBocpd ref(1e-3, 1e-4, {0.5}, {1.0 / 12.0});
  const std::vector<double> x{0.5};
  std::vector<double> s;
  for (int t = 0; t < 50; ++t) {
    s.push_back(det.update(x));
    CHECK(std::fabs(s.back() - ref.update(x)) <= 1e-12);
  }
  for (std::size_t t = 2; t < s.size(); ++t) CHECK(s[t] <= s[t - 1] * (1.0 + 1e-12));
  // Long runs predict with the floored variance, the new run with the prior:
  // the score settles near H * p_prior(x) / p_floor(x).
  const double ratio = std::sqrt(1e-4 * 12.0);
  const double limit = 1e-3 * ratio / (1e-3 * ratio + (1 - 1e-3));
  CHECK(s.back() < 1e-3);
  CHECK(s.back() == doctest::Approx(limit).epsilon(0.05));
}

TEST_CASE("no variance below the floor reaches a density") {
  Detector det(config(3, 50));
  const std::vector<double> x{0.1, 0.1, 0.1};
  for (int t = 0; t < 200; ++t) det.update(x);
  CHECK(det.min_variance_used() >= 1e-4);
  for (std::size_t r = 0; r < det.hypothesis_count(); ++r) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(det.predictive_variance(r, j) >= 1e-4);
  }
}

TEST_CASE("bad input is rejected") {
  Detector det(config(2));
  const std::vector<double> short_x{0.1};
  const std::vector<double> nan_x{0.1, std::nan("")};
  CHECK(code_of([&] { det.update(short_x); }) == ErrorCode::kDimension);
  CHECK(code_of([&] { det.update(nan_x); }) == ErrorCode::kNumeric);
  CHECK(det.flows_processed() == 0);
}

TEST_CASE("warm-up flag covers the first W0 flows") {
  auto c = config(1);
  c.warmup = 3;
  Detector det(c);
  const std::vector<double> x{0.4};
  for (int t = 0; t < 5; ++t) {
    det.update(x);
    CHECK(det.last_in_warmup() == (t < 3));
  }
}

TEST_CASE("posterior underflow resets to the prior") {
  auto c = config(1);
  c.prior_var = {1e-4};
  Detector det(c);
  const std::vector<double> calm{0.5};
  for (int t = 0; t < 10; ++t) det.update(calm);
  const std::vector<double> wild{1e4};
  const double s = det.update(wild);
  CHECK(det.underflow_resets() == 1);
  CHECK(s == doctest::Approx(1e-3));
  CHECK(det.hypothesis_count() == 2);
}

TEST_CASE("identical streams give bit-identical scores") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.4, 0.1);
  std::vector<std::vector<double>> xs(500, std::vector<double>(5));
  for (auto& x : xs) {
    for (auto& v : x) v = n(rng);
  }
  Detector a(config(5, 100));
  Detector b(config(5, 100));
  for (const auto& x : xs) CHECK(a.update(x) == b.update(x));
}
