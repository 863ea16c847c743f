// Copyright 2026 The adas-sim Authors
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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "adas_sim/mitigation.hpp"
#include "adas_sim/report.hpp"
#include "doctest.h"

using namespace adas_sim;

TEST_CASE("CUSUM recursion examples")
{
  CusumState s;
  s.b = 0.05;
  s.tau = 0.5;
  CHECK(cusum_step(s, 0.03, 0.0).state.S == 0.0);

  s.S = 0.5;
  const CusumResult r = cusum_step(s, 0.3, 0.0);
  CHECK(r.state.S == doctest::Approx(0.75));
  CHECK(r.entered);
  CHECK(r.y == 0.3);

  CusumState rec;
  rec.recovery_mode = true;
  rec.S = 0.9;
  const CusumResult e = cusum_step(rec, 1.02, 1.0);
  CHECK(e.exited);
  CHECK_FALSE(e.state.recovery_mode);
  CHECK(e.state.S == 0.0);
  CHECK(e.y == 1.02);

  CHECK_THROWS_AS(cusum_step(s, std::nan(""), 0.0), HarnessFault);
}

TEST_CASE("window fills after 20 frames")
{
  PredictorWindow w;
  for (std::size_t k = 0; k < kWindowLength; ++k) {
    CHECK_FALSE(w.ready());
    w.push_state({});
    w.push_output({});
  }
  CHECK(w.ready());
  w.clear();
  CHECK_FALSE(w.ready());
}

namespace
{

/// Slowly varying state features with outputs y = (min(0.5 v - 4, 1.5 - 0.01 rd), 0.1 curvature).
Trace synthetic_trace(std::uint64_t seed, std::size_t n)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Trace t;
  const double phase = 6.0 * u(rng);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = 10.0 + 3.0 * std::sin(0.02 * static_cast<double>(k) + phase) + 0.1 * u(rng);
    const double rd = 60.0 + 30.0 * std::sin(0.013 * static_cast<double>(k)) + u(rng);
    TraceSample s;
    s.x = {v, rd, 0.0, 1.0, 0.95, 0.95, 0.0, 0.002 * (u(rng) - 0.5)};
    s.y_op = {std::min(0.5 * v - 4.0, 1.5 - 0.01 * rd), 0.1 * s.x[7]};
    s.y_exec = s.y_op;
    t.push_back(s);
  }
  return t;
}

TrainOptions small_options()
{
  TrainOptions o;
  o.min_traces = 1;
  o.stride = 3;
  return o;
}

}  // namespace

TEST_CASE("constant cruise trace is fit with near-zero error")
{
  Trace t(600);
  for (auto & s : t) s.x = {22.352, 150.0, 0.0, 0.0, 0.95, 0.95, 0.0, 0.0};
  const PiecewiseLinearPredictor m = predictor_train({t}, small_options());
  CHECK(m.heldout_rmse[0] < 0.1);
  PredictorWindow w;
  for (std::size_t k = 0; k < kWindowLength; ++k) {
    w.push_state(t[k].x);
    w.push_output(t[k].y_exec);
  }
  CHECK(std::abs(m.predict(w)[0]) < 1e-9);
}

TEST_CASE("training preconditions")
{
  CHECK_THROWS_AS(predictor_train({}, small_options()), ConfigError);
  TrainOptions o = small_options();
  o.min_traces = 3;
  CHECK_THROWS_AS(predictor_train({synthetic_trace(1, 200)}, o), ConfigError);
  CHECK_THROWS_AS(predictor_train({Trace(5)}, small_options()), ConfigError);
}

TEST_CASE("min of affine pieces captures a kinked law")
{
  std::vector<Trace> traces;
  for (std::uint64_t s = 1; s <= 6; ++s) traces.push_back(synthetic_trace(s, 800));
  TrainOptions one = small_options();
  one.pieces = {1, 1};
  TrainOptions two = small_options();
  two.pieces = {2, 1};
  const auto m1 = predictor_train(traces, one);
  const auto m2 = predictor_train(traces, two);
  CHECK(m2.heldout_rmse[0] < 0.5 * m1.heldout_rmse[0]);
  CHECK(m2.heldout_rmse[0] < 0.05);
  CHECK(m2.heldout_rmse[1] < 1e-4);
  CHECK(m2.b0[0] > 0.0);
  CHECK(m2.tau[0] == doctest::Approx(10.0 * m2.b0[0]));
}

TEST_CASE("duplicated traces give the same model")
{
  const Trace t = synthetic_trace(7, 500);
  const auto once = predictor_train({t}, small_options());
  const auto many = predictor_train(std::vector<Trace>(10, t), small_options());
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "adas_sim_once.txt").string();
  const std::string b = (dir / "adas_sim_many.txt").string();
  once.save(a);
  many.save(b);
  CHECK(read_text_file(a) == read_text_file(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("model file round trip and errors")
{
  std::vector<Trace> traces;
  for (std::uint64_t s = 1; s <= 5; ++s) traces.push_back(synthetic_trace(s, 400));
  TrainOptions o = small_options();
  o.pieces = {2, 1};
  const auto m = predictor_train(traces, o);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "adas_sim_model.txt").string();
  m.save(path);
  const auto back = PiecewiseLinearPredictor::load(path);
  PredictorWindow w;
  for (std::size_t k = 0; k < kWindowLength; ++k) {
    w.push_state(traces[0][k].x);
    w.push_output(traces[0][k].y_exec);
  }
  CHECK(back.predict(w) == m.predict(w));
  CHECK(back.b0 == m.b0);
  CHECK(back.tau == m.tau);

  std::ofstream(path) << "adas-sim-predictor 99\n";
  CHECK_THROWS_AS(PiecewiseLinearPredictor::load(path), ConfigError);
  std::ofstream(path) << "something else\n";
  CHECK_THROWS_AS(PiecewiseLinearPredictor::load(path), ConfigError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(PiecewiseLinearPredictor::load(path), IoError);
}
