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

#include "adas_sim/mitigation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace adas_sim
{

CusumResult cusum_step(const CusumState & state, double y_ml, double y_op)
{
  CusumResult r;
  r.state = state;
  r.delta = std::abs(y_ml - y_op);
  if (!std::isfinite(r.delta)) throw HarnessFault("cusum: non-finite delta");

  CusumState & s = r.state;
  s.S = std::max(0.0, s.S + r.delta - s.b);
  if (s.S > s.tau && !s.recovery_mode) {
    s.recovery_mode = true;
    r.entered = true;
  }
  if (s.recovery_mode) {
    r.y = y_ml;
    if (r.delta <= s.b) {
      s.recovery_mode = false;
      s.S = 0.0;
      r.exited = true;
    }
  } else {
    r.y = y_op;
  }
  return r;
}

StateVector state_features(const PerceptionFrame & f, double ego_speed, double rd_cap)
{
  const bool lead = f.lead_detected && std::isfinite(f.reported_rd) && f.reported_rd < rd_cap;
  return {ego_speed,
          lead ? f.reported_rd : rd_cap,
          lead ? f.reported_rs : 0.0,
          lead ? 1.0 : 0.0,
          f.lane_left,
          f.lane_right,
          f.lane_heading,
          f.reported_curvature};
}

void PredictorWindow::push_state(const StateVector & x)
{
  states_.push_back(x);
  if (states_.size() > kWindowLength) states_.pop_front();
}

void PredictorWindow::push_output(const OutputVector & y)
{
  outputs_.push_back(y);
  if (outputs_.size() > kWindowLength) outputs_.pop_front();
}

bool PredictorWindow::ready() const
{
  return states_.size() == kWindowLength && outputs_.size() == kWindowLength;
}

void PredictorWindow::clear()
{
  states_.clear();
  outputs_.clear();
}


std::size_t PiecewiseLinearPredictor::feature_count() const
{
  return kWindowLength * kStateFeatures + (use_output_history ? kWindowLength * kOutputChannels : 0);
}

std::vector<double> PiecewiseLinearPredictor::regressors(const PredictorWindow & window) const
{
  if (!window.ready()) throw HarnessFault("predictor: window not full");
  std::vector<double> r;
  r.reserve(feature_count());
  for (const auto & x : window.states()) {
    for (std::size_t i = 0; i < kStateFeatures; ++i) {
      r.push_back(i == 1 ? std::min(x[i], rd_cap) : x[i]);
    }
  }
  if (use_output_history) {
    for (const auto & y : window.outputs()) r.insert(r.end(), y.begin(), y.end());
  }
  return r;
}

OutputVector PiecewiseLinearPredictor::predict(const PredictorWindow & window) const
{
  const std::vector<double> r = regressors(window);
  OutputVector y{};
  for (std::size_t c = 0; c < kOutputChannels; ++c) {
    if (pieces[c].empty()) throw HarnessFault("predictor: untrained channel");
    double best = kInfinity;
    for (const auto & p : pieces[c]) {
      if (p.weights.size() != r.size()) throw HarnessFault("predictor: model/window size mismatch");
      double v = p.intercept;
      for (std::size_t i = 0; i < r.size(); ++i) v += r[i] * p.weights[i];
      best = std::min(best, v);
    }
    y[c] = std::clamp(best, y_min[c], y_max[c]);
  }
  return y;
}

namespace
{

constexpr const char * kModelMagic = "adas-sim-predictor";

template <typename Range>
void write_row(std::ostream & os, const char * key, const Range & values)
{
  os << key;
  for (double v : values) os << ' ' << v;
  os << '\n';
}

std::vector<double> read_row(std::istream & is, const std::string & key, std::size_t n)
{
  std::string got;
  if (!(is >> got) || got != key) throw ConfigError("model file: expected '" + key + "'");
  std::vector<double> v(n);
  for (auto & x : v) {
    if (!(is >> x)) throw ConfigError("model file: truncated '" + key + "' row");
  }
  return v;
}

OutputVector read_pair(std::istream & is, const std::string & key)
{
  const auto v = read_row(is, key, kOutputChannels);
  return {v[0], v[1]};
}

}  // namespace

void PiecewiseLinearPredictor::save(const std::string & path) const
{
  std::ofstream os(path);
  if (!os) throw IoError("cannot write model file: " + path);
  os.precision(std::numeric_limits<double>::max_digits10);
  os << kModelMagic << ' ' << kFormatVersion << '\n';
  os << "use_output_history " << (use_output_history ? 1 : 0) << '\n';
  os << "rd_cap " << rd_cap << '\n';
  os << "regressors " << feature_count() << '\n';
  os << "traces " << trained_traces << '\n';
  os << "samples " << trained_samples << '\n';
  write_row(os, "y_min", y_min);
  write_row(os, "y_max", y_max);
  write_row(os, "b0", b0);
  write_row(os, "tau", tau);
  write_row(os, "heldout_rmse", heldout_rmse);
  for (std::size_t c = 0; c < kOutputChannels; ++c) {
    os << "channel " << c << " pieces " << pieces[c].size() << '\n';
    for (const auto & p : pieces[c]) {
      os << "piece " << p.intercept;
      for (double w : p.weights) os << ' ' << w;
      os << '\n';
    }
  }
  os << "end\n";
  if (!os) throw IoError("failed writing model file: " + path);
}

PiecewiseLinearPredictor PiecewiseLinearPredictor::load(const std::string & path)
{
  std::ifstream is(path);
  if (!is) throw IoError("cannot read model file: " + path);
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != kModelMagic) {
    throw ConfigError("not a predictor model file: " + path);
  }
  if (version != kFormatVersion) {
    throw ConfigError("unsupported model format version " + std::to_string(version));
  }
  PiecewiseLinearPredictor m;
  std::string key;
  std::size_t n = 0;
  int history = 0;
  is >> key >> history;
  m.use_output_history = history != 0;
  is >> key >> m.rd_cap >> key >> n >> key >> m.trained_traces >> key >> m.trained_samples;
  if (!is || n != m.feature_count()) throw ConfigError("model file: bad header in " + path);
  m.y_min = read_pair(is, "y_min");
  m.y_max = read_pair(is, "y_max");
  m.b0 = read_pair(is, "b0");
  m.tau = read_pair(is, "tau");
  m.heldout_rmse = read_pair(is, "heldout_rmse");
  for (std::size_t c = 0; c < kOutputChannels; ++c) {
    std::size_t channel = 0;
    std::size_t count = 0;
    std::string k2;
    if (!(is >> key >> channel >> k2 >> count) || key != "channel" || channel != c || count == 0) {
      throw ConfigError("model file: bad channel header in " + path);
    }
    m.pieces[c].resize(count);
    for (auto & p : m.pieces[c]) {
      const auto row = read_row(is, "piece", n + 1);
      p.intercept = row[0];
      p.weights.assign(row.begin() + 1, row.end());
    }
  }
  if (!(is >> key) || key != "end") throw ConfigError("model file: missing end marker");
  return m;
}

namespace
{

bool trace_less(const Trace & a, const Trace & b)
{
  if (a.size() != b.size()) return a.size() < b.size();
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(TraceSample)) < 0;
}

bool trace_equal(const Trace & a, const Trace & b)
{
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(TraceSample)) == 0;
}

/// Calls fn(window, sample) for every full window of a trace whose newest
/// step index is a multiple of stride.
template <typename Fn>
void for_each_window(const Trace & trace, std::size_t stride, Fn && fn)
{
  PredictorWindow w;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    w.push_state(trace[k].x);
    if (w.ready() && k % stride == 0) fn(w, trace[k]);
    w.push_output(trace[k].y_exec);
  }
}

double percentile(std::vector<double> v, double p)
{
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct StdPiece
{
  double b{0.0};
  Eigen::VectorXd w;
};

/// Ridge fit with an unpenalized intercept on the selected rows.
StdPiece fit_piece(const Eigen::MatrixXd & z, const Eigen::VectorXd & y,
                   const std::vector<Eigen::Index> & rows, double ridge)
{
  const auto n = z.cols();
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd zs(m, n);
  Eigen::VectorXd ys(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    zs.row(i) = z.row(rows[static_cast<std::size_t>(i)]);
    ys[i] = y[rows[static_cast<std::size_t>(i)]];
  }
  const Eigen::RowVectorXd zmean = zs.colwise().mean();
  const double ymean = ys.mean();
  zs.rowwise() -= zmean;
  ys.array() -= ymean;
  Eigen::MatrixXd gram = (zs.transpose() * zs) / static_cast<double>(m);
  gram.diagonal().array() += ridge;
  StdPiece p;
  p.w = gram.ldlt().solve(zs.transpose() * ys / static_cast<double>(m));
  p.b = ymean - zmean.dot(p.w);
  return p;
}

/// Min-of-affine regression by alternating assignment and refit, from one
/// initial partition. Pieces left with too few rows are dropped.
std::vector<StdPiece> refine(const Eigen::MatrixXd & z, const Eigen::VectorXd & y,
                             std::vector<int> assign, int pieces, double ridge,
                             int max_iterations)
{
  const auto rows_total = z.rows();
  const auto min_rows = static_cast<std::size_t>(2 * z.cols());
  std::vector<StdPiece> fit;
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(pieces));
    for (Eigen::Index i = 0; i < rows_total; ++i) {
      groups[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])].push_back(i);
    }
    std::vector<StdPiece> next;
    for (const auto & g : groups) {
      if (g.size() >= min_rows) next.push_back(fit_piece(z, y, g, ridge));
    }
    if (next.empty()) break;
    fit = std::move(next);
    pieces = static_cast<int>(fit.size());

    Eigen::MatrixXd pred(rows_total, pieces);
    for (int k = 0; k < pieces; ++k) pred.col(k) = (z * fit[k].w).array() + fit[k].b;
    bool changed = false;
    for (Eigen::Index i = 0; i < rows_total; ++i) {
      Eigen::Index best = 0;
      pred.row(i).minCoeff(&best);
      int & a = assign[static_cast<std::size_t>(i)];
      if (a != static_cast<int>(best)) {
        a = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return fit;
}

double min_sse(const Eigen::MatrixXd & z, const Eigen::VectorXd & y,
               const std::vector<StdPiece> & fit)
{
  Eigen::VectorXd best = Eigen::VectorXd::Constant(z.rows(), kInfinity);
  for (const auto & p : fit) {
    best = best.cwiseMin(((z * p.w).array() + p.b).matrix());
  }
  return (best - y).squaredNorm();
}

/// Partition by rank of key into equal-count bands.
std::vector<int> rank_partition(const Eigen::VectorXd & key, int pieces)
{
  std::vector<Eigen::Index> order(static_cast<std::size_t>(key.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&key](Eigen::Index a, Eigen::Index b) { return key[a] < key[b]; });
  std::vector<int> assign(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    assign[static_cast<std::size_t>(order[r])] =
      static_cast<int>(r * static_cast<std::size_t>(pieces) / order.size());
  }
  return assign;
}

/// Tries a residual-rank seed and one seed per column in seed_cols, keeping
/// the lowest training error. Earlier seeds win ties.
std::vector<StdPiece> fit_channel(const Eigen::MatrixXd & z, const Eigen::VectorXd & y, int pieces,
                                  double ridge, int max_iterations,
                                  const std::vector<Eigen::Index> & seed_cols)
{
  std::vector<Eigen::Index> all(static_cast<std::size_t>(z.rows()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::vector<StdPiece> best{fit_piece(z, y, all, ridge)};
  if (pieces <= 1) return best;
  double best_sse = min_sse(z, y, best);

  std::vector<Eigen::VectorXd> keys;
  keys.push_back(y - ((z * best[0].w).array() + best[0].b).matrix());
  for (Eigen::Index c : seed_cols) keys.push_back(z.col(c));
  for (const auto & key : keys) {
    if (key.maxCoeff() - key.minCoeff() < 1e-12) continue;
    auto fit = refine(z, y, rank_partition(key, pieces), pieces, ridge, max_iterations);
    if (fit.empty()) continue;
    const double sse = min_sse(z, y, fit);
    if (sse < best_sse * (1.0 - 1e-9)) {
      best_sse = sse;
      best = std::move(fit);
    }
  }
  return best;
}

PiecewiseLinearPredictor fit(const std::vector<const Trace *> & traces, const TrainOptions & opt)
{
  PiecewiseLinearPredictor m;
  m.use_output_history = opt.use_output_history;
  const auto n = static_cast<Eigen::Index>(m.feature_count());

  std::size_t count = 0;
  for (const Trace * t : traces) {
    for_each_window(*t, opt.stride, [&](const PredictorWindow &, const TraceSample &) { ++count; });
  }
  if (count == 0) throw ConfigError("predictor_train: traces too short for a 20-frame window");

  Eigen::MatrixXd z(static_cast<Eigen::Index>(count), n);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(kOutputChannels));
  Eigen::Index row = 0;
  for (const Trace * t : traces) {
    for_each_window(*t, opt.stride, [&](const PredictorWindow & w, const TraceSample & s) {
      const std::vector<double> r = m.regressors(w);
      z.row(row) = Eigen::Map<const Eigen::RowVectorXd>(r.data(), n);
      y(row, 0) = s.y_op[0];
      y(row, 1) = s.y_op[1];
      ++row;
    });
  }

  const Eigen::RowVectorXd mu = z.colwise().mean();
  Eigen::RowVectorXd sd =
    ((z.rowwise() - mu).array().square().colwise().sum() / static_cast<double>(count)).sqrt();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sd[i] < 1e-9) sd[i] = 1.0;
  }
  const Eigen::MatrixXd zs = (z.rowwise() - mu).array().rowwise() / sd.array();

  // Quantile seeds along the newest state frame.
  std::vector<Eigen::Index> seed_cols;
  for (std::size_t i = 0; i < kStateFeatures; ++i) {
    seed_cols.push_back(static_cast<Eigen::Index>((kWindowLength - 1) * kStateFeatures + i));
  }

  for (std::size_t c = 0; c < kOutputChannels; ++c) {
    const Eigen::VectorXd yc = y.col(static_cast<Eigen::Index>(c));
    m.y_min[c] = yc.minCoeff();
    m.y_max[c] = yc.maxCoeff();
    for (const StdPiece & p : fit_channel(zs, yc, opt.pieces[c], opt.ridge, opt.max_iterations,
                                                 seed_cols)) {
      AffinePiece a;
      const Eigen::RowVectorXd w = p.w.transpose().array() / sd.array();
      a.weights.assign(w.data(), w.data() + n);
      a.intercept = p.b - w.dot(mu);
      m.pieces[c].push_back(std::move(a));
    }
  }
  m.trained_traces = traces.size();
  m.trained_samples = count;
  return m;
}

void accumulate_deltas(const PiecewiseLinearPredictor & model, const Trace & trace,
                       std::vector<OutputVector> & out)
{
  for_each_window(trace, 1, [&](const PredictorWindow & w, const TraceSample & s) {
    const OutputVector y = model.predict(w);
    out.push_back({std::abs(y[0] - s.y_op[0]), std::abs(y[1] - s.y_op[1])});
  });
}

OutputVector rmse(const PiecewiseLinearPredictor & m, const std::vector<const Trace *> & traces)
{
  std::vector<OutputVector> d;
  for (const Trace * t : traces) accumulate_deltas(m, *t, d);
  OutputVector acc{0.0, 0.0};
  if (d.empty()) return acc;
  for (const auto & v : d) {
    for (std::size_t c = 0; c < kOutputChannels; ++c) acc[c] += v[c] * v[c];
  }
  const auto n = static_cast<double>(d.size());
  return {std::sqrt(acc[0] / n), std::sqrt(acc[1] / n)};
}

}  // namespace

std::vector<OutputVector> replay_deltas(const PiecewiseLinearPredictor & model,
                                        const std::vector<Trace> & traces)
{
  std::vector<OutputVector> out;
  for (const auto & t : traces) accumulate_deltas(model, t, out);
  return out;
}

PiecewiseLinearPredictor predictor_train(const std::vector<Trace> & traces,
                                         const TrainOptions & options)
{
  if (traces.empty() || traces.size() < options.min_traces) {
    throw ConfigError("predictor_train: need at least " +
                      std::to_string(std::max<std::size_t>(1, options.min_traces)) +
                      " fault-free traces, got " + std::to_string(traces.size()));
  }
  if (options.stride == 0) throw ConfigError("predictor_train: stride must be >= 1");
  if (!(options.ridge > 0.0)) throw ConfigError("predictor_train: ridge must be positive");
  for (int k : options.pieces) {
    if (k < 1) throw ConfigError("predictor_train: each channel needs at least one piece");
  }

  std::vector<const Trace *> unique;
  for (const auto & t : traces) unique.push_back(&t);
  std::sort(unique.begin(), unique.end(),
            [](const Trace * a, const Trace * b) { return trace_less(*a, *b); });
  unique.erase(std::unique(unique.begin(), unique.end(),
                           [](const Trace * a, const Trace * b) { return trace_equal(*a, *b); }),
               unique.end());

  std::vector<const Trace *> train;
  std::vector<const Trace *> held;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    (unique.size() >= 5 && i % 5 == 4 ? held : train).push_back(unique[i]);
  }
  if (held.empty()) held = train;
  const OutputVector held_rmse = rmse(fit(train, options), held);

  PiecewiseLinearPredictor m = fit(unique, options);
  m.heldout_rmse = held_rmse;

  std::vector<OutputVector> deltas;
  for (const Trace * t : unique) accumulate_deltas(m, *t, deltas);
  for (std::size_t c = 0; c < kOutputChannels; ++c) {
    std::vector<double> d;
    d.reserve(deltas.size());
    for (const auto & v : deltas) d.push_back(v[c]);
    m.b0[c] = std::max(1e-9, options.b0_factor * percentile(std::move(d), 0.99));
    m.tau[c] = options.tau_factor * m.b0[c];
  }
  return m;
}

}  // namespace adas_sim
