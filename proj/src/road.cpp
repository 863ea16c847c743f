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

#include "adas_sim/road.hpp"

#include <algorithm>
#include <cmath>

#include "adas_sim/common.hpp"

namespace adas_sim
{
namespace
{

Pose2d advance(const Pose2d & start, const RoadSegment & seg, double u)
{
  if (seg.kind == SegmentKind::Straight || seg.curvature == 0.0) {
    return {start.x + u * std::cos(start.heading), start.y + u * std::sin(start.heading),
            start.heading};
  }
  const double r = 1.0 / seg.curvature;
  const double cx = start.x - r * std::sin(start.heading);
  const double cy = start.y + r * std::cos(start.heading);
  const double th = start.heading + seg.curvature * u;
  return {cx + r * std::sin(th), cy - r * std::cos(th), th};
}

struct Candidate
{
  FrenetPoint point;
  double distance2;
};

Candidate project_onto(const Pose2d & start, double start_s, const RoadSegment & seg, double x,
                       double y, bool open_begin, bool open_end)
{
  double u = 0.0;
  if (seg.kind == SegmentKind::Straight || seg.curvature == 0.0) {
    const double c = std::cos(start.heading);
    const double s = std::sin(start.heading);
    u = (x - start.x) * c + (y - start.y) * s;
  } else {
    const double r = 1.0 / seg.curvature;
    const double cx = start.x - r * std::sin(start.heading);
    const double cy = start.y + r * std::cos(start.heading);
    const double vx = x - cx;
    const double vy = y - cy;
    // Point on the circle at angle th is c + r * (sin th, -cos th).
    const double th = r > 0.0 ? std::atan2(vx, -vy) : std::atan2(-vx, vy);
    u = wrap_angle(th - start.heading) / seg.curvature;
  }
  if (!open_begin) u = std::max(u, 0.0);
  if (!open_end) u = std::min(u, seg.length);
  const Pose2d foot = advance(start, seg, u);
  const double dx = x - foot.x;
  const double dy = y - foot.y;
  const double d = -dx * std::sin(foot.heading) + dy * std::cos(foot.heading);
  return {{start_s + u, d}, dx * dx + dy * dy};
}

}  // namespace

LaneGeometry::LaneGeometry(std::vector<RoadSegment> segments, double lane_width, int lane_count)
: segments_(std::move(segments)), lane_width_(lane_width), lane_count_(lane_count)
{
  validate();
  Pose2d pose{};
  double s = 0.0;
  for (const auto & seg : segments_) {
    start_s_.push_back(s);
    start_pose_.push_back(pose);
    pose = advance(pose, seg, seg.length);
    s += seg.length;
  }
  total_length_ = s;
}

void LaneGeometry::validate() const
{
  if (segments_.empty()) throw ConfigError("road: at least one segment is required");
  if (!(lane_width_ > 0.0)) throw ConfigError("road: lane_width must be positive");
  if (lane_count_ < 1) throw ConfigError("road: lane_count must be >= 1");
  for (const auto & seg : segments_) {
    if (!(seg.length > 0.0)) throw ConfigError("road: segment length must be positive");
    if (seg.kind == SegmentKind::Arc) {
      if (seg.curvature == 0.0) throw ConfigError("road: arc segment needs a finite radius");
      if (std::abs(seg.curvature) > kCurvatureMax) {
        throw ConfigError("road: arc radius below the minimum turning radius");
      }
    }
  }
}

std::size_t LaneGeometry::segment_index(double s) const
{
  const auto it = std::upper_bound(start_s_.begin(), start_s_.end(), s);
  if (it == start_s_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(start_s_.begin(), it) - 1);
}

double LaneGeometry::curvature_at(double s) const
{
  if (s < 0.0 || s > total_length_) return 0.0;
  return segments_[segment_index(s)].curvature;
}

double LaneGeometry::heading_at(double s) const
{
  const std::size_t i = segment_index(s);
  const double u = s - start_s_[i];
  return start_pose_[i].heading + segments_[i].curvature * std::clamp(u, 0.0, segments_[i].length);
}

Pose2d LaneGeometry::pose_at(const FrenetPoint & p) const
{
  const std::size_t i = segment_index(p.s);
  Pose2d c = advance(start_pose_[i], segments_[i], p.s - start_s_[i]);
  c.x -= p.d * std::sin(c.heading);
  c.y += p.d * std::cos(c.heading);
  return c;
}

FrenetPoint LaneGeometry::project(double x, double y) const
{
  Candidate best{{0.0, 0.0}, kInfinity};
  const std::size_t n = segments_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Candidate c =
      project_onto(start_pose_[i], start_s_[i], segments_[i], x, y, i == 0, i + 1 == n);
    if (c.distance2 < best.distance2) best = c;
  }
  return best.point;
}

LaneGeometry LaneGeometry::highway(double arc_radius)
{
  return LaneGeometry(
    {RoadSegment::straight(150.0), RoadSegment::arc(arc_radius, 250.0, true),
     RoadSegment::straight(300.0), RoadSegment::arc(arc_radius, 250.0, false),
     RoadSegment::straight(3200.0)},
    3.7, 2);
}

}  // namespace adas_sim
