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

#ifndef ADAS_SIM__ROAD_HPP_
#define ADAS_SIM__ROAD_HPP_

#include <vector>

namespace adas_sim
{

enum class SegmentKind { Straight, Arc };

struct RoadSegment
{
  SegmentKind kind{SegmentKind::Straight};
  double length{0.0};
  // Signed: positive turns left. Zero for straights.
  double curvature{0.0};

  static RoadSegment straight(double length) { return {SegmentKind::Straight, length, 0.0}; }
  static RoadSegment arc(double radius, double length, bool left)
  {
    return {SegmentKind::Arc, length, (left ? 1.0 : -1.0) / radius};
  }
};

struct Pose2d
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};
};

/// Point expressed along the centerline of lane 0.
struct FrenetPoint
{
  double s{0.0};
  double d{0.0};  // positive to the left
};

/// Centerline made of C0-continuous straight and arc pieces, starting at the
/// origin heading +x. Lane i is centered at d = i * lane_width; lane 0 is the
/// rightmost lane and the one the ego starts in.
class LaneGeometry
{
public:
  LaneGeometry() = default;
  LaneGeometry(std::vector<RoadSegment> segments, double lane_width, int lane_count);

  const std::vector<RoadSegment> & segments() const { return segments_; }
  double lane_width() const { return lane_width_; }
  int lane_count() const { return lane_count_; }
  double length() const { return total_length_; }

  double curvature_at(double s) const;
  double heading_at(double s) const;
  Pose2d pose_at(const FrenetPoint & p) const;
  // Nearest centerline point. Beyond either end the result extrapolates the end
  // segment, so callers compare s against [0, length()].
  FrenetPoint project(double x, double y) const;

  /// Throws ConfigError on non-positive lengths, radii below the steering
  /// limit, or an empty segment list.
  void validate() const;

  /// Straight - left arc - straight - right arc - long straight.
  static LaneGeometry highway(double arc_radius = 300.0);

private:
  std::size_t segment_index(double s) const;

  std::vector<RoadSegment> segments_;
  std::vector<double> start_s_;
  std::vector<Pose2d> start_pose_;
  double lane_width_{3.7};
  int lane_count_{2};
  double total_length_{0.0};
};

}  // namespace adas_sim

#endif  // ADAS_SIM__ROAD_HPP_
