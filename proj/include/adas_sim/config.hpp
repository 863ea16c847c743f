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

#ifndef ADAS_SIM__CONFIG_HPP_
#define ADAS_SIM__CONFIG_HPP_

#include <string>

#include "adas_sim/campaign.hpp"
#include "adas_sim/scenario.hpp"

namespace adas_sim
{

// Both loaders reject unknown keys and wrong types with ConfigError; the
// *_file variants raise IoError when the file cannot be read.

/// Scenario document: [scenario], optional [road] with [[road.segment]],
/// [[traffic]], [[lead_profile]], [[lane_change]]. With scenario.base set the
/// built-in scenario is the starting point and listed tables replace its
/// counterparts.
ScenarioSpec parse_scenario(const std::string & text, const std::string & origin = "<string>");
ScenarioSpec load_scenario_file(const std::string & path);

/// Campaign document: [campaign], [fault], [acc], [alc], [driver],
/// [interventions], [ml]. Starts from CampaignConfig::paper_default().
CampaignConfig parse_campaign(const std::string & text, const std::string & origin = "<string>");
CampaignConfig load_campaign_file(const std::string & path);

}  // namespace adas_sim

#endif  // ADAS_SIM__CONFIG_HPP_
