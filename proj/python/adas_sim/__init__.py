# Copyright 2026 The adas-sim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the adas-sim closed-loop simulator."""

from adas_sim._core import (
    ConfigError,
    IoError,
    aebs_thresholds,
    cusum_step,
    render_report,
    run_campaign,
    run_seed,
    simulate,
)

__all__ = [
    "ConfigError",
    "IoError",
    "aebs_thresholds",
    "cusum_step",
    "render_report",
    "run_campaign",
    "run_seed",
    "simulate",
]
