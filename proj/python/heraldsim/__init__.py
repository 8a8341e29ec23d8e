# Copyright 2026 The heraldsim Authors
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

"""Fock-space simulation of heralded multiphoton interferometers."""

from ._core import (
    ConfigError,
    NumericError,
    chip_matrix,
    dc_matrix,
    evolve,
    fringe_period,
    herald,
    noon,
    output_distribution,
    permanent,
    preset_names,
    run_config,
    run_preset,
    transition_amplitude,
    window_profile,
)

__all__ = [
    "ConfigError",
    "NumericError",
    "chip_matrix",
    "dc_matrix",
    "evolve",
    "fringe_period",
    "herald",
    "noon",
    "output_distribution",
    "permanent",
    "preset_names",
    "run_config",
    "run_preset",
    "transition_amplitude",
    "window_profile",
]
