// Copyright 2026 The rmot Authors
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


#ifndef RMOT__APP__PRESETS_HPP_
#define RMOT__APP__PRESETS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rmot/sim/scenario.hpp"

namespace rmot::app
{

/// Names accepted by make_preset.
std::vector<std::string> preset_names();

/// Built-in scenarios:
///  identity         3 agents, noiseless, 600 frames
///  stop-and-sprint  agents alternating 0 and 4 m/s on rectangular loops
///  curved-rugged    agents on closed curves over hilly terrain
///  mapping          moving ego, walkers, trees, 20 % detection misses
///  bench            10 agents, about 50k points per frame
/// Layout randomness is drawn from `seed`. Throws Error(Config) for an
/// unknown name.
sim::ScenarioConfig make_preset(std::string_view name, std::uint64_t seed);

}  // namespace rmot::app

#endif  // RMOT__APP__PRESETS_HPP_
