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

#ifndef RMOT__TRACK__LIFECYCLE_HPP_
#define RMOT__TRACK__LIFECYCLE_HPP_

#include <string_view>

#include "rmot/track/association.hpp"

namespace rmot::track
{

struct LifecycleParams
{
  int confirm_frames{3};
  int delete_misses{5};

  void validate() const;
};

enum class Phase
{
  Birth,
  Tracking,
  DeathPending,
};

std::string_view phase_name(Phase p);

struct Lifecycle
{
  Phase phase{Phase::Birth};
  int hit_count{1};   // consecutive matched frames while in Birth
  int miss_count{0};  // consecutive frames without a 3D measurement

  /// Confirmed tracks are the ones reported downstream.
  bool confirmed() const { return phase != Phase::Birth; }
};

struct LifecycleStep
{
  Lifecycle state;
  bool remove{false};
};

/// One frame of the birth / tracking / death state machine. `NewInstance` is
/// not a track condition and is rejected with Error(InvalidArgument).
LifecycleStep lifecycle_step(const Lifecycle & current, Condition condition,
                             const LifecycleParams & params);

}  // namespace rmot::track

#endif  // RMOT__TRACK__LIFECYCLE_HPP_
