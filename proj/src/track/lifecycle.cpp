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

#include "rmot/track/lifecycle.hpp"

#include <algorithm>

#include "rmot/error.hpp"

namespace rmot::track
{

void LifecycleParams::validate() const
{
  if (confirm_frames < 1) fail(ErrorCode::Config, "confirm_frames must be >= 1");
  if (delete_misses < 1) fail(ErrorCode::Config, "delete_misses must be >= 1");
}

std::string_view phase_name(Phase p)
{
  switch (p) {
    case Phase::Birth: return "birth";
    case Phase::Tracking: return "tracking";
    case Phase::DeathPending: return "death_pending";
  }
  return "birth";
}

LifecycleStep lifecycle_step(const Lifecycle & current, Condition condition,
                             const LifecycleParams & params)
{
  LifecycleStep out{current, false};
  Lifecycle & s = out.state;
  switch (condition) {
    case Condition::Matched:
    case Condition::MatchedNoImage:
      s.miss_count = 0;
      if (s.phase == Phase::Birth) {
        s.hit_count = std::min(s.hit_count + 1, params.confirm_frames);
        if (s.hit_count >= params.confirm_frames) s.phase = Phase::Tracking;
      } else {
        s.phase = Phase::Tracking;
      }
      break;
    case Condition::ImageOnly:  // no 3D measurement: coasts like a miss
    case Condition::Miss:
      s.miss_count = std::min(s.miss_count + 1, params.delete_misses);
      if (s.phase == Phase::Birth) {
        s.hit_count = 0;
      } else {
        s.phase = Phase::DeathPending;
      }
      out.remove = s.miss_count >= params.delete_misses;
      break;
    case Condition::NewInstance:
      fail(ErrorCode::InvalidArgument, "new-instance is not a track condition");
  }
  return out;
}

}  // namespace rmot::track
