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

#ifndef RMOT__ERROR_HPP_
#define RMOT__ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace rmot
{

/// Failure categories shared by every module. The C API maps these one-to-one
/// onto `rmot_status` values.
enum class ErrorCode
{
  InvalidArgument,
  Config,
  Io,
  Format,
  Numeric,
  OutOfOrder,
  BehindCamera,
  OutOfExtent,
  DegenerateHeading,
  ZeroVector,
  EmptyBank,
  InsufficientNeighbors,
  ZeroRange,
  EmptyInput,
  NoMatches,
  BothZero,
  Internal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string & what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string & what) { throw Error(code, what); }

}  // namespace rmot

#endif  // RMOT__ERROR_HPP_
