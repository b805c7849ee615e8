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


#include "rmot/predict/memory_bank.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "rmot/error.hpp"

namespace rmot::predict
{

namespace
{

constexpr const char * kMagic = "rmot-membank";
constexpr int kVersion = 1;

void put(std::string & out, double v)
{
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, r.ptr);
  out.push_back(' ');
}

void put(std::string & out, std::uint64_t v)
{
  out += std::to_string(v);
  out.push_back(' ');
}

class Tokens
{
public:
  Tokens(const std::string & line, int lineno) : p_(line.data()), end_(line.data() + line.size()), line_(lineno) {}

  template <typename T>
  T next()
  {
    while (p_ < end_ && *p_ == ' ') ++p_;
    T v{};
    const auto r = std::from_chars(p_, end_, v);
    if (r.ec != std::errc() || (r.ptr < end_ && *r.ptr != ' ')) {
      fail(ErrorCode::Format, "membank line " + std::to_string(line_) + ": malformed number");
    }
    p_ = r.ptr;
    return v;
  }

  void expect_end()
  {
    while (p_ < end_ && (*p_ == ' ' || *p_ == '\r')) ++p_;
    if (p_ != end_) fail(ErrorCode::Format, "membank line " + std::to_string(line_) + ": trailing data");
  }

private:
  const char * p_;
  const char * end_;
  int line_;
};

}  // namespace

MemoryBank::MemoryBank(int feature_dim, int history, int future, std::size_t capacity, double write_threshold)
: dim_(feature_dim), history_(history), future_(future), capacity_(capacity), write_threshold_(write_threshold)
{
  if (dim_ < 1 || history_ < 2 || future_ < 1) fail(ErrorCode::Config, "memory bank dimensions must be positive");
  if (capacity_ < 1) fail(ErrorCode::Config, "memory bank capacity must be >= 1");
  if (!(write_threshold_ >= 0.0)) fail(ErrorCode::Config, "write threshold must be >= 0");
}

std::vector<RetrievedCandidate> MemoryBank::retrieve_topk(const FeatureVector & h, std::size_t k) const
{
  if (entries_.empty()) fail(ErrorCode::EmptyBank, "memory bank is empty");
  if (h.size() != dim_) fail(ErrorCode::InvalidArgument, "query feature dimension mismatch");
  const double hn = h.norm();
  if (hn == 0.0) fail(ErrorCode::ZeroVector, "query feature is zero");

  std::vector<RetrievedCandidate> all(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto & e = entries_[i];
    const double c = std::clamp(e.feature.dot(h) / (e.feature_norm * hn), -1.0, 1.0);
    all[i] = {i, 1.0 - c};
  }
  const std::size_t n = std::min(k, all.size());
  auto less = [this](const RetrievedCandidate & a, const RetrievedCandidate & b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return entries_[a.entry].insertion < entries_[b.entry].insertion;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), less);
  all.resize(n);
  return all;
}

void MemoryBank::touch(std::span<const RetrievedCandidate> used)
{
  if (used.empty()) return;
  ++clock_;
  for (const auto & c : used) {
    auto & e = entries_.at(c.entry);
    e.last_used = clock_;
    ++e.retrievals;
  }
}

bool MemoryBank::write(const FeatureVector & h, std::span<const Vec3> canonical_future, double realized_error)
{
  if (!(realized_error > write_threshold_)) return false;
  if (h.size() != dim_) fail(ErrorCode::InvalidArgument, "feature dimension mismatch on write");
  if (static_cast<int>(canonical_future.size()) != future_) {
    fail(ErrorCode::InvalidArgument, "future window length mismatch on write");
  }
  const double norm = h.norm();
  if (norm == 0.0 || !h.allFinite()) return false;

  MemoryEntry e;
  e.feature = h;
  e.feature_norm = norm;
  e.future.assign(canonical_future.begin(), canonical_future.end());
  e.insertion = inserted_++;
  e.last_used = ++clock_;

  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(e));
  } else {
    auto victim = std::min_element(entries_.begin(), entries_.end(), [](const MemoryEntry & a, const MemoryEntry & b) {
      if (a.last_used != b.last_used) return a.last_used < b.last_used;
      return a.insertion < b.insertion;
    });
    *victim = std::move(e);
  }
  return true;
}

void MemoryBank::save(const std::filesystem::path & file) const
{
  std::string out;
  out.reserve(entries_.size() * static_cast<std::size_t>(dim_ + 3 * future_) * 20 + 128);
  out += kMagic;
  out += ' ';
  out += std::to_string(kVersion);
  out += ' ';
  put(out, static_cast<std::uint64_t>(dim_));
  put(out, static_cast<std::uint64_t>(history_));
  put(out, static_cast<std::uint64_t>(future_));
  put(out, static_cast<std::uint64_t>(capacity_));
  put(out, write_threshold_);
  put(out, static_cast<std::uint64_t>(entries_.size()));
  put(out, clock_);
  put(out, inserted_);
  out.back() = '\n';
  for (const auto & e : entries_) {
    put(out, e.insertion);
    put(out, e.last_used);
    put(out, e.retrievals);
    for (int i = 0; i < dim_; ++i) put(out, e.feature(i));
    for (const auto & p : e.future) {
      put(out, p.x());
      put(out, p.y());
      put(out, p.z());
    }
    out.back() = '\n';
  }
  std::ofstream f(file, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::Io, "cannot write " + file.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) fail(ErrorCode::Io, "write failed for " + file.string());
}

MemoryBank MemoryBank::load(const std::filesystem::path & file)
{
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Format, "membank file is empty");
  const std::string magic = std::string(kMagic) + ' ';
  if (line.compare(0, magic.size(), magic) != 0) fail(ErrorCode::Format, "not a membank file");
  const std::string rest = line.substr(magic.size());
  Tokens head(rest, 1);
  const int version = head.next<int>();
  if (version != kVersion) fail(ErrorCode::Format, "unsupported membank version " + std::to_string(version));
  const auto dim = head.next<std::uint64_t>();
  const auto hist = head.next<std::uint64_t>();
  const auto fut = head.next<std::uint64_t>();
  const auto cap = head.next<std::uint64_t>();
  const double thr = head.next<double>();
  const auto count = head.next<std::uint64_t>();
  const auto clock = head.next<std::uint64_t>();
  const auto inserted = head.next<std::uint64_t>();
  head.expect_end();
  if (dim == 0 || dim > 100000 || fut == 0 || fut > 100000 || count > cap) {
    fail(ErrorCode::Format, "membank header is inconsistent");
  }
  MemoryBank bank(static_cast<int>(dim), static_cast<int>(hist), static_cast<int>(fut), cap, thr);
  bank.clock_ = clock;
  bank.inserted_ = inserted;
  bank.entries_.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    if (!std::getline(in, line)) fail(ErrorCode::Format, "membank is truncated");
    Tokens t(line, static_cast<int>(k + 2));
    MemoryEntry e;
    e.insertion = t.next<std::uint64_t>();
    e.last_used = t.next<std::uint64_t>();
    e.retrievals = t.next<std::uint64_t>();
    e.feature.resize(static_cast<Eigen::Index>(dim));
    for (std::uint64_t i = 0; i < dim; ++i) e.feature(static_cast<Eigen::Index>(i)) = t.next<double>();
    e.future.resize(fut);
    for (auto & p : e.future) {
      const double x = t.next<double>();
      const double y = t.next<double>();
      const double z = t.next<double>();
      p = Vec3(x, y, z);
    }
    t.expect_end();
    e.feature_norm = e.feature.norm();
    if (e.feature_norm == 0.0) fail(ErrorCode::Format, "membank entry has a zero feature");
    bank.entries_.push_back(std::move(e));
  }
  if (std::getline(in, line) && !line.empty()) fail(ErrorCode::Format, "membank has trailing entries");
  return bank;
}

}  // namespace rmot::predict
