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


#ifndef RMOT__PREDICT__MEMORY_BANK_HPP_
#define RMOT__PREDICT__MEMORY_BANK_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rmot/predict/trajectory.hpp"

namespace rmot::predict
{

struct MemoryEntry
{
  FeatureVector feature;
  double feature_norm{0.0};
  std::vector<Vec3> future;  // canonical frame
  std::uint64_t insertion{0};
  std::uint64_t last_used{0};  // clock tick of the last write or retrieval
  std::uint64_t retrievals{0};
};

struct RetrievedCandidate
{
  std::size_t entry{0};
  double distance{0.0};
};

/// Bounded store of (history feature, canonical future) pairs. Reads are
/// const and may run concurrently; writes and `touch` need exclusive access.
class MemoryBank
{
public:
  MemoryBank(int feature_dim, int history, int future, std::size_t capacity, double write_threshold);

  int feature_dim() const { return dim_; }
  int history() const { return history_; }
  int future() const { return future_; }
  std::size_t capacity() const { return capacity_; }
  double write_threshold() const { return write_threshold_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const MemoryEntry & entry(std::size_t i) const { return entries_.at(i); }
  const std::vector<MemoryEntry> & entries() const { return entries_; }

  /// Up to k entries with the smallest cosine distance to `h`, ascending;
  /// ties go to the earlier insertion. Throws Error(EmptyBank) when empty and
  /// Error(ZeroVector) for a zero query.
  std::vector<RetrievedCandidate> retrieve_topk(const FeatureVector & h, std::size_t k) const;

  /// Marks retrieved entries as used (drives eviction order).
  void touch(std::span<const RetrievedCandidate> used);

  /// Stores (h, future) when `realized_error` exceeds the write threshold.
  /// At capacity the least recently used entry is replaced. Returns true if
  /// the bank changed. Zero features are never stored.
  bool write(const FeatureVector & h, std::span<const Vec3> canonical_future, double realized_error);

  /// Text format: header line, then one entry per line.
  void save(const std::filesystem::path & file) const;
  /// Throws Error(Io) or Error(Format).
  static MemoryBank load(const std::filesystem::path & file);

private:
  int dim_;
  int history_;
  int future_;
  std::size_t capacity_;
  double write_threshold_;
  std::vector<MemoryEntry> entries_;
  std::uint64_t clock_{0};
  std::uint64_t inserted_{0};
};

}  // namespace rmot::predict

#endif  // RMOT__PREDICT__MEMORY_BANK_HPP_
