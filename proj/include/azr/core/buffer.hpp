#pragma once

#include <cstddef>
#include <mutex>
#include <random>
#include <vector>

#include "azr/core/types.hpp"

namespace azr {

using Rng = std::mt19937_64;

inline constexpr std::size_t kDefaultBufferCapacity = 16384;

class BufferTypeError : public Error {
 public:
  using Error::Error;
};

class EmptyBufferError : public Error {
 public:
  using Error::Error;
};

enum class InsertResult { Inserted, AtCapacity };

/// Append-only store of validated tasks for one task type.
///
/// Abduction and deduction buffers hold Triplets, the induction buffer holds
/// InductionTasks. Inserts past capacity are rejected rather than evicting,
/// so the sampling distribution only ever grows. All members are safe to
/// call concurrently.
class TaskBuffer {
 public:
  explicit TaskBuffer(TaskType type, std::size_t capacity = kDefaultBufferCapacity);

  TaskBuffer(const TaskBuffer& other);
  TaskBuffer& operator=(const TaskBuffer& other);

  TaskType task_type() const noexcept { return type_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Throws BufferTypeError when the record shape does not match the buffer.
  InsertResult insert(TaskRecord record);

  /// Draws `count` items. Within one call the draw is without replacement
  /// when count <= size, with replacement otherwise.
  std::vector<TaskRecord> sample(std::size_t count, Rng& rng) const;
  /// Same draw as sample(), returning positions instead of records.
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

  TaskRecord at(std::size_t index) const;
  std::vector<TaskRecord> items() const;

 private:
  TaskType type_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::vector<TaskRecord> items_;
};

/// The abduction, deduction and induction buffers of one run.
struct BufferSet {
  explicit BufferSet(std::size_t capacity = kDefaultBufferCapacity)
      : abduction(TaskType::Abduction, capacity),
        deduction(TaskType::Deduction, capacity),
        induction(TaskType::Induction, capacity) {}

  TaskBuffer abduction;
  TaskBuffer deduction;
  TaskBuffer induction;

  TaskBuffer& of(TaskType type);
  const TaskBuffer& of(TaskType type) const;
};

/// Index in [0, n) drawn uniformly. Every sampling site in the library goes
/// through this so that a seeded Rng reproduces the whole run.
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace azr
