#include "azr/core/buffer.hpp"

#include <fmt/format.h>

#include <numeric>

namespace azr {

namespace {

bool shape_matches(TaskType type, const TaskRecord& record) {
  const bool induction = std::holds_alternative<InductionTask>(record);
  return induction == (type == TaskType::Induction);
}

}  // namespace

std::size_t uniform_index(Rng& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

TaskBuffer::TaskBuffer(TaskType type, std::size_t capacity) : type_(type), capacity_(capacity) {
  if (capacity_ == 0) throw Error("buffer capacity must be positive");
}

TaskBuffer::TaskBuffer(const TaskBuffer& other)
    : type_(other.type_), capacity_(other.capacity_), items_(other.items()) {}

TaskBuffer& TaskBuffer::operator=(const TaskBuffer& other) {
  if (this == &other) return *this;
  auto copy = other.items();
  std::lock_guard lock(mutex_);
  type_ = other.type_;
  capacity_ = other.capacity_;
  items_ = std::move(copy);
  return *this;
}

std::size_t TaskBuffer::size() const {
  std::lock_guard lock(mutex_);
  return items_.size();
}

InsertResult TaskBuffer::insert(TaskRecord record) {
  if (!shape_matches(type_, record)) {
    throw BufferTypeError(
        fmt::format("record shape does not match the {} buffer", to_string(type_)));
  }
  std::lock_guard lock(mutex_);
  if (items_.size() >= capacity_) return InsertResult::AtCapacity;
  items_.push_back(std::move(record));
  return InsertResult::Inserted;
}

std::vector<std::size_t> TaskBuffer::sample_indices(std::size_t count, Rng& rng) const {
  std::lock_guard lock(mutex_);
  if (items_.empty()) {
    throw EmptyBufferError(fmt::format("cannot sample from empty {} buffer", to_string(type_)));
  }
  std::vector<std::size_t> out;
  out.reserve(count);
  if (count <= items_.size()) {
    // Partial Fisher-Yates over indices.
    std::vector<std::size_t> order(items_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + uniform_index(rng, order.size() - i);
      std::swap(order[i], order[j]);
      out.push_back(order[i]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) out.push_back(uniform_index(rng, items_.size()));
  }
  return out;
}

std::vector<TaskRecord> TaskBuffer::sample(std::size_t count, Rng& rng) const {
  auto indices = sample_indices(count, rng);
  std::lock_guard lock(mutex_);
  std::vector<TaskRecord> out;
  out.reserve(indices.size());
  for (std::size_t index : indices) out.push_back(items_[index]);
  return out;
}

TaskRecord TaskBuffer::at(std::size_t index) const {
  std::lock_guard lock(mutex_);
  return items_.at(index);
}

std::vector<TaskRecord> TaskBuffer::items() const {
  std::lock_guard lock(mutex_);
  return items_;
}

TaskBuffer& BufferSet::of(TaskType type) {
  switch (type) {
    case TaskType::Abduction:
      return abduction;
    case TaskType::Deduction:
      return deduction;
    case TaskType::Induction:
      return induction;
  }
  throw Error("unknown task type");
}

const TaskBuffer& BufferSet::of(TaskType type) const {
  return const_cast<BufferSet*>(this)->of(type);
}

}  // namespace azr
