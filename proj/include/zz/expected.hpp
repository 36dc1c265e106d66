#pragma once

#include <cassert>
#include <utility>
#include <variant>

namespace zz {

/// Minimal value-or-error carrier for operations whose failure is data,
/// not an exception (e.g. parsing model output that is expected to be
/// malformed some of the time).
template <typename T, typename E>
class Expected {
 public:
  Expected(T value) : storage_(std::in_place_index<0>, std::move(value)) {}
  Expected(E error) : storage_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return storage_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const {
    assert(ok());
    return std::get<0>(storage_);
  }
  T& value() {
    assert(ok());
    return std::get<0>(storage_);
  }

  const E& error() const {
    assert(!ok());
    return std::get<1>(storage_);
  }

 private:
  std::variant<T, E> storage_;
};

}  // namespace zz
