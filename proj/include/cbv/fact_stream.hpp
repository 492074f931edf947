#pragma once

#include <cstdint>
#include <functional>
#include <optional>

namespace cbv {

// An infinite enumeration of facts of type T.  item(i) may be empty
// (padding); every fact the stream is supposed to carry must show up at some
// index, and nothing unsound may ever show up.  Generators must be
// deterministic pure functions of the index (they may read memoized names),
// so prefixes replay identically without the stream storing anything.
template <class T>
class FactStream {
 public:
  FactStream() : fn_([](std::uint64_t) { return std::nullopt; }) {}
  explicit FactStream(std::function<std::optional<T>(std::uint64_t)> fn)
      : fn_(std::move(fn)) {}

  std::optional<T> item(std::uint64_t i) const { return fn_(i); }

 private:
  std::function<std::optional<T>(std::uint64_t)> fn_;
};

}  // namespace cbv
