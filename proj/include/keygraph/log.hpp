#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string_view>
#include <utility>

namespace keygraph::log {

using Sink = std::function<void(std::string_view)>;

namespace detail {

struct State {
  std::mutex mutex;
  Sink sink = [](std::string_view msg) { std::cerr << "keygraph: warning: " << msg << '\n'; };
};

inline State& state() {
  static State s;
  return s;
}

}  // namespace detail

// Replaces the warning sink; returns the previous one. An empty sink silences warnings.
inline Sink set_sink(Sink sink) {
  auto& s = detail::state();
  std::lock_guard lock(s.mutex);
  return std::exchange(s.sink, std::move(sink));
}

inline void warn(std::string_view message) {
  auto& s = detail::state();
  std::lock_guard lock(s.mutex);
  if (s.sink) s.sink(message);
}

// Silences (or redirects) warnings for the lifetime of the guard.
class ScopedSink {
 public:
  explicit ScopedSink(Sink sink = {}) : previous_(set_sink(std::move(sink))) {}
  ~ScopedSink() { set_sink(std::move(previous_)); }
  ScopedSink(const ScopedSink&) = delete;
  ScopedSink& operator=(const ScopedSink&) = delete;

 private:
  Sink previous_;
};

}  // namespace keygraph::log
