#pragma once

#include <cstdio>
#include <functional>
#include <string>
#include <utility>

namespace qwork {

// Diagnostics that are not errors (e.g. Fock-cutoff support checks) are
// reported through a per-thread handler. Without a handler installed they go
// to stderr.
using WarningHandler = std::function<void(const std::string&)>;

namespace detail {
inline thread_local WarningHandler warning_handler{};
}  // namespace detail

inline void emit_warning(const std::string& message) {
  if (detail::warning_handler) {
    detail::warning_handler(message);
  } else {
    std::fprintf(stderr, "[qwork] warning: %s\n", message.c_str());
  }
}

// Routes warnings raised on this thread to `handler` while alive.
class ScopedWarningHandler {
 public:
  explicit ScopedWarningHandler(WarningHandler handler)
      : previous_(std::move(detail::warning_handler)) {
    detail::warning_handler = std::move(handler);
  }
  ~ScopedWarningHandler() { detail::warning_handler = std::move(previous_); }

  ScopedWarningHandler(const ScopedWarningHandler&) = delete;
  ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

 private:
  WarningHandler previous_;
};

}  // namespace qwork
