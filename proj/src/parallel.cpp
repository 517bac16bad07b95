#include "transdyn/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace transdyn {

unsigned default_thread_count() {
  if (const char* env = std::getenv("TRANSIENT_DYN_THREADS")) {
    unsigned v = 0;
    auto [p, ec] = std::from_chars(env, env + std::strlen(env), v);
    if (ec == std::errc{} && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace transdyn
