#ifndef STOCHTUMOR_FORMAT_HPP_
#define STOCHTUMOR_FORMAT_HPP_

#include <cstdio>
#include <string>

namespace stochtumor {

// Round-trip representation used by every CSV writer.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace stochtumor

#endif  // STOCHTUMOR_FORMAT_HPP_
