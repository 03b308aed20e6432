#include "cliquewalk/common.hpp"

#include <sstream>

namespace cliquewalk {

namespace detail {
void assert_fail(const char* file, int line, const std::string& msg) {
  std::ostringstream os;
  os << "contract violation at " << file << ":" << line << ": " << msg;
  throw ContractViolation(os.str());
}
}  // namespace detail

std::size_t pick_weighted(const double* w, std::size_t n, double u) {
  CW_ASSERT(n > 0, "pick_weighted: empty weights");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    CW_ASSERT(w[i] >= 0.0, "pick_weighted: negative weight");
    total += w[i];
  }
  CW_ASSERT(total > 0.0, "pick_weighted: zero total mass");
  double target = u * total;
  double acc = 0.0;
  std::size_t last_positive = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] > 0.0) last_positive = i;
    acc += w[i];
    if (target < acc && w[i] > 0.0) return i;
  }
  return last_positive;
}

}  // namespace cliquewalk
