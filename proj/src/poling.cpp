#include "nlo/poling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlo {

void PolingPattern::validate(double length) const {
  if (signs.empty() || boundaries.size() != signs.size() + 1)
    throw std::invalid_argument("poling pattern needs one more boundary than domains");
  for (size_t d = 0; d + 1 < boundaries.size(); ++d) {
    if (boundaries[d + 1] <= boundaries[d])
      throw std::invalid_argument("poling boundaries must be strictly increasing");
  }
  for (int s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("poling signs must be +1 or -1");
  if (boundaries.front() < -1e-12 || boundaries.back() > length * (1 + 1e-9))
    throw std::invalid_argument("poling pattern must lie within [0, L]");
}

Index PolingPattern::domain_of(double z) const {
  if (z <= boundaries.front()) return 0;
  if (z >= boundaries.back()) return domain_count() - 1;
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), z);
  return static_cast<Index>(std::distance(boundaries.begin(), it)) - 1;
}

int PolingPattern::sign_at(double z) const { return signs[static_cast<size_t>(domain_of(z))]; }

std::vector<PolingRun> compress_to_runs(const PolingPattern& pattern, double width_tol) {
  std::vector<PolingRun> runs;
  const Index n = pattern.domain_count();
  Index d = 0;
  while (d < n) {
    PolingRun run;
    run.z0 = pattern.boundaries[static_cast<size_t>(d)];
    run.domain_width =
        pattern.boundaries[static_cast<size_t>(d) + 1] - pattern.boundaries[static_cast<size_t>(d)];
    run.first_sign = pattern.signs[static_cast<size_t>(d)];
    run.count = 1;
    // Decide alternating vs constant from the immediate neighbour, then
    // extend for as long as width and parity both hold.
    bool alternating = true;
    if (d + 1 < n) alternating = pattern.signs[static_cast<size_t>(d + 1)] != run.first_sign;
    run.alternating = alternating;
    Index next = d + 1;
    while (next < n) {
      const double w = pattern.boundaries[static_cast<size_t>(next) + 1] -
                       pattern.boundaries[static_cast<size_t>(next)];
      if (std::abs(w - run.domain_width) > width_tol * run.domain_width) break;
      const int expected =
          alternating ? ((next - d) % 2 == 0 ? run.first_sign : -run.first_sign) : run.first_sign;
      if (pattern.signs[static_cast<size_t>(next)] != expected) break;
      ++run.count;
      ++next;
    }
    runs.push_back(run);
    d = next;
  }
  return runs;
}

}  // namespace nlo
