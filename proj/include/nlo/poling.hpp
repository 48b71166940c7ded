#pragma once

#include <vector>

#include "nlo/types.hpp"

namespace nlo {

/// Piecewise-constant sign function over [z0, zD]: domain d spans
/// [boundary[d], boundary[d+1]) and carries sign[d] in {+1, -1}.
struct PolingPattern {
  std::vector<double> boundaries;  // strictly increasing, size = domains + 1
  std::vector<int> signs;          // one per domain

  Index domain_count() const { return static_cast<Index>(signs.size()); }
  double start() const { return boundaries.front(); }
  double end() const { return boundaries.back(); }

  int sign_at(double z) const;
  Index domain_of(double z) const;

  void validate(double length) const;
};

/// A maximal stretch of domains sharing one width, either strictly
/// alternating in sign or constant in sign.  Used to collapse long poling
/// patterns into a handful of repeated building blocks.
struct PolingRun {
  double z0 = 0;
  double domain_width = 0;
  Index count = 0;
  int first_sign = 1;
  bool alternating = true;  // constant sign when false
};

/// Compress a pattern into runs of equal-width domains.  Patterns produced by
/// periodic_pattern/apodized_pattern collapse to very few runs.
std::vector<PolingRun> compress_to_runs(const PolingPattern& pattern, double width_tol = 1e-9);

}  // namespace nlo
