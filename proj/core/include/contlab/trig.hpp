#pragma once

#include <cstdint>
#include <vector>

#include "contlab/field.hpp"

namespace contlab {

/// One wave of a finite trigonometric polynomial:
///   amplitude * cos(sum_a wave[a] * x_a + phase).
struct TrigTerm {
  std::array<int, kMaxAxes> wave{};
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Evaluates the trig polynomial on the grid. Wave entries beyond 2n must be 0.
ScalarField evaluate_trig(const GridSpec& g, const std::vector<TrigTerm>& terms);

/// Deterministic band-limited random field: every wave with 0 < |k|_inf <=
/// max_mode gets an amplitude drawn from the seeded generator, scaled so the
/// sup norm is roughly `amplitude`. Identical seeds give identical fields.
ScalarField random_trig(const GridSpec& g, std::uint64_t seed, int max_mode, double amplitude);

}  // namespace contlab
