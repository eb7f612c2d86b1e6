#include "contlab/trig.hpp"

#include <cmath>
#include <random>

namespace contlab {

ScalarField evaluate_trig(const GridSpec& g, const std::vector<TrigTerm>& terms) {
  const int axes = g.axes();
  for (const TrigTerm& term : terms) {
    for (int a = axes; a < kMaxAxes; ++a) {
      if (term.wave[a] != 0) throw Error("trig term excites an axis the grid does not have");
    }
  }
  return sample_real(g, [&](const std::array<double, kMaxAxes>& x) {
    double v = 0.0;
    for (const TrigTerm& term : terms) {
      double arg = term.phase;
      for (int a = 0; a < axes; ++a) arg += term.wave[a] * x[a];
      v += term.amplitude * std::cos(arg);
    }
    return v;
  });
}

ScalarField random_trig(const GridSpec& g, std::uint64_t seed, int max_mode, double amplitude) {
  if (max_mode < 1) throw Error("random_trig: max_mode must be >= 1");
  std::mt19937_64 rng(seed);
  // Uniform in [-1, 1) from the top 53 bits; avoids distribution objects whose
  // sequences are not pinned down by the standard.
  auto uniform = [&rng]() {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  };
  const int axes = g.axes();
  std::vector<TrigTerm> terms;
  // Odometer over wave vectors in [-max_mode, max_mode]^axes, skipping zero.
  std::array<int, kMaxAxes> k{};
  for (int a = 0; a < axes; ++a) k[a] = -max_mode;
  while (true) {
    bool zero = true;
    for (int a = 0; a < axes; ++a) zero = zero && k[a] == 0;
    if (!zero) {
      TrigTerm term;
      term.wave = k;
      term.amplitude = uniform();
      term.phase = kTwoPi * 0.5 * (uniform() + 1.0);
      terms.push_back(term);
    }
    int a = axes - 1;
    while (a >= 0 && ++k[a] > max_mode) k[a--] = -max_mode;
    if (a < 0) break;
  }
  ScalarField f = evaluate_trig(g, terms);
  const double sup = sup_norm(f);
  if (sup > 0.0) f = scaled(f, amplitude / sup);
  return f;
}

}  // namespace contlab
