#ifndef DSLP_TESTS_TEST_UTIL_H_
#define DSLP_TESTS_TEST_UTIL_H_

#include <random>

#include "dslp/directional.h"
#include "dslp/field.h"

namespace dslp::testing {

inline LayeredWorld RandomWorld(GridDims dims, int channels, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LayeredWorld w;
  w.observation_mask = GridField(dims, 1.0, 1.0);
  for (int c = 0; c < channels; ++c) {
    GridField f(dims, 1.0);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
    w.channels.push_back({"c" + std::to_string(c), std::move(f)});
  }
  return w;
}

inline ObservationSet RandomObs(GridDims dims, std::mt19937_64& rng, double p_pos = 0.2,
                                double p_neg = 0.5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ObservationSet obs;
  obs.pos_mask = GridField(dims, 1.0);
  obs.neg_mask = GridField(dims, 1.0);
  for (std::size_t k = 0; k < obs.pos_mask.size(); ++k) {
    const double r = u(rng);
    if (r < p_pos) {
      obs.pos_mask[k] = 1.0;
    } else if (r < p_pos + p_neg) {
      obs.neg_mask[k] = 1.0;
    }
  }
  return obs;
}

inline DirField RandomDirTarget(GridDims dims, int bins, std::mt19937_64& rng,
                                double p_defined = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DirField f(dims, bins);
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    if (u(rng) >= p_defined) continue;
    f.Set(c, EncodeVonMises({u(rng) * 6.283185307179586, 1.0 + 5.0 * u(rng)}, bins));
  }
  if (f.DefinedCount() == 0) f.Set(0, EncodeVonMises({0.0, 2.0}, bins));
  return f;
}

}  // namespace dslp::testing

#endif  // DSLP_TESTS_TEST_UTIL_H_
