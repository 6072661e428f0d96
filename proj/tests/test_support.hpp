#pragma once

#include <map>
#include <mutex>

#include "radrect/minimal_solvers.hpp"
#include "radrect/ransac.hpp"
#include "radrect/synthetic.hpp"
#include "radrect/template_gen.hpp"

namespace radrect::test {

// Shape analysis is exact but not free; share one instance per configuration
// across the whole test binary.
inline const SystemShape& shared_shape(Configuration c) {
  static std::mutex m;
  static std::map<Configuration, SystemShape> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(c);
  if (it == cache.end()) it = cache.emplace(c, analyze_shape(c)).first;
  return it->second;
}

// a reasonable sampled template (small search), cached
inline const SolverTemplate& shared_sampled_template(Configuration c) {
  static std::mutex m;
  static std::map<Configuration, SolverTemplate> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(c);
  if (it == cache.end())
    it = cache.emplace(c, sample_and_select(shared_shape(c), 8, 16)).first;
  return it->second;
}

// one minimal sample drawn from a scene
inline MinimalSample sample_from_scene(const SyntheticScene& scene,
                                       Configuration config, uint64_t seed) {
  Rng rng(seed);
  return draw_sample(scene.frames, config, rng);
}

}  // namespace radrect::test
