#pragma once

#include <initializer_list>
#include <string>

#include "leafscope/manifold.hpp"

#ifndef LEAFSCOPE_SCENES
#define LEAFSCOPE_SCENES "scenes"
#endif

namespace test {

inline leafscope::MetricScene scene(const std::string& name) {
  return leafscope::build_scene_file(std::string(LEAFSCOPE_SCENES) + "/" + name + ".json");
}

inline leafscope::Vec vec(std::initializer_list<double> v) {
  leafscope::Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace test
