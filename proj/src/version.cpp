#include <fftw3.h>

#include <string>

#include <Eigen/Core>

#include "leafscope/io.hpp"

namespace leafscope {

nlohmann::json build_versions() {
  return {{"leafscope", std::string(kVersion)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", std::string(fftw_version)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", std::string(__VERSION__)}};
}

}  // namespace leafscope
