#pragma once

#include <random>
#include <string>

#include "starwm/observation.hpp"

namespace starwm::test {

std::string fixture(const std::string& relative);
std::string read_file(const std::string& path);

/// Valid random observation on Flat64 (88x96) whose text form round-trips.
Observation random_observation(std::mt19937_64& rng);

int uniform(std::mt19937_64& rng, int lo, int hi);
double uniform_real(std::mt19937_64& rng, double lo, double hi);

}  // namespace starwm::test
