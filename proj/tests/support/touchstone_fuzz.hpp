#pragma once

#include <random>
#include <string>

namespace fuzz {

/// Well-formed two-port file with random format, unit, comments and values.
std::string random_touchstone(std::mt19937_64& rng);

/// Applies a few random byte and token level edits to `text`.
std::string mutate(std::string text, std::mt19937_64& rng);

}  // namespace fuzz
