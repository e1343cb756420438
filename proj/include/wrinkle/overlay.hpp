#pragma once

#include <string>

#include "json.hpp"
#include "wrinkle/grid.hpp"

namespace wrinkle {

/// SVG in pixel coordinates of the height map: height heat layer, bump
/// ellipses at 1 and 2 sigma, wrinkle segments colored by p (rejected ones
/// dashed) and numbered plan arrows. Missing report sections are skipped.
std::string render_overlay(const nlohmann::json& report, const FloatGrid& height);

}  // namespace wrinkle
