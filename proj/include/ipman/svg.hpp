#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "ipman/matrix.hpp"
#include "ipman/region.hpp"

namespace ipman {

using Vertex = std::array<double, 2>;

// Boundary loops of a 2-D union of boxes, counter-clockwise, with collinear
// vertices merged.
std::vector<std::vector<Vertex>> region_outline(const Region& region);

// Standalone SVG: region outline, feasible points (muted), generated points
// (accent), axes and legend. Same input, same bytes.
std::string render_svg_scatter(const Matrix2& feasible, const Matrix2& generated,
                               const Region& region);
void emit_svg_scatter(const Matrix2& feasible, const Matrix2& generated, const Region& region,
                      const std::filesystem::path& path);

}  // namespace ipman
