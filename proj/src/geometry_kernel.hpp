#pragma once

// Shared curvature evaluation for graphs over a grid, with reusable buffers.

#include "dualflow/sphere_grid.hpp"

#include <span>
#include <vector>

namespace dualflow::detail {

struct GeometryWorkspace {
    Grid grid;
    std::vector<double> cot, u1, u2, th, thd, v, phi1, kprof, kang, ext;

    explicit GeometryWorkspace(const Grid& g);
    // sign = +1: hyperbolic graph (warp sinh); -1: de Sitter graph (warp cosh).
    void compute(std::span<const double> u, double sign);
};

}  // namespace dualflow::detail

namespace dualflow {
class CurvatureFunction;
struct GraphGeometry;
}  // namespace dualflow

namespace dualflow::detail {

GraphGeometry assemble_geometry(const GeometryWorkspace& ws, std::span<const double> u, double sign,
                                const CurvatureFunction* F);

}  // namespace dualflow::detail
