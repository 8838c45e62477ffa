#pragma once

#include <string>
#include <vector>

namespace fhn {

/// Ordered points of a bifurcation curve plus what ended the trace.
template <class Point>
struct CurveBranch {
    std::string label;
    std::vector<Point> points;
    std::string termination;  // empty when the requested extent was covered

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

}  // namespace fhn
