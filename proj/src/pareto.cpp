#include "archrecon/pareto.hpp"

#include <numeric>

namespace archrecon {

std::vector<std::size_t> nondominated_indices(const PointSet& points) {
    if (points.empty()) return {};
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim) throw ContractViolation("nondominated_filter: points differ in dimension");

    // A dominator always precedes its victim in lexicographic order, so one
    // forward pass against the survivors so far is enough.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        const Point& p = points[idx];
        if (!kept.empty() && points[kept.back()] == p) continue;
        bool dominated = false;
        for (std::size_t k : kept) {
            if (dominates(points[k], p)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

PointSet nondominated_filter(const PointSet& points) {
    PointSet result;
    for (std::size_t idx : nondominated_indices(points)) result.push_back(points[idx]);
    return result;
}

}  // namespace archrecon
