#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "archrecon/pareto.hpp"

namespace archrecon {

/// Union of several fronts reduced to its non-dominated subset. Each point
/// remembers which input produced it; a point produced by several inputs is
/// credited to the lowest input index, so callers order inputs by run id.
struct ReferenceFront {
    PointSet points;
    std::vector<std::size_t> provenance;
    std::size_t inputs = 0;

    std::size_t dimension() const noexcept { return points.empty() ? 0 : points.front().size(); }
};

ReferenceFront build_reference_front(const std::vector<PointSet>& fronts);

/// Per-axis bounds of a reference front; degenerate axes (min == max) map to 0.
struct Normalizer {
    std::vector<double> lower;
    std::vector<double> upper;

    static Normalizer from(const PointSet& reference);
    Point apply(const Point& p) const;
};

PointSet normalize(const PointSet& front, const Normalizer& norm);

constexpr double kDefaultReferenceCoordinate = 1.1;
constexpr std::size_t kMonteCarloSamples = 1'000'000;
constexpr std::size_t kExactHypervolumeMaxDimension = 4;

/// Dominated volume bounded by `ref_point`. Exact up to four dimensions,
/// Monte-Carlo with a fixed seed above that.
double hypervolume(const PointSet& front, const Point& ref_point);
double hypervolume_exact(const PointSet& front, const Point& ref_point);
double hypervolume_monte_carlo(const PointSet& front, const Point& ref_point,
                               std::size_t samples = kMonteCarloSamples, std::uint64_t seed = 0x4856);

/// sqrt(sum of squared nearest distances to ref) / |front|.
double generational_distance(const PointSet& front, const PointSet& ref);
double inverted_generational_distance(const PointSet& front, const PointSet& ref);
double additive_epsilon(const PointSet& front, const PointSet& ref);
/// Schott's spacing over Manhattan nearest-neighbour distances.
double spacing(const PointSet& front);
/// Share of reference points credited to input `input` that also appear in
/// `front` (coordinate-wise within 1e-9).
double contribution(const PointSet& front, const ReferenceFront& ref, std::size_t input);

struct IndicatorValues {
    double hv = 0.0;
    double gd = 0.0;
    double igd = 0.0;
    double eps = 0.0;
    double spacing = 0.0;
    double contribution = 0.0;
};

/// All six indicators of `front` in the space normalized by `ref`. An empty
/// front scores hv 0, contribution 0 and NaN for the distance indicators.
IndicatorValues compute_indicators(const PointSet& front, const ReferenceFront& ref, std::size_t input,
                                   double ref_coordinate = kDefaultReferenceCoordinate);

}  // namespace archrecon
