#include "archrecon/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "archrecon/errors.hpp"
#include "archrecon/random.hpp"

namespace archrecon {
namespace {

std::string format_point(const Point& p) {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < p.size(); ++k) os << (k ? ", " : "") << p[k];
    os << ')';
    return os.str();
}

void require_dimension(const PointSet& points, std::size_t d, const char* what) {
    for (const auto& p : points)
        if (p.size() != d)
            throw ContractViolation(std::string(what) + ": expected dimension " + std::to_string(d) + ", got " +
                                    std::to_string(p.size()));
}

void require_within(const PointSet& front, const Point& ref_point) {
    require_dimension(front, ref_point.size(), "hypervolume");
    for (const auto& p : front)
        for (std::size_t k = 0; k < p.size(); ++k)
            if (p[k] > ref_point[k])
                throw ContractViolation("hypervolume: point " + format_point(p) + " lies beyond the reference point");
}

double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

/// Volume dominated by `points` (first d axes) below `ref`. Points strictly
/// inside the box on every axis only.
double sweep_volume(PointSet points, const Point& ref, std::size_t d) {
    if (points.empty()) return 0.0;
    if (d == 1) {
        double lo = ref[0];
        for (const auto& p : points) lo = std::min(lo, p[0]);
        return ref[0] - lo;
    }
    if (d == 2) {
        std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
            return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
        });
        double area = 0.0;
        double floor_y = ref[1];
        for (const auto& p : points) {
            if (p[1] < floor_y) {
                area += (ref[0] - p[0]) * (floor_y - p[1]);
                floor_y = p[1];
            }
        }
        return area;
    }
    const std::size_t axis = d - 1;
    std::sort(points.begin(), points.end(), [axis](const Point& a, const Point& b) { return a[axis] < b[axis]; });
    double volume = 0.0;
    PointSet slice;
    for (std::size_t i = 0; i < points.size(); ++i) {
        slice.push_back(Point(points[i].begin(), points[i].begin() + static_cast<std::ptrdiff_t>(axis)));
        const double next = i + 1 < points.size() ? points[i + 1][axis] : ref[axis];
        const double depth = next - points[i][axis];
        if (depth <= 0.0) continue;
        slice = nondominated_filter(slice);
        volume += sweep_volume(slice, ref, axis) * depth;
    }
    return volume;
}

}  // namespace

ReferenceFront build_reference_front(const std::vector<PointSet>& fronts) {
    ReferenceFront ref;
    ref.inputs = fronts.size();
    PointSet all;
    std::vector<std::size_t> owner;
    std::size_t d = 0;
    for (std::size_t i = 0; i < fronts.size(); ++i) {
        for (const auto& p : fronts[i]) {
            if (all.empty()) d = p.size();
            if (p.size() != d)
                throw ContractViolation("reference front: front " + std::to_string(i) + " has dimension " +
                                        std::to_string(p.size()) + ", expected " + std::to_string(d));
            all.push_back(p);
            owner.push_back(i);
        }
    }
    for (std::size_t idx : nondominated_indices(all)) {
        ref.points.push_back(all[idx]);
        ref.provenance.push_back(owner[idx]);
    }
    return ref;
}

Normalizer Normalizer::from(const PointSet& reference) {
    if (reference.empty()) throw ContractViolation("normalizer: empty reference front");
    const std::size_t d = reference.front().size();
    require_dimension(reference, d, "normalizer");
    Normalizer n;
    n.lower.assign(d, std::numeric_limits<double>::infinity());
    n.upper.assign(d, -std::numeric_limits<double>::infinity());
    for (const auto& p : reference)
        for (std::size_t k = 0; k < d; ++k) {
            n.lower[k] = std::min(n.lower[k], p[k]);
            n.upper[k] = std::max(n.upper[k], p[k]);
        }
    return n;
}

Point Normalizer::apply(const Point& p) const {
    if (p.size() != lower.size())
        throw ContractViolation("normalize: point has dimension " + std::to_string(p.size()) + ", expected " +
                                std::to_string(lower.size()));
    Point out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double span = upper[k] - lower[k];
        out[k] = span > 0.0 ? std::clamp((p[k] - lower[k]) / span, 0.0, 1.0) : 0.0;
    }
    return out;
}

PointSet normalize(const PointSet& front, const Normalizer& norm) {
    PointSet out;
    out.reserve(front.size());
    for (const auto& p : front) out.push_back(norm.apply(p));
    return out;
}

double hypervolume(const PointSet& front, const Point& ref_point) {
    if (ref_point.size() <= kExactHypervolumeMaxDimension) return hypervolume_exact(front, ref_point);
    return hypervolume_monte_carlo(front, ref_point);
}

double hypervolume_exact(const PointSet& front, const Point& ref_point) {
    require_within(front, ref_point);
    PointSet inside;
    for (const auto& p : front) {
        bool strictly = true;
        for (std::size_t k = 0; k < p.size(); ++k) strictly = strictly && p[k] < ref_point[k];
        if (strictly) inside.push_back(p);
    }
    if (inside.empty() || ref_point.empty()) return 0.0;
    return sweep_volume(nondominated_filter(inside), ref_point, ref_point.size());
}

namespace {

/// Answers "does any point weakly dominate s" by pruning on bounding boxes.
class DominanceTree {
public:
    explicit DominanceTree(PointSet points) : points_(std::move(points)), d_(points_.front().size()) {
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        build(0, order_.size(), 0);
    }

    bool covers(const double* s) const {
        std::size_t stack[64];
        std::size_t top = 0;
        stack[top++] = 0;
        while (top > 0) {
            const Node& node = nodes_[stack[--top]];
            bool reachable = true;
            bool whole = true;
            for (std::size_t k = 0; k < d_; ++k) {
                reachable = reachable && node.lo[k] <= s[k];
                whole = whole && node.hi[k] <= s[k];
            }
            if (!reachable) continue;
            if (whole) return true;
            if (node.left == kLeaf) {
                for (std::size_t i = node.begin; i < node.end; ++i) {
                    const Point& p = points_[order_[i]];
                    std::size_t k = 0;
                    while (k < d_ && p[k] <= s[k]) ++k;
                    if (k == d_) return true;
                }
                continue;
            }
            stack[top++] = node.right;
            stack[top++] = node.left;
        }
        return false;
    }

private:
    static constexpr std::size_t kLeaf = static_cast<std::size_t>(-1);
    static constexpr std::size_t kLeafSize = 8;

    struct Node {
        Point lo, hi;
        std::size_t begin = 0, end = 0;
        std::size_t left = kLeaf, right = kLeaf;
    };

    std::size_t build(std::size_t begin, std::size_t end, std::size_t depth) {
        const std::size_t id = nodes_.size();
        nodes_.push_back({});
        Point lo(d_, std::numeric_limits<double>::infinity());
        Point hi(d_, -std::numeric_limits<double>::infinity());
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t k = 0; k < d_; ++k) {
                lo[k] = std::min(lo[k], points_[order_[i]][k]);
                hi[k] = std::max(hi[k], points_[order_[i]][k]);
            }
        nodes_[id].lo = std::move(lo);
        nodes_[id].hi = std::move(hi);
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        if (end - begin > kLeafSize && depth < 30) {
            const std::size_t axis = depth % d_;
            const std::size_t mid = begin + (end - begin) / 2;
            std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                             order_.begin() + static_cast<std::ptrdiff_t>(mid),
                             order_.begin() + static_cast<std::ptrdiff_t>(end),
                             [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
            const std::size_t left = build(begin, mid, depth + 1);
            const std::size_t right = build(mid, end, depth + 1);
            nodes_[id].left = left;
            nodes_[id].right = right;
        }
        return id;
    }

    PointSet points_;
    std::size_t d_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace

double hypervolume_monte_carlo(const PointSet& front, const Point& ref_point, std::size_t samples,
                               std::uint64_t seed) {
    require_within(front, ref_point);
    const std::size_t d = ref_point.size();
    if (front.empty() || d == 0 || samples == 0) return 0.0;
    PointSet points = nondominated_filter(front);

    Point lower = ref_point;
    for (const auto& p : points)
        for (std::size_t k = 0; k < d; ++k) lower[k] = std::min(lower[k], p[k]);
    double box = 1.0;
    for (std::size_t k = 0; k < d; ++k) box *= ref_point[k] - lower[k];
    if (box <= 0.0) return 0.0;

    const DominanceTree tree(std::move(points));
    Rng rng(seed);
    Point s(d);
    std::size_t hits = 0;
    for (std::size_t j = 0; j < samples; ++j) {
        for (std::size_t k = 0; k < d; ++k) s[k] = rng.uniform(lower[k], ref_point[k]);
        if (tree.covers(s.data())) ++hits;
    }
    return box * static_cast<double>(hits) / static_cast<double>(samples);
}

double generational_distance(const PointSet& front, const PointSet& ref) {
    if (front.empty() || ref.empty()) throw ContractViolation("generational distance: empty front or reference");
    double sum = 0.0;
    for (const auto& a : front) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : ref) best = std::min(best, squared_distance(a, r));
        sum += best;
    }
    return std::sqrt(sum) / static_cast<double>(front.size());
}

double inverted_generational_distance(const PointSet& front, const PointSet& ref) {
    if (front.empty() || ref.empty()) throw ContractViolation("inverted generational distance: empty front or reference");
    return generational_distance(ref, front);
}

double additive_epsilon(const PointSet& front, const PointSet& ref) {
    if (front.empty() || ref.empty()) throw ContractViolation("additive epsilon: empty front or reference");
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : ref) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : front) {
            double shift = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < r.size(); ++k) shift = std::max(shift, a[k] - r[k]);
            best = std::min(best, shift);
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double spacing(const PointSet& front) {
    const std::size_t n = front.size();
    if (n <= 1) return 0.0;
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double manhattan = 0.0;
            for (std::size_t k = 0; k < front[i].size(); ++k) manhattan += std::abs(front[i][k] - front[j][k]);
            nearest[i] = std::min(nearest[i], manhattan);
        }
    const double mean = std::accumulate(nearest.begin(), nearest.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : nearest) ss += (mean - v) * (mean - v);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double contribution(const PointSet& front, const ReferenceFront& ref, std::size_t input) {
    if (input >= ref.inputs)
        throw ContractViolation("contribution: input " + std::to_string(input) + " is not among the reference inputs");
    if (ref.points.empty()) return 0.0;
    constexpr double kTolerance = 1e-9;
    std::size_t credited = 0;
    for (std::size_t i = 0; i < ref.points.size(); ++i) {
        if (ref.provenance[i] != input) continue;
        const Point& r = ref.points[i];
        const bool present = std::any_of(front.begin(), front.end(), [&](const Point& a) {
            if (a.size() != r.size()) return false;
            for (std::size_t k = 0; k < r.size(); ++k)
                if (std::abs(a[k] - r[k]) > kTolerance) return false;
            return true;
        });
        if (present) ++credited;
    }
    return static_cast<double>(credited) / static_cast<double>(ref.points.size());
}

IndicatorValues compute_indicators(const PointSet& front, const ReferenceFront& ref, std::size_t input,
                                   double ref_coordinate) {
    IndicatorValues v;
    v.contribution = contribution(front, ref, input);
    if (front.empty()) {
        v.gd = v.igd = v.eps = std::numeric_limits<double>::quiet_NaN();
        return v;
    }
    const Normalizer norm = Normalizer::from(ref.points);
    const PointSet f = normalize(front, norm);
    const PointSet r = normalize(ref.points, norm);
    v.hv = hypervolume(f, Point(norm.lower.size(), ref_coordinate));
    v.gd = generational_distance(f, r);
    v.igd = inverted_generational_distance(f, r);
    v.eps = additive_epsilon(f, r);
    v.spacing = spacing(f);
    return v;
}

}  // namespace archrecon
