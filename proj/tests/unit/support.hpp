#pragma once

// Shared fixtures and brute-force oracles. The oracles deliberately avoid the
// library's own helpers so that a bug cannot cancel itself out.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "archrecon/graph.hpp"
#include "archrecon/pareto.hpp"

namespace testsupport {

using archrecon::DependencyGraph;
using archrecon::Edge;
using archrecon::PackageGraph;
using archrecon::Point;
using archrecon::PointSet;
using archrecon::TypeNode;

/// Units named "p<k>.T<i>", all concrete unless listed in `abstract`.
inline DependencyGraph graph_of(int units, const std::vector<Edge>& edges, const std::vector<int>& origin = {},
                                const std::set<int>& abstract = {}) {
    std::vector<TypeNode> nodes;
    for (int i = 0; i < units; ++i) {
        const int pkg = origin.empty() ? 0 : origin[static_cast<std::size_t>(i)];
        nodes.push_back({i, "p" + std::to_string(pkg) + ".T" + std::to_string(i), "p" + std::to_string(pkg),
                         abstract.count(i) > 0});
    }
    return DependencyGraph(std::move(nodes), edges);
}

/// Package graph with packages 0..n-1 and the given package edges.
inline PackageGraph package_graph_of(int n, const std::vector<Edge>& edges) {
    PackageGraph pg;
    pg.out.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pg.packages.push_back(i);
    for (const auto& e : edges) pg.out[static_cast<std::size_t>(e.from)].push_back(e.to);
    for (auto& o : pg.out) {
        std::sort(o.begin(), o.end());
        o.erase(std::unique(o.begin(), o.end()), o.end());
    }
    return pg;
}

/// Heap-ordered tree: node i depends on 2i+1 and 2i+2.
inline PackageGraph binary_tree(int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int c : {2 * i + 1, 2 * i + 2})
            if (c < n) edges.push_back({i, c});
    return package_graph_of(n, edges);
}

/// Reachability matrix by repeated relaxation (Floyd-Warshall style).
inline std::vector<std::vector<bool>> closure(const PackageGraph& pg) {
    const std::size_t n = pg.node_count();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        r[i][i] = true;
        for (int j : pg.out[i]) r[i][static_cast<std::size_t>(j)] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (r[i][k] && r[k][j]) r[i][j] = true;
    return r;
}

/// An edge u->v is on a cycle iff v reaches u.
inline long long cyclic_edges_brute(const PackageGraph& pg) {
    const auto r = closure(pg);
    long long count = 0;
    for (std::size_t u = 0; u < pg.node_count(); ++u)
        for (int v : pg.out[u])
            if (r[static_cast<std::size_t>(v)][u]) ++count;
    return count;
}

inline double ccd_brute(const PackageGraph& pg) {
    const auto r = closure(pg);
    double ccd = 0;
    for (const auto& row : r) ccd += static_cast<double>(std::count(row.begin(), row.end(), true));
    return ccd;
}

inline bool dominates_brute(const Point& a, const Point& b) {
    bool better = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) better = true;
    }
    return better;
}

/// O(n^2) filter returning a sorted, duplicate-free set.
inline PointSet filter_brute(const PointSet& pts) {
    PointSet out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j) dominated = dominates_brute(pts[j], pts[i]);
        if (!dominated) out.push_back(pts[i]);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline PointSet sorted(PointSet s) {
    std::sort(s.begin(), s.end());
    return s;
}

inline PointSet random_points(std::mt19937_64& gen, std::size_t n, std::size_t d, int grid = 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointSet pts(n, Point(d));
    for (auto& p : pts)
        for (auto& x : p) x = grid > 0 ? std::floor(u(gen) * grid) / grid : u(gen);
    return pts;
}

/// Points on the simplex-like surface sum(x) = 1, hence mutually non-dominated.
inline PointSet random_front(std::mt19937_64& gen, std::size_t n, std::size_t d) {
    std::exponential_distribution<double> e(1.0);
    PointSet pts(n, Point(d));
    for (auto& p : pts) {
        double s = 0;
        for (auto& x : p) s += (x = e(gen));
        for (auto& x : p) x /= s;
    }
    return pts;
}

inline double euclid(const Point& a, const Point& b) {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

inline double gd_brute(const PointSet& front, const PointSet& ref) {
    double s = 0;
    for (const auto& a : front) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : ref) best = std::min(best, euclid(a, r));
        s += best * best;
    }
    return std::sqrt(s) / static_cast<double>(front.size());
}

inline double eps_brute(const PointSet& front, const PointSet& ref) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : ref) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : front) {
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, a[k] - r[k]);
            best = std::min(best, m);
        }
        worst = std::max(worst, best);
    }
    return worst;
}

inline double spacing_brute(const PointSet& front) {
    const std::size_t n = front.size();
    if (n <= 1) return 0.0;
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double m = 0;
            for (std::size_t k = 0; k < front[i].size(); ++k) m += std::abs(front[i][k] - front[j][k]);
            d[i] = std::min(d[i], m);
        }
    double mean = 0;
    for (double x : d) mean += x;
    mean /= static_cast<double>(n);
    double s = 0;
    for (double x : d) s += (mean - x) * (mean - x);
    return std::sqrt(s / static_cast<double>(n - 1));
}

/// Inclusion-exclusion over all subsets; only for tiny fronts.
inline double hv_inclusion_exclusion(const PointSet& front, const Point& ref) {
    const std::size_t n = front.size();
    double total = 0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        Point corner(ref.size(), -std::numeric_limits<double>::infinity());
        int bits = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) {
                ++bits;
                for (std::size_t k = 0; k < ref.size(); ++k) corner[k] = std::max(corner[k], front[i][k]);
            }
        double vol = 1;
        for (std::size_t k = 0; k < ref.size(); ++k) vol *= std::max(0.0, ref[k] - corner[k]);
        total += bits % 2 ? vol : -vol;
    }
    return total;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("archrecon_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testsupport
