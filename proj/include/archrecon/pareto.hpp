#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "archrecon/errors.hpp"

namespace archrecon {

using Point = std::vector<double>;
using PointSet = std::vector<Point>;

/// a <= b on every axis and a < b on at least one.
inline bool dominates(std::span<const double> a, std::span<const double> b) noexcept {
    bool strictly = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strictly = true;
    }
    return strictly;
}

inline bool weakly_dominates(std::span<const double> a, std::span<const double> b) noexcept {
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] > b[k]) return false;
    return true;
}

/// Indices of the non-dominated points; exact duplicates are represented by
/// their first occurrence. Result is in ascending index order.
std::vector<std::size_t> nondominated_indices(const PointSet& points);

/// The non-dominated subset, duplicates collapsed, in input order.
PointSet nondominated_filter(const PointSet& points);

/// Unbounded archive of mutually non-dominated points with an attached payload.
template <typename Objectives, typename Payload>
class ParetoArchive {
public:
    struct Entry {
        Objectives objectives;
        Payload payload;
    };

    /// Adds the point unless an existing member weakly dominates it. Members
    /// the new point dominates are evicted. Returns whether it was added.
    bool insert(const Objectives& v, const Payload& payload) {
        for (const auto& e : entries_)
            if (weakly_dominates(e.objectives, v)) return false;
        std::erase_if(entries_, [&](const Entry& e) { return dominates(v, e.objectives); });
        entries_.push_back({v, payload});
        return true;
    }

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    std::vector<Objectives> objectives() const {
        std::vector<Objectives> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.objectives);
        return out;
    }

private:
    std::vector<Entry> entries_;
};

}  // namespace archrecon
