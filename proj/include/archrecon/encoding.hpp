#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "archrecon/graph.hpp"
#include "archrecon/random.hpp"

namespace archrecon {

/// Random-key genotype: U unit genes followed by P package genes, all in [0,1].
struct Genotype {
    std::vector<double> genes;

    std::size_t size() const noexcept { return genes.size(); }
    bool operator==(const Genotype&) const = default;
};

/// Package->layer assignments fixed by a scenario rather than by the architect.
struct FreezeMask {
    std::vector<std::optional<int>> package_layer;

    bool empty() const noexcept {
        for (const auto& v : package_layer)
            if (v) return false;
        return true;
    }
};

inline constexpr int kFrozenSource = -2;

/// Folds a freeze mask into a pin table. Frozen package layers get source
/// kFrozenSource. Throws PinConflictError when a pin disagrees with the mask
/// and BindingError when layer-only unit pins can no longer be satisfied.
PinTable merge_freeze(const PinTable& pins, const FreezeMask& frozen);

/// Maps genes to an assignment by scaling and flooring, then applies the
/// fixed entries. Units pinned only to a layer are placed in a package of that
/// layer; if no package sits in a wanted layer, the lowest-index package that
/// is neither fixed nor needed elsewhere is moved there first.
ArchitectureSolution decode(std::span<const double> genes, const PinTable& fixed, int layers);
ArchitectureSolution decode(const Genotype& g, const PinTable& pins, const FreezeMask& frozen, int layers);

/// Inverse of decode for unconstrained entries: gene at the centre of the
/// cell that floors to each index.
Genotype encode(const ArchitectureSolution& sol, int layers);

std::pair<Genotype, Genotype> sbx_crossover(const Genotype& a, const Genotype& b, double rate,
                                            double distribution_index, Rng& rng);

Genotype polynomial_mutation(const Genotype& g, double rate, double distribution_index, Rng& rng);

/// In-place variants used by the optimizers.
void sbx_crossover_inplace(std::span<double> a, std::span<double> b, double rate, double distribution_index,
                           Rng& rng);
void polynomial_mutation_inplace(std::span<double> genes, double rate, double distribution_index, Rng& rng);

}  // namespace archrecon
