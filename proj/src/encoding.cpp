#include "archrecon/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "archrecon/errors.hpp"

namespace archrecon {

namespace {

int scaled_index(double gene, std::size_t count) {
    const auto n = static_cast<double>(count);
    const auto idx = static_cast<long long>(std::floor(gene * n));
    return static_cast<int>(std::clamp<long long>(idx, 0, static_cast<long long>(count) - 1));
}

std::set<int> wanted_layers(const PinTable& fixed) {
    std::set<int> wanted;
    for (std::size_t u = 0; u < fixed.unit_layer.size(); ++u)
        if (fixed.unit_layer[u] && !fixed.unit_package[u]) wanted.insert(*fixed.unit_layer[u]);
    return wanted;
}

}  // namespace

PinTable merge_freeze(const PinTable& pins, const FreezeMask& frozen) {
    PinTable merged = pins;
    if (frozen.package_layer.empty()) return merged;
    if (frozen.package_layer.size() != pins.package_layer.size())
        throw ContractViolation("freeze mask covers " + std::to_string(frozen.package_layer.size()) +
                                " packages, pin table " + std::to_string(pins.package_layer.size()));
    for (std::size_t k = 0; k < frozen.package_layer.size(); ++k) {
        if (!frozen.package_layer[k]) continue;
        const int layer = *frozen.package_layer[k];
        if (merged.package_layer[k] && *merged.package_layer[k] != layer) {
            throw PinConflictError("pin #" + std::to_string(merged.package_layer_source[k]) + " (package " +
                                       std::to_string(k) + " -> layer " +
                                       std::to_string(*merged.package_layer[k]) + ")",
                                   "frozen package " + std::to_string(k) + " -> layer " + std::to_string(layer),
                                   "pin conflicts with the scenario's frozen layer of package " +
                                       std::to_string(k));
        }
        merged.package_layer[k] = layer;
        merged.package_layer_source[k] = kFrozenSource;
    }
    std::set<int> wanted = wanted_layers(merged);
    std::size_t free_slots = 0;
    for (const auto& v : merged.package_layer) {
        if (v)
            wanted.erase(*v);
        else
            ++free_slots;
    }
    if (wanted.size() > free_slots)
        throw BindingError("layer pins cannot be satisfied with the scenario's frozen packages");
    return merged;
}

ArchitectureSolution decode(std::span<const double> genes, const PinTable& fixed, int layers) {
    const std::size_t units = fixed.unit_package.size();
    const std::size_t slots = fixed.package_layer.size();
    const auto L = static_cast<std::size_t>(layers);
    ArchitectureSolution sol;
    sol.package_to_layer.resize(slots);
    sol.unit_to_package.resize(units);

    bool any_layer_only = false;
    for (std::size_t u = 0; u < units; ++u)
        if (fixed.unit_layer[u] && !fixed.unit_package[u]) any_layer_only = true;

    for (std::size_t k = 0; k < slots; ++k)
        sol.package_to_layer[k] = fixed.package_layer[k] ? *fixed.package_layer[k] : scaled_index(genes[units + k], L);

    if (any_layer_only) {
        std::vector<int> per_layer(L, 0);
        for (int l : sol.package_to_layer) ++per_layer[static_cast<std::size_t>(l)];
        const std::set<int> wanted = wanted_layers(fixed);
        for (int layer : wanted) {
            if (per_layer[static_cast<std::size_t>(layer)] > 0) continue;
            for (std::size_t k = 0; k < slots; ++k) {
                if (fixed.package_layer[k]) continue;
                const int current = sol.package_to_layer[k];
                if (wanted.contains(current) && per_layer[static_cast<std::size_t>(current)] < 2) continue;
                --per_layer[static_cast<std::size_t>(current)];
                sol.package_to_layer[k] = layer;
                ++per_layer[static_cast<std::size_t>(layer)];
                break;
            }
        }
    }

    std::vector<std::vector<int>> by_layer;
    if (any_layer_only) {
        by_layer.resize(L);
        for (std::size_t k = 0; k < slots; ++k)
            by_layer[static_cast<std::size_t>(sol.package_to_layer[k])].push_back(static_cast<int>(k));
    }
    for (std::size_t u = 0; u < units; ++u) {
        if (fixed.unit_package[u]) {
            sol.unit_to_package[u] = *fixed.unit_package[u];
        } else if (fixed.unit_layer[u]) {
            const auto& candidates = by_layer[static_cast<std::size_t>(*fixed.unit_layer[u])];
            sol.unit_to_package[u] = candidates[static_cast<std::size_t>(scaled_index(genes[u], candidates.size()))];
        } else {
            sol.unit_to_package[u] = scaled_index(genes[u], slots);
        }
    }
    return sol;
}

ArchitectureSolution decode(const Genotype& g, const PinTable& pins, const FreezeMask& frozen, int layers) {
    if (g.size() != pins.unit_package.size() + pins.package_layer.size())
        throw ContractViolation("genotype length " + std::to_string(g.size()) + " does not match U + P = " +
                                std::to_string(pins.unit_package.size() + pins.package_layer.size()));
    if (frozen.empty()) return decode(g.genes, pins, layers);
    return decode(g.genes, merge_freeze(pins, frozen), layers);
}

Genotype encode(const ArchitectureSolution& sol, int layers) {
    const auto slots = static_cast<double>(sol.package_slots());
    Genotype g;
    g.genes.reserve(sol.unit_to_package.size() + sol.package_to_layer.size());
    for (int p : sol.unit_to_package) g.genes.push_back((p + 0.5) / slots);
    for (int l : sol.package_to_layer) g.genes.push_back((l + 0.5) / layers);
    return g;
}

void sbx_crossover_inplace(std::span<double> a, std::span<double> b, double rate, double distribution_index,
                           Rng& rng) {
    if (a.size() != b.size()) throw ContractViolation("sbx_crossover: parents differ in length");
    if (!rng.chance(rate)) return;
    constexpr double kEps = 1.0e-14;
    const double exponent = 1.0 / (distribution_index + 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!rng.chance(0.5)) continue;
        if (std::abs(a[i] - b[i]) <= kEps) continue;
        const double y1 = std::min(a[i], b[i]);
        const double y2 = std::max(a[i], b[i]);
        const double span = y2 - y1;
        const double u = rng.uniform();

        auto spread = [&](double beta) {
            const double alpha = 2.0 - std::pow(beta, -(distribution_index + 1.0));
            return u <= 1.0 / alpha ? std::pow(u * alpha, exponent) : std::pow(1.0 / (2.0 - u * alpha), exponent);
        };
        double c1 = 0.5 * ((y1 + y2) - spread(1.0 + 2.0 * y1 / span) * span);
        double c2 = 0.5 * ((y1 + y2) + spread(1.0 + 2.0 * (1.0 - y2) / span) * span);
        c1 = std::clamp(c1, 0.0, 1.0);
        c2 = std::clamp(c2, 0.0, 1.0);
        if (rng.chance(0.5)) std::swap(c1, c2);
        a[i] = c1;
        b[i] = c2;
    }
}

std::pair<Genotype, Genotype> sbx_crossover(const Genotype& a, const Genotype& b, double rate,
                                            double distribution_index, Rng& rng) {
    std::pair<Genotype, Genotype> children{a, b};
    sbx_crossover_inplace(children.first.genes, children.second.genes, rate, distribution_index, rng);
    return children;
}

void polynomial_mutation_inplace(std::span<double> genes, double rate, double distribution_index, Rng& rng) {
    const double exponent = 1.0 / (distribution_index + 1.0);
    for (double& y : genes) {
        if (!rng.chance(rate)) continue;
        const double u = rng.uniform();
        double delta = 0.0;
        if (u <= 0.5) {
            const double xy = 1.0 - y;
            const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, distribution_index + 1.0);
            delta = std::pow(val, exponent) - 1.0;
        } else {
            const double xy = y;
            const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, distribution_index + 1.0);
            delta = 1.0 - std::pow(val, exponent);
        }
        y = std::clamp(y + delta, 0.0, 1.0);
    }
}

Genotype polynomial_mutation(const Genotype& g, double rate, double distribution_index, Rng& rng) {
    Genotype out = g;
    polynomial_mutation_inplace(out.genes, rate, distribution_index, rng);
    return out;
}

}  // namespace archrecon
