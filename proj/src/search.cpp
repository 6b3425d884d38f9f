#include "archrecon/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "archrecon/errors.hpp"
#include "archrecon/pareto.hpp"
#include "archrecon/random.hpp"

namespace archrecon {

std::string_view to_string(Algorithm algorithm) noexcept {
    switch (algorithm) {
        case Algorithm::nsga2: return "nsga2";
        case Algorithm::omopso: return "omopso_style";
        case Algorithm::gde3: return "gde3_style";
        case Algorithm::random: return "random";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view token) {
    if (token == "nsga2") return Algorithm::nsga2;
    if (token == "omopso_style" || token == "omopso") return Algorithm::omopso;
    if (token == "gde3_style" || token == "gde3") return Algorithm::gde3;
    if (token == "random") return Algorithm::random;
    throw ContractViolation("unknown algorithm '" + std::string(token) + "'");
}

void RunConfig::validate() const {
    auto fail = [](const std::string& what) { throw ContractViolation("invalid run config: " + what); };
    const int min_population = algorithm == Algorithm::gde3 ? 4 : 2;
    if (population < min_population) fail("population must be at least " + std::to_string(min_population));
    if (max_evaluations <= 0) fail("max_evaluations must be positive");
    if (snapshot_interval <= 0) fail("snapshot_interval must be positive");
    if (max_evaluations % snapshot_interval != 0) fail("snapshot_interval must divide max_evaluations");
    for (double rate : {mutation_rate, crossover_rate, de_crossover})
        if (!(rate >= 0.0 && rate <= 1.0)) fail("rates must lie in [0, 1]");
    if (!(mutation_di >= 0.0) || !(crossover_di >= 0.0)) fail("distribution indices must be non-negative");
    if (!(epsilon > 0.0)) fail("epsilon must be positive");
    if (!(de_scale > 0.0)) fail("differential scale must be positive");
}

Problem::Problem(DependencyGraph graph, ConceptualModel model, const PinTable& pins, FreezeMask frozen)
    : graph_(std::move(graph)), model_(std::move(model)), pins_(pins), frozen_(std::move(frozen)) {
    if (pins_.unit_package.size() != graph_.unit_count())
        throw ContractViolation("pin table does not match the graph's unit count");
    if (pins_.package_layer.empty()) throw ContractViolation("problem needs at least one package slot");
    fixed_ = merge_freeze(pins_, frozen_);
}

Problem::Problem(DependencyGraph graph, ConceptualModel model, const std::vector<Pin>& pins, FreezeMask frozen)
    : Problem(graph, model, bind_pins(pins, graph, model), std::move(frozen)) {}

bool Problem::honors_fixed(const ArchitectureSolution& sol) const {
    for (std::size_t u = 0; u < units(); ++u) {
        if (fixed_.unit_package[u] && sol.unit_to_package[u] != *fixed_.unit_package[u]) return false;
        if (fixed_.unit_layer[u] && sol.layer_of_unit(static_cast<int>(u)) != *fixed_.unit_layer[u]) return false;
    }
    for (std::size_t k = 0; k < packages(); ++k)
        if (fixed_.package_layer[k] && sol.package_to_layer[k] != *fixed_.package_layer[k]) return false;
    return true;
}

void Problem::set_initial_genotype(Genotype g) {
    if (g.size() != genome_length()) throw ContractViolation("initial genotype has the wrong length");
    initial_ = std::move(g);
}

std::vector<int> nondominated_ranks(const std::vector<ObjectiveVector>& points) {
    const std::size_t n = points.size();
    std::vector<int> rank(n, 0);
    std::vector<int> dominated_by_count(n, 0);
    std::vector<std::vector<int>> dominates_list(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(points[i], points[j])) {
                dominates_list[i].push_back(static_cast<int>(j));
                ++dominated_by_count[j];
            } else if (dominates(points[j], points[i])) {
                dominates_list[j].push_back(static_cast<int>(i));
                ++dominated_by_count[i];
            }
        }
    }
    std::vector<int> current;
    for (std::size_t i = 0; i < n; ++i)
        if (dominated_by_count[i] == 0) current.push_back(static_cast<int>(i));
    int level = 0;
    while (!current.empty()) {
        std::vector<int> next;
        for (int i : current) {
            rank[static_cast<std::size_t>(i)] = level;
            for (int j : dominates_list[static_cast<std::size_t>(i)])
                if (--dominated_by_count[static_cast<std::size_t>(j)] == 0) next.push_back(j);
        }
        current = std::move(next);
        ++level;
    }
    return rank;
}

std::vector<double> crowding_distances(const std::vector<ObjectiveVector>& points, const std::vector<int>& front) {
    const std::size_t n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
        return distance;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < kObjectiveCount; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return points[static_cast<std::size_t>(front[a])][m] < points[static_cast<std::size_t>(front[b])][m];
        });
        const double lo = points[static_cast<std::size_t>(front[order.front()])][m];
        const double hi = points[static_cast<std::size_t>(front[order.back()])][m];
        distance[order.front()] = distance[order.back()] = std::numeric_limits<double>::infinity();
        if (hi - lo <= 0.0) continue;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            const double gap = points[static_cast<std::size_t>(front[order[k + 1]])][m] -
                               points[static_cast<std::size_t>(front[order[k - 1]])][m];
            distance[order[k]] += gap / (hi - lo);
        }
    }
    return distance;
}

namespace {

using Genes = std::vector<double>;

/// Counts evaluations, maintains the shared archive and emits snapshots.
class Evaluator {
public:
    Evaluator(const Problem& problem, const RunConfig& config, const RunHooks& hooks, RunResult& result)
        : problem_(problem), config_(config), hooks_(hooks), result_(result) {}

    long long remaining() const noexcept { return config_.max_evaluations - count_; }

    ObjectiveVector operator()(const Genes& genes) {
        ArchitectureSolution sol = problem_.decode(genes);
        const ObjectiveVector v = problem_.evaluate(sol, config_.aggregation);
        ++count_;
        if (hooks_.on_evaluation) hooks_.on_evaluation(sol, v);
        archive_.insert(v, std::move(sol));
        if (count_ % config_.snapshot_interval == 0) pending_.push_back({count_, {}, archive_.objectives()});
        return v;
    }

    /// Attaches the current population to snapshots taken since the last commit.
    void commit(const std::vector<ObjectiveVector>& population) {
        for (auto& snap : pending_) {
            snap.population = population;
            if (hooks_.on_snapshot) hooks_.on_snapshot(snap);
            if (hooks_.retain_snapshots) result_.snapshots.push_back(std::move(snap));
        }
        pending_.clear();
    }

    void finish() {
        result_.evaluations = count_;
        result_.final_front.clear();
        for (const auto& e : archive_.entries()) result_.final_front.push_back({e.objectives, e.payload});
    }

private:
    const Problem& problem_;
    const RunConfig& config_;
    const RunHooks& hooks_;
    RunResult& result_;
    long long count_ = 0;
    ParetoArchive<ObjectiveVector, ArchitectureSolution> archive_;
    std::vector<Snapshot> pending_;
};

Genes random_genes(std::size_t n, Rng& rng) {
    Genes g(n);
    for (double& x : g) x = rng.uniform();
    return g;
}

Genes initial_genes(const Problem& problem, const RunConfig& config, std::size_t index, Rng& rng) {
    const auto& seed = problem.initial_genotype();
    if (!seed) return random_genes(problem.genome_length(), rng);
    Genes g = seed->genes;
    if (index > 0) polynomial_mutation_inplace(g, config.mutation_rate, config.mutation_di, rng);
    return g;
}

struct Individual {
    Genes genes;
    ObjectiveVector objectives{};
};

std::vector<ObjectiveVector> objectives_of(const std::vector<Individual>& pop) {
    std::vector<ObjectiveVector> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) out.push_back(ind.objectives);
    return out;
}

/// Evaluates up to `count` initial individuals within the remaining budget.
std::vector<Individual> initialize(const Problem& problem, const RunConfig& config, Evaluator& eval, Rng& rng) {
    std::vector<Individual> pop;
    for (std::size_t i = 0; i < static_cast<std::size_t>(config.population) && eval.remaining() > 0; ++i) {
        Individual ind{initial_genes(problem, config, i, rng), {}};
        ind.objectives = eval(ind.genes);
        pop.push_back(std::move(ind));
    }
    return pop;
}

/// Rank + crowding truncation of `pool` down to `size` members.
std::vector<Individual> truncate(std::vector<Individual> pool, std::size_t size, std::vector<int>* ranks_out,
                                 std::vector<double>* crowding_out) {
    const std::vector<ObjectiveVector> objs = objectives_of(pool);
    const std::vector<int> ranks = nondominated_ranks(objs);
    const int max_rank = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());

    std::vector<Individual> next;
    std::vector<int> next_ranks;
    std::vector<double> next_crowding;
    for (int level = 0; level <= max_rank && next.size() < size; ++level) {
        std::vector<int> front;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (ranks[i] == level) front.push_back(static_cast<int>(i));
        std::vector<double> crowd = crowding_distances(objs, front);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (next.size() + front.size() > size)
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
        for (std::size_t k : order) {
            if (next.size() >= size) break;
            next.push_back(std::move(pool[static_cast<std::size_t>(front[k])]));
            next_ranks.push_back(level);
            next_crowding.push_back(crowd[k]);
        }
    }
    if (ranks_out) *ranks_out = std::move(next_ranks);
    if (crowding_out) *crowding_out = std::move(next_crowding);
    return next;
}

void run_nsga2(const Problem& problem, const RunConfig& config, Evaluator& eval, Rng& rng) {
    std::vector<Individual> pop = initialize(problem, config, eval, rng);
    eval.commit(objectives_of(pop));
    if (pop.size() < 2) return;
    std::vector<int> ranks;
    std::vector<double> crowding;
    const std::size_t initial_size = pop.size();
    pop = truncate(std::move(pop), initial_size, &ranks, &crowding);

    auto tournament = [&]() -> const Individual& {
        const std::size_t a = static_cast<std::size_t>(rng.index(pop.size()));
        std::size_t b = static_cast<std::size_t>(rng.index(pop.size() - 1));
        if (b >= a) ++b;
        if (ranks[a] != ranks[b]) return pop[ranks[a] < ranks[b] ? a : b];
        if (crowding[a] != crowding[b]) return pop[crowding[a] > crowding[b] ? a : b];
        return pop[rng.chance(0.5) ? a : b];
    };

    const std::size_t n = static_cast<std::size_t>(config.population);
    while (eval.remaining() > 0) {
        std::vector<Individual> offspring;
        while (offspring.size() < n && eval.remaining() > 0) {
            Genes c1 = tournament().genes;
            Genes c2 = tournament().genes;
            sbx_crossover_inplace(c1, c2, config.crossover_rate, config.crossover_di, rng);
            polynomial_mutation_inplace(c1, config.mutation_rate, config.mutation_di, rng);
            polynomial_mutation_inplace(c2, config.mutation_rate, config.mutation_di, rng);
            for (Genes* child : {&c1, &c2}) {
                if (offspring.size() >= n || eval.remaining() == 0) break;
                Individual ind{std::move(*child), {}};
                ind.objectives = eval(ind.genes);
                offspring.push_back(std::move(ind));
            }
        }
        std::vector<Individual> pool = std::move(pop);
        for (auto& ind : offspring) pool.push_back(std::move(ind));
        pop = truncate(std::move(pool), n, &ranks, &crowding);
        eval.commit(objectives_of(pop));
    }
}

void run_gde3(const Problem& problem, const RunConfig& config, Evaluator& eval, Rng& rng) {
    std::vector<Individual> pop = initialize(problem, config, eval, rng);
    eval.commit(objectives_of(pop));
    const std::size_t n = pop.size();
    if (n < 4) return;
    const std::size_t dim = problem.genome_length();

    while (eval.remaining() > 0) {
        std::vector<Individual> next;
        std::size_t i = 0;
        for (; i < n && eval.remaining() > 0; ++i) {
            std::size_t r[3];
            for (int k = 0; k < 3; ++k) {
                std::size_t pick = 0;
                do {
                    pick = static_cast<std::size_t>(rng.index(n));
                } while (pick == i || (k > 0 && pick == r[0]) || (k > 1 && pick == r[1]));
                r[k] = pick;
            }
            const std::size_t forced = static_cast<std::size_t>(rng.index(dim));
            Individual trial{pop[i].genes, {}};
            for (std::size_t j = 0; j < dim; ++j) {
                if (j == forced || rng.chance(config.de_crossover)) {
                    const double v = pop[r[0]].genes[j] + config.de_scale * (pop[r[1]].genes[j] - pop[r[2]].genes[j]);
                    trial.genes[j] = std::clamp(v, 0.0, 1.0);
                }
            }
            trial.objectives = eval(trial.genes);
            if (dominates(trial.objectives, pop[i].objectives)) {
                next.push_back(std::move(trial));
            } else if (dominates(pop[i].objectives, trial.objectives)) {
                next.push_back(pop[i]);
            } else {
                next.push_back(pop[i]);
                next.push_back(std::move(trial));
            }
        }
        for (; i < n; ++i) next.push_back(pop[i]);
        pop = next.size() > n ? truncate(std::move(next), n, nullptr, nullptr) : std::move(next);
        eval.commit(objectives_of(pop));
    }
}

/// Leader archive for the swarm: epsilon-nondominated, crowding-bounded.
class LeaderArchive {
public:
    LeaderArchive(std::size_t capacity, ObjectiveVector epsilon) : capacity_(capacity), epsilon_(epsilon) {}

    void insert(const Individual& ind) {
        for (const auto& m : members_) {
            bool covered = true;
            for (std::size_t k = 0; k < kObjectiveCount; ++k) {
                if (m.objectives[k] - epsilon_[k] > ind.objectives[k]) {
                    covered = false;
                    break;
                }
            }
            if (covered) return;
        }
        std::erase_if(members_, [&](const Individual& m) { return dominates(ind.objectives, m.objectives); });
        members_.push_back(ind);
        while (members_.size() > capacity_) {
            const std::vector<double> crowd = crowding();
            const auto worst = std::min_element(crowd.begin(), crowd.end()) - crowd.begin();
            members_.erase(members_.begin() + worst);
        }
    }

    /// Binary tournament on crowding distance.
    const Individual& select(Rng& rng) const {
        if (members_.size() == 1) return members_.front();
        const std::vector<double> crowd = crowding();
        const std::size_t a = static_cast<std::size_t>(rng.index(members_.size()));
        const std::size_t b = static_cast<std::size_t>(rng.index(members_.size()));
        return members_[crowd[a] >= crowd[b] ? a : b];
    }

    bool empty() const noexcept { return members_.empty(); }

private:
    std::vector<double> crowding() const {
        std::vector<ObjectiveVector> objs;
        for (const auto& m : members_) objs.push_back(m.objectives);
        std::vector<int> all(objs.size());
        std::iota(all.begin(), all.end(), 0);
        return crowding_distances(objs, all);
    }

    std::size_t capacity_;
    ObjectiveVector epsilon_;
    std::vector<Individual> members_;
};

void run_omopso(const Problem& problem, const RunConfig& config, Evaluator& eval, Rng& rng) {
    std::vector<Individual> swarm = initialize(problem, config, eval, rng);
    eval.commit(objectives_of(swarm));
    if (swarm.empty()) return;
    const std::size_t n = swarm.size();
    const std::size_t dim = problem.genome_length();

    ObjectiveVector epsilon{};
    for (std::size_t k = 0; k < kObjectiveCount; ++k) {
        double lo = swarm.front().objectives[k];
        double hi = lo;
        for (const auto& p : swarm) {
            lo = std::min(lo, p.objectives[k]);
            hi = std::max(hi, p.objectives[k]);
        }
        const double scale = hi > lo ? hi - lo : std::max(1.0, std::abs(hi));
        epsilon[k] = config.epsilon * scale;
    }

    LeaderArchive leaders(static_cast<std::size_t>(config.population), epsilon);
    for (const auto& p : swarm) leaders.insert(p);
    std::vector<Individual> best = swarm;
    std::vector<Genes> velocity(n, Genes(dim, 0.0));

    while (eval.remaining() > 0) {
        for (std::size_t i = 0; i < n; ++i) {
            const Individual& guide = leaders.select(rng);
            const double r1 = rng.uniform();
            const double r2 = rng.uniform();
            const double c1 = rng.uniform(1.5, 2.0);
            const double c2 = rng.uniform(1.5, 2.0);
            const double w = rng.uniform(0.1, 0.5);
            Genes& x = swarm[i].genes;
            Genes& v = velocity[i];
            for (std::size_t j = 0; j < dim; ++j) {
                v[j] = w * v[j] + c1 * r1 * (best[i].genes[j] - x[j]) + c2 * r2 * (guide.genes[j] - x[j]);
                x[j] += v[j];
                if (x[j] < 0.0) {
                    x[j] = 0.0;
                    v[j] = -v[j];
                } else if (x[j] > 1.0) {
                    x[j] = 1.0;
                    v[j] = -v[j];
                }
            }
            // Turbulence on one third of the swarm.
            if (i % 3 == 0) polynomial_mutation_inplace(x, config.mutation_rate, config.mutation_di, rng);
        }
        for (std::size_t i = 0; i < n && eval.remaining() > 0; ++i) {
            swarm[i].objectives = eval(swarm[i].genes);
            leaders.insert(swarm[i]);
            if (!dominates(best[i].objectives, swarm[i].objectives)) best[i] = swarm[i];
        }
        eval.commit(objectives_of(swarm));
    }
}

void run_random(const Problem& problem, const RunConfig& config, Evaluator& eval, Rng& rng) {
    while (eval.remaining() > 0) {
        std::vector<ObjectiveVector> batch;
        for (int i = 0; i < config.population && eval.remaining() > 0; ++i)
            batch.push_back(eval(random_genes(problem.genome_length(), rng)));
        eval.commit(batch);
    }
}

}  // namespace

RunResult run(const Problem& problem, const RunConfig& config, const RunHooks& hooks) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    result.config = config;
    Evaluator eval(problem, config, hooks, result);
    Rng rng(config.seed);
    switch (config.algorithm) {
        case Algorithm::nsga2: run_nsga2(problem, config, eval, rng); break;
        case Algorithm::omopso: run_omopso(problem, config, eval, rng); break;
        case Algorithm::gde3: run_gde3(problem, config, eval, rng); break;
        case Algorithm::random: run_random(problem, config, eval, rng); break;
    }
    eval.finish();
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace archrecon
