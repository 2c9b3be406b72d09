#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace qatsp {

struct City {
    double x = 0.0; // in [0,1)
    double y = 0.0; // in [0,1)
};

// A symmetric Euclidean TSP instance on the unit square. Immutable after
// construction; the distance matrix is always derived from the coordinates.
struct TspInstance {
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<City> cities;
    std::vector<double> dist; // row-major n*n, dist[i*n+j]

    double d(int i, int j) const { return dist[static_cast<std::size_t>(i) * n + j]; }
    double max_distance() const;

    // Builds an instance from explicit coordinates (validates n >= 3 and
    // coordinates in [0,1)); distances are computed here.
    static TspInstance from_cities(std::vector<City> cities, std::uint64_t seed = 0);
};

// Deterministic instance generation: coordinates are drawn i.i.d. uniform on
// [0,1)^2 from mt19937_64(seed), x before y, city 0 first.
TspInstance generate_instance(int n, std::uint64_t seed);

// Instance file: JSON with fields n, seed, cities=[[x,y],...]. Distances are
// never serialized; load recomputes them.
void save_instance(const TspInstance& inst, const std::filesystem::path& path);
TspInstance load_instance(const std::filesystem::path& path);

// All other cities ordered by ascending distance from `city`, ties broken by
// lower city index.
std::vector<int> neighbor_ranks(const TspInstance& inst, int city);

struct Tour {
    std::vector<int> order; // permutation of 0..n-1, interpreted cyclically
    double length = 0.0;    // includes the closing edge
};

double tour_length(const std::vector<int>& order, const TspInstance& inst);
Tour make_tour(std::vector<int> order, const TspInstance& inst);

// Canonical form of a cyclic order: starts at city 0, direction chosen so the
// second city is smaller than the last. Used to compare tours as undirected
// cycles.
std::vector<int> canonical_cycle(std::vector<int> order);

} // namespace qatsp
