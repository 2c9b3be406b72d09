#include "qatsp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "qatsp/errors.hpp"
#include "qatsp/rng.hpp"

namespace qatsp {

namespace {

std::vector<double> distance_matrix(const std::vector<City>& cities) {
    const int n = static_cast<int>(cities.size());
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = cities[i].x - cities[j].x;
            const double dy = cities[i].y - cities[j].y;
            const double dij = std::sqrt(dx * dx + dy * dy);
            d[static_cast<std::size_t>(i) * n + j] = dij;
            d[static_cast<std::size_t>(j) * n + i] = dij;
        }
    }
    return d;
}

} // namespace

double TspInstance::max_distance() const {
    return *std::max_element(dist.begin(), dist.end());
}

TspInstance TspInstance::from_cities(std::vector<City> cities, std::uint64_t seed) {
    const int n = static_cast<int>(cities.size());
    if (n < 3)
        throw std::invalid_argument("invalid instance: need at least 3 cities, got " +
                                    std::to_string(n));
    for (int i = 0; i < n; ++i) {
        const City& c = cities[i];
        if (!(c.x >= 0.0 && c.x < 1.0 && c.y >= 0.0 && c.y < 1.0))
            throw std::invalid_argument("invalid instance: city " + std::to_string(i) +
                                        " outside the unit square [0,1)^2");
    }
    TspInstance inst;
    inst.n = n;
    inst.seed = seed;
    inst.cities = std::move(cities);
    inst.dist = distance_matrix(inst.cities);
    return inst;
}

TspInstance generate_instance(int n, std::uint64_t seed) {
    if (n < 3)
        throw std::invalid_argument("invalid instance: need at least 3 cities, got " +
                                    std::to_string(n));
    rng64 gen(seed);
    std::vector<City> cities(n);
    for (int i = 0; i < n; ++i) {
        cities[i].x = uniform_double(gen);
        cities[i].y = uniform_double(gen);
    }
    return TspInstance::from_cities(std::move(cities), seed);
}

void save_instance(const TspInstance& inst, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "qatsp-instance/1";
    j["n"] = inst.n;
    j["seed"] = inst.seed;
    auto& cities = j["cities"] = nlohmann::json::array();
    for (const City& c : inst.cities) cities.push_back({c.x, c.y});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

TspInstance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("instance file " + path.string() + ": not valid JSON: " + e.what());
    }
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw parse_error("instance file " + path.string() + ": missing or non-integer field \"n\"");
    if (!j.contains("seed") || !j["seed"].is_number())
        throw parse_error("instance file " + path.string() + ": missing or non-numeric field \"seed\"");
    if (!j.contains("cities") || !j["cities"].is_array())
        throw parse_error("instance file " + path.string() + ": missing or non-array field \"cities\"");

    const int n = j["n"].get<int>();
    const auto& arr = j["cities"];
    if (static_cast<int>(arr.size()) != n)
        throw parse_error("instance file " + path.string() + ": field \"cities\" has " +
                          std::to_string(arr.size()) + " entries, expected n=" + std::to_string(n));
    std::vector<City> cities;
    cities.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& c = arr[i];
        if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
            throw parse_error("instance file " + path.string() + ": field \"cities\"[" +
                              std::to_string(i) + "] is not an [x,y] pair");
        cities.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    try {
        return TspInstance::from_cities(std::move(cities), j["seed"].get<std::uint64_t>());
    } catch (const std::invalid_argument& e) {
        throw parse_error("instance file " + path.string() + ": " + e.what());
    }
}

std::vector<int> neighbor_ranks(const TspInstance& inst, int city) {
    if (city < 0 || city >= inst.n)
        throw std::invalid_argument("city index out of range: " + std::to_string(city));
    std::vector<int> others;
    others.reserve(inst.n - 1);
    for (int j = 0; j < inst.n; ++j)
        if (j != city) others.push_back(j);
    std::stable_sort(others.begin(), others.end(), [&](int a, int b) {
        const double da = inst.d(city, a), db = inst.d(city, b);
        if (da != db) return da < db;
        return a < b;
    });
    return others;
}

double tour_length(const std::vector<int>& order, const TspInstance& inst) {
    double len = 0.0;
    const int n = static_cast<int>(order.size());
    for (int k = 0; k < n; ++k) len += inst.d(order[k], order[(k + 1) % n]);
    return len;
}

Tour make_tour(std::vector<int> order, const TspInstance& inst) {
    Tour t;
    t.length = tour_length(order, inst);
    t.order = std::move(order);
    return t;
}

std::vector<int> canonical_cycle(std::vector<int> order) {
    const int n = static_cast<int>(order.size());
    const auto it = std::find(order.begin(), order.end(),
                              *std::min_element(order.begin(), order.end()));
    std::rotate(order.begin(), it, order.end());
    if (n > 2 && order[1] > order[n - 1])
        std::reverse(order.begin() + 1, order.end());
    return order;
}

} // namespace qatsp
