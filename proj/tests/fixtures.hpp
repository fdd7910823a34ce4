#pragma once

#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "accum/freq_data.hpp"
#include "accum/mixture.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(ACCUM_DATA_DIR) + "/" + name; }

inline accum::FrequencyCounts plant() {
    std::ifstream in(data_path("plant.txt"));
    if (!in) throw std::runtime_error("missing plant fixture");
    return accum::parse_counts(in, accum::InputFormat::pairs);
}

/// Published mixing distribution for the plant data (3 decimals).
inline accum::MixingDistribution table1_q() {
    return accum::MixingDistribution::normalized({{0.864, 0.475},
                                                  {3.554, 0.260},
                                                  {7.412, 0.158},
                                                  {15.306, 0.074},
                                                  {30.564, 0.010},
                                                  {41.892, 0.017},
                                                  {66.416, 0.005}});
}

inline const std::vector<double> kTable1Support{0.864, 3.554, 7.412, 15.306, 30.564, 41.892, 66.416};
inline const std::vector<double> kTable1Weights{0.475, 0.260, 0.158, 0.074, 0.010, 0.017, 0.005};

/// 1..5 atoms, log-uniform rates on [0.05, 50], Dirichlet(1) weights.
inline accum::MixingDistribution random_q(std::mt19937_64& rng, bool allow_zero = false) {
    std::uniform_int_distribution<int> k_dist(1, 5);
    std::uniform_real_distribution<double> lg(std::log(0.05), std::log(50.0));
    std::exponential_distribution<double> ex(1.0);
    std::vector<accum::MixingDistribution::Atom> atoms;
    const int k = k_dist(rng);
    for (int i = 0; i < k; ++i) atoms.push_back({std::exp(lg(rng)), ex(rng) + 1e-3});
    if (allow_zero && std::bernoulli_distribution(0.5)(rng)) atoms.push_back({0.0, ex(rng) + 1e-3});
    return accum::MixingDistribution::normalized(atoms);
}

}  // namespace fixtures
