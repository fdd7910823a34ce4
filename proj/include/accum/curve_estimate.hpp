#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace accum {

enum class Estimator { good_toulmin, likelihood };

inline const char* to_string(Estimator e) {
    return e == Estimator::good_toulmin ? "good_toulmin" : "likelihood";
}

/// Chao's richness functional phi_plus + phi_1^2 / (2 phi_2). When phi_2 = 0
/// and phi_1 > 0 the bias-corrected phi_plus + phi_1 (phi_1 - 1) / 2 is used
/// and `degenerate` is set.
struct ChaoValue {
    double value = 0.0;
    bool degenerate = false;
};

inline ChaoValue chao_functional(double phi_1, double phi_2, double phi_plus) {
    if (phi_1 == 0.0) return {phi_plus, false};
    if (phi_2 == 0.0) return {phi_plus + phi_1 * (phi_1 - 1.0) / 2.0, true};
    return {phi_plus + phi_1 * phi_1 / (2.0 * phi_2), false};
}

/// `phi[0]` holds phi_1, `phi[1]` phi_2; missing entries count as zero.
inline ChaoValue chao_functional(std::span<const double> phi, double phi_plus) {
    const double p1 = phi.size() > 0 ? phi[0] : 0.0;
    const double p2 = phi.size() > 1 ? phi[1] : 0.0;
    return chao_functional(p1, p2, phi_plus);
}

/// Expected frequency counts phi_j(t) over a grid of efforts.
struct CurveEstimate {
    Estimator estimator = Estimator::likelihood;
    std::vector<double> t_grid;
    int j_max = 0;
    /// phi[i][j - 1] is phi_j(t_grid[i]).
    std::vector<std::vector<double>> phi;
    std::vector<double> phi_plus;
    /// Richness functionals by name; currently "chao".
    std::map<std::string, std::vector<double>> functionals;
    /// True where every phi_j(t), j <= j_max, is nonnegative.
    std::vector<bool> admissible;
};

}  // namespace accum
