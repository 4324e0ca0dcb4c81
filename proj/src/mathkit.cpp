#include "bandit/mathkit.hpp"

#include <cmath>
#include <stdexcept>

namespace bandit {

double sigmoid(double z) {
    if (!std::isfinite(z)) throw std::invalid_argument("sigmoid: non-finite input");
    // exp(-|z|) branch keeps the evaluation finite for |z| > 700
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

LinkEval sigmoid_eval(double z) {
    const double v = sigmoid(z);
    const double s = v * (1.0 - v);
    return LinkEval{v, s, s * (1.0 - 2.0 * v)};
}

double sigmoid_slope(double z) {
    const double v = sigmoid(z);
    return v * (1.0 - v);
}

double softplus(double z) {
    if (!std::isfinite(z)) throw std::invalid_argument("softplus: non-finite input");
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double kappa(double S) {
    if (S < 0.0) throw std::invalid_argument("kappa: radius must be >= 0");
    // 1/mu'(z) = 2 + e^z + e^{-z}, maximized at |z| = S
    return 2.0 + std::exp(S) + std::exp(-S);
}

} // namespace bandit
