#pragma once

namespace bandit {

// Sigmoid link evaluated together with its first two derivatives.
// slope = value * (1 - value) is the Bernoulli variance at that mean;
// |curvature| <= slope (self-concordance) and slope <= 1/4.
struct LinkEval {
    double value;
    double slope;
    double curvature;
};

LinkEval sigmoid_eval(double z);
double sigmoid(double z);
double sigmoid_slope(double z);

// log(1 + exp(z)) without overflow
double softplus(double z);

// Worst-case inverse slope sup_{|z| <= S} 1 / mu'(z) = 2 + e^S + e^{-S}.
double kappa(double S);

} // namespace bandit
