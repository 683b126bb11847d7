#pragma once

#include <vector>

#include "darboux/operators.hpp"

namespace darboux {

// Sturm-Liouville shooting on the real configurations 0 < x < 1 with all exponent
// parameters zero (twist -1). Real eigenvalues are detected as zeros of the
// log-branch coefficient of the continued regular solution:
//   P1: regular at 0, continued along [0,x], log coefficient at x
//   P2: regular at 1, continued along [x,1], log coefficient at x
//   P3: regular at 0, continued to 1 above and below x; log coefficient of f+ + f-
enum class SlProblem { P1, P2, P3 };

struct SlConfig {
    OdeTols ode{};
    double grid_step = 0.25;     // bracketing grid in Lambda
    double refine_tol = 1e-10;   // bisection width
    int max_bisect = 80;
};

// Normalized log-branch coefficient (real for real Lambda up to rounding).
double shoot(SlProblem problem, double x, double lambda, const SlConfig& cfg = SlConfig{});

// All bracketed roots in [lo, hi], sorted increasing, |mismatch| < 1e-9 at the roots.
std::vector<double> real_spectrum(SlProblem problem, double x, double lo, double hi,
                                  const SlConfig& cfg = SlConfig{});

// The a = 0 operator at position x (twist -1).
FuchsianOperator takhtajan_operator(double x);

}  // namespace darboux
