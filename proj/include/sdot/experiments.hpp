#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdot/eot_solver.hpp"
#include "sdot/functionals.hpp"
#include "sdot/rate_fit.hpp"

namespace sdot {

enum class FunctionalKind { kPairing, kL2, kDualNorm, kPotentialGap };

FunctionalKind parse_functional_kind(const std::string& name);
std::string functional_name(FunctionalKind kind);

struct SweepOptions {
  FunctionalKind kind = FunctionalKind::kPairing;
  std::vector<TestField> fields;  // one field for pairing, the family for dual_norm
  FitRules rules;
  double entropic_tol = 0.0;      // 0: 1e-15 in 1D, 1e-12 in 2D
  double semidual_tol = 1e-14;
};

struct SweepPoint {
  double eps = 0.0;
  double value = 0.0;        // signed functional value
  double noise_floor = 0.0;  // estimated absolute error of value
  bool valid = true;
  int iterations = 0;
  double residual = 0.0;
  std::string note;
};

struct SweepResult {
  FunctionalKind kind = FunctionalKind::kPairing;
  std::vector<SweepPoint> points;
  RateFit fit;
  Vector z0;
};

// eps_grid strictly decreasing in (0, 1) with at least 6 points. Each
// entropic solve is warm-started from the previous eps (the first from z0).
SweepResult rate_sweep(const SourceMeasure& source, const DiscreteMeasure& target,
                       const std::vector<double>& eps_grid, const SweepOptions& opts);

struct ConstantCheck {
  double eps = 0.0;
  double measured = 0.0;   // <id, T^eps - T^0> / eps^2
  double predicted = 0.0;  // -(pi^2 / 24) sum_{i<j} facet mass / |y_i - y_j|
  double relative_gap = 0.0;
};

ConstantCheck constant_check(const SourceMeasure& source, const DiscreteMeasure& target, double eps_small);

// Integral over [0, 1] on the canonical two-atom instance (T^eps = tanh(2x / eps)):
//   power: x^alpha (tanh(2x / eps) - 1), alpha in [0, 1]
//   l2:    (tanh(2x / eps) - 1)^2
enum class OracleKind { kPower, kL2 };
double oracle_tanh(double eps, OracleKind kind, double alpha = 1.0);
// eps -> 0 limit of eps^-(1 + alpha) oracle_tanh (power) or eps^-1 oracle_tanh (l2).
double oracle_tanh_limit(OracleKind kind, double alpha = 1.0);
// The same limits in closed form: -2 Gamma(1 + alpha) eta(1 + alpha) / 4^(1 + alpha)
// with eta the Dirichlet eta function, and log(2) - 1/2 for l2.
double oracle_tanh_limit_closed(OracleKind kind, double alpha = 1.0);

struct CltOptions {
  std::vector<std::size_t> n_list{100, 400, 1600};
  double eps_exponent = 0.3;  // eps_n = n^-eps_exponent
  std::size_t trials = 500;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  double alpha = 1.0;    // Holder exponent used in the eps rule check
};

struct CltStats {
  std::size_t n = 0;
  double eps = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double gap_mean = 0.0;
  double gap_sd = 0.0;
  std::size_t resampled = 0;
  std::vector<double> statistic;  // sqrt(n) <phi, T_n^eps - T^0> per trial
  std::vector<double> gap;        // sqrt(n) <phi, T_n^eps - T_n^0> per trial
};

struct CltResult {
  std::vector<CltStats> per_n;
  std::vector<std::string> warnings;
};

// Trial t at the k-th sample size uses seed + t + k * 1000003; failed trials
// are redrawn with further offsets and counted.
CltResult clt_sim(const SourceMeasure& source, const DiscreteMeasure& target, const TestField& phi,
                  const CltOptions& opts);

}  // namespace sdot
