#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "e3lab/env.hpp"
#include "e3lab/numeric.hpp"
#include "e3lab/policy_single.hpp"

namespace e3lab {

// Cumulative pseudo-regret split by source: exploration slots, exploitation
// slots, and computation/communication cost.
struct RegretComponents {
  double explore = 0.0;
  double exploit = 0.0;
  double comm = 0.0;

  double total() const { return explore + exploit + comm; }
};

struct LedgerPoint {
  std::int64_t t = 0;
  double total = 0.0;
  double explore = 0.0;
  double exploit = 0.0;
  double comm = 0.0;
  int epoch = 0;
};

// Append-only record of one run. Components only ever grow; every logged
// point stores total = explore + exploit + comm.
class RegretLedger {
 public:
  void add_slot(Phase phase, double deficit);
  void add_comm(double cost);

  const RegretComponents& current() const { return current_; }
  void log(std::int64_t t, int epoch);
  const std::vector<LedgerPoint>& points() const { return points_; }

 private:
  RegretComponents current_;
  std::vector<LedgerPoint> points_;
};

// sum_j gap_j * n_j(t) + C * m(t); the play counts must add up to t.
double pseudo_regret_single(std::span<const std::int64_t> counts, std::span<const double> gaps,
                            std::int64_t t, std::int64_t computations, double cost);

// mu** minus the mean reward collected by non-colliding players in one slot;
// deficits within kTieTolerance of zero are reported as exactly 0.
double slot_deficit(const BanditInstance& instance, double optimal_surplus,
                    std::span<const int> actions);

struct SlotRecord {
  std::vector<int> actions;
  Phase phase = Phase::Explore;
};

RegretComponents pseudo_regret_multi(const BanditInstance& instance, const GapSummary& gaps,
                                     std::span<const SlotRecord> history,
                                     std::span<const double> cost_events);

struct BoundSpec {
  int arms = 2;
  int players = 1;
  double delta_min = 0.1;
  double delta_max = 1.0;
  int gamma = 1;
  int gamma_beta = 1;
  // C for the single-player bounds, C(eps) for the multiplayer ones.
  double cost = 0.0;
  double delta = 0.5;
  double b0 = 1.0;
  LogBase base = LogBase::Two;
};

// N Dmax gamma log T + N C log T + 8 N Dmax
double bound_e3(double t, const BoundSpec& spec);
// N Dmax gamma_beta log T + N C log T + 16 N Dmax
double bound_e3ts(double t, const BoundSpec& spec);
// M N Dmax gamma log T + M N C(eps) log T + 8 M N Dmax
double bound_de3(double t, const BoundSpec& spec);
// M N Dmax gamma_beta log T + M N C(eps) log T + 16 M N Dmax
double bound_de3ts(double t, const BoundSpec& spec);

// A bound whose constant term overflows doubles: leading + 2^log2_constant.
struct LogFormBound {
  double leading = 0.0;
  double log2_constant = 0.0;

  double log2_value() const;
  // +inf when the constant term does not fit in a double.
  double value() const;
};

// (Dmin^2 / 4)^(-1/delta)
double l_delta(double delta_min, double delta);
// Unknown gap, gamma_t = log^delta t:
// N Dmax log^(1+delta) T + N C log T + N Dmax 2^l(delta)
LogFormBound bound_unknown(double t, const BoundSpec& spec);
// Unknown gap, multiplayer, C(eps) = 1/eps, eps_t = log^-delta t:
// M N Dmax log^(1+delta) T + M N log^(1+delta) T + M N b0 2^l(delta).
// b0 is not pinned down by the analysis; the default of 1 makes this a
// shape reference only.
LogFormBound bound_unknown_multi(double t, const BoundSpec& spec);

// 8 log T sum 1/gap_j + (1 + pi^2/3) sum gap_j over strictly positive gaps.
double bound_ucb1(double t, std::span<const double> gaps, LogBase base = LogBase::E);

// Hoeffding: P(S_t/t >= mu + a) <= exp(-2 a^2 t)
double chernoff_tail(double a, double t);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double beta_cdf(int a, int b, double x);
// P(Binomial(n, p) <= k) by direct summation.
double binom_cdf(int n, double p, int k);
// |F_beta(a,b)(x) - (1 - F_binom(a+b-1, x)(a-1))|
double cdf_identity_residual(int a, int b, double x);

}  // namespace e3lab
