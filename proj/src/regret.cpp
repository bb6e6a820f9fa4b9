#include "e3lab/regret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace e3lab {

void RegretLedger::add_slot(Phase phase, double deficit) {
  if (phase == Phase::Explore) {
    current_.explore += deficit;
  } else {
    current_.exploit += deficit;
  }
}

void RegretLedger::add_comm(double cost) { current_.comm += cost; }

void RegretLedger::log(std::int64_t t, int epoch) {
  if (!points_.empty() && points_.back().t == t) return;
  points_.push_back(LedgerPoint{t, current_.total(), current_.explore, current_.exploit,
                                current_.comm, epoch});
}

double pseudo_regret_single(std::span<const std::int64_t> counts, std::span<const double> gaps,
                            std::int64_t t, std::int64_t computations, double cost) {
  if (counts.size() != gaps.size()) throw std::invalid_argument("counts and gaps differ in length");
  const auto plays = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  if (plays != t) {
    throw std::invalid_argument("play counts sum to " + std::to_string(plays) + ", expected " +
                                std::to_string(t));
  }
  double r = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) r += gaps[j] * static_cast<double>(counts[j]);
  return r + cost * static_cast<double>(computations);
}

double slot_deficit(const BanditInstance& instance, double optimal_surplus,
                    std::span<const int> actions) {
  double collected = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const int a = actions[i];
    if (a == kNoAction) continue;
    if (std::count(actions.begin(), actions.end(), a) == 1) {
      collected += instance.mean(static_cast<int>(i), a);
    }
  }
  const double d = optimal_surplus - collected;
  return d <= kTieTolerance ? 0.0 : d;
}

RegretComponents pseudo_regret_multi(const BanditInstance& instance, const GapSummary& gaps,
                                     std::span<const SlotRecord> history,
                                     std::span<const double> cost_events) {
  RegretComponents r;
  for (const auto& slot : history) {
    const double d = slot_deficit(instance, gaps.optimal_surplus, slot.actions);
    (slot.phase == Phase::Explore ? r.explore : r.exploit) += d;
  }
  for (double c : cost_events) r.comm += c;
  return r;
}

namespace {

double log_at(double t, LogBase base) {
  if (!(t >= 2.0)) throw std::invalid_argument("bound curves need T >= 2");
  return log_in(base, t);
}

double phased_bound(double t, const BoundSpec& spec, double scale, int gamma, double tail) {
  const double lg = log_at(t, spec.base);
  return scale * spec.delta_max * gamma * lg + scale * spec.cost * lg + tail * scale * spec.delta_max;
}

}  // namespace

double bound_e3(double t, const BoundSpec& spec) {
  return phased_bound(t, spec, spec.arms, spec.gamma, 8.0);
}

double bound_e3ts(double t, const BoundSpec& spec) {
  return phased_bound(t, spec, spec.arms, spec.gamma_beta, 16.0);
}

double bound_de3(double t, const BoundSpec& spec) {
  return phased_bound(t, spec, static_cast<double>(spec.players) * spec.arms, spec.gamma, 8.0);
}

double bound_de3ts(double t, const BoundSpec& spec) {
  return phased_bound(t, spec, static_cast<double>(spec.players) * spec.arms, spec.gamma_beta, 16.0);
}

double LogFormBound::log2_value() const {
  // log2(a + 2^b) computed without overflow.
  if (leading <= 0.0) return log2_constant;
  const double la = std::log2(leading);
  const double hi = std::max(la, log2_constant);
  const double lo = std::min(la, log2_constant);
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

double LogFormBound::value() const {
  if (log2_constant > 1023.0) return std::numeric_limits<double>::infinity();
  return leading + std::exp2(log2_constant);
}

double l_delta(double delta_min, double delta) {
  if (!(delta_min > 0.0)) throw std::invalid_argument("delta_min must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  return std::pow(delta_min * delta_min / 4.0, -1.0 / delta);
}

LogFormBound bound_unknown(double t, const BoundSpec& spec) {
  const double lg = log_at(t, spec.base);
  const double n = spec.arms;
  LogFormBound b;
  b.leading = n * spec.delta_max * std::pow(lg, 1.0 + spec.delta) + n * spec.cost * lg;
  b.log2_constant = std::log2(n * spec.delta_max) + l_delta(spec.delta_min, spec.delta);
  return b;
}

LogFormBound bound_unknown_multi(double t, const BoundSpec& spec) {
  const double lg = log_at(t, spec.base);
  const double mn = static_cast<double>(spec.players) * spec.arms;
  LogFormBound b;
  b.leading = mn * spec.delta_max * std::pow(lg, 1.0 + spec.delta) + mn * std::pow(lg, 1.0 + spec.delta);
  b.log2_constant = std::log2(mn * spec.b0) + l_delta(spec.delta_min, spec.delta);
  return b;
}

double bound_ucb1(double t, std::span<const double> gaps, LogBase base) {
  const double lg = log_at(t, base);
  double inv = 0.0;
  double sum = 0.0;
  for (double g : gaps) {
    if (g <= kTieTolerance) continue;
    inv += 1.0 / g;
    sum += g;
  }
  return 8.0 * lg * inv + (1.0 + std::numbers::pi * std::numbers::pi / 3.0) * sum;
}

double chernoff_tail(double a, double t) {
  if (!(a >= 0.0) || !(t > 0.0)) throw std::invalid_argument("chernoff_tail needs a >= 0, t > 0");
  return std::exp(-2.0 * a * a * t);
}

namespace {

// Continued fraction for I_x(a,b) (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double beta_cdf(int a, int b, double x) {
  if (a < 1 || b < 1) throw std::invalid_argument("beta_cdf needs integer a, b >= 1");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("beta_cdf needs x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double da = a;
  const double db = b;
  const double log_front = std::lgamma(da + db) - std::lgamma(da) - std::lgamma(db) +
                           da * std::log(x) + db * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (da + 1.0) / (da + db + 2.0)) return front * beta_continued_fraction(da, db, x) / da;
  return 1.0 - front * beta_continued_fraction(db, da, 1.0 - x) / db;
}

double binom_cdf(int n, double p, int k) {
  if (n < 0) throw std::invalid_argument("binom_cdf needs n >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binom_cdf needs p in [0,1]");
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  double sum = 0.0;
  for (int i = 0; i <= k; ++i) {
    const double log_choose = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
    sum += std::exp(log_choose + i * lp + (n - i) * lq);
  }
  return std::min(sum, 1.0);
}

double cdf_identity_residual(int a, int b, double x) {
  return std::abs(beta_cdf(a, b, x) - (1.0 - binom_cdf(a + b - 1, x, a - 1)));
}

}  // namespace e3lab
