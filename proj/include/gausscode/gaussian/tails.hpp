#pragma once

// Concentration inequalities for Gaussian vectors and their empirical audits.
//
// Four deviation events are covered, each with an explicit exponential tail
// probability bound:
//   length         P[| ||g||^2 - 1 | > eps]                <= 2 exp(-eps^2 D / 6)
//   projector_sum  P[| sum_k <g_k|P|g_k> - rK/D | > eps rK/D]
//                                                          <= 2 exp(-r K eps^2 / 6)
//   tr_a_plus      P[sum_i a_i |c_i|^2 > (1+eps) trA / D]  <= exp(-(eps^2/4) trA)
//   tr_a_minus     P[sum_i a_i |c_i|^2 < (1-eps) trA / D]  <= exp(-(eps^2/4) trA)
// where g has D iid N_C(0, 1/D) coefficients, P is a rank-r projector, and
// 0 <= A <= 1 with spectrum a_i. The trA bounds require eps <= 1/3.
//
// Empirical audits draw fresh vectors, count deviation events, and compare a
// one-sided upper 99% Wilson confidence limit on the hit rate against the
// theoretical bound. A bound >= 1 carries no content and passes vacuously.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gausscode/core.hpp"
#include "gausscode/gaussian/sampler.hpp"
#include "gausscode/rng.hpp"
#include "gausscode/stats.hpp"

namespace gausscode::gauss {

enum class TailBound { length, projector_sum, tr_a_plus, tr_a_minus };

inline const char* tail_bound_name(TailBound b) {
  switch (b) {
    case TailBound::length: return "length";
    case TailBound::projector_sum: return "projector_sum";
    case TailBound::tr_a_plus: return "tr_a_plus";
    case TailBound::tr_a_minus: return "tr_a_minus";
  }
  return "unknown";
}

// Event parameters. `ambient_dim` is D throughout. `rank` and `copies` feed
// the projector_sum event (rank-r projector, K iid vectors). `a_spectrum`
// lists the nonzero eigenvalues of A for the trA events; eigenvalues must lie
// in [0, 1] and coordinates outside the support are irrelevant to the event.
struct TailParams {
  index_t ambient_dim = 0;
  double epsilon = 0.0;
  index_t rank = 0;
  index_t copies = 1;
  std::vector<double> a_spectrum;
};

inline void validate_tail_params(TailBound bound, const TailParams& p) {
  if (p.ambient_dim < 1) throw std::invalid_argument("tail bound: ambient_dim must be >= 1");
  if (!(p.epsilon >= 0.0)) throw std::invalid_argument("tail bound: epsilon must be >= 0");
  switch (bound) {
    case TailBound::length:
    case TailBound::projector_sum:
      if (p.epsilon > 1.0)
        throw std::invalid_argument("tail bound: epsilon must be <= 1 for this event");
      if (bound == TailBound::projector_sum) {
        if (p.rank < 1 || p.rank > p.ambient_dim)
          throw std::invalid_argument("tail bound: projector rank must be in [1, D]");
        if (p.copies < 1) throw std::invalid_argument("tail bound: copies must be >= 1");
      }
      break;
    case TailBound::tr_a_plus:
    case TailBound::tr_a_minus: {
      if (p.epsilon > 1.0 / 3.0)
        throw std::invalid_argument("tail bound: epsilon must be <= 1/3 for trA events");
      if (p.a_spectrum.empty())
        throw std::invalid_argument("tail bound: trA events need a nonempty spectrum");
      if (static_cast<index_t>(p.a_spectrum.size()) > p.ambient_dim)
        throw std::invalid_argument("tail bound: spectrum longer than ambient dimension");
      double tra = 0.0;
      for (double a : p.a_spectrum) {
        if (!(a >= -1e-12) || !(a <= 1.0 + 1e-12))
          throw std::invalid_argument("tail bound: A spectrum must lie in [0, 1]");
        tra += a;
      }
      if (!(tra > 0.0)) throw std::invalid_argument("tail bound: trA must be positive");
      break;
    }
  }
}

inline double spectrum_trace(const TailParams& p) {
  double t = 0.0;
  for (double a : p.a_spectrum) t += a;
  return t;
}

// Theoretical tail probability for the requested event.
inline double tail_bound(TailBound bound, const TailParams& p) {
  validate_tail_params(bound, p);
  const double eps2 = p.epsilon * p.epsilon;
  switch (bound) {
    case TailBound::length:
      return 2.0 * std::exp(-eps2 * static_cast<double>(p.ambient_dim) / 6.0);
    case TailBound::projector_sum:
      return 2.0 * std::exp(-static_cast<double>(p.rank) * static_cast<double>(p.copies) *
                            eps2 / 6.0);
    case TailBound::tr_a_plus:
    case TailBound::tr_a_minus:
      return std::exp(-(eps2 / 4.0) * spectrum_trace(p));
  }
  throw std::logic_error("tail_bound: unreachable");
}

struct TailBoundReport {
  std::string bound_name;
  double epsilon = 0.0;
  double theoretical = 0.0;  // tail probability bound
  double empirical = 0.0;    // observed hit rate
  long trials = 0;
  double wilson_upper = 0.0;  // one-sided 99% upper confidence limit on the rate
  bool pass = false;          // wilson_upper <= theoretical, or theoretical >= 1
};

namespace detail {

// Squared moduli of the first `count` coefficients of a fresh Gaussian vector.
// Coordinates beyond `count` never enter the audited statistic, so they are
// not drawn; each trial consumes exactly 2*count uniforms from its substream.
inline void draw_squared_moduli(rng::xoshiro256pp& gen, index_t ambient_dim, index_t count,
                                std::vector<double>& out) {
  const double mean_sq = 1.0 / static_cast<double>(ambient_dim);
  out.resize(static_cast<std::size_t>(count));
  for (index_t i = 0; i < count; ++i) {
    const cplx c = rng::complex_normal(gen, mean_sq);
    out[static_cast<std::size_t>(i)] = std::norm(c);
  }
}

inline bool deviation_event(TailBound bound, const TailParams& p, rng::xoshiro256pp& gen,
                            std::vector<double>& scratch) {
  switch (bound) {
    case TailBound::length: {
      draw_squared_moduli(gen, p.ambient_dim, p.ambient_dim, scratch);
      double s = 0.0;
      for (double x : scratch) s += x;
      return std::abs(s - 1.0) > p.epsilon;
    }
    case TailBound::projector_sum: {
      // Unitary invariance lets the rank-r projector sit on the first r
      // coordinates without loss of generality.
      double s = 0.0;
      for (index_t k = 0; k < p.copies; ++k) {
        draw_squared_moduli(gen, p.ambient_dim, p.rank, scratch);
        for (double x : scratch) s += x;
      }
      const double mean = static_cast<double>(p.rank) * static_cast<double>(p.copies) /
                          static_cast<double>(p.ambient_dim);
      return std::abs(s - mean) > p.epsilon * mean;
    }
    case TailBound::tr_a_plus:
    case TailBound::tr_a_minus: {
      draw_squared_moduli(gen, p.ambient_dim,
                          static_cast<index_t>(p.a_spectrum.size()), scratch);
      double s = 0.0;
      for (std::size_t i = 0; i < p.a_spectrum.size(); ++i) s += p.a_spectrum[i] * scratch[i];
      const double mean = spectrum_trace(p) / static_cast<double>(p.ambient_dim);
      if (bound == TailBound::tr_a_plus) return s > (1.0 + p.epsilon) * mean;
      return s < (1.0 - p.epsilon) * mean;
    }
  }
  throw std::logic_error("deviation_event: unreachable");
}

}  // namespace detail

// Monte-Carlo audit of one tail bound. Each trial gets an independent
// substream derived from (seed, trial index), so results are independent of
// evaluation order. Pass rule: the 99% Wilson upper limit on the event rate
// must not exceed the theoretical bound; bounds >= 1 pass vacuously.
inline TailBoundReport empirical_tail(TailBound bound, const TailParams& p, long trials,
                                      std::uint64_t seed) {
  validate_tail_params(bound, p);
  if (trials < 1000) throw std::invalid_argument("empirical_tail: need at least 1000 trials");
  long hits = 0;
  std::vector<double> scratch;
  for (long t = 0; t < trials; ++t) {
    rng::xoshiro256pp gen(rng::derive_seed(seed, tail_bound_name(bound),
                                           static_cast<std::uint64_t>(t)));
    if (detail::deviation_event(bound, p, gen, scratch)) ++hits;
  }
  TailBoundReport r;
  r.bound_name = tail_bound_name(bound);
  r.epsilon = p.epsilon;
  r.theoretical = tail_bound(bound, p);
  r.trials = trials;
  r.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  r.wilson_upper = stats::wilson_upper(hits, trials);
  r.pass = (r.theoretical >= 1.0) || (r.wilson_upper <= r.theoretical);
  return r;
}

// E exp(t a |c|^2) for c ~ N_C(0, 1/D): equals 1 / (1 - t a / D), finite only
// for t a < D.
inline double mgf_reference(double t, double a, index_t ambient_dim) {
  if (ambient_dim < 1) throw std::invalid_argument("mgf_reference: dimension must be >= 1");
  if (!(a >= 0.0) || !(a <= 1.0)) throw std::invalid_argument("mgf_reference: need a in [0, 1]");
  const double x = t * a / static_cast<double>(ambient_dim);
  if (x >= 1.0) throw std::domain_error("mgf_reference: diverges for t a >= D");
  return 1.0 / (1.0 - x);
}

// Audit of the scalar inequalities behind the exponent constants:
//   ln(1 + x) >= x - x^2 / 2                 for x in [0, 1]
//   ln(1 + x) >= x - x^2 / (2 (1 - delta))   for x in [-delta, 0], 0 < delta < 1.
struct LogBoundReport {
  double delta = 0.0;
  double worst_margin_negative = 0.0;  // min over grid points in [-delta, 0]
  double worst_margin_positive = 0.0;  // min over grid points in [0, 1]
  bool pass = false;
};

inline LogBoundReport log_lower_bound_check(double delta, const std::vector<double>& grid) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("log_lower_bound_check: need 0 < delta < 1");
  if (grid.empty()) throw std::invalid_argument("log_lower_bound_check: empty grid");
  LogBoundReport r;
  r.delta = delta;
  r.worst_margin_negative = std::numeric_limits<double>::infinity();
  r.worst_margin_positive = std::numeric_limits<double>::infinity();
  bool saw_neg = false;
  bool saw_pos = false;
  for (double x : grid) {
    if (x < -delta || x > 1.0)
      throw std::invalid_argument("log_lower_bound_check: grid point outside [-delta, 1]");
    const double lhs = std::log1p(x);
    if (x <= 0.0) {
      const double margin = lhs - (x - x * x / (2.0 * (1.0 - delta)));
      r.worst_margin_negative = std::min(r.worst_margin_negative, margin);
      saw_neg = true;
    }
    if (x >= 0.0) {
      const double margin = lhs - (x - x * x / 2.0);
      r.worst_margin_positive = std::min(r.worst_margin_positive, margin);
      saw_pos = true;
    }
  }
  if (!saw_neg) r.worst_margin_negative = 0.0;
  if (!saw_pos) r.worst_margin_positive = 0.0;
  r.pass = r.worst_margin_negative >= -1e-12 && r.worst_margin_positive >= -1e-12;
  return r;
}

}  // namespace gausscode::gauss
