#pragma once

// Entropy-typical subspaces of tensor powers, enumerated by type classes
// (symbol counts) so block lengths of 20-30 stay cheap, plus the reduction
// from an iid channel problem to a one-shot instance on the typical input
// subspace.
//
// A length-n sequence x^n over the spectrum p is delta-typical when
// |-(1/n) log2 p_{x^n} - H(p)| <= delta. Boundary sequences are included,
// with a fixed 1e-12 tolerance on the per-letter log-probability.

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "gausscode/channels/stinespring.hpp"
#include "gausscode/core.hpp"
#include "gausscode/decode/oneshot.hpp"
#include "gausscode/qit/entropy.hpp"
#include "gausscode/qit/linalg.hpp"
#include "gausscode/qit/types.hpp"

namespace gausscode::typ {

inline constexpr double boundary_tolerance = 1e-12;

struct TypeClass {
  std::vector<int> counts;               // occurrences of each symbol
  double log2_prob_per_letter = 0.0;     // -(1/n) log2 of one member sequence
  double log2_sequence_prob = 0.0;       // log2 probability of one member
  unsigned long long multiplicity = 0;   // number of member sequences
  bool typical = false;
};

namespace detail {

// Exact multinomial coefficient n! / prod(counts!) as a product of binomials.
// Each binomial uses interleaved division (the running product of i
// consecutive factors is divisible by i!), with a 128-bit intermediate so the
// pre-division product cannot overflow within the enforced sequence cap.
inline unsigned long long multinomial(const std::vector<int>& counts) {
  auto binomial = [](int m, int r) {
    r = std::min(r, m - r);
    unsigned long long acc = 1;
    for (int i = 1; i <= r; ++i)
      acc = static_cast<unsigned long long>(static_cast<unsigned __int128>(acc) *
                                            static_cast<unsigned>(m - r + i) /
                                            static_cast<unsigned>(i));
    return acc;
  };
  unsigned long long acc = 1;
  int seen = 0;
  for (int c : counts) {
    seen += c;
    acc *= binomial(seen, c);
  }
  return acc;
}

inline void enumerate_compositions(int n, int d, std::vector<int>& prefix,
                                   std::vector<std::vector<int>>& out) {
  if (d == 1) {
    prefix.push_back(n);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int c = 0; c <= n; ++c) {
    prefix.push_back(c);
    enumerate_compositions(n - c, d - 1, prefix, out);
    prefix.pop_back();
  }
}

inline double compositions_count(int n, int d) {
  double acc = 1.0;
  for (int i = 1; i < d; ++i) acc *= static_cast<double>(n + i) / static_cast<double>(i);
  return acc;
}

}  // namespace detail

class TypicalProjector {
 public:
  TypicalProjector(rvec base_spectrum, int n, double delta)
      : spectrum_(std::move(base_spectrum)), n_(n), delta_(delta) {
    if (n_ < 1) throw std::invalid_argument("typical_projector: need n >= 1");
    if (!(delta_ > 0.0)) throw std::invalid_argument("typical_projector: need delta > 0");
    const int d = static_cast<int>(spectrum_.size());
    if (d < 1) throw std::invalid_argument("typical_projector: empty spectrum");
    double psum = 0.0;
    for (int i = 0; i < d; ++i) {
      if (!(spectrum_(i) >= 0.0) || !(spectrum_(i) <= 1.0))
        throw std::invalid_argument("typical_projector: spectrum entries must lie in [0, 1]");
      psum += spectrum_(i);
    }
    if (std::abs(psum - 1.0) > tol::trace)
      throw std::invalid_argument("typical_projector: spectrum must sum to one");
    if (detail::compositions_count(n_, d) > static_cast<double>(1 << 20))
      throw std::invalid_argument("typical_projector: intractable number of type classes");
    if (static_cast<double>(n_) * std::log2(static_cast<double>(d)) > 62.0)
      throw std::invalid_argument("typical_projector: sequence count overflows exact counters");

    for (int i = 0; i < d; ++i)
      if (spectrum_(i) > 0.0) entropy_ -= spectrum_(i) * std::log2(spectrum_(i));

    std::vector<std::vector<int>> all;
    std::vector<int> prefix;
    detail::enumerate_compositions(n_, d, prefix, all);
    classes_.reserve(all.size());
    min_typical_log2_prob_ = std::numeric_limits<double>::infinity();
    max_typical_log2_prob_ = -std::numeric_limits<double>::infinity();
    for (auto& counts : all) {
      TypeClass tc;
      tc.counts = std::move(counts);
      bool impossible = false;
      double log2p = 0.0;
      for (int i = 0; i < d; ++i) {
        if (tc.counts[static_cast<std::size_t>(i)] == 0) continue;
        if (spectrum_(i) == 0.0) {
          impossible = true;
          break;
        }
        log2p += tc.counts[static_cast<std::size_t>(i)] * std::log2(spectrum_(i));
      }
      tc.multiplicity = detail::multinomial(tc.counts);
      if (impossible) {
        tc.log2_sequence_prob = -std::numeric_limits<double>::infinity();
        tc.log2_prob_per_letter = std::numeric_limits<double>::infinity();
        tc.typical = false;
      } else {
        tc.log2_sequence_prob = log2p;
        tc.log2_prob_per_letter = -log2p / static_cast<double>(n_);
        tc.typical =
            tc.log2_prob_per_letter >= entropy_ - delta_ - boundary_tolerance &&
            tc.log2_prob_per_letter <= entropy_ + delta_ + boundary_tolerance;
      }
      if (tc.typical) {
        typical_counts_.insert(tc.counts);
        subspace_dim_ += tc.multiplicity;
        weight_ += static_cast<double>(tc.multiplicity) * std::exp2(tc.log2_sequence_prob);
        min_typical_log2_prob_ = std::min(min_typical_log2_prob_, tc.log2_sequence_prob);
        max_typical_log2_prob_ = std::max(max_typical_log2_prob_, tc.log2_sequence_prob);
      }
      classes_.push_back(std::move(tc));
    }
  }

  const rvec& base_spectrum() const { return spectrum_; }
  int n() const { return n_; }
  double delta() const { return delta_; }
  double entropy_bits() const { return entropy_; }
  const std::vector<TypeClass>& classes() const { return classes_; }
  unsigned long long subspace_dim() const { return subspace_dim_; }
  double weight() const { return weight_; }
  double truncation_weight() const { return 1.0 - weight_; }
  // log2 of the largest / smallest per-sequence probability among members.
  double max_typical_log2_prob() const { return max_typical_log2_prob_; }
  double min_typical_log2_prob() const { return min_typical_log2_prob_; }

  bool contains_counts(const std::vector<int>& counts) const {
    return typical_counts_.count(counts) > 0;
  }

  bool contains_sequence(const std::vector<int>& letters) const {
    if (static_cast<int>(letters.size()) != n_)
      throw std::invalid_argument("contains_sequence: wrong block length");
    std::vector<int> counts(static_cast<std::size_t>(spectrum_.size()), 0);
    for (int x : letters) {
      if (x < 0 || x >= static_cast<int>(spectrum_.size()))
        throw std::invalid_argument("contains_sequence: letter out of range");
      ++counts[static_cast<std::size_t>(x)];
    }
    return contains_counts(counts);
  }

 private:
  rvec spectrum_;
  int n_;
  double delta_;
  double entropy_ = 0.0;
  std::vector<TypeClass> classes_;
  std::set<std::vector<int>> typical_counts_;
  unsigned long long subspace_dim_ = 0;
  double weight_ = 0.0;
  double min_typical_log2_prob_ = 0.0;
  double max_typical_log2_prob_ = 0.0;
};

inline TypicalProjector typical_projector(const rvec& spectrum, int n, double delta) {
  return TypicalProjector(spectrum, n, delta);
}

struct TypicalityReport {
  int n = 0;
  double delta = 0.0;
  double entropy_bits = 0.0;
  double subspace_dim = 0.0;        // exact integer value
  double dim_bound = 0.0;           // 2^{n(H + delta)}
  double weight = 0.0;              // tr(rho^{(x)n} P_delta)
  double truncation_weight = 0.0;   // 1 - weight
  double max_typical_prob = 0.0;    // largest per-sequence probability kept
  double op_bound = 0.0;            // 2^{-n(H - delta)}
  bool dim_ok = false;              // subspace_dim <= dim_bound
  bool op_ok = false;               // max_typical_prob <= op_bound (log-domain tolerance)
};

// Dimension and operator bounds for the typical projector of state^{(x)n}.
// P_delta commutes with rho^{(x)n}, so the operator bound
// P rho^{(x)n} P <= 2^{-n(H-delta)} P reduces to the diagonal: the largest
// kept eigenvalue against the threshold.
inline TypicalityReport typicality_report(const qit::DensityOperator& state, int n, double delta) {
  const rvec spectrum = qit::hermitian_eigenvalues(state.matrix()).cwiseMax(0.0);
  const TypicalProjector proj(spectrum / spectrum.sum(), n, delta);
  TypicalityReport r;
  r.n = n;
  r.delta = delta;
  r.entropy_bits = proj.entropy_bits();
  r.subspace_dim = static_cast<double>(proj.subspace_dim());
  r.dim_bound = std::exp2(static_cast<double>(n) * (proj.entropy_bits() + delta));
  r.weight = proj.weight();
  r.truncation_weight = proj.truncation_weight();
  r.max_typical_prob =
      proj.subspace_dim() > 0 ? std::exp2(proj.max_typical_log2_prob()) : 0.0;
  r.op_bound = std::exp2(-static_cast<double>(n) * (proj.entropy_bits() - delta));
  r.dim_ok = r.subspace_dim <= r.dim_bound;
  // Inclusive membership can overshoot the threshold by the boundary
  // tolerance per letter; compare in the log domain with that allowance.
  r.op_ok = proj.subspace_dim() == 0 ||
            proj.max_typical_log2_prob() <=
                -static_cast<double>(n) * (proj.entropy_bits() - delta) +
                    static_cast<double>(n) * boundary_tolerance + boundary_tolerance;
  return r;
}

}  // namespace gausscode::typ
