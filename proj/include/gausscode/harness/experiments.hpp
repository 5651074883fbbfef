#pragma once

// The six experiments the harness can run, plus run_experiment / merge_reports.
//
// Each experiment supplies a trial function (drawing everything it needs from
// the trial's private substream) and an aggregate function that is a pure
// function of (config, trial records). Merging pools records from runs with
// disjoint trial ranges and re-aggregates, so pooled confidence limits come
// out tighter than either input's.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gausscode/channels/ensemble.hpp"
#include "gausscode/channels/stinespring.hpp"
#include "gausscode/codes/code.hpp"
#include "gausscode/core.hpp"
#include "gausscode/decode/audit.hpp"
#include "gausscode/decode/discrimination.hpp"
#include "gausscode/decode/oneshot.hpp"
#include "gausscode/gaussian/tails.hpp"
#include "gausscode/harness/harness.hpp"
#include "gausscode/qit/random.hpp"
#include "gausscode/rng.hpp"
#include "gausscode/stats.hpp"
#include "gausscode/typicality/reduction.hpp"
#include "gausscode/typicality/typical.hpp"

namespace gausscode::harness {

struct Aggregation {
  json aggregates = json::object();
  json bounds = json::object();
  json flags = json::object();
};

namespace detail {

inline chan::ChannelFamily family_from_string(const std::string& s) {
  if (s == "identity") return chan::ChannelFamily::identity;
  if (s == "dephasing") return chan::ChannelFamily::dephasing;
  if (s == "depolarizing") return chan::ChannelFamily::depolarizing;
  if (s == "amplitude_damping") return chan::ChannelFamily::amplitude_damping;
  if (s == "erasure") return chan::ChannelFamily::erasure;
  throw config_error("unknown channel family '" + s + "'");
}

inline chan::StinespringIsometry build_channel(const ChannelSpec& spec) {
  chan::StinespringIsometry v =
      chan::standard_channel(family_from_string(spec.family), spec.dim, spec.param);
  if (spec.copies > 1) v = chan::tensor_power(v, spec.copies);
  return v;
}

template <typename T>
T param_or(const json& params, const std::string& key, T fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error("param '" + key + "' has the wrong type");
  }
}

inline std::vector<int> int_list_param(const json& params, const std::string& key,
                                       std::vector<int> fallback) {
  if (!params.contains(key)) return fallback;
  const json& j = params.at(key);
  if (!j.is_array()) throw config_error("param '" + key + "' must be an array");
  std::vector<int> out;
  for (const json& e : j) {
    if (!e.is_number_integer() && !e.is_number_unsigned())
      throw config_error("param '" + key + "' must hold integers");
    out.push_back(e.get<int>());
  }
  if (out.empty()) throw config_error("param '" + key + "' must be nonempty");
  return out;
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double max_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::max_element(v.begin(), v.end());
}

inline double min_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(v.begin(), v.end());
}

inline void put_if_finite(TrialRecord& rec, const std::string& name, double v) {
  if (std::isfinite(v)) rec.put(name, v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// concentration: Monte-Carlo audit of the Gaussian tail bounds
// ---------------------------------------------------------------------------

namespace concentration {

struct Setup {
  index_t D = 512;
  double epsilon = 0.25;
  index_t rank = 128;
  index_t copies = 3;
  std::vector<gauss::TailBound> bounds;
  std::vector<gauss::TailParams> params;
};

inline Setup setup(const ExperimentConfig& cfg) {
  Setup s;
  s.D = detail::param_or<index_t>(cfg.params, "D", 512);
  s.epsilon = detail::param_or<double>(cfg.params, "epsilon", 0.25);
  s.rank = detail::param_or<index_t>(cfg.params, "rank", 0);
  if (s.rank <= 0) s.rank = std::max<index_t>(1, s.D / 4);
  s.copies = detail::param_or<index_t>(cfg.params, "copies", 3);

  std::vector<std::string> names = {"length", "projector_sum", "tr_a_plus", "tr_a_minus"};
  if (cfg.params.contains("bounds")) {
    names.clear();
    for (const json& e : cfg.params.at("bounds")) names.push_back(e.get<std::string>());
  }
  for (const std::string& name : names) {
    gauss::TailBound b;
    if (name == "length") b = gauss::TailBound::length;
    else if (name == "projector_sum") b = gauss::TailBound::projector_sum;
    else if (name == "tr_a_plus") b = gauss::TailBound::tr_a_plus;
    else if (name == "tr_a_minus") b = gauss::TailBound::tr_a_minus;
    else throw config_error("unknown tail bound '" + name + "'");
    gauss::TailParams p;
    p.ambient_dim = s.D;
    p.epsilon = s.epsilon;
    p.rank = s.rank;
    p.copies = s.copies;
    if (b == gauss::TailBound::tr_a_plus || b == gauss::TailBound::tr_a_minus)
      p.a_spectrum.assign(static_cast<std::size_t>(s.rank), 1.0);
    gauss::validate_tail_params(b, p);
    s.bounds.push_back(b);
    s.params.push_back(std::move(p));
  }
  if (s.bounds.empty()) throw config_error("concentration: no bounds selected");
  return s;
}

inline void trial(const ExperimentConfig& cfg, const Setup& s, int t, TrialRecord& rec) {
  rng::xoshiro256pp gen(rng::derive_seed(cfg.master_seed, cfg.experiment,
                                         static_cast<std::uint64_t>(t)));
  std::vector<double> scratch;
  for (std::size_t i = 0; i < s.bounds.size(); ++i) {
    const bool hit = gauss::detail::deviation_event(s.bounds[i], s.params[i], gen, scratch);
    rec.put(std::string(gauss::tail_bound_name(s.bounds[i])) + "_hit", hit ? 1.0 : 0.0);
  }
}

inline Aggregation aggregate(const ExperimentConfig& cfg,
                             const std::vector<TrialRecord>& records) {
  const Setup s = setup(cfg);
  Aggregation agg;
  bool all_pass = true;
  for (std::size_t i = 0; i < s.bounds.size(); ++i) {
    const std::string name = gauss::tail_bound_name(s.bounds[i]);
    const std::vector<double> hits = detail::collect(records, name + "_hit");
    long nhit = 0;
    for (double h : hits) nhit += h > 0.5 ? 1 : 0;
    const long n = static_cast<long>(hits.size());
    const double theoretical = gauss::tail_bound(s.bounds[i], s.params[i]);
    const double rate = n > 0 ? static_cast<double>(nhit) / static_cast<double>(n) : 0.0;
    const double wilson = n > 0 ? stats::wilson_upper(nhit, n) : 1.0;
    const bool pass = theoretical >= 1.0 || (n > 0 && wilson <= theoretical);
    agg.aggregates[name] = json{{"hits", nhit}, {"trials", n}, {"rate", rate},
                                {"wilson_upper", wilson}};
    agg.bounds[name] = theoretical;
    agg.flags[name + "_pass"] = pass;
    all_pass = all_pass && pass;
  }
  agg.flags["no_trial_failures"] = detail::count_failed(records) == 0;
  return agg;
}

}  // namespace concentration

// ---------------------------------------------------------------------------
// code-run: draw codes against a fixed channel, audit the information chain
// ---------------------------------------------------------------------------

namespace code_run {

inline void trial(const ExperimentConfig& cfg, const chan::StinespringIsometry& v, int t,
                  TrialRecord& rec) {
  const std::uint64_t seed =
      rng::derive_seed(cfg.master_seed, cfg.experiment, static_cast<std::uint64_t>(t));
  const qit::DensityOperator rho = qit::DensityOperator::maximally_mixed(v.dim_in());
  const codes::SubspaceCode code = codes::build_random_code(rho, cfg.code.N, seed);

  const auto [eps_meas, eta_meas] = codes::measured_epsilon_eta(code);
  const codes::CodeDiagnostics diag = codes::code_diagnostics(code, eps_meas, eta_meas);
  const decode::InformationAudit audit = decode::information_audit(code, v);
  const double lambda =
      decode::lambda_defect(eps_meas, eta_meas, code.N, cfg.code.divisor);
  const decode::OneShotPreconditions pre = decode::oneshot_preconditions(
      v, rho, cmat::Identity(v.dim_out(), v.dim_out()),
      cmat::Identity(v.dim_env(), v.dim_env()));
  const decode::OneShotBounds osb = decode::oneshot_bounds(decode::make_oneshot_params(
      std::max(eps_meas, pre.epsilon), eta_meas, pre.D_param, pre.Delta, pre.rank_PE,
      code.N, cfg.code.divisor));

  rec.put("eps_meas", eps_meas);
  rec.put("eta_meas", eta_meas);
  rec.put("lambda", lambda);
  rec.put("vacuous", osb.vacuous ? 1.0 : 0.0);
  detail::put_if_finite(rec, "chi_floor", osb.chi_floor);
  detail::put_if_finite(rec, "q_error", osb.q_error);
  rec.put("perturbation_avg", diag.perturbation_avg);
  rec.put("perturbation_bound", diag.bound_value);
  rec.put("decoupling", audit.decoupling_distance);
  rec.put("H_R", audit.H_R);
  rec.put("I_RB", audit.I_RB);
  rec.put("I_RE", audit.I_RE);
  rec.put("chi_basis", audit.chi_basis);
  rec.put("chi_conjugate", audit.chi_conjugate);
  rec.put("duality_residual", audit.duality_residual);
  rec.put("pinsker_slack", audit.pinsker_slack);
  rec.put("uncertainty_slack", audit.uncertainty_slack);
  rec.put("fano_bound", audit.fano_bound);
  rec.put("pgm_error_basis", audit.pgm_error_basis);
  rec.put("pgm_error_conjugate", audit.pgm_error_conjugate);
  const decode::PackingBound pb = decode::packing_bound(eps_meas, eta_meas);
  rec.put("packing_simple", pb.simple);
  rec.put("packing_tight", pb.tight);
  rec.put("duality_ok", audit.duality_ok ? 1.0 : 0.0);
  rec.put("pinsker_ok", audit.pinsker_ok ? 1.0 : 0.0);
  rec.put("uncertainty_ok", audit.uncertainty_ok ? 1.0 : 0.0);
  rec.put("fano_ok", audit.fano_ok ? 1.0 : 0.0);
}

inline Aggregation aggregate(const ExperimentConfig& cfg,
                             const std::vector<TrialRecord>& records) {
  Aggregation agg;
  const auto all_true = [&](const std::string& name) {
    const std::vector<double> v = detail::collect(records, name);
    if (v.empty()) return false;
    for (double x : v)
      if (x < 0.5) return false;
    return true;
  };
  agg.aggregates["mean_decoupling"] = detail::mean_of(detail::collect(records, "decoupling"));
  agg.aggregates["max_decoupling"] = detail::max_of(detail::collect(records, "decoupling"));
  agg.aggregates["mean_I_RB"] = detail::mean_of(detail::collect(records, "I_RB"));
  agg.aggregates["mean_I_RE"] = detail::mean_of(detail::collect(records, "I_RE"));
  agg.aggregates["max_eps_meas"] = detail::max_of(detail::collect(records, "eps_meas"));
  agg.aggregates["max_eta_meas"] = detail::max_of(detail::collect(records, "eta_meas"));
  agg.aggregates["max_pgm_error_basis"] =
      detail::max_of(detail::collect(records, "pgm_error_basis"));
  agg.aggregates["max_pgm_error_conjugate"] =
      detail::max_of(detail::collect(records, "pgm_error_conjugate"));
  agg.aggregates["failed_trials"] = detail::count_failed(records);

  chan::StinespringIsometry v = detail::build_channel(cfg.channel);
  agg.bounds["coherent_information"] = chan::coherent_information_channel(
      qit::DensityOperator::maximally_mixed(v.dim_in()), v);

  agg.flags["duality_ok_all"] = all_true("duality_ok");
  agg.flags["pinsker_ok_all"] = all_true("pinsker_ok");
  agg.flags["uncertainty_ok_all"] = all_true("uncertainty_ok");
  agg.flags["fano_ok_all"] = all_true("fano_ok");
  agg.flags["no_trial_failures"] = detail::count_failed(records) == 0;
  return agg;
}

}  // namespace code_run

// ---------------------------------------------------------------------------
// iid-sweep: typical reduction of an iid channel at several block lengths
// ---------------------------------------------------------------------------

namespace iid_sweep {

struct Setup {
  std::vector<int> n_list;
  int seeds_per_n = 20;
  double pgm_threshold = 0.3;
  int n_cap = 64;  // upper clamp on the code size per block length
};

inline Setup setup(const ExperimentConfig& cfg) {
  Setup s;
  s.n_list = detail::int_list_param(cfg.params, "n_list", {2, 4, 6});
  s.seeds_per_n = detail::param_or<int>(cfg.params, "seeds_per_n", 20);
  s.pgm_threshold = detail::param_or<double>(cfg.params, "pgm_threshold", 0.3);
  s.n_cap = detail::param_or<int>(cfg.params, "N_cap", 64);
  if (s.seeds_per_n < 1) throw config_error("iid-sweep: seeds_per_n must be >= 1");
  return s;
}

inline void validate_range(const ExperimentConfig& cfg, const Setup& s) {
  const long total = static_cast<long>(s.n_list.size()) * s.seeds_per_n;
  if (cfg.trial_offset + cfg.trials > total)
    throw config_error("iid-sweep: trial range exceeds n_list size * seeds_per_n");
}

// The reduction at each block length is deterministic, so it is computed once
// and shared read-only across trials.
inline std::vector<std::optional<typ::IidReduction>> shared_reductions(
    const ExperimentConfig& cfg, const Setup& s) {
  const chan::StinespringIsometry v = chan::standard_channel(
      detail::family_from_string(cfg.channel.family), cfg.channel.dim, cfg.channel.param);
  const qit::DensityOperator rho = qit::DensityOperator::maximally_mixed(v.dim_in());
  std::vector<std::optional<typ::IidReduction>> out(s.n_list.size());
  for (std::size_t i = 0; i < s.n_list.size(); ++i)
    out[i] = typ::iid_reduction(v, rho, s.n_list[i], cfg.code.delta);
  return out;
}

inline int code_size_for(const typ::IidReduction& red, const Setup& s) {
  long n = std::max<long>(2, red.recipe_N);
  n = std::min<long>(n, s.n_cap);
  n = std::min<long>(n, static_cast<long>(red.max_constructible_N));
  return static_cast<int>(std::max<long>(1, n));
}

inline void trial(const ExperimentConfig& cfg, const Setup& s,
                  const std::vector<std::optional<typ::IidReduction>>& reds, int t,
                  TrialRecord& rec) {
  const std::size_t n_idx = static_cast<std::size_t>(t / s.seeds_per_n);
  const typ::IidReduction& red = *reds.at(n_idx);
  const std::uint64_t seed =
      rng::derive_seed(cfg.master_seed, cfg.experiment, static_cast<std::uint64_t>(t));

  const int code_n = code_size_for(red, s);
  const codes::SubspaceCode code = codes::build_random_code(red.rho_tilde, code_n, seed);
  const decode::InformationAudit audit = decode::information_audit(code, red.channel_n);

  // Defect parameter: the truncation weight outside the typical window and the
  // measured Gram deviations both feed lambda; report the worst case.
  const auto [eps_code, eta_code] = codes::measured_epsilon_eta(code);
  const double eps = std::max(red.measured.epsilon, eps_code);
  const double lambda = decode::lambda_defect(eps, eta_code, code_n, cfg.code.divisor);
  const decode::OneShotBounds osb = decode::oneshot_bounds(decode::make_oneshot_params(
      eps, eta_code, red.measured.D_param, red.measured.Delta, red.measured.rank_PE, code_n,
      cfg.code.divisor));

  rec.put("n", static_cast<double>(red.n));
  rec.put("N_used", static_cast<double>(code_n));
  rec.put("recipe_N", static_cast<double>(red.recipe_N));
  rec.put("epsilon_actual", red.measured.epsilon);
  rec.put("eps_code", eps_code);
  rec.put("eta_code", eta_code);
  rec.put("rank_PE", static_cast<double>(red.measured.rank_PE));
  rec.put("lambda", lambda);
  rec.put("vacuous", osb.vacuous ? 1.0 : 0.0);
  detail::put_if_finite(rec, "chi_floor", osb.chi_floor);
  detail::put_if_finite(rec, "q_error", osb.q_error);
  rec.put("decoupling", audit.decoupling_distance);
  rec.put("I_RB", audit.I_RB);
  rec.put("I_RE", audit.I_RE);
  rec.put("pgm_error_basis", audit.pgm_error_basis);
  rec.put("pgm_error_conjugate", audit.pgm_error_conjugate);
  rec.put("duality_ok", audit.duality_ok ? 1.0 : 0.0);
}

inline Aggregation aggregate(const ExperimentConfig& cfg,
                             const std::vector<TrialRecord>& records) {
  const Setup s = setup(cfg);
  Aggregation agg;

  std::vector<double> medians;
  for (int n : s.n_list) {
    std::vector<double> dec;
    std::vector<double> pgm_b;
    std::vector<double> pgm_c;
    for (const TrialRecord& r : records) {
      if (r.failed) continue;
      const auto rn = detail::value_of(r, "n");
      if (!rn || static_cast<int>(*rn) != n) continue;
      if (auto v = detail::value_of(r, "decoupling")) dec.push_back(*v);
      if (auto v = detail::value_of(r, "pgm_error_basis")) pgm_b.push_back(*v);
      if (auto v = detail::value_of(r, "pgm_error_conjugate")) pgm_c.push_back(*v);
    }
    const std::string key = "n" + std::to_string(n);
    const double med = dec.empty() ? std::numeric_limits<double>::quiet_NaN()
                                   : stats::median(dec);
    medians.push_back(med);
    agg.aggregates["median_decoupling_" + key] = med;
    agg.aggregates["mean_pgm_error_basis_" + key] = detail::mean_of(pgm_b);
    agg.aggregates["mean_pgm_error_conjugate_" + key] = detail::mean_of(pgm_c);
  }

  bool nonincreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    if (std::isnan(medians[i - 1]) || std::isnan(medians[i])) {
      nonincreasing = false;
      break;
    }
    if (medians[i] > medians[i - 1] + 1e-12) nonincreasing = false;
  }

  const int n_final = s.n_list.back();
  const std::string final_key = "n" + std::to_string(n_final);
  const json& mb = agg.aggregates["mean_pgm_error_basis_" + final_key];
  const json& mc = agg.aggregates["mean_pgm_error_conjugate_" + final_key];
  const bool pgm_ok = mb.is_number() && mc.is_number() &&
                      mb.get<double>() <= s.pgm_threshold &&
                      mc.get<double>() <= s.pgm_threshold;

  bool lambda_labeled = !records.empty();
  double share_vacuous = 0.0;
  long counted = 0;
  for (const TrialRecord& r : records) {
    if (r.failed) continue;
    const auto l = detail::value_of(r, "lambda");
    const auto vac = detail::value_of(r, "vacuous");
    if (!l || !vac) lambda_labeled = false;
    if (vac && *vac > 0.5) share_vacuous += 1.0;
    ++counted;
  }
  if (counted > 0) share_vacuous /= static_cast<double>(counted);

  agg.aggregates["share_vacuous"] = share_vacuous;
  agg.aggregates["failed_trials"] = detail::count_failed(records);
  agg.bounds["pgm_threshold"] = s.pgm_threshold;
  agg.flags["median_decoupling_nonincreasing"] = nonincreasing;
  agg.flags["pgm_error_final_ok"] = pgm_ok;
  agg.flags["lambda_labeled"] = lambda_labeled;
  agg.flags["no_trial_failures"] = detail::count_failed(records) == 0;
  return agg;
}

}  // namespace iid_sweep

// ---------------------------------------------------------------------------
// uncertainty: chi_basis + chi_conjugate <= I(R:B) on random instances
// ---------------------------------------------------------------------------

namespace uncertainty {

struct Setup {
  int dim_a_max = 4;
  int dim_b_max = 4;
  int dim_e_max = 8;
  int n_max = 4;
  bool rotated = true;
};

inline Setup setup(const ExperimentConfig& cfg) {
  Setup s;
  s.dim_a_max = detail::param_or<int>(cfg.params, "dim_a_max", 4);
  s.dim_b_max = detail::param_or<int>(cfg.params, "dim_b_max", 4);
  s.dim_e_max = detail::param_or<int>(cfg.params, "dim_e_max", 8);
  s.n_max = detail::param_or<int>(cfg.params, "n_max", 4);
  s.rotated = detail::param_or<bool>(cfg.params, "rotated", true);
  if (s.dim_a_max < 2 || s.dim_b_max < 2 || s.dim_e_max < 1 || s.n_max < 2)
    throw config_error("uncertainty: dimension caps too small");
  return s;
}

inline index_t draw_in(rng::xoshiro256pp& gen, int lo, int hi) {
  return static_cast<index_t>(lo + static_cast<int>(gen.next() % static_cast<std::uint64_t>(hi - lo + 1)));
}

inline void trial(const ExperimentConfig& cfg, const Setup& s, int t, TrialRecord& rec) {
  rng::xoshiro256pp gen(rng::derive_seed(cfg.master_seed, cfg.experiment,
                                         static_cast<std::uint64_t>(t)));
  const index_t da = draw_in(gen, 2, s.dim_a_max);
  const index_t db = draw_in(gen, 2, s.dim_b_max);
  index_t de = draw_in(gen, 1, s.dim_e_max);
  if (db * de < da) de = (da + db - 1) / db;  // dilation needs d_B d_E >= d_A
  const int n = static_cast<int>(draw_in(gen, 2, std::min<int>(s.n_max, static_cast<int>(da))));

  const qit::DensityOperator rho = qit::random_density(da, gen);
  const chan::StinespringIsometry v(qit::random_isometry(db * de, da, gen), db, de);
  const std::uint64_t code_seed = gen.next();
  codes::SubspaceCode code = codes::build_random_code(rho, n, code_seed);

  const decode::InformationAudit audit = decode::information_audit(code, v);
  rec.put("dim_a", static_cast<double>(da));
  rec.put("dim_b", static_cast<double>(db));
  rec.put("dim_e", static_cast<double>(de));
  rec.put("N", static_cast<double>(n));
  rec.put("I_RB", audit.I_RB);
  rec.put("chi_basis", audit.chi_basis);
  rec.put("chi_conjugate", audit.chi_conjugate);
  rec.put("uncertainty_slack", audit.uncertainty_slack);

  if (s.rotated) {
    // Same code subspace, adversarially re-chosen measurement basis: rotate
    // the orthonormal family by a Haar unitary and rebuild its conjugate.
    // I(R:B) is basis-independent, so the inequality is re-audited beyond the
    // bases the construction itself produces.
    const cmat w = qit::random_unitary(n, gen);
    code.phi = code.phi * w;
    code.phi_hat = gauss::fourier_conjugate_family(code.phi);
    const decode::InformationAudit rot = decode::information_audit(code, v);
    rec.put("uncertainty_slack_rotated", rot.uncertainty_slack);
    rec.put("chi_basis_rotated", rot.chi_basis);
    rec.put("chi_conjugate_rotated", rot.chi_conjugate);
  }
}

inline Aggregation aggregate(const ExperimentConfig& cfg,
                             const std::vector<TrialRecord>& records) {
  const Setup s = setup(cfg);
  Aggregation agg;
  const std::vector<double> slack = detail::collect(records, "uncertainty_slack");
  const std::vector<double> rot = detail::collect(records, "uncertainty_slack_rotated");
  agg.aggregates["min_uncertainty_slack"] = detail::min_of(slack);
  agg.aggregates["min_uncertainty_slack_rotated"] =
      rot.empty() ? json() : json(detail::min_of(rot));
  if (agg.aggregates["min_uncertainty_slack_rotated"].is_null())
    agg.aggregates.erase("min_uncertainty_slack_rotated");
  agg.aggregates["failed_trials"] = detail::count_failed(records);
  agg.bounds["slack_floor"] = -1e-8;
  const bool base_ok = !slack.empty() && detail::min_of(slack) >= -1e-8;
  const bool rot_ok = !s.rotated || (!rot.empty() && detail::min_of(rot) >= -1e-8);
  agg.flags["uncertainty_ok_all"] = base_ok;
  agg.flags["uncertainty_rotated_ok_all"] = rot_ok;
  agg.flags["no_trial_failures"] = detail::count_failed(records) == 0;
  return agg;
}

}  // namespace uncertainty

// ---------------------------------------------------------------------------
// pgm: pretty-good measurement vs the binary optimum
// ---------------------------------------------------------------------------

namespace pgm {

struct Setup {
  std::vector<int> dims = {2, 3};
  int symmetric_trials = 50;
};

inline Setup setup(const ExperimentConfig& cfg) {
  Setup s;
  s.dims = detail::int_list_param(cfg.params, "dims", {2, 3});
  s.symmetric_trials = detail::param_or<int>(cfg.params, "symmetric_trials", 50);
  for (int d : s.dims)
    if (d < 2) throw config_error("pgm: dims must be >= 2");
  if (s.symmetric_trials < 0) throw config_error("pgm: symmetric_trials must be >= 0");
  return s;
}

inline void trial(const ExperimentConfig& cfg, const Setup& s, int t, TrialRecord& rec) {
  rng::xoshiro256pp gen(rng::derive_seed(cfg.master_seed, cfg.experiment,
                                         static_cast<std::uint64_t>(t)));
  const index_t d = static_cast<index_t>(
      s.dims[static_cast<std::size_t>(gen.next() % static_cast<std::uint64_t>(s.dims.size()))]);
  const bool symmetric = t < s.symmetric_trials;

  cmat s0;
  cmat s1;
  if (symmetric) {
    // Unitarily related pure pair at uniform priors: the square-root
    // measurement is exactly optimal here.
    const qit::PureState psi = qit::random_pure_state(d, gen);
    const cmat u = qit::random_unitary(d, gen);
    s0 = psi.projector();
    const cvec rotated = u * psi.amplitudes();
    s1 = rotated * rotated.adjoint();
  } else {
    s0 = qit::random_density(d, gen).matrix();
    s1 = qit::random_density(d, gen).matrix();
  }

  rvec w(2);
  w << 0.5, 0.5;
  const chan::Ensemble ens(w, {s0, s1});
  const double pgm_err = decode::classical_error(ens.members(), decode::pgm_povm(ens));
  const double hel = decode::helstrom_error(qit::DensityOperator(s0), qit::DensityOperator(s1));

  rec.put("dim", static_cast<double>(d));
  rec.put("symmetric", symmetric ? 1.0 : 0.0);
  rec.put("pgm_error", pgm_err);
  rec.put("helstrom_error", hel);
  rec.put("gap", pgm_err - hel);
}

inline Aggregation aggregate(const ExperimentConfig& cfg,
                             const std::vector<TrialRecord>& records) {
  const Setup s = setup(cfg);
  Aggregation agg;
  std::vector<double> gaps;
  std::vector<double> sym_gaps;
  for (const TrialRecord& r : records) {
    if (r.failed) continue;
    const auto g = detail::value_of(r, "gap");
    const auto sym = detail::value_of(r, "symmetric");
    if (!g || !sym) continue;
    gaps.push_back(*g);
    if (*sym > 0.5) sym_gaps.push_back(std::abs(*g));
  }
  agg.aggregates["min_gap"] = detail::min_of(gaps);
  agg.aggregates["max_symmetric_gap"] =
      sym_gaps.empty() ? 0.0 : detail::max_of(sym_gaps);
  agg.aggregates["symmetric_trials"] = static_cast<long>(sym_gaps.size());
  agg.aggregates["failed_trials"] = detail::count_failed(records);
  agg.bounds["optimality_floor"] = -1e-10;
  agg.bounds["symmetric_equality_tol"] = 1e-9;
  agg.flags["pgm_dominates_helstrom"] = !gaps.empty() && detail::min_of(gaps) >= -1e-10;
  agg.flags["symmetric_equality"] =
      s.symmetric_trials == 0 ||
      (!sym_gaps.empty() && detail::max_of(sym_gaps) <= 1e-9);
  agg.flags["no_trial_failures"] = detail::count_failed(records) == 0;
  return agg;
}

}  // namespace pgm

// ---------------------------------------------------------------------------
// typicality: deterministic projector audit over a list of block lengths
// ---------------------------------------------------------------------------

namespace typicality {

struct Setup {
  std::vector<double> spectrum = {0.2, 0.8};
  std::vector<int> n_list = {8, 12, 16, 20};
};

inline Setup setup(const ExperimentConfig& cfg) {
  Setup s;
  if (cfg.params.contains("spectrum")) {
    s.spectrum.clear();
    for (const json& e : cfg.params.at("spectrum")) s.spectrum.push_back(e.get<double>());
    if (s.spectrum.empty()) throw config_error("typicality: empty spectrum");
  }
  s.n_list = detail::int_list_param(cfg.params, "n_list", {8, 12, 16, 20});
  return s;
}

inline void trial(const ExperimentConfig& cfg, const Setup& s, int t, TrialRecord& rec) {
  const int n = s.n_list.at(static_cast<std::size_t>(t));
  rvec spec(static_cast<index_t>(s.spectrum.size()));
  for (std::size_t i = 0; i < s.spectrum.size(); ++i)
    spec(static_cast<index_t>(i)) = s.spectrum[i];
  const typ::TypicalProjector proj(spec, n, cfg.code.delta);

  rec.put("n", static_cast<double>(n));
  rec.put("subspace_dim", static_cast<double>(proj.subspace_dim()));
  rec.put("dim_bound", std::exp2(static_cast<double>(n) * (proj.entropy_bits() + cfg.code.delta)));
  rec.put("weight", proj.weight());
  rec.put("truncation_weight", proj.truncation_weight());
  rec.put("max_typical_log2_prob", proj.max_typical_log2_prob());
  const bool dim_ok = static_cast<double>(proj.subspace_dim()) <=
                      std::exp2(static_cast<double>(n) * (proj.entropy_bits() + cfg.code.delta));
  const double op_allow = static_cast<double>(n) * 1e-12 + 1e-12;
  const bool op_ok = proj.max_typical_log2_prob() <=
                     -static_cast<double>(n) * (proj.entropy_bits() - cfg.code.delta) + op_allow;
  rec.put("dim_ok", dim_ok ? 1.0 : 0.0);
  rec.put("op_ok", op_ok ? 1.0 : 0.0);
}

inline Aggregation aggregate(const ExperimentConfig& cfg,
                             const std::vector<TrialRecord>& records) {
  const Setup s = setup(cfg);
  Aggregation agg;
  bool dim_ok_all = !records.empty();
  bool op_ok_all = !records.empty();
  std::map<int, double> trunc;
  for (const TrialRecord& r : records) {
    if (r.failed) {
      dim_ok_all = op_ok_all = false;
      continue;
    }
    const auto d = detail::value_of(r, "dim_ok");
    const auto o = detail::value_of(r, "op_ok");
    dim_ok_all = dim_ok_all && d && *d > 0.5;
    op_ok_all = op_ok_all && o && *o > 0.5;
    const auto n = detail::value_of(r, "n");
    const auto tw = detail::value_of(r, "truncation_weight");
    if (n && tw) trunc[static_cast<int>(*n)] = *tw;
  }
  bool strictly_decreasing = trunc.size() == s.n_list.size();
  for (std::size_t i = 1; i < s.n_list.size() && strictly_decreasing; ++i) {
    const auto a = trunc.find(s.n_list[i - 1]);
    const auto b = trunc.find(s.n_list[i]);
    strictly_decreasing = a != trunc.end() && b != trunc.end() && b->second < a->second;
  }
  json tw_seq = json::array();
  for (int n : s.n_list) {
    const auto it = trunc.find(n);
    tw_seq.push_back(it == trunc.end() ? json() : json(it->second));
  }
  agg.aggregates["truncation_weights"] = tw_seq;
  agg.aggregates["failed_trials"] = detail::count_failed(records);
  agg.flags["dim_ok_all"] = dim_ok_all;
  agg.flags["op_ok_all"] = op_ok_all;
  agg.flags["truncation_strictly_decreasing"] = strictly_decreasing;
  agg.flags["no_trial_failures"] = detail::count_failed(records) == 0;
  return agg;
}

}  // namespace typicality

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline Aggregation aggregate_records(const ExperimentConfig& cfg,
                                     const std::vector<TrialRecord>& records) {
  if (cfg.experiment == "concentration") return concentration::aggregate(cfg, records);
  if (cfg.experiment == "code-run") return code_run::aggregate(cfg, records);
  if (cfg.experiment == "iid-sweep") return iid_sweep::aggregate(cfg, records);
  if (cfg.experiment == "uncertainty") return uncertainty::aggregate(cfg, records);
  if (cfg.experiment == "pgm") return pgm::aggregate(cfg, records);
  if (cfg.experiment == "typicality") return typicality::aggregate(cfg, records);
  throw config_error("unknown experiment '" + cfg.experiment + "'");
}

inline ExperimentReport run_experiment(ExperimentConfig cfg) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  // typicality is a deterministic sweep: one trial per block length.
  if (cfg.experiment == "typicality") {
    const typicality::Setup s = typicality::setup(cfg);
    cfg.trials = static_cast<int>(s.n_list.size());
    cfg.trial_offset = 0;
  }

  std::vector<TrialRecord> records;
  if (cfg.experiment == "concentration") {
    const concentration::Setup s = concentration::setup(cfg);
    records = run_trials(cfg, [&](int t, TrialRecord& rec) { concentration::trial(cfg, s, t, rec); });
  } else if (cfg.experiment == "code-run") {
    const chan::StinespringIsometry v = detail::build_channel(cfg.channel);
    records = run_trials(cfg, [&](int t, TrialRecord& rec) { code_run::trial(cfg, v, t, rec); });
  } else if (cfg.experiment == "iid-sweep") {
    const iid_sweep::Setup s = iid_sweep::setup(cfg);
    iid_sweep::validate_range(cfg, s);
    const auto reds = iid_sweep::shared_reductions(cfg, s);
    records = run_trials(cfg, [&](int t, TrialRecord& rec) { iid_sweep::trial(cfg, s, reds, t, rec); });
  } else if (cfg.experiment == "uncertainty") {
    const uncertainty::Setup s = uncertainty::setup(cfg);
    records = run_trials(cfg, [&](int t, TrialRecord& rec) { uncertainty::trial(cfg, s, t, rec); });
  } else if (cfg.experiment == "pgm") {
    const pgm::Setup s = pgm::setup(cfg);
    records = run_trials(cfg, [&](int t, TrialRecord& rec) { pgm::trial(cfg, s, t, rec); });
  } else if (cfg.experiment == "typicality") {
    const typicality::Setup s = typicality::setup(cfg);
    records = run_trials(cfg, [&](int t, TrialRecord& rec) { typicality::trial(cfg, s, t, rec); });
  } else {
    throw config_error("unknown experiment '" + cfg.experiment + "'");
  }

  ExperimentReport report;
  report.config = cfg;
  report.trials = std::move(records);
  Aggregation agg = aggregate_records(cfg, report.trials);
  report.aggregates = std::move(agg.aggregates);
  report.bounds = std::move(agg.bounds);
  report.flags = std::move(agg.flags);
  report.pass = true;
  for (auto it = report.flags.begin(); it != report.flags.end(); ++it)
    report.pass = report.pass && it.value().get<bool>();
  report.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// Pools two runs of the same configuration over disjoint trial ranges and
// re-aggregates; confidence limits recomputed from the union are tighter.
inline ExperimentReport merge_reports(const ExperimentReport& a, const ExperimentReport& b) {
  const auto normalized = [](const ExperimentConfig& c) {
    json j = to_json(c);
    j["trials"] = 0;
    j["trial_offset"] = 0;
    j["workers"] = 0;
    j["out"] = "";
    return j;
  };
  if (normalized(a.config) != normalized(b.config))
    throw config_error("merge_reports: configurations differ beyond the trial range");
  const int a_lo = a.config.trial_offset;
  const int a_hi = a_lo + a.config.trials;
  const int b_lo = b.config.trial_offset;
  const int b_hi = b_lo + b.config.trials;
  if (a_lo < b_hi && b_lo < a_hi)
    throw config_error("merge_reports: trial ranges overlap");

  ExperimentReport out;
  out.config = a.config;
  out.config.trial_offset = std::min(a_lo, b_lo);
  out.config.trials = a.config.trials + b.config.trials;
  out.trials = a.trials;
  out.trials.insert(out.trials.end(), b.trials.begin(), b.trials.end());
  std::sort(out.trials.begin(), out.trials.end(),
            [](const TrialRecord& x, const TrialRecord& y) { return x.trial < y.trial; });
  Aggregation agg = aggregate_records(out.config, out.trials);
  out.aggregates = std::move(agg.aggregates);
  out.bounds = std::move(agg.bounds);
  out.flags = std::move(agg.flags);
  out.pass = true;
  for (auto it = out.flags.begin(); it != out.flags.end(); ++it)
    out.pass = out.pass && it.value().get<bool>();
  out.wall_clock_s = a.wall_clock_s + b.wall_clock_s;
  return out;
}

// For the typicality experiment: the per-block-length type-class tables,
// keyed by filename stem.
inline std::vector<std::pair<std::string, typ::TypicalProjector>> type_class_tables(
    const ExperimentConfig& cfg) {
  const typicality::Setup s = typicality::setup(cfg);
  rvec spec(static_cast<index_t>(s.spectrum.size()));
  for (std::size_t i = 0; i < s.spectrum.size(); ++i)
    spec(static_cast<index_t>(i)) = s.spectrum[i];
  std::vector<std::pair<std::string, typ::TypicalProjector>> out;
  for (int n : s.n_list)
    out.emplace_back("type_classes_n" + std::to_string(n),
                     typ::TypicalProjector(spec, n, cfg.code.delta));
  return out;
}

}  // namespace gausscode::harness
