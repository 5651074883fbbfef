#pragma once

// JSON / CSV serialization for report types and the code debug dump.
// Complex amplitudes serialize as [re, im] pairs; matrices as row-major
// nested arrays. The audit/report emitters keep exactly the documented field
// names so downstream schema checks stay strict.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gausscode/codes/code.hpp"
#include "gausscode/core.hpp"
#include "gausscode/decode/audit.hpp"
#include "gausscode/decode/oneshot.hpp"
#include "gausscode/gaussian/tails.hpp"
#include "gausscode/typicality/typical.hpp"

namespace gausscode::io {

using json = nlohmann::json;

inline json to_json(const cmat& m) {
  json rows = json::array();
  for (index_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (index_t c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline cmat matrix_from_json(const json& rows) {
  const index_t nr = static_cast<index_t>(rows.size());
  if (nr == 0) return cmat(0, 0);
  const index_t nc = static_cast<index_t>(rows.at(0).size());
  cmat m(nr, nc);
  for (index_t r = 0; r < nr; ++r)
    for (index_t c = 0; c < nc; ++c) {
      const json& p = rows.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
      m(r, c) = cplx(p.at(0).get<double>(), p.at(1).get<double>());
    }
  return m;
}

inline json to_json(const gauss::TailBoundReport& r) {
  return json{{"bound_name", r.bound_name}, {"epsilon", r.epsilon},
              {"theoretical", r.theoretical}, {"empirical", r.empirical},
              {"trials", r.trials},           {"wilson_upper", r.wilson_upper},
              {"pass", r.pass}};
}

inline json to_json(const decode::OneShotParams& p) {
  return json{{"epsilon", p.epsilon}, {"eta", p.eta},
              {"D_param", p.D_param}, {"Delta", p.Delta},
              {"rank_PE", p.rank_PE}, {"N", p.N},
              {"lambda", p.lambda},   {"exponent_divisor", p.exponent_divisor}};
}

inline json to_json(const decode::OneShotBounds& b) {
  return json{{"lambda", b.lambda},
              {"chi_floor", b.chi_floor},
              {"q_error", b.q_error},
              {"q_error_simplified", b.q_error_simplified},
              {"vacuous", b.vacuous},
              {"epsilon_in_range", b.epsilon_in_range},
              {"sizing_ok", b.sizing_ok}};
}

inline json to_json(const decode::InformationAudit& a) {
  return json{{"chi_basis", a.chi_basis},
              {"chi_conjugate", a.chi_conjugate},
              {"I_RB", a.I_RB},
              {"I_RE", a.I_RE},
              {"H_R", a.H_R},
              {"duality_residual", a.duality_residual},
              {"pinsker_slack", a.pinsker_slack},
              {"uncertainty_slack", a.uncertainty_slack},
              {"fano_bound", a.fano_bound},
              {"decoupling_distance", a.decoupling_distance}};
}

inline json to_json(const typ::TypicalityReport& r) {
  return json{{"n", r.n},
              {"delta", r.delta},
              {"entropy_bits", r.entropy_bits},
              {"subspace_dim", r.subspace_dim},
              {"dim_bound", r.dim_bound},
              {"weight", r.weight},
              {"truncation_weight", r.truncation_weight},
              {"max_typical_prob", r.max_typical_prob},
              {"op_bound", r.op_bound},
              {"dim_ok", r.dim_ok},
              {"op_ok", r.op_ok}};
}

// Debug dump for regression fixtures; round-trips through code_from_json.
inline json code_debug_json(const codes::SubspaceCode& code) {
  return json{{"N", code.N},
              {"ambient_dim", code.ambient_dim},
              {"seed", code.seed},
              {"support_rank", code.support_rank},
              {"rho_tilde", to_json(code.rho_tilde)},
              {"g", to_json(code.g)},
              {"gamma", to_json(code.gamma)},
              {"Gamma", to_json(code.Gamma)},
              {"phi", to_json(code.phi)},
              {"phi_hat", to_json(code.phi_hat)}};
}

inline codes::SubspaceCode code_from_json(const json& j) {
  codes::SubspaceCode code;
  code.N = j.at("N").get<int>();
  code.ambient_dim = j.at("ambient_dim").get<index_t>();
  code.seed = j.at("seed").get<std::uint64_t>();
  code.support_rank = j.at("support_rank").get<index_t>();
  code.rho_tilde = matrix_from_json(j.at("rho_tilde"));
  code.g = matrix_from_json(j.at("g"));
  code.gamma = matrix_from_json(j.at("gamma"));
  code.Gamma = matrix_from_json(j.at("Gamma"));
  code.phi = matrix_from_json(j.at("phi"));
  code.phi_hat = matrix_from_json(j.at("phi_hat"));
  return code;
}

// Lexicographically ordered type-class table: one row per class.
inline std::string type_classes_csv(const typ::TypicalProjector& proj) {
  std::string out = "counts,log2_sequence_prob,multiplicity,typical\n";
  char buf[64];
  for (const typ::TypeClass& tc : proj.classes()) {
    std::string counts;
    for (std::size_t i = 0; i < tc.counts.size(); ++i) {
      if (i) counts += ';';
      counts += std::to_string(tc.counts[i]);
    }
    std::snprintf(buf, sizeof(buf), "%.17g", tc.log2_sequence_prob);
    out += counts;
    out += ',';
    out += buf;
    out += ',';
    out += std::to_string(tc.multiplicity);
    out += ',';
    out += tc.typical ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace gausscode::io
