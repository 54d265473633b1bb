#pragma once
// JSON views of the report structs with a fixed key order (insertion order,
// via nlohmann::ordered_json), so serialized reports are byte-stable.

#include <json.hpp>

#include "sweep.hpp"

namespace charbox {

using ojson = nlohmann::ordered_json;

inline ojson to_json(const BurgessReport& R) {
  ojson j;
  j["p"] = R.p;
  j["n"] = R.n;
  j["H"] = R.H;
  j["N"] = R.N;
  j["m"] = R.m;
  j["d"] = R.d;
  j["epsilon"] = R.epsilon;
  j["r"] = R.r;
  j["r_overridden"] = R.r_overridden;
  j["delta"] = R.delta;
  j["I_len"] = R.I_len;
  j["B0_counts"] = R.B0_counts;
  j["B_size"] = R.B_size;
  j["B0_size"] = R.B0_size;
  j["exact"] = R.exact;
  j["S_abs"] = static_cast<double>(R.S_abs);
  j["T_abs"] = static_cast<double>(R.T_abs);
  j["fi_residual"] = static_cast<double>(R.fi_residual);
  j["fi_bound"] = static_cast<double>(R.fi_bound);
  j["fi_holds"] = R.fi_holds;
  j["fi_counting_holds"] = R.fi_counting_holds;
  j["A"] = R.A;
  j["a_identity"] = R.a_identity;
  j["a_bound"] = R.a_bound;
  j["C"] = static_cast<double>(R.C_approx);
  j["ti_rhs"] = static_cast<double>(R.ti_rhs);
  j["ti_slack"] = static_cast<double>(R.ti_slack);
  j["ti_holds"] = R.ti_holds;
  j["pass"] = R.theorem_verdicts_pass();
  return j;
}

inline ojson to_json(const SubfieldCensus& C) {
  ojson j;
  j["p"] = C.p;
  j["n"] = C.n;
  j["r_small"] = C.r_small;
  j["sub_deg"] = C.sub_deg;
  j["k"] = C.k;
  j["k_bound_ok"] = C.k_bound_ok;
  j["Omega_size"] = C.Omega_size;
  j["Omega_q_size"] = C.Omega_q_size;
  j["omega_q_subset_ok"] = C.omega_q_subset_ok;
  j["omega_eq_omega_q"] = C.omega_eq_omega_q;
  j["prefix_product"] = C.prefix_product.str();
  j["bound_ok"] = C.bound_ok;
  j["uniqueness_ok"] = C.uniqueness_ok;
  j["Wq_size"] = C.Wq_size;
  j["wq_in_subfield_ok"] = C.wq_in_subfield_ok;
  j["wq_size_ok"] = C.wq_size_ok;
  j["tuples_enumerated"] = C.tuples_enumerated;
  return j;
}

inline ojson to_json(const BoundReport& R) {
  ojson j;
  j["p"] = R.p;
  j["q"] = R.q;
  j["n"] = R.n;
  j["m"] = R.m;
  j["d"] = R.d;
  j["epsilon"] = R.epsilon;
  j["H"] = R.H;
  j["N"] = R.N;
  j["B_size"] = R.B_size;
  j["case"] = R.case_id;
  j["eps_max"] = R.eps_max;
  j["r_small"] = R.r_small;
  j["restriction_nontrivial"] = R.restriction_nontrivial;
  j["delta_eps"] = R.delta_eps;
  j["exact"] = R.exact;
  j["S_abs"] = static_cast<double>(R.S_abs);
  j["err"] = static_cast<double>(R.err);
  j["actual_ratio"] = R.actual_ratio;
  j["predicted"] = R.predicted;
  j["nontrivial"] = R.nontrivial;
  if (R.has_burgess) j["burgess"] = to_json(R.burgess);
  if (R.case_id == 2) {
    j["piece_counts"] = R.piece_counts;
    j["pieces_total"] = R.pieces_total;
    j["min_piece"] = R.min_piece;
    j["max_piece"] = R.max_piece;
    j["pieces_in_range"] = R.pieces_in_range;
    j["sub_reports"] = R.sub_reports;
    j["sub_failures"] = R.sub_failures;
    j["sub_verdicts_ok"] = R.sub_verdicts_ok;
  }
  if (R.has_census) {
    j["census"] = to_json(R.census);
    j["S_katz_abs"] = static_cast<double>(R.S_katz_abs);
    j["S_oq_abs"] = static_cast<double>(R.S_oq_abs);
    j["S_residual_abs"] = static_cast<double>(R.S_residual_abs);
    j["omega_minus_omega_q"] = R.omega_minus_omega_q;
    j["katz_window_max"] = static_cast<double>(R.katz_window_max);
    j["split_identity_ok"] = R.split_identity_ok;
  }
  j["verdicts_ok"] = R.verdicts_ok;
  return j;
}

}  // namespace charbox
