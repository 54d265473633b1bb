// charbox — exact-arithmetic workbench for multiplicative character sums over
// F_{p^n}: box sums, multiplicative energy, lattice minima, the amplification
// pipeline, analytic-input verification, grid sweeps, and SVG plots.
//
// Exit codes: 0 success; 1 a mathematical verdict failed (a theorem-backed
// inequality was violated — signals an implementation bug); 2 invalid input
// or config; 3 budget exceeded.
//
// Output is deterministic: identical flags, config, and seed produce
// byte-identical text, CSV, JSON, and SVG.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "charbox/report_json.hpp"
#include "charbox/svg.hpp"

using namespace charbox;

namespace {

std::vector<u64> parse_u64_list(const std::string& s, char sep = ',') {
  std::vector<u64> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) fail_invalid("empty entry in list \"" + s + "\"");
    out.push_back(std::stoull(cur));
    cur.clear();
  };
  for (char c : s) {
    if (c == sep)
      flush();
    else if (c >= '0' && c <= '9')
      cur += c;
    else
      fail_invalid("unexpected character in list \"" + s + "\"");
  }
  flush();
  return out;
}

std::vector<i64> parse_i64_list(const std::string& s) {
  std::vector<i64> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty() || cur == "-") fail_invalid("empty entry in list \"" + s + "\"");
    out.push_back(std::stoll(cur));
    cur.clear();
  };
  for (char c : s) {
    if (c == ',')
      flush();
    else if ((c >= '0' && c <= '9') || c == '-')
      cur += c;
    else
      fail_invalid("unexpected character in list \"" + s + "\"");
  }
  flush();
  return out;
}

struct CommonArgs {
  u64 p = 7;
  int n = 2;
  u64 cap = 0;
  std::string H, N;
  u64 m = 0;
  u64 order = 0;
  bool json = false;
};

void add_field_opts(CLI::App* sc, CommonArgs& a) {
  sc->add_option("--p", a.p, "field characteristic (prime)");
  sc->add_option("--n", a.n, "extension degree");
  sc->add_option("--cap", a.cap, "table size cap for q = p^n (0: default 2^26)")
      ->envname("CHARBOX_CAP");
}
void add_box_opts(CLI::App* sc, CommonArgs& a) {
  sc->add_option("--H", a.H, "side lengths, comma separated (e.g. 5,7)");
  sc->add_option("--N", a.N, "offsets, comma separated (default all 0)");
}
void add_char_opts(CLI::App* sc, CommonArgs& a) {
  sc->add_option("--m", a.m, "character index (chi: g^k -> e(mk/(q-1)))");
  sc->add_option("--order", a.order, "pick the canonical character of this order instead");
}

Character char_of(const FieldCtx& F, const CommonArgs& a) {
  if (a.m && a.order) fail_invalid("give --m or --order, not both");
  if (a.order) {
    if (F.units() % a.order != 0) fail_invalid("no character of that order: it must divide q-1");
    return Character(F, F.units() / a.order);
  }
  return Character(F, a.m);
}

BoxSpec box_of(const FieldCtx& F, const CommonArgs& a) {
  if (a.H.empty()) fail_invalid("--H is required");
  auto H = parse_u64_list(a.H);
  std::vector<i64> N;
  if (!a.N.empty()) N = parse_i64_list(a.N);
  return make_box(F, H, N);
}

void print_kv(const ojson& j, int indent = 0) {
  for (auto& [k, v] : j.items()) {
    std::cout << std::string(indent, ' ') << k;
    if (v.is_object()) {
      std::cout << ":\n";
      print_kv(v, indent + 2);
    } else if (v.is_string()) {
      std::cout << " = " << v.get<std::string>() << "\n";
    } else {
      std::cout << " = " << v.dump() << "\n";
    }
  }
}

int emit(const ojson& j, bool json, bool math_ok) {
  if (json)
    std::cout << j.dump(2) << "\n";
  else
    print_kv(j);
  return math_ok ? 0 : 1;
}

// --- subcommands -------------------------------------------------------------

int cmd_field_info(const CommonArgs& a) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  ojson j;
  j["p"] = F.p();
  j["n"] = F.n();
  j["q"] = F.q();
  j["units"] = F.units();
  j["modulus"] = F.modulus();
  j["generator"] = F.exp(1).v;
  j["generator_coeffs"] = F.coeffs(F.exp(1));
  std::string fac;
  for (auto [pp, e] : factorize(F.units())) {
    if (!fac.empty()) fac += " * ";
    fac += std::to_string(pp);
    if (e > 1) fac += "^" + std::to_string(e);
  }
  j["units_factorization"] = fac;
  ojson subs = ojson::array();
  for (int s = 1; s <= F.n(); ++s)
    if (F.n() % s == 0) {
      u64 sz = 1;
      for (int i = 0; i < s; ++i) sz *= F.p();
      subs.push_back(ojson{{"degree", s}, {"size", sz}});
    }
  j["subfields"] = subs;
  return emit(j, a.json, true);
}

int cmd_sum(const CommonArgs& a, const std::string& shift, int prefix, u64 budget) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  auto box = box_of(F, a);
  Character chi = char_of(F, a);
  Elem sh = shift.empty() ? Elem{0} : parse_elem(F, shift);
  BoxSumResult r = prefix ? sublattice_char_sum(F, box, chi, prefix, budget)
                          : box_char_sum(F, box, chi, sh, budget);
  ojson j;
  j["B"] = r.size;
  j["zeros"] = r.zeros;
  j["exact"] = r.exact;
  if (r.exact) {
    j["S_a"] = r.ex.a;
    j["S_b"] = r.ex.b;  // coefficients in the order-d integer basis {1, zeta}
  }
  j["S_re"] = r.sum.real();
  j["S_im"] = r.sum.imag();
  j["abs"] = static_cast<double>(r.abs_val);
  j["err"] = static_cast<double>(r.err);
  j["ratio"] = r.ratio;
  return emit(j, a.json, true);
}

int cmd_energy(const CommonArgs& a, const EnergyOptions& opt) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  auto box = box_of(F, a);
  auto V = kl_verdict(F, box, opt);
  const EnergyReport& R = V.rep;
  ojson j;
  j["p"] = R.p;
  j["n"] = R.n;
  j["H"] = R.H;
  j["N"] = R.N;
  j["B"] = R.B_size;
  j["B0"] = R.B0_size;
  j["zero_in_B"] = R.zero_in_B;
  j["wrapped"] = R.wrapped;
  j["E"] = R.E;
  j["Zprime"] = R.Zprime_size;
  j["Z"] = R.Z_size;
  j["Zprime_minus_Z"] = R.Zprime_minus_Z;
  j["sum_f_sq"] = R.sum_f_sq;
  j["sum_f0_sq"] = R.sum_f0_sq;
  j["L1"] = R.L1;
  j["L2"] = R.L2;
  j["en_holds"] = R.en_holds;
  j["fz_holds"] = R.fz_holds;
  j["f_le_f0"] = R.f_le_f0;
  j["chain_holds"] = R.chain_holds;
  j["kl_hypothesis"] = R.kl_hypothesis;
  j["kl_ratio"] = R.kl_ratio;
  j["l1_ratio"] = R.l1_ratio;
  j["l2_ratio"] = R.l2_ratio;
  j["sampled"] = R.sampled;
  j["pass"] = V.pass;
  return emit(j, a.json, V.pass);
}

int cmd_minima(const CommonArgs& a, const std::string& zs, u64 budget) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  if (a.H.empty()) fail_invalid("--H is required");
  auto H = parse_u64_list(a.H);
  Elem z = parse_elem(F, zs);
  auto L = build_lambda_z(F, polynomial_basis(F), z, H);
  auto R = successive_minima(L, budget);
  auto M = minkowski_check(L, R);
  auto D = dual_first_minimum(L, budget);
  u64 pts = count_points(L, Rat::make(1, 1), budget);
  bool outside = F.subfield_degree(z) > 1;
  bool floor_ok = outside ? lambda1_floor_holds(F, L, R) : true;
  bool tr = transference_holds(R, D);

  ojson j;
  j["p"] = F.p();
  j["n"] = F.n();
  j["z"] = z.v;
  j["z_outside_prime_field"] = outside;
  ojson lam = ojson::array();
  for (const Rat& l : R.lambda) lam.push_back(l.str());
  j["lambda"] = lam;
  j["det"] = R.det.str();
  j["candidates"] = R.candidates;
  j["minkowski_lower_ok"] = M.lower_ok;
  j["minkowski_upper_ok"] = M.upper_ok;
  j["minkowski_product"] = M.scaled_product;
  j["points_in_D"] = pts;
  j["lambda1_floor_ok"] = floor_ok;
  j["dual_gauge_min"] = D.gauge_min;
  j["lambda1_star"] = D.lambda1_star.str();
  j["dual_identity_ok"] = D.wb_identity;
  j["double_dual_ok"] = D.double_dual_ok;
  j["dual_apriori_ok"] = D.apriori_ok;
  j["transference_product"] = D.lambda1_star.value() * R.lambda.back().value();
  j["transference_ok"] = tr;
  bool ok = M.lower_ok && M.upper_ok && D.wb_identity && D.double_dual_ok && D.apriori_ok &&
            tr && floor_ok;
  j["pass"] = ok;
  return emit(j, a.json, ok);
}

int cmd_burgess(const CommonArgs& a, double epsilon, unsigned r, u64 budget) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  auto box = box_of(F, a);
  Character chi = char_of(F, a);
  std::optional<unsigned> ro;
  if (r) ro = r;
  auto R = burgess_pipeline(F, box, chi, epsilon, ro, budget);
  return emit(to_json(R), a.json, R.theorem_verdicts_pass());
}

int cmd_verify_weil(const CommonArgs& a, const std::string& roots_s, const std::string& mults_s,
                    const std::string& interval, unsigned r, u64 budget) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  Character chi = char_of(F, a);
  bool complete = !roots_s.empty();
  bool moment = !interval.empty();
  if (complete == moment)
    fail_invalid("give either --roots/--mults (complete sum) or --interval (moment bound)");
  ojson j;
  bool ok;
  if (complete) {
    if (mults_s.empty()) fail_invalid("--mults is required with --roots");
    auto rl = parse_i64_list(roots_s);
    std::vector<Elem> roots;
    for (i64 v : rl) roots.push_back(F.from_int(v));
    auto mults = parse_u64_list(mults_s);
    auto R = weil_complete(F, chi, roots, mults);
    j["p"] = R.p;
    j["q"] = R.q;
    j["n"] = R.n;
    j["d"] = R.d;
    j["m_roots"] = R.m_roots;
    j["exact"] = R.exact;
    j["equality"] = R.equality;
    j["certified"] = R.certified;
    if (ExactSum::supported(R.d)) {
      j["S_a"] = R.sum.a;
      j["S_b"] = R.sum.b;
    }
    j["abs"] = static_cast<double>(R.abs_val);
    j["err"] = static_cast<double>(R.err);
    j["lhs_sq"] = R.lhs_sq.str();
    j["rhs_sq"] = R.rhs_sq.str();
    j["holds"] = R.holds;
    ok = R.holds;
  } else {
    std::string iv = interval;
    for (char& c : iv)
      if (c == ':') c = ',';
    auto ends = parse_i64_list(iv);
    if (ends.size() != 2) fail_invalid("--interval takes a:b (the window {a..b})");
    if (ends[1] < ends[0]) fail_invalid("empty interval");
    auto R = weil_moment(F, chi, ends[0], static_cast<u64>(ends[1] - ends[0] + 1), r, budget);
    j["p"] = R.p;
    j["q"] = R.q;
    j["n"] = R.n;
    j["d"] = R.d;
    j["z0"] = R.z0;
    j["len"] = R.len;
    j["r"] = R.r;
    j["exact"] = R.exact;
    if (R.exact) j["lhs"] = R.lhs.str();
    j["lhs_approx"] = static_cast<double>(R.lhs_approx);
    j["err"] = static_cast<double>(R.err);
    j["rhs_core"] = R.rhs_core.str();
    j["rhs_weil_sq"] = R.rhs_weil_sq.str();
    j["rhs_approx"] = static_cast<double>(R.rhs_approx);
    j["holds"] = R.holds;
    ok = R.holds;
  }
  return emit(j, a.json, ok);
}

int cmd_verify_katz(const CommonArgs& a, u64 len, u64 budget) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  Character chi = char_of(F, a);
  auto R = katz_scan(F, chi, len ? len : F.p(), budget);
  ojson j;
  j["p"] = R.p;
  j["q"] = R.q;
  j["n"] = R.n;
  j["d"] = R.d;
  j["len"] = R.len;
  j["generators"] = R.generators;
  j["windows"] = R.windows;
  j["exact"] = R.exact;
  j["max_abs"] = static_cast<double>(R.max_abs);
  j["err"] = static_cast<double>(R.err);
  j["argmax_g"] = R.argmax_g;
  j["argmax_x"] = R.argmax_x;
  j["c_estimate"] = R.c_estimate;
  j["complete_checked"] = R.complete_checked;
  j["complete_all_minus1"] = R.complete_all_minus1;
  bool ok = !R.complete_checked || R.complete_all_minus1;
  return emit(j, a.json, ok);
}

int cmd_verify_pv(const CommonArgs& a, int s, const std::string& A_s, u64 A_count, u64 budget,
                  u64 seed) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  Character chi = char_of(F, a);
  std::vector<Elem> A;
  if (!A_s.empty())
    for (i64 v : parse_i64_list(A_s)) A.push_back(F.from_int(v));
  else
    for (u64 v = 1; v <= A_count; ++v) A.push_back(F.from_int(static_cast<i64>(v)));
  auto R = pv_subfield_check(F, chi, s, A, budget, seed);
  ojson j;
  j["p"] = R.p;
  j["q"] = R.q;
  j["n"] = R.n;
  j["s"] = R.s;
  j["d"] = R.d;
  j["A_size"] = R.A_size;
  j["shifts"] = R.shifts;
  j["all_shifts"] = R.all_shifts;
  j["seed"] = R.seed;
  j["exact"] = R.exact;
  j["max_abs"] = static_cast<double>(R.max_abs);
  j["err"] = static_cast<double>(R.err);
  j["argmax_z"] = R.argmax_z;
  j["scale"] = R.scale;
  j["ratio"] = R.ratio;
  return emit(j, a.json, true);  // shape-only: the scale carries no proven constant
}

int cmd_census(const CommonArgs& a, u64 budget) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  auto box = box_of(F, a);
  auto C = subfield_census(F, box, budget);
  bool ok = C.k_bound_ok && C.omega_q_subset_ok && C.bound_ok && C.uniqueness_ok &&
            C.wq_in_subfield_ok && C.wq_size_ok;
  ojson j = to_json(C);
  j["pass"] = ok;
  return emit(j, a.json, ok);
}

int cmd_main_report(const CommonArgs& a, double epsilon, unsigned r, u64 budget) {
  auto F = FieldCtx::make(a.p, a.n, a.cap);
  auto box = box_of(F, a);
  Character chi = char_of(F, a);
  std::optional<unsigned> ro;
  if (r) ro = r;
  auto R = main_report(F, box, chi, epsilon, ro, budget);
  return emit(to_json(R), a.json, R.verdicts_ok);
}

struct SweepFlags {
  std::string config_path, out_dir = ".";
  std::string primes, degrees, scans, boxes, orders;
  u64 weil_samples = 0;
  i64 seed = -1;
  u64 cap = 0;
  int jobs = 0;
};

int cmd_sweep(const SweepFlags& f) {
  SweepConfig C;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path, std::ios::binary);
    if (!in) fail_invalid("cannot read config " + f.config_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    C = sweep_config_from_json(text);
  }
  if (!f.primes.empty()) C.primes = parse_u64_list(f.primes);
  if (!f.degrees.empty()) {
    C.degrees.clear();
    for (u64 d : parse_u64_list(f.degrees)) C.degrees.push_back(static_cast<int>(d));
  }
  if (!f.scans.empty()) {
    C.scans.clear();
    std::string cur;
    for (char c : f.scans + ",") {
      if (c == ',') {
        if (!cur.empty()) C.scans.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
  }
  if (!f.boxes.empty()) {
    C.boxes.clear();
    std::string cur;
    for (char c : f.boxes + "|") {
      if (c == '|') {
        if (!cur.empty()) C.boxes.push_back(parse_u64_list(cur, 'x'));
        cur.clear();
      } else {
        cur += c;
      }
    }
  }
  if (!f.orders.empty()) C.orders = parse_u64_list(f.orders);
  if (f.weil_samples) C.weil_samples = f.weil_samples;
  if (f.seed >= 0) C.seed = static_cast<u64>(f.seed);
  if (f.cap) C.cap = f.cap;
  if (f.jobs) C.jobs = f.jobs;
  validate_sweep(C);

  auto outputs = run_sweep(C);
  std::filesystem::create_directories(f.out_dir);
  for (const auto& o : outputs) {
    std::filesystem::path path = std::filesystem::path(f.out_dir) / o.name;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_invalid("cannot open " + path.string() + " for writing");
    out.write(o.bytes.data(), static_cast<std::streamsize>(o.bytes.size()));
    std::cout << "wrote " << path.string() << " (" << o.rows << " rows)\n";
  }
  return 0;
}

int cmd_plot(const std::string& in, const std::string& xcol, const std::string& ycol,
             const std::string& series_col, const std::string& out, const std::string& title) {
  std::ifstream fin(in, std::ios::binary);
  if (!fin) fail_invalid("cannot read " + in);
  std::string text((std::istreambuf_iterator<char>(fin)), std::istreambuf_iterator<char>());
  auto data = parse_csv(text);
  int xi = data.column(xcol), yi = data.column(ycol);
  int si = series_col.empty() ? -1 : data.column(series_col);

  std::map<std::string, ScatterSeries> by_series;
  for (const auto& row : data.rows) {
    std::string key = si >= 0 ? row[si] : std::string();
    char* endp = nullptr;
    double x = strtod(row[xi].c_str(), &endp);
    double y = strtod(row[yi].c_str(), &endp);
    auto& s = by_series[key];
    s.name = key;
    s.pts.push_back({x, y});
  }
  ScatterPlot plot;
  plot.title = title.empty() ? ycol + " vs " + xcol : title;
  plot.xlabel = xcol;
  plot.ylabel = ycol;
  for (auto& [k, s] : by_series) plot.series.push_back(std::move(s));
  std::string svg = plot.render();
  std::ofstream fout(out, std::ios::binary);
  if (!fout) fail_invalid("cannot open " + out + " for writing");
  fout.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"charbox: exact character-sum workbench over F_{p^n}"};
  app.require_subcommand(1);
  int rc = 0;

  CommonArgs a;
  u64 budget = 100000000ull;
  std::string shift, zs = "t", roots_s, mults_s, interval, A_s;
  int prefix = 0, pv_s = 1;
  unsigned r_flag = 0;
  double epsilon = 0.25;
  u64 len = 0, A_count = 0, seed = 1;
  EnergyOptions eopt;
  SweepFlags sf;
  std::string plot_in, plot_x = "p", plot_y, plot_series, plot_out = "plot.svg", plot_title;

  auto add_json = [&](CLI::App* sc) { sc->add_flag("--json", a.json, "emit JSON"); };
  auto add_budget = [&](CLI::App* sc) {
    sc->add_option("--budget", budget, "work budget (enumerated terms)");
  };

  auto* sc_info = app.add_subcommand("field-info", "field tables, modulus, generator");
  add_field_opts(sc_info, a);
  add_json(sc_info);
  sc_info->callback([&] { rc = cmd_field_info(a); });

  auto* sc_sum = app.add_subcommand("sum", "character sum over a box (or box prefix)");
  add_field_opts(sc_sum, a);
  add_box_opts(sc_sum, a);
  add_char_opts(sc_sum, a);
  sc_sum->add_option("--shift", shift, "additive shift (element syntax: t, 2t+1, idx:N, or integer)");
  sc_sum->add_option("--prefix", prefix, "sum over the rank-k coordinate prefix instead");
  add_budget(sc_sum);
  add_json(sc_sum);
  sc_sum->callback([&] { rc = cmd_sum(a, shift, prefix, budget); });

  auto* sc_energy = app.add_subcommand("energy", "multiplicative energy and the counting chain");
  add_field_opts(sc_energy, a);
  add_box_opts(sc_energy, a);
  sc_energy->add_option("--pair-budget", eopt.pair_budget, "max ordered pairs enumerated");
  sc_energy->add_option("--support-cap", eopt.support_cap, "max distinct ratios tracked");
  sc_energy->add_flag("--sample", eopt.allow_sampling, "sample above the pair budget");
  sc_energy->add_option("--seed", eopt.seed, "seed for the sampled path");
  add_json(sc_energy);
  sc_energy->callback([&] { rc = cmd_energy(a, eopt); });

  auto* sc_min = app.add_subcommand("minima", "successive minima of the ratio lattice");
  add_field_opts(sc_min, a);
  sc_min->add_option("--z", zs, "ratio element (element syntax)");
  sc_min->add_option("--H", a.H, "weights, comma separated");
  add_budget(sc_min);
  add_json(sc_min);
  sc_min->callback([&] { rc = cmd_minima(a, zs, budget); });

  auto* sc_bur = app.add_subcommand("burgess", "shift-amplification pipeline on a box");
  add_field_opts(sc_bur, a);
  add_box_opts(sc_bur, a);
  add_char_opts(sc_bur, a);
  sc_bur->add_option("--epsilon", epsilon, "saving parameter in (0, n]");
  sc_bur->add_option("--r", r_flag, "override the moment exponent r in [1,6]");
  add_budget(sc_bur);
  add_json(sc_bur);
  sc_bur->callback([&] { rc = cmd_burgess(a, epsilon, r_flag, budget); });

  auto* sc_weil = app.add_subcommand("verify-weil", "complete-sum or interval-moment bound");
  add_field_opts(sc_weil, a);
  add_char_opts(sc_weil, a);
  sc_weil->add_option("--roots", roots_s, "polynomial roots, comma separated integers");
  sc_weil->add_option("--mults", mults_s, "root multiplicities, comma separated");
  sc_weil->add_option("--interval", interval, "window a:b for the moment bound");
  sc_weil->add_option("--r", r_flag, "moment exponent r in [1,6]");
  add_budget(sc_weil);
  add_json(sc_weil);
  sc_weil->callback(
      [&] { rc = cmd_verify_weil(a, roots_s, mults_s, interval, r_flag ? r_flag : 2, budget); });

  auto* sc_katz = app.add_subcommand("verify-katz", "sliding-window scan over field generators");
  add_field_opts(sc_katz, a);
  add_char_opts(sc_katz, a);
  sc_katz->add_option("--len", len, "window length (default p: full period)");
  add_budget(sc_katz);
  add_json(sc_katz);
  sc_katz->callback([&] { rc = cmd_verify_katz(a, len, budget); });

  auto* sc_pv = app.add_subcommand("verify-pv", "shifted box sums inside a subfield");
  add_field_opts(sc_pv, a);
  add_char_opts(sc_pv, a);
  sc_pv->add_option("--s", pv_s, "subfield degree (divides n)");
  sc_pv->add_option("--A", A_s, "set A, comma separated integers (embedded mod p)");
  sc_pv->add_option("--A-count", A_count, "use A = {1..k} instead");
  sc_pv->add_option("--seed", seed, "seed for sampled shifts");
  add_budget(sc_pv);
  add_json(sc_pv);
  sc_pv->callback([&] { rc = cmd_verify_pv(a, pv_s, A_s, A_count, budget, seed); });

  auto* sc_cen = app.add_subcommand("census", "degenerate-tuple census over a box");
  add_field_opts(sc_cen, a);
  add_box_opts(sc_cen, a);
  add_budget(sc_cen);
  add_json(sc_cen);
  sc_cen->callback([&] { rc = cmd_census(a, budget); });

  auto* sc_main = app.add_subcommand("main-report", "route a (box, character, epsilon) instance");
  add_field_opts(sc_main, a);
  add_box_opts(sc_main, a);
  add_char_opts(sc_main, a);
  sc_main->add_option("--epsilon", epsilon, "saving parameter in (0, 1)");
  sc_main->add_option("--r", r_flag, "override the moment exponent r in [1,6]");
  add_budget(sc_main);
  add_json(sc_main);
  sc_main->callback([&] { rc = cmd_main_report(a, epsilon, r_flag, budget); });

  auto* sc_sweep = app.add_subcommand("sweep", "grid driver: one CSV per scan");
  sc_sweep->add_option("--config", sf.config_path, "JSON config file");
  sc_sweep->add_option("--out-dir", sf.out_dir, "output directory (default .)");
  sc_sweep->add_option("--primes", sf.primes, "override: primes, comma separated");
  sc_sweep->add_option("--degrees", sf.degrees, "override: degrees, comma separated");
  sc_sweep->add_option("--scans", sf.scans, "override: scans, comma separated");
  sc_sweep->add_option("--boxes", sf.boxes, "override: H-vectors like 5x5|2x3");
  sc_sweep->add_option("--orders", sf.orders, "override: character orders");
  sc_sweep->add_option("--weil-samples", sf.weil_samples, "override: polynomials per field");
  sc_sweep->add_option("--seed", sf.seed, "override: seed");
  sc_sweep->add_option("--cap", sf.cap, "override: table cap")->envname("CHARBOX_CAP");
  sc_sweep->add_option("--jobs", sf.jobs, "worker threads (never changes output bytes)");
  sc_sweep->callback([&] { rc = cmd_sweep(sf); });

  auto* sc_plot = app.add_subcommand("plot", "SVG scatter from a sweep CSV");
  sc_plot->add_option("--in", plot_in, "input CSV")->required();
  sc_plot->add_option("--x", plot_x, "x column (default p)");
  sc_plot->add_option("--y", plot_y, "y column")->required();
  sc_plot->add_option("--series", plot_series, "group points by this column");
  sc_plot->add_option("--out", plot_out, "output SVG path");
  sc_plot->add_option("--title", plot_title, "plot title");
  sc_plot->callback([&] { rc = cmd_plot(plot_in, plot_x, plot_y, plot_series, plot_out, plot_title); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag errors are invalid input
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }
  return rc;
}
