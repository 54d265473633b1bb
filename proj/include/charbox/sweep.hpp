#pragma once
// Experiment sweeps.  A JSON-described grid of fields, boxes, and character
// orders expands into a fixed, ordered list of work items per scan; items are
// evaluated (optionally by a thread pool) and merged back in item order, so
// the output bytes depend only on the config and seed, never on the schedule.
//
// Scans:
//   energy  per (field, box): the ratio-identity energy report and verdicts
//   minima  per (field, box): every ratio z outside the prime field, with
//           exact minima, Minkowski product, dual minimum, transference
//   weil    per field: random admissible polynomials vs the square-root bound
//   moment  per (field, order, r, len): interval moment vs its bound
//
// Auto boxes (when the config lists none): `energy` uses the largest h with
// 2h^2 < p on every coordinate (the short-box regime), `minima` uses unit
// weights.

#include <json.hpp>

#include <atomic>
#include <memory>
#include <mutex>
#include <thread>

#include "csv.hpp"
#include "verify.hpp"

namespace charbox {

struct SweepConfig {
  std::vector<u64> primes{7, 11};
  std::vector<int> degrees{2};
  std::vector<std::vector<u64>> boxes;  // H-vectors; entries of arity n apply to degree-n fields
  std::vector<u64> orders{2};           // character orders for the moment scan
  std::vector<std::string> scans{"energy"};
  u64 weil_samples = 100;
  u64 seed = 1;
  u64 cap = 0;  // 0: the field module's default table cap
  int jobs = 1;
};

namespace detail {

inline bool is_prime_u64(u64 v) {
  if (v < 2) return false;
  auto f = factorize(v);
  return f.size() == 1 && f[0].second == 1;
}

inline u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::string join_u64(const std::vector<u64>& v, char sep) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

// fixed evaluation order; also the emission order of the per-scan tables
inline const std::vector<std::string>& known_scans() {
  static const std::vector<std::string> k = {"energy", "minima", "weil", "moment"};
  return k;
}

template <class Fn>
inline void parallel_items(u64 count, int jobs, Fn&& work) {
  if (jobs <= 1 || count <= 1) {
    for (u64 i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<u64> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    for (u64 i; (i = next.fetch_add(1)) < count;) {
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int nthreads = static_cast<int>(std::min<u64>(static_cast<u64>(jobs), count));
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

inline void validate_sweep(const SweepConfig& C) {
  if (C.primes.empty() || C.degrees.empty()) fail_invalid("sweep needs primes and degrees");
  for (u64 p : C.primes)
    if (!detail::is_prime_u64(p)) fail_invalid(std::to_string(p) + " is not prime");
  u64 cap = C.cap ? C.cap : (u64(1) << 26);
  for (u64 p : C.primes)
    for (int n : C.degrees) {
      if (n < 1 || n > 24) fail_invalid("degree out of range");
      u128 q = 1;
      for (int i = 0; i < n; ++i) {
        q *= p;
        if (q > cap) fail_invalid("p^n exceeds the table cap for p=" + std::to_string(p) +
                                  " n=" + std::to_string(n));
      }
    }
  if (C.scans.empty()) fail_invalid("no scans selected");
  for (const auto& s : C.scans) {
    bool ok = false;
    for (const auto& k : detail::known_scans())
      if (s == k) ok = true;
    if (!ok) fail_invalid("unknown scan \"" + s + "\"");
  }
  for (const auto& b : C.boxes) {
    if (b.empty()) fail_invalid("empty box shape");
    for (u64 h : b)
      if (h < 1) fail_invalid("box side lengths must be >= 1");
  }
  for (u64 d : C.orders)
    if (d < 2) fail_invalid("character orders must be >= 2");
  if (C.weil_samples < 1 || C.weil_samples > 100000) fail_invalid("weil_samples out of range");
  if (C.jobs < 1 || C.jobs > 256) fail_invalid("jobs must lie in [1, 256]");
}

inline SweepConfig sweep_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail_invalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail_invalid("config must be a JSON object");
  SweepConfig C;
  try {
    for (auto& [key, val] : j.items()) {
      if (key == "primes")
        C.primes = val.get<std::vector<u64>>();
      else if (key == "degrees")
        C.degrees = val.get<std::vector<int>>();
      else if (key == "boxes")
        C.boxes = val.get<std::vector<std::vector<u64>>>();
      else if (key == "orders")
        C.orders = val.get<std::vector<u64>>();
      else if (key == "scans")
        C.scans = val.get<std::vector<std::string>>();
      else if (key == "weil_samples")
        C.weil_samples = val.get<u64>();
      else if (key == "seed")
        C.seed = val.get<u64>();
      else if (key == "cap")
        C.cap = val.get<u64>();
      else if (key == "jobs")
        C.jobs = val.get<int>();
      else
        fail_invalid("unknown config key \"" + key + "\"");
    }
  } catch (const nlohmann::json::exception& e) {
    fail_invalid(std::string("config field has the wrong type: ") + e.what());
  }
  validate_sweep(C);
  return C;
}

// Canonical one-line description: the fingerprint quoted in output headers.
// `jobs` is deliberately excluded — it must not change the bytes.
inline std::string sweep_config_canonical(const SweepConfig& C) {
  std::string s = "v=";
  s += kVersion;
  s += ";primes=" + detail::join_u64(C.primes, ',');
  s += ";degrees=";
  for (size_t i = 0; i < C.degrees.size(); ++i)
    s += (i ? "," : "") + std::to_string(C.degrees[i]);
  s += ";boxes=";
  for (size_t i = 0; i < C.boxes.size(); ++i) {
    if (i) s += '|';
    s += detail::join_u64(C.boxes[i], 'x');
  }
  s += ";orders=" + detail::join_u64(C.orders, ',');
  s += ";scans=";
  for (size_t i = 0; i < C.scans.size(); ++i) s += (i ? "," : "") + C.scans[i];
  s += ";weil_samples=" + std::to_string(C.weil_samples);
  s += ";seed=" + std::to_string(C.seed);
  s += ";cap=" + std::to_string(C.cap ? C.cap : (u64(1) << 26));
  return s;
}

struct SweepOutput {
  std::string name;   // "<scan>.csv"
  std::string bytes;  // complete file image
  u64 rows = 0;
};

namespace detail {

struct SweepCtx {
  const SweepConfig& C;
  std::vector<std::shared_ptr<const FieldCtx>> fields;
  std::string canonical;
};

// boxes applicable to a degree-n field, or the per-scan auto shape
inline std::vector<std::vector<u64>> boxes_for(const SweepCtx& S, const FieldCtx& F,
                                               bool unit_auto) {
  std::vector<std::vector<u64>> out;
  for (const auto& b : S.C.boxes)
    if (b.size() == static_cast<size_t>(F.n())) out.push_back(b);
  if (!out.empty() || !S.C.boxes.empty()) return out;
  u64 h = 1;
  if (!unit_auto) {
    h = static_cast<u64>(sqrtl(static_cast<long double>(F.p()) / 2.0L));
    while (h > 1 && 2 * h * h >= F.p()) --h;
    if (h < 1) h = 1;
  }
  out.push_back(std::vector<u64>(F.n(), h));
  return out;
}

inline std::vector<std::string> scan_energy(const SweepCtx& S) {
  struct Item {
    const FieldCtx* F;
    std::vector<u64> H;
  };
  std::vector<Item> items;
  for (const auto& Fp : S.fields)
    for (auto& b : boxes_for(S, *Fp, false)) items.push_back({Fp.get(), b});
  std::vector<std::string> rows(items.size());
  parallel_items(items.size(), S.C.jobs, [&](u64 i) {
    const FieldCtx& F = *items[i].F;
    auto box = make_box(F, items[i].H);
    EnergyOptions opt;
    opt.seed = S.C.seed;
    auto V = kl_verdict(F, box, opt);
    const EnergyReport& R = V.rep;
    rows[i] = csv_row(R.p, R.n, join_u64(R.H, 'x'), R.B_size, R.E, R.L1, R.L2, R.kl_ratio,
                      R.en_holds, R.fz_holds, R.f_le_f0, R.chain_holds, R.kl_hypothesis, V.pass);
  });
  return rows;
}

inline std::vector<std::string> scan_minima(const SweepCtx& S) {
  struct Item {
    const FieldCtx* F;
    std::vector<u64> H;
  };
  std::vector<Item> items;
  for (const auto& Fp : S.fields)
    for (auto& b : boxes_for(S, *Fp, true)) items.push_back({Fp.get(), b});
  std::vector<std::vector<std::string>> chunks(items.size());
  parallel_items(items.size(), S.C.jobs, [&](u64 i) {
    const FieldCtx& F = *items[i].F;
    if (F.q() - F.p() > 5000) fail_budget("minima scan: too many ratios outside the prime field");
    auto basis = polynomial_basis(F);
    for (u64 zi = 0; zi < F.q(); ++zi) {
      Elem z{zi};
      if (F.subfield_degree(z) == 1) continue;
      auto L = build_lambda_z(F, basis, z, items[i].H);
      auto R = successive_minima(L);
      auto M = minkowski_check(L, R);
      auto D = dual_first_minimum(L);
      u64 pts = count_points(L, Rat::make(1, 1));
      std::string lam;
      for (size_t j = 0; j < R.lambda.size(); ++j) lam += (j ? " " : "") + R.lambda[j].str();
      double tprod = D.lambda1_star.value() * R.lambda.back().value();
      bool dual_ok = D.wb_identity && D.double_dual_ok && D.apriori_ok;
      chunks[i].push_back(csv_row(F.p(), F.n(), zi, lam, M.scaled_product, pts,
                                  D.lambda1_star.str(), tprod, M.lower_ok && M.upper_ok, dual_ok,
                                  transference_holds(R, D)));
    }
  });
  std::vector<std::string> rows;
  for (auto& c : chunks)
    for (auto& r : c) rows.push_back(std::move(r));
  return rows;
}

inline std::vector<std::string> scan_weil(const SweepCtx& S) {
  std::vector<std::vector<std::string>> chunks(S.fields.size());
  parallel_items(S.fields.size(), S.C.jobs, [&](u64 i) {
    const FieldCtx& F = *S.fields[i];
    std::mt19937_64 rng(splitmix64(S.C.seed ^ (0x517cc1b727220a95ull * (i + 1))));
    u64 units = F.units();
    for (u64 s = 0; s < S.C.weil_samples; ++s) {
      // rejection-sample an admissible (chi, roots, mults) triple
      for (int attempt = 0; attempt < 1000; ++attempt) {
        u64 m = 1 + rng() % (units - 1);
        Character chi(F, m);
        u64 d = chi.order();
        u64 mr = 1 + rng() % 3;
        if (mr > F.q()) mr = F.q();
        std::vector<Elem> roots;
        while (roots.size() < mr) {
          Elem r{rng() % F.q()};
          bool dup = false;
          for (Elem e : roots)
            if (e == r) dup = true;
          if (!dup) roots.push_back(r);
        }
        std::vector<u64> mult(mr);
        bool power = true;
        for (u64 j = 0; j < mr; ++j) {
          mult[j] = 1 + rng() % 3;
          if (mult[j] % d != 0) power = false;
        }
        if (power) continue;
        auto R = weil_complete(F, chi, roots, mult);
        std::vector<u64> rv(mr);
        for (u64 j = 0; j < mr; ++j) rv[j] = roots[j].v;
        double rhs = static_cast<double>(R.m_roots - 1) * std::sqrt(static_cast<double>(F.q()));
        chunks[i].push_back(csv_row(F.p(), F.n(), F.q(), m, R.d, R.m_roots, join_u64(rv, ';'),
                                    join_u64(mult, ';'), R.abs_val, rhs, R.holds, R.equality,
                                    R.certified, R.exact));
        break;
      }
    }
  });
  std::vector<std::string> rows;
  for (auto& c : chunks)
    for (auto& r : c) rows.push_back(std::move(r));
  return rows;
}

inline std::vector<std::string> scan_moment(const SweepCtx& S) {
  struct Item {
    const FieldCtx* F;
    u64 d;
    unsigned r;
    u64 len;
  };
  std::vector<Item> items;
  for (const auto& Fp : S.fields)
    for (u64 d : S.C.orders) {
      if (Fp->units() % d != 0) continue;  // no character of this order
      for (unsigned r = 1; r <= 3; ++r)
        for (u64 len = 1; len <= 8; ++len) items.push_back({Fp.get(), d, r, len});
    }
  std::vector<std::string> rows(items.size());
  parallel_items(items.size(), S.C.jobs, [&](u64 i) {
    const FieldCtx& F = *items[i].F;
    Character chi(F, F.units() / items[i].d);
    auto R = weil_moment(F, chi, 1, items[i].len, items[i].r);
    rows[i] = csv_row(R.p, R.n, R.d, R.r, R.z0, R.len, R.exact ? R.lhs.str() : std::string(),
                      R.lhs_approx, R.rhs_core, R.holds, R.exact);
  });
  return rows;
}

}  // namespace detail

inline std::vector<SweepOutput> run_sweep(const SweepConfig& C) {
  validate_sweep(C);
  detail::SweepCtx S{C, {}, sweep_config_canonical(C)};
  for (u64 p : C.primes)
    for (int n : C.degrees)
      S.fields.push_back(std::make_shared<const FieldCtx>(FieldCtx::make(p, n, C.cap)));

  static const std::vector<std::pair<const char*, std::vector<std::string>>> schemas = {
      {"energy",
       {"p", "n", "H", "B", "E", "L1", "L2", "kl_ratio", "en_holds", "fz_holds", "f_le_f0",
        "chain_holds", "kl_hypothesis", "pass"}},
      {"minima",
       {"p", "n", "z", "lambdas", "mink_product", "points", "lambda1_star",
        "transference_product", "mink_ok", "dual_ok", "transference_ok"}},
      {"weil",
       {"p", "n", "q", "m", "d", "m_roots", "roots", "mults", "abs", "rhs", "holds", "equality",
        "certified", "exact"}},
      {"moment", {"p", "n", "d", "r", "z0", "len", "lhs_exact", "lhs", "rhs_core", "holds",
                  "exact"}}};

  std::vector<SweepOutput> out;
  for (const auto& [scan, columns] : schemas) {
    bool selected = false;
    for (const auto& s : C.scans)
      if (s == scan) selected = true;
    if (!selected) continue;
    std::vector<std::string> rows;
    if (std::string(scan) == "energy") rows = detail::scan_energy(S);
    if (std::string(scan) == "minima") rows = detail::scan_minima(S);
    if (std::string(scan) == "weil") rows = detail::scan_weil(S);
    if (std::string(scan) == "moment") rows = detail::scan_moment(S);
    CsvWriter w(S.canonical, C.seed, columns);
    for (const auto& r : rows) w.raw_row(r);
    out.push_back({std::string(scan) + ".csv", w.bytes(), w.rows()});
  }
  return out;
}

}  // namespace charbox
