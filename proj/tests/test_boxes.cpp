// Box enumeration, box/prefix character sums, and the shift-average
// amplification pipeline.  Oracles: recursive tuple enumeration with
// from-scratch element construction, naive complex summation, and set-based
// symmetric differences.

#include <catch2/catch_amalgamated.hpp>
#include <charbox/boxes.hpp>

#include <random>
#include <set>

using namespace charbox;

namespace {

// Oracle: enumerate integer tuples recursively and build each element from
// scratch with scalar multiplications (no odometer, no incremental adds).
void tuple_rec(const FieldCtx& F, const BoxSpec& box, int depth, std::vector<i64>& x,
               const std::function<void(Elem)>& sink) {
  if (depth == F.n()) {
    Elem e = F.zero();
    for (int i = 0; i < F.n(); ++i) e = F.add(e, F.mul_int(box.basis.omega[i], x[i]));
    sink(e);
    return;
  }
  for (i64 v = box.N[depth] + 1; v <= box.N[depth] + static_cast<i64>(box.H[depth]); ++v) {
    x[depth] = v;
    tuple_rec(F, box, depth + 1, x, sink);
  }
}

std::vector<Elem> elements_oracle(const FieldCtx& F, const BoxSpec& box) {
  std::vector<Elem> out;
  std::vector<i64> x(F.n());
  tuple_rec(F, box, 0, x, [&](Elem e) { out.push_back(e); });
  return out;
}

std::complex<double> sum_oracle(const FieldCtx& F, const BoxSpec& box, const Character& chi,
                                Elem shift = {0}) {
  std::complex<double> s{0, 0};
  std::vector<i64> x(F.n());
  tuple_rec(F, box, 0, x, [&](Elem e) { s += chi.value(F.add(e, shift)); });
  return s;
}

}  // namespace

TEST_CASE("box enumeration matches the recursive oracle") {
  std::mt19937_64 rng(424242);
  std::vector<FieldCtx> fields;
  for (auto [p, n] : std::vector<std::pair<u64, int>>{{5, 1}, {7, 2}, {3, 3}, {11, 2}, {2, 6}})
    fields.push_back(FieldCtx::make(p, n));
  for (const FieldCtx& F : fields) {
    for (int it = 0; it < 20; ++it) {
      std::uniform_int_distribution<u64> UH(1, std::min<u64>(F.p(), 5));
      std::uniform_int_distribution<i64> UN(-9, 9);
      std::vector<u64> H(F.n());
      std::vector<i64> N(F.n());
      for (int i = 0; i < F.n(); ++i) {
        H[i] = UH(rng);
        N[i] = UN(rng);
      }
      BoxSpec box = make_box(F, H, N);
      auto got = box_elements(F, box);
      auto want = elements_oracle(F, box);
      REQUIRE(got.size() == want.size());
      REQUIRE(got.size() == box_size(box));
      for (size_t i = 0; i < got.size(); ++i) REQUIRE(got[i] == want[i]);
      // distinct as field elements whenever H_i <= p (always true here)
      std::set<u64> s;
      for (Elem e : got) s.insert(e.v);
      REQUIRE(s.size() == got.size());
    }
  }
}

TEST_CASE("box validation errors") {
  auto F = FieldCtx::make(7, 2);
  CHECK_THROWS_AS(validate_box(F, make_box(F, {1})), Error);           // arity
  CHECK_THROWS_AS(validate_box(F, make_box(F, {0, 3})), Error);        // H < 1
  CHECK_THROWS_AS(validate_box(F, make_box(F, {8, 3})), Error);        // H > p
  BoxSpec dep = make_box(F, {2, 2});
  dep.basis.omega[1] = F.mul_int(dep.basis.omega[0], 3);               // dependent basis
  CHECK_THROWS_AS(validate_box(F, dep), Error);
  CHECK(basis_valid(F, polynomial_basis(F)));
  // a random invertible change of basis is accepted
  BasisSpec b;
  b.omega = {F.from_coeffs({1, 2}), F.from_coeffs({3, 1})};
  CHECK(basis_valid(F, b));
  // enumeration budget
  auto G = FieldCtx::make(101, 2);
  CHECK_THROWS_AS(box_elements(G, make_box(G, {100, 100}), 5000), Error);
}

TEST_CASE("box character sums match naive summation on random configurations") {
  std::mt19937_64 rng(1009);
  std::vector<FieldCtx> fields;
  for (auto [p, n] : std::vector<std::pair<u64, int>>{
           {5, 1}, {7, 1}, {13, 1}, {5, 2}, {7, 2}, {3, 3}, {11, 2}, {2, 6}, {31, 1}, {17, 2}})
    fields.push_back(FieldCtx::make(p, n));
  int done = 0;
  for (int it = 0; it < 100; ++it) {
    const FieldCtx& F = fields[it % fields.size()];
    std::uniform_int_distribution<u64> UH(1, std::min<u64>(F.p(), 6));
    std::uniform_int_distribution<i64> UN(-10, 10);
    std::uniform_int_distribution<u64> UM(0, F.units() - 1);
    std::vector<u64> H(F.n());
    std::vector<i64> N(F.n());
    for (int i = 0; i < F.n(); ++i) {
      H[i] = UH(rng);
      N[i] = UN(rng);
    }
    BoxSpec box = make_box(F, H, N);
    Character chi(F, UM(rng));
    auto got = box_char_sum(F, box, chi);
    auto want = sum_oracle(F, box, chi);
    INFO("q=" << F.q() << " m=" << chi.m() << " it=" << it);
    REQUIRE(std::abs(got.sum - want) < 1e-8);
    REQUIRE(got.size == box_size(box));
    if (got.exact) {
      REQUIRE(std::abs(got.ex.to_complex() - want) < 1e-8);
      REQUIRE(got.err == 0);
    }
    ++done;
  }
  REQUIRE(done == 100);
}

TEST_CASE("worked sums: full intervals and trivial characters") {
  // quadratic character over the full unit interval of F_5 sums to zero
  auto F5 = FieldCtx::make(5, 1);
  auto z = box_char_sum(F5, make_box(F5, {4}), Character(F5, 2));
  REQUIRE(z.exact);
  CHECK(z.ex.norm2() == 0);
  // trivial character over a zero-free box counts the box
  auto t = box_char_sum(F5, make_box(F5, {4}), Character(F5, 0));
  CHECK(t.ex.a == 4);
  CHECK(t.zeros == 0);
  // full box of F_49 with a nontrivial character sums to zero (0 contributes 0)
  auto F49 = FieldCtx::make(7, 2);
  BoxSpec full = make_box(F49, {7, 7}, {-1, -1});
  for (u64 m : {24ull, 16ull, 12ull, 5ull}) {
    auto s = box_char_sum(F49, full, Character(F49, m));
    REQUIRE(s.size == 49);
    REQUIRE(s.zeros == 1);
    CHECK(static_cast<double>(s.abs_val) < 1e-9);
  }
  // translation changes the sum but never the size or distinctness
  auto a = box_char_sum(F49, make_box(F49, {3, 2}, {0, 0}), Character(F49, 5));
  auto b = box_char_sum(F49, make_box(F49, {3, 2}, {2, 4}), Character(F49, 5));
  CHECK(a.size == b.size);
}

TEST_CASE("prefix sums agree with full sums at k = n and with the oracle at k < n") {
  auto F = FieldCtx::make(7, 2);
  BoxSpec box = make_box(F, {3, 4}, {1, -2});
  for (u64 m : {5ull, 16ull, 24ull}) {
    Character chi(F, m);
    auto fs = box_char_sum(F, box, chi);
    auto ps = sublattice_char_sum(F, box, chi, 2);
    REQUIRE(fs.exact == ps.exact);
    if (fs.exact) {
      CHECK(fs.ex.a == ps.ex.a);
      CHECK(fs.ex.b == ps.ex.b);
    }
    CHECK(std::abs(fs.sum - ps.sum) < 1e-12);
    // k = 1: only the first coordinate runs
    auto p1 = sublattice_char_sum(F, box, chi, 1);
    std::complex<double> want{0, 0};
    for (i64 x = box.N[0] + 1; x <= box.N[0] + static_cast<i64>(box.H[0]); ++x)
      want += chi.value(F.mul_int(box.basis.omega[0], x));
    CHECK(std::abs(p1.sum - want) < 1e-10);
    CHECK(p1.size == box.H[0]);
  }
  CHECK_THROWS_AS(sublattice_char_sum(F, box, Character(F, 5), 0), Error);
  CHECK_THROWS_AS(sublattice_char_sum(F, box, Character(F, 5), 3), Error);
}

TEST_CASE("amplification pipeline on a worked instance") {
  auto F = FieldCtx::make(101, 2);
  Character chi(F, F.units() / 2);  // quadratic
  REQUIRE(chi.order() == 2);
  BoxSpec box = make_box(F, {7, 7});
  auto rep = burgess_pipeline(F, box, chi, 0.4, 5u);
  CHECK(rep.r == 5);
  CHECK(rep.delta == Catch::Approx(0.2));
  CHECK(rep.I_len == 3);                          // ceil(101^0.2) = ceil(2.517)
  CHECK(rep.B0_counts == std::vector<u64>{2, 2});  // floor(7 * 101^-0.4) = 1
  CHECK(rep.B_size == 49);
  CHECK(rep.B0_size == 4);
  CHECK(rep.exact);
  CHECK(rep.fi_holds);
  CHECK(rep.fi_counting_holds);
  CHECK(rep.ti_holds);
  CHECK(rep.a_identity);
  CHECK(rep.a_bound);
  CHECK(rep.A == 49 * 3);
  CHECK(rep.omega0 == 0);  // 0 not in B
  CHECK(rep.theorem_verdicts_pass());

  // default r from epsilon: n/eps = 2/0.4 = 5
  auto rep2 = burgess_pipeline(F, box, chi, 0.4);
  CHECK(rep2.r == 5);
  CHECK_FALSE(rep2.r_overridden);
}

TEST_CASE("pipeline triple sum and counting fact match independent recomputation") {
  auto F = FieldCtx::make(101, 2);
  Character chi(F, F.units() / 2);
  BoxSpec box = make_box(F, {5, 7}, {3, -2});
  auto rep = burgess_pipeline(F, box, chi, 2.0 / 6.0, 6u);

  // naive triple sum over B0 x I x B
  BoxSpec B0 = make_box(F, rep.B0_counts, std::vector<i64>(2, -1));
  std::complex<double> T{0, 0};
  double count_max = 0;
  auto b0 = elements_oracle(F, B0);
  std::vector<std::vector<i64>> b0c;
  {
    std::vector<i64> x(F.n());
    tuple_rec(F, B0, 0, x, [&](Elem) { b0c.push_back(x); });
  }
  auto belems = elements_oracle(F, box);
  std::set<u64> bset;
  for (Elem e : belems) bset.insert(e.v);
  for (size_t yi = 0; yi < b0.size(); ++yi) {
    for (u64 z = 1; z <= rep.I_len; ++z) {
      Elem shift = F.mul_int(b0[yi], static_cast<i64>(z));
      T += sum_oracle(F, box, chi, shift);
      u64 inter = 0;
      for (Elem e : belems)
        if (bset.count(F.add(e, shift).v)) ++inter;
      count_max = std::max(count_max, 2.0 * static_cast<double>(belems.size() - inter));
    }
  }
  u64 cnt = rep.B0_size * rep.I_len;
  CHECK(std::abs(rep.T_avg - T / static_cast<double>(cnt)) < 1e-8);
  CHECK(static_cast<double>(rep.T_abs) == Catch::Approx(std::abs(T)).margin(1e-6));
  CHECK(static_cast<double>(rep.fi_counting_max) == Catch::Approx(count_max));

  // Bq by brute force
  std::map<u64, u64> om;
  for (Elem x : belems)
    for (Elem y : b0)
      if (y.v) ++om[F.mul(x, F.inv(y)).v];
  u64 A = 0, Bq = 0;
  for (auto [u, c] : om) {
    A += c;
    Bq += c * c;
  }
  CHECK(rep.A == A);
  CHECK(rep.Bq == Bq);
}

TEST_CASE("pipeline input errors") {
  auto F = FieldCtx::make(101, 2);
  Character chi(F, F.units() / 2);
  // hypothesis violation: 2*8^2 = 128 >= 101
  CHECK_THROWS_AS(burgess_pipeline(F, make_box(F, {8, 8}), chi, 0.4), Error);
  // degenerate shift box: H = (2,2) gives floor(2 * 101^{-0.4}) = 0 everywhere
  try {
    burgess_pipeline(F, make_box(F, {2, 2}), chi, 0.4, 5u);
    FAIL("expected degenerate shift box error");
  } catch (const Error& e) {
    CHECK(e.kind() == Errc::invalid_input);
  }
  CHECK_THROWS_AS(burgess_pipeline(F, make_box(F, {7, 7}), chi, 0.0), Error);
  CHECK_THROWS_AS(burgess_pipeline(F, make_box(F, {7, 7}), chi, 0.4, 7u), Error);
  CHECK_THROWS_AS(burgess_pipeline(F, make_box(F, {7, 7}), chi, 0.4, 0u), Error);
}
