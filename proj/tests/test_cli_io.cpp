// Output plumbing: CSV emission/parsing, the config fingerprint, SVG
// rendering, sweep config handling, and sweep determinism (rerun stability
// and thread-schedule independence).  Oracles: published FNV-1a test
// vectors, hand-rendered CSV bytes, and byte comparison of independent runs.

#include <catch2/catch_amalgamated.hpp>
#include <charbox/report_json.hpp>
#include <charbox/svg.hpp>

using namespace charbox;

namespace {

const SweepOutput& output_named(const std::vector<SweepOutput>& v, const std::string& name) {
  for (const auto& o : v)
    if (o.name == name) return o;
  FAIL("missing output " + name);
  return v.front();
}

}  // namespace

TEST_CASE("number formatting is locale-free and fixed-precision") {
  CHECK(fmt_g(0.1) == "0.1");
  CHECK(fmt_g(1234567.0) == "1234567");
  CHECK(fmt_g(1.0 / 3.0) == "0.333333333333");
  CHECK(fmt_g(0.0) == "0");
  CHECK(fmt_g(-2.5) == "-2.5");
  CHECK(fmt_g(1e300) == "1e+300");
}

TEST_CASE("config fingerprint matches the published FNV-1a vectors") {
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
}

TEST_CASE("csv cells quote exactly the delimiters") {
  CHECK(csv_row(1, 2.5, true, false) == "1,2.5,1,0");
  CHECK(csv_row(std::string("plain")) == "plain");
  CHECK(csv_row(std::string("a,b"), 7) == "\"a,b\",7");
  CHECK(csv_row(std::string("say \"hi\"")) == "\"say \"\"hi\"\"\"");
  CHECK(csv_row(cpp_int("123456789012345678901234567890")) ==
        "123456789012345678901234567890");
}

TEST_CASE("table bytes: metadata comment, header, rows") {
  CsvWriter w("cfg", 7, {"a", "b"});
  w.row(1, 2.5);
  w.row(std::string("x,y"), -3);
  std::string expected = "# charbox ";
  expected += kVersion;
  expected += " config=" + hex64(fnv1a("cfg")) + " seed=7\n";
  expected += "a,b\n1,2.5\n\"x,y\",-3\n";
  CHECK(w.bytes() == expected);
  CHECK(w.rows() == 2);

  try {
    w.row(1);  // arity mismatch
    FAIL("arity mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == Errc::invalid_input);
  }
}

TEST_CASE("parser inverts the writer") {
  CsvWriter w("cfg", 1, {"p", "name", "v"});
  w.row(7, std::string("a,\"b\""), 0.25);
  w.row(11, std::string("plain"), -1);
  CsvData d = parse_csv(w.bytes());
  REQUIRE(d.columns == std::vector<std::string>{"p", "name", "v"});
  REQUIRE(d.rows.size() == 2);
  CHECK(d.rows[0][d.column("name")] == "a,\"b\"");
  CHECK(d.rows[1][d.column("p")] == "11");
  CHECK(d.rows[1][d.column("v")] == "-1");
  CHECK_THROWS_AS(d.column("nope"), Error);
  CHECK_THROWS_AS(parse_csv("# only a comment\n"), Error);

  auto cells = split_csv_line("a,\"b,c\",,\"d\"\"e\"");
  REQUIRE(cells == std::vector<std::string>{"a", "b,c", "", "d\"e"});
}

TEST_CASE("scatter rendering is deterministic and complete") {
  ScatterPlot plot;
  plot.title = "t";
  plot.xlabel = "x axis";
  plot.ylabel = "y <axis>";
  plot.series.push_back({"s1", {{1, 2}, {2, 4}, {3, 8}}});
  plot.series.push_back({"s2", {{1, 1}, {2, 1}}});
  std::string svg = plot.render();
  CHECK(svg == plot.render());
  CHECK(svg.find("width=\"1000\" height=\"600\"") != std::string::npos);
  CHECK(svg.find("x axis") != std::string::npos);
  CHECK(svg.find("y &lt;axis&gt;") != std::string::npos);  // labels are escaped
  size_t circles = 0;
  for (size_t at = svg.find("<circle"); at != std::string::npos;
       at = svg.find("<circle", at + 1))
    ++circles;
  CHECK(circles == 7);  // 5 data points + one legend marker per named series

  ScatterPlot empty;
  CHECK_THROWS_AS(empty.render(), Error);
  ScatterPlot bad;
  bad.series.push_back({"", {{0, std::nan("")}}});
  CHECK_THROWS_AS(bad.render(), Error);

  ScatterPlot one;  // degenerate range must still render
  one.series.push_back({"", {{5, 5}}});
  CHECK(one.render().find("<circle") != std::string::npos);
}

TEST_CASE("sweep config: json round-trip and validation") {
  SweepConfig C = sweep_config_from_json(R"({
    "primes": [13, 17], "degrees": [1, 2], "boxes": [[3, 4]],
    "orders": [2, 3], "scans": ["minima", "energy"],
    "weil_samples": 9, "seed": 42, "cap": 1048576, "jobs": 2
  })");
  CHECK(C.primes == std::vector<u64>{13, 17});
  CHECK(C.degrees == std::vector<int>{1, 2});
  REQUIRE(C.boxes.size() == 1);
  CHECK(C.boxes[0] == std::vector<u64>{3, 4});
  CHECK(C.scans == std::vector<std::string>{"minima", "energy"});
  CHECK(C.weil_samples == 9);
  CHECK(C.seed == 42);
  validate_sweep(C);

  CHECK_THROWS_AS(sweep_config_from_json("{\"primez\": [7]}"), Error);   // unknown key
  CHECK_THROWS_AS(sweep_config_from_json("{\"primes\": \"7\"}"), Error);  // wrong type
  CHECK_THROWS_AS(sweep_config_from_json("not json"), Error);

  SweepConfig bad;
  bad.primes = {9};
  CHECK_THROWS_AS(validate_sweep(bad), Error);  // 9 is not prime
  SweepConfig big;
  big.primes = {65521};
  big.degrees = {3};
  big.cap = 1 << 20;
  CHECK_THROWS_AS(validate_sweep(big), Error);  // p^n over the table cap
  SweepConfig scan;
  scan.scans = {"unknown"};
  CHECK_THROWS_AS(validate_sweep(scan), Error);
}

TEST_CASE("sweep: canonical description feeds the fingerprint, jobs do not") {
  SweepConfig a, b;
  b.jobs = 5;
  CHECK(sweep_config_canonical(a) == sweep_config_canonical(b));
  b.seed = 2;
  CHECK(sweep_config_canonical(a) != sweep_config_canonical(b));
}

TEST_CASE("sweep output is stable across reruns and thread counts") {
  SweepConfig C;
  C.primes = {7, 11};
  C.degrees = {2};
  C.boxes = {{2, 2}};
  C.scans = {"energy", "minima", "weil", "moment"};
  C.weil_samples = 5;
  C.seed = 3;

  auto run1 = run_sweep(C);
  auto run2 = run_sweep(C);
  C.jobs = 3;
  auto run3 = run_sweep(C);
  REQUIRE(run1.size() == 4);
  REQUIRE(run2.size() == 4);
  REQUIRE(run3.size() == 4);
  for (size_t i = 0; i < run1.size(); ++i) {
    CHECK(run1[i].name == run2[i].name);
    CHECK(run1[i].bytes == run2[i].bytes);          // rerun
    CHECK(run1[i].bytes == run3[i].bytes);          // schedule independence
    CHECK(run1[i].bytes.rfind("# charbox ", 0) == 0);
    CHECK(run1[i].rows > 0);
  }

  // different seed must change the fingerprint line
  SweepConfig D = C;
  D.seed = 4;
  auto run4 = run_sweep(D);
  CHECK(run4[0].bytes != run3[0].bytes);
}

TEST_CASE("minima scan covers every ratio outside the prime field") {
  SweepConfig C;
  C.primes = {7};
  C.degrees = {2};
  C.boxes = {{1, 1}};
  C.scans = {"minima"};
  auto out = run_sweep(C);
  const auto& o = output_named(out, "minima.csv");
  CHECK(o.rows == 42);  // 49 - 7 elements generate the quadratic extension

  CsvData d = parse_csv(o.bytes);
  int zi = d.column("z"), li = d.column("lambdas");
  bool found = false;
  for (const auto& row : d.rows)
    if (row[zi] == "7") {  // the basis generator t
      found = true;
      CHECK(row[li] == "1/1 1/1 4/1 4/1");
      CHECK(row[d.column("mink_ok")] == "1");
      CHECK(row[d.column("dual_ok")] == "1");
      CHECK(row[d.column("transference_ok")] == "1");
    }
  CHECK(found);
}

TEST_CASE("report serialization is stable and keyed for tooling") {
  auto F = FieldCtx::make(101, 2);
  Character chi(F, F.units() / 2);
  auto box = make_box(F, {5, 7});
  BoundReport R = main_report(F, box, chi, 0.4);
  ojson j = to_json(R);
  CHECK(j["p"] == 101);
  CHECK(j["case"] == 1);
  CHECK(j["B_size"] == 35);
  CHECK(j["verdicts_ok"] == R.verdicts_ok);
  CHECK(j.dump() == to_json(R).dump());
  // key order is declaration order, not alphabetical: p precedes epsilon
  std::string s = j.dump();
  CHECK(s.find("\"p\"") < s.find("\"epsilon\""));

  ojson jb = to_json(R.burgess);
  CHECK(jb["pass"] == R.burgess.theorem_verdicts_pass());
  CHECK(jb["B0_counts"].is_array());
}
