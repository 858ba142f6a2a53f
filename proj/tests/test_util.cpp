#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "cavity/util/config.hpp"
#include "cavity/util/dump.hpp"
#include "cavity/util/repro_sum.hpp"
#include "cavity/util/svg.hpp"
#include "doctest.h"

using namespace cavity;

namespace {
std::uint64_t dbits(double x) { return std::bit_cast<std::uint64_t>(x); }
}  // namespace

TEST_CASE("repro_sum matches plain addition when plain addition is exact") {
  ReproSum s;
  s.add(0.5);
  s.add(0.25);
  s.add(-2.0);
  s.add(1024.0);
  CHECK(s.value() == 0.5 + 0.25 - 2.0 + 1024.0);
}

TEST_CASE("repro_sum is exact where naive summation loses bits") {
  const double big = std::ldexp(1.0, 53);
  CHECK(big + 1.0 - big == 0.0);  // the failure mode being fixed
  ReproSum s;
  s.add(big);
  s.add(1.0);
  s.add(-big);
  CHECK(s.value() == 1.0);
}

TEST_CASE("repro_sum value is independent of addition order and of splits") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-240, 240);
  std::vector<double> terms(500);
  for (auto& t : terms) t = std::ldexp(mant(rng), expo(rng));

  ReproSum ref;
  for (double t : terms) ref.add(t);
  const std::uint64_t ref_bits = dbits(ref.value());

  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(terms.begin(), terms.end(), rng);
    // split into a random number of partial sums, then merge
    const int parts = 1 + static_cast<int>(rng() % 7);
    std::vector<ReproSum> partial(parts);
    for (std::size_t i = 0; i < terms.size(); ++i) partial[i % parts].add(terms[i]);
    ReproSum whole;
    for (const auto& p : partial) whole.merge(p);
    CHECK(dbits(whole.value()) == ref_bits);
    CHECK(whole == ref);
  }
}

TEST_CASE("repro_sum cancels opposite terms to exactly zero") {
  std::mt19937_64 rng(99);
  ReproSum s;
  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) {
    const double x = std::ldexp(1.0 + static_cast<double>(rng() % 1024) / 1024.0,
                                static_cast<int>(rng() % 400) - 200);
    xs.push_back(x);
    s.add(x);
  }
  std::shuffle(xs.begin(), xs.end(), rng);
  for (double x : xs) s.add(-x);
  // equal magnitudes on both signs: the exact value is zero even though the
  // internal registers are not (operator== is representation equality)
  CHECK(s.value() == 0.0);
}

TEST_CASE("repro_sum handles subnormals exactly") {
  const double ulp = std::ldexp(1.0, -1074);  // smallest positive double
  ReproSum s;
  for (int i = 0; i < 1000; ++i) s.add(ulp);
  CHECK(s.value() == std::ldexp(1000.0, -1074));

  ReproSum t;
  t.add(ulp);
  t.add(-ulp);
  CHECK(t.value() == 0.0);
}

TEST_CASE("repro_sum rounds ties to even and honours sticky bits") {
  const double half_ulp = std::ldexp(1.0, -53);

  ReproSum tie_down;  // 1 + 2^-53 is halfway; mantissa of 1.0 is even
  tie_down.add(1.0);
  tie_down.add(half_ulp);
  CHECK(tie_down.value() == 1.0);

  ReproSum tie_up;  // (1 + 2^-52) + 2^-53 is halfway; rounds to the even neighbour above
  tie_up.add(1.0 + std::ldexp(1.0, -52));
  tie_up.add(half_ulp);
  CHECK(tie_up.value() == 1.0 + std::ldexp(2.0, -52));

  ReproSum sticky;  // just above halfway: must round up
  sticky.add(1.0);
  sticky.add(half_ulp);
  sticky.add(std::ldexp(1.0, -200));
  CHECK(sticky.value() == 1.0 + std::ldexp(1.0, -52));
}

TEST_CASE("repro_sum rejects non-finite terms") {
  ReproSum s;
  CHECK_THROWS_AS(s.add(std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(s.add(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("repro_sum serializes losslessly") {
  std::mt19937_64 rng(7);
  ReproSum s;
  for (int i = 0; i < 64; ++i) {
    s.add(std::ldexp(static_cast<double>(rng() % 4096) - 2048.0, static_cast<int>(rng() % 100) - 50));
  }
  std::uint64_t words[ReproSum::kSerializedWords];
  s.serialize(words);
  const ReproSum back = ReproSum::deserialize(words);
  CHECK(back == s);
  CHECK(dbits(back.value()) == dbits(s.value()));
}

TEST_CASE("config text round-trips the default and a fully customised run") {
  const RunConfig def;
  CHECK(config_from_text(config_to_text(def)) == def);

  RunConfig c;
  c.grid = {48, 24, 96};
  c.np = 6;
  c.mode = DecompMode::TwoD;
  c.dims = Dims3{1, 2, 3};
  c.strategy = Strategy::V2;
  c.overlap = true;
  c.growth_type = 1;
  c.steps = 250;
  c.fluid = FluidParams::for_rayleigh(2.5e4);
  c.fluid.u_ref = 0.07;
  c.solver.cfl = 0.3;
  c.solver.conv_tol = 1e-6;
  c.solver.max_steps = 123456;
  c.solver.check_every = 25;
  c.solver.rescale = false;
  c.seed = 0xDEADBEEFCAFEBABEull;
  c.timeout_ms = 1234.5;
  c.monitor_every = 17;
  c.out_dir = "some/dir";
  c.dump_fields = true;
  c.verify_tol = 3e-11;
  CHECK(config_from_text(config_to_text(c)) == c);
}

TEST_CASE("config parser skips comments and rejects junk") {
  RunConfig c = config_from_text("# comment\n\n  np = 3 \ngrid=17x18x19\n");
  CHECK(c.np == 3);
  CHECK(c.grid.nx == 17);
  CHECK(c.grid.nz == 19);

  CHECK_THROWS_AS(config_from_text("no_such_key=1\n"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_text("np=banana\n"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_text("just words\n"), std::invalid_argument);
}

TEST_CASE("config file save/load round-trips") {
  RunConfig c;
  c.grid = {20, 21, 22};
  c.seed = 42;
  const std::string path = "/tmp/cavity_test_config.txt";
  save_config(path, c);
  CHECK(load_config(path) == c);
  std::filesystem::remove(path);
  CHECK_THROWS(load_config("/tmp/definitely_missing_config_file.txt"));
}

TEST_CASE("solution snapshot round-trips bitwise") {
  GlobalFields g;
  g.size = {5, 4, 3};
  const std::size_t n = g.nodes();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (auto* f : {&g.p, &g.u, &g.v, &g.w, &g.t}) {
    f->resize(n);
    for (auto& x : *f) x = dist(rng);
  }
  const std::string path = "/tmp/cavity_test_solution.bin";
  write_solution(path, g);
  const GlobalFields back = read_solution(path);
  CHECK(back == g);

  // header + 5 fields of doubles, nothing else
  CHECK(std::filesystem::file_size(path) == 6 * 8 + 5 * n * 8);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  CHECK_THROWS(read_solution(path));
  std::filesystem::remove(path);
}

TEST_CASE("svg plot contains the basics and validates log-scale input") {
  svg::PlotSpec spec;
  spec.title = "title here";
  spec.xlabel = "ranks";
  spec.ylabel = "rate";
  spec.log2_x = true;
  svg::Series a{"alpha", {{1, 3.0}, {2, 5.0}, {4, 8.5}}};
  svg::Series b{"beta", {{1, 2.0}, {2, 2.5}, {4, 2.25}}};
  const std::string out = svg::render_line_plot(spec, {a, b});
  CHECK(out.find("<svg") != std::string::npos);
  CHECK(out.find("</svg>") != std::string::npos);
  CHECK(out.find("title here") != std::string::npos);
  CHECK(out.find("alpha") != std::string::npos);
  CHECK(out.find("beta") != std::string::npos);
  CHECK(out.find("<path") != std::string::npos);

  // identical input, identical bytes
  CHECK(svg::render_line_plot(spec, {a, b}) == out);

  spec.log10_y = true;
  svg::Series bad{"bad", {{1, -1.0}, {2, 1.0}}};
  CHECK_THROWS_AS(svg::render_line_plot(spec, {bad}), std::invalid_argument);

  const std::string path = "/tmp/cavity_test_plot.svg";
  svg::write_plot(path, spec, {a, b});
  CHECK(std::filesystem::file_size(path) > 100);
  std::filesystem::remove(path);
}
