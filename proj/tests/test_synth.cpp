#include "staffrec/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "staffrec/staff_io.hpp"
#include "test_util.hpp"

using namespace staffrec;

namespace {

SynthSpec small_spec() {
  SynthSpec spec;
  spec.name = "small";
  spec.rows = 500;
  spec.cols = 640;
  spec.n_staves = 2;
  spec.line_spacing = 30.0;
  spec.thickness = 7;
  spec.seed = 99;
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("synth");

TEST_CASE("same spec and seed give bit-identical pages") {
  SynthSpec spec = small_spec();
  spec.artifacts = {40, 50, 120};
  spec.gaps.push_back({0, 2, 100, 160});
  const SynthPage a = generate_page(spec);
  const SynthPage b = generate_page(spec);
  CHECK(a.image == b.image);
  REQUIRE(a.ground_truth.staves.size() == b.ground_truth.staves.size());
  for (std::size_t s = 0; s < a.ground_truth.staves.size(); ++s)
    for (int i = 0; i < 4; ++i)
      CHECK(a.ground_truth.staves[s].lines[static_cast<std::size_t>(i)].rows ==
            b.ground_truth.staves[s].lines[static_cast<std::size_t>(i)].rows);
}

TEST_CASE("a different seed moves the artifacts") {
  SynthSpec spec = small_spec();
  spec.artifacts = {40, 50, 120};
  SynthSpec other = spec;
  other.seed = 100;
  CHECK(!(generate_page(spec).image == generate_page(other).image));
}

TEST_CASE("gaps erase ink but not the reference") {
  SynthSpec spec = small_spec();
  SynthSpec gapped = spec;
  gapped.gaps.push_back({0, -1, 200, 399});  // all four lines
  const SynthPage clean = generate_page(spec);
  const SynthPage page = generate_page(gapped);

  for (int i = 0; i < 4; ++i)
    CHECK(page.ground_truth.staves[0].lines[static_cast<std::size_t>(i)].rows ==
          clean.ground_truth.staves[0].lines[static_cast<std::size_t>(i)].rows);

  const int row = static_cast<int>(std::lround(synth_line_center(gapped, 0, 0, 300)));
  CHECK(!page.image.at(row, 300));
  CHECK(clean.image.at(row, 300));
  CHECK(page.image.at(row, 100));  // outside the gap the ink is intact
}

TEST_CASE("artifacts stay clear of the staff strips") {
  SynthSpec spec = small_spec();
  spec.artifacts = {60, 80, 200};
  const SynthPage clean = generate_page(small_spec());
  const SynthPage page = generate_page(spec);
  CHECK(page.image.foreground_count() > clean.image.foreground_count());
  // Every pixel added by the artifacts lies outside all staff strips.
  for (int s = 0; s < spec.n_staves; ++s) {
    const double top = synth_line_center(spec, s, 0, 0) - spec.thickness;
    const double bottom = synth_line_center(spec, s, 3, 0) + spec.thickness;
    for (int r = static_cast<int>(top); r <= static_cast<int>(bottom); ++r)
      for (int c = 0; c < spec.cols; ++c)
        CHECK(page.image.at(r, c) == clean.image.at(r, c));
  }
}

TEST_CASE("control points ride the analytic centers") {
  SynthSpec spec = small_spec();
  spec.baseline = SlopeShape{0.05};
  const SynthPage page = generate_page(spec);
  REQUIRE(page.control_points.size() == 2);
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 4; ++i) {
      const auto& cps = page.control_points[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
      CHECK(cps.size() >= 12);
      CHECK(cps.front().first == 0.0);
      CHECK(cps.back().first == spec.cols - 1.0);
      for (const auto& [col, row] : cps)
        CHECK(row == doctest::Approx(synth_line_center(spec, s, i, static_cast<int>(col)))
                         .epsilon(1e-12));
    }
  // The rasterized reference reproduces the analytic line for affine shapes.
  for (int i = 0; i < 4; ++i) {
    const auto& line = page.ground_truth.staves[0].lines[static_cast<std::size_t>(i)];
    for (int m = line.col_start; m <= line.col_end; ++m)
      CHECK(line.rows[static_cast<std::size_t>(m - line.col_start)] ==
            static_cast<int>(std::lround(synth_line_center(spec, 0, i, m))));
  }
}

TEST_CASE("invalid specs are rejected") {
  SynthSpec spec = small_spec();
  spec.line_spacing = 150.0;  // outside [20, 100]
  CHECK_THROWS_AS(generate_page(spec), contract_violation);

  spec = small_spec();
  spec.n_staves = 40;  // cannot fit
  CHECK_THROWS_AS(generate_page(spec), contract_violation);

  spec = small_spec();
  spec.gaps.push_back({5, 0, 0, 10});  // no such staff
  CHECK_THROWS_AS(generate_page(spec), contract_violation);
}

TEST_CASE("corpus generation is reproducible on disk") {
  testutil::TempDir dir("synth");
  std::vector<SynthSpec> specs{small_spec()};
  specs[0].artifacts = {25, 60, 150};
  SynthSpec second = small_spec();
  second.name = "gapped";
  second.seed = 7;
  second.gaps.push_back({1, 1, 50, 120});
  specs.push_back(second);

  const auto entries = generate_corpus(specs, dir.file("a"));
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].degradation == "artifacts");
  CHECK(entries[1].degradation == "gaps");
  CHECK(entries[0].spec_hash != entries[1].spec_hash);

  generate_corpus(specs, dir.file("b"));
  for (const char* name : {"small.png", "small.gt.json", "gapped.png", "gapped.gt.json",
                           "manifest.json"}) {
    const std::string a = testutil::read_file(dir.file("a") + "/" + name);
    const std::string b = testutil::read_file(dir.file("b") + "/" + name);
    CHECK(!a.empty());
    CHECK(a == b);
  }
}

TEST_SUITE_END();
