#include "staffrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>

#include "staffrec/staff_io.hpp"

namespace staffrec {

namespace {

double shape_offset(const BaselineShape& shape, int cols, int m) {
  if (std::holds_alternative<SlopeShape>(shape))
    return std::get<SlopeShape>(shape).slope * (m - cols / 2.0);
  if (std::holds_alternative<SinusoidShape>(shape)) {
    const auto& s = std::get<SinusoidShape>(shape);
    return s.amplitude * std::sin(2.0 * std::numbers::pi * m / s.period);
  }
  return 0.0;
}

double max_shape_offset(const BaselineShape& shape, int cols) {
  if (std::holds_alternative<SlopeShape>(shape))
    return std::abs(std::get<SlopeShape>(shape).slope) * (cols / 2.0);
  if (std::holds_alternative<SinusoidShape>(shape))
    return std::abs(std::get<SinusoidShape>(shape).amplitude);
  return 0.0;
}

double staff_center_row(const SynthSpec& spec, int staff) {
  const double pitch = static_cast<double>(spec.rows) / (spec.n_staves + 1);
  return pitch * (staff + 1);
}

void validate(const SynthSpec& spec) {
  require(spec.rows >= 1 && spec.cols >= 1, "synth: page dimensions must be positive");
  require(spec.n_staves >= 0, "synth: n_staves must be nonnegative");
  require(spec.line_spacing >= 20.0 && spec.line_spacing <= 100.0,
          "synth: line_spacing must lie in [20, 100] px");
  require(spec.thickness >= 1, "synth: thickness must be positive");
  if (std::holds_alternative<SinusoidShape>(spec.baseline))
    require(std::get<SinusoidShape>(spec.baseline).period > 0.0,
            "synth: sinusoid period must be positive");

  const double maxoff = max_shape_offset(spec.baseline, spec.cols);
  const double half_staff = 1.5 * spec.line_spacing + spec.thickness;
  if (spec.n_staves > 0) {
    const double top = staff_center_row(spec, 0) - half_staff - maxoff;
    const double bottom = staff_center_row(spec, spec.n_staves - 1) + half_staff + maxoff;
    require(top >= 1.0 && bottom <= spec.rows - 2.0, "synth: staves do not fit the page");
    const double pitch = static_cast<double>(spec.rows) / (spec.n_staves + 1);
    require(pitch > 2.0 * (half_staff + maxoff),
            "synth: staves overlap; reduce n_staves, spacing or amplitude");
  }
  for (const auto& gap : spec.gaps) {
    require(gap.staff >= 0 && gap.staff < spec.n_staves, "synth: gap staff out of range");
    require(gap.line >= -1 && gap.line < 4, "synth: gap line selector out of range");
    require(gap.col_start >= 0 && gap.col_start <= gap.col_end && gap.col_end < spec.cols,
            "synth: gap columns out of range");
  }
  require(spec.artifacts.count >= 0, "synth: artifact count must be nonnegative");
  if (spec.artifacts.count > 0)
    require(spec.artifacts.area_min >= 1 && spec.artifacts.area_min <= spec.artifacts.area_max,
            "synth: artifact area range invalid");
}

// Portable bounded sampling on top of the fully specified mt19937_64.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = n == 0 ? 0 : std::numeric_limits<std::uint64_t>::max() -
                                               std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

}  // namespace

double synth_line_center(const SynthSpec& spec, int staff, int line, int m) {
  return staff_center_row(spec, staff) + (line - 1.5) * spec.line_spacing +
         shape_offset(spec.baseline, spec.cols, m);
}

SynthPage generate_page(const SynthSpec& spec) {
  validate(spec);
  SynthPage page;
  page.image = BinaryRaster(spec.rows, spec.cols);

  auto gapped = [&](int staff, int line, int m) {
    for (const auto& gap : spec.gaps)
      if (gap.staff == staff && (gap.line < 0 || gap.line == line) && m >= gap.col_start &&
          m <= gap.col_end)
        return true;
    return false;
  };

  for (int s = 0; s < spec.n_staves; ++s)
    for (int i = 0; i < 4; ++i)
      for (int m = 0; m < spec.cols; ++m) {
        if (gapped(s, i, m)) continue;
        const double y = synth_line_center(spec, s, i, m);
        const auto [lo, hi] = thickness_band(static_cast<int>(std::lround(y)), spec.thickness);
        for (int r = std::max(0, lo); r <= std::min(spec.rows - 1, hi); ++r)
          page.image.set(r, m, true);
      }

  // Clutter placed clear of the staff strips so the cleanup stage, not luck,
  // is what removes it.
  if (spec.artifacts.count > 0) {
    const double maxoff = max_shape_offset(spec.baseline, spec.cols);
    const int keepout = 30;
    std::vector<std::pair<int, int>> forbidden;  // [top, bottom] row strips
    for (int s = 0; s < spec.n_staves; ++s) {
      const double c = staff_center_row(spec, s);
      forbidden.emplace_back(
          static_cast<int>(std::floor(c - 1.5 * spec.line_spacing - maxoff)) - spec.thickness -
              keepout,
          static_cast<int>(std::ceil(c + 1.5 * spec.line_spacing + maxoff)) + spec.thickness +
              keepout);
    }
    auto allowed = [&](int top, int bottom) {
      for (const auto& [ft, fb] : forbidden)
        if (top <= fb && bottom >= ft) return false;
      return true;
    };

    std::mt19937_64 rng(spec.seed);
    for (int k = 0; k < spec.artifacts.count; ++k) {
      const std::uint64_t span =
          static_cast<std::uint64_t>(spec.artifacts.area_max - spec.artifacts.area_min + 1);
      const int area = spec.artifacts.area_min + static_cast<int>(uniform_below(rng, span));
      const bool disc = (rng() & 1) != 0;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        if (disc) {
          const int radius =
              std::max(1, static_cast<int>(std::lround(std::sqrt(area / std::numbers::pi))));
          const int r0 = static_cast<int>(uniform_below(rng, spec.rows));
          const int c0 = static_cast<int>(uniform_below(rng, spec.cols));
          if (r0 - radius < 0 || r0 + radius >= spec.rows || c0 - radius < 0 ||
              c0 + radius >= spec.cols || !allowed(r0 - radius, r0 + radius))
            continue;
          for (int dr = -radius; dr <= radius; ++dr)
            for (int dc = -radius; dc <= radius; ++dc)
              if (dr * dr + dc * dc <= radius * radius) page.image.set(r0 + dr, c0 + dc, true);
        } else {
          const int min_w = std::max(1, static_cast<int>(std::sqrt(area) / 2));
          const int max_w = std::max(min_w, static_cast<int>(std::sqrt(area) * 2));
          const int w = min_w + static_cast<int>(uniform_below(
                                    rng, static_cast<std::uint64_t>(max_w - min_w + 1)));
          const int h = std::max(1, area / w);
          const int r0 = static_cast<int>(uniform_below(rng, spec.rows));
          const int c0 = static_cast<int>(uniform_below(rng, spec.cols));
          if (r0 + h > spec.rows || c0 + w > spec.cols || !allowed(r0, r0 + h - 1)) continue;
          for (int dr = 0; dr < h; ++dr)
            for (int dc = 0; dc < w; ++dc) page.image.set(r0 + dr, c0 + dc, true);
        }
        break;
      }
    }
  }

  // Control points ride the analytic baseline regardless of gaps.
  const int step = std::max(1, (spec.cols + 11) / 12);
  for (int s = 0; s < spec.n_staves; ++s) {
    std::array<std::vector<std::pair<double, double>>, 4> staff_cps;
    for (int i = 0; i < 4; ++i) {
      auto& cps = staff_cps[static_cast<std::size_t>(i)];
      for (int m = 0; m < spec.cols - 1; m += step)
        cps.emplace_back(m, synth_line_center(spec, s, i, m));
      cps.emplace_back(spec.cols - 1, synth_line_center(spec, s, i, spec.cols - 1));
    }
    page.control_points.push_back(std::move(staff_cps));
  }
  page.ground_truth = rasterize_ground_truth(page.control_points, spec.rows, spec.cols);
  return page;
}

std::string spec_hash(const SynthSpec& spec) {
  char buf[64];
  std::string canon = spec.name;
  auto add_num = [&](double v) {
    std::snprintf(buf, sizeof buf, "|%.17g", v);
    canon += buf;
  };
  add_num(spec.rows);
  add_num(spec.cols);
  add_num(spec.n_staves);
  add_num(spec.line_spacing);
  add_num(spec.thickness);
  if (std::holds_alternative<FlatShape>(spec.baseline)) {
    canon += "|flat";
  } else if (std::holds_alternative<SlopeShape>(spec.baseline)) {
    canon += "|slope";
    add_num(std::get<SlopeShape>(spec.baseline).slope);
  } else {
    canon += "|sinusoid";
    add_num(std::get<SinusoidShape>(spec.baseline).amplitude);
    add_num(std::get<SinusoidShape>(spec.baseline).period);
  }
  for (const auto& gap : spec.gaps) {
    canon += "|gap";
    add_num(gap.staff);
    add_num(gap.line);
    add_num(gap.col_start);
    add_num(gap.col_end);
  }
  canon += "|art";
  add_num(spec.artifacts.count);
  add_num(spec.artifacts.area_min);
  add_num(spec.artifacts.area_max);
  std::snprintf(buf, sizeof buf, "|%llu", static_cast<unsigned long long>(spec.seed));
  canon += buf;

  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<CorpusEntry> generate_corpus(const std::vector<SynthSpec>& specs,
                                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error(out_dir + ": cannot create output directory");

  std::vector<CorpusEntry> entries;
  for (const auto& spec : specs) {
    const SynthPage page = generate_page(spec);
    CorpusEntry entry;
    entry.name = spec.name;
    entry.image_file = spec.name + ".png";
    entry.gt_file = spec.name + ".gt.json";
    entry.seed = spec.seed;
    entry.spec_hash = spec_hash(spec);
    const bool has_gaps = !spec.gaps.empty();
    const bool has_artifacts = spec.artifacts.count > 0;
    entry.degradation = has_gaps ? (has_artifacts ? "gaps+artifacts" : "gaps")
                                 : (has_artifacts ? "artifacts" : "clean");

    save_binary_png(page.image, (fs::path(out_dir) / entry.image_file).string());
    write_gt_json(page.control_points, (fs::path(out_dir) / entry.gt_file).string());
    entries.push_back(std::move(entry));
  }
  write_manifest_json(entries, (fs::path(out_dir) / "manifest.json").string());
  return entries;
}

}  // namespace staffrec
