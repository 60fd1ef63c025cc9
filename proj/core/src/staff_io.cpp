#include "staffrec/staff_io.hpp"

#include <fstream>

#include <json.hpp>

namespace staffrec {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path + ": cannot open for reading");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw format_error(path + ": invalid JSON: " + e.what());
  }
  return j;
}

void dump_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw io_error(path + ": write failed");
}

[[noreturn]] void fail(const std::string& file, const std::string& path, const std::string& what) {
  throw format_error(file + ": " + path + ": " + what);
}

const json& member(const json& j, const std::string& file, const std::string& path,
                   const char* key) {
  if (!j.is_object()) fail(file, path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(file, path + "." + key, "missing required field");
  return *it;
}

std::int64_t as_int(const json& j, const std::string& file, const std::string& path) {
  if (!j.is_number_integer()) fail(file, path, "expected an integer");
  return j.get<std::int64_t>();
}

double as_number(const json& j, const std::string& file, const std::string& path) {
  if (!j.is_number()) fail(file, path, "expected a number");
  return j.get<double>();
}

std::string status_code(const PixelStatus& s) {
  switch (s.state) {
    case TrackState::Detected:
      return "D";
    case TrackState::Estimated:
      return "E" + std::to_string(static_cast<int>(s.support));
    case TrackState::Extrapolated:
      return "X";
  }
  return "X";
}

PixelStatus parse_status_code(const std::string& code, const std::string& file,
                              const std::string& path) {
  if (code == "D") return {TrackState::Detected, 0};
  if (code == "X") return {TrackState::Extrapolated, 0};
  if (code.size() == 2 && code[0] == 'E' && code[1] >= '1' && code[1] <= '3')
    return {TrackState::Estimated, static_cast<std::uint8_t>(code[1] - '0')};
  fail(file, path, "unknown status code '" + code + "'");
}

json status_runs_json(const std::vector<PixelStatus>& status) {
  json runs = json::array();
  std::size_t i = 0;
  while (i < status.size()) {
    std::size_t j = i;
    while (j + 1 < status.size() && status[j + 1] == status[i]) ++j;
    runs.push_back(json::array({j - i + 1, status_code(status[i])}));
    i = j + 1;
  }
  return runs;
}

json params_echo_json(const Config& config) {
  const auto& p = config.pipeline;
  // jobs and seed are runtime knobs, not algorithm parameters; leaving them
  // out keeps outputs byte-identical across --jobs settings.
  return json{{"stripes", p.search.n_stripes},
              {"ma_length", p.search.ma_length},
              {"proj_threshold_frac", p.search.threshold_frac},
              {"sep_min", p.search.sep_min},
              {"sep_max", p.search.sep_max},
              {"spacing_tol", p.search.spacing_tol},
              {"min_area", p.preprocess.min_area},
              {"spline_p", p.smoothing.p},
              {"seed_tile_width_frac", p.tracker.seed_tile_width_frac},
              {"seed_tile_height", p.tracker.seed_tile_height},
              {"slope_window_frac", p.tracker.slope_window_frac},
              {"search_halfwidth_frac", p.tracker.search_halfwidth_frac},
              {"removal_margin_frac", p.tracker.removal_margin_frac},
              {"vertical_tol", config.eval.vertical_tol}};
}

}  // namespace

void write_staves_json(const StavesDocument& doc, const Config& config, const std::string& path) {
  json staves = json::array();
  for (const auto& staff : doc.staves) {
    json lines = json::array();
    json runs = json::array();
    for (std::size_t i = 0; i < 4; ++i) {
      lines.push_back(staff.lines[i]);
      runs.push_back(status_runs_json(staff.status[i]));
    }
    staves.push_back(json{{"col_range", json::array({staff.col_start, staff.col_end})},
                          {"mean_sep", staff.mean_sep},
                          {"thickness", staff.thickness},
                          {"lines", std::move(lines)},
                          {"status_runs", std::move(runs)}});
  }
  const json j{{"image", json{{"rows", doc.rows}, {"cols", doc.cols}}},
               {"params_echo", params_echo_json(config)},
               {"staves", std::move(staves)}};
  dump_json(j, path);
}

StavesDocument read_staves_json(const std::string& path) {
  const json j = load_json(path);
  StavesDocument doc;
  const json& image = member(j, path, "$", "image");
  doc.rows = static_cast<int>(as_int(member(image, path, "$.image", "rows"), path, "$.image.rows"));
  doc.cols = static_cast<int>(as_int(member(image, path, "$.image", "cols"), path, "$.image.cols"));
  if (doc.rows < 1 || doc.cols < 1) fail(path, "$.image", "dimensions must be positive");

  const json& staves = member(j, path, "$", "staves");
  if (!staves.is_array()) fail(path, "$.staves", "expected an array");
  for (std::size_t si = 0; si < staves.size(); ++si) {
    const std::string sp = "$.staves[" + std::to_string(si) + "]";
    const json& js = staves[si];
    ReconstructedStaff staff;

    const json& range = member(js, path, sp, "col_range");
    if (!range.is_array() || range.size() != 2) fail(path, sp + ".col_range", "expected [m0, m1]");
    staff.col_start = static_cast<int>(as_int(range[0], path, sp + ".col_range[0]"));
    staff.col_end = static_cast<int>(as_int(range[1], path, sp + ".col_range[1]"));
    if (staff.col_start < 0 || staff.col_start > staff.col_end || staff.col_end >= doc.cols)
      fail(path, sp + ".col_range", "range outside the image");

    staff.mean_sep = as_number(member(js, path, sp, "mean_sep"), path, sp + ".mean_sep");
    staff.thickness =
        static_cast<int>(as_int(member(js, path, sp, "thickness"), path, sp + ".thickness"));
    if (staff.thickness < 1) fail(path, sp + ".thickness", "must be positive");

    const json& lines = member(js, path, sp, "lines");
    if (!lines.is_array() || lines.size() != 4) fail(path, sp + ".lines", "expected 4 lines");
    const std::size_t width = static_cast<std::size_t>(staff.width());
    for (std::size_t li = 0; li < 4; ++li) {
      const std::string lp = sp + ".lines[" + std::to_string(li) + "]";
      const json& line = lines[li];
      if (!line.is_array() || line.size() != width)
        fail(path, lp, "expected one row per column of col_range");
      staff.lines[li].reserve(width);
      for (std::size_t k = 0; k < width; ++k)
        staff.lines[li].push_back(
            static_cast<int>(as_int(line[k], path, lp + "[" + std::to_string(k) + "]")));
    }

    const json& runs = member(js, path, sp, "status_runs");
    if (!runs.is_array() || runs.size() != 4)
      fail(path, sp + ".status_runs", "expected 4 run lists");
    for (std::size_t li = 0; li < 4; ++li) {
      const std::string rp = sp + ".status_runs[" + std::to_string(li) + "]";
      const json& rl = runs[li];
      if (!rl.is_array()) fail(path, rp, "expected an array of [count, code]");
      auto& status = staff.status[li];
      for (std::size_t k = 0; k < rl.size(); ++k) {
        const std::string ep = rp + "[" + std::to_string(k) + "]";
        const json& run = rl[k];
        if (!run.is_array() || run.size() != 2 || !run[0].is_number_integer() ||
            !run[1].is_string())
          fail(path, ep, "expected [count, code]");
        const std::int64_t count = run[0].get<std::int64_t>();
        if (count < 1) fail(path, ep, "count must be positive");
        const PixelStatus st = parse_status_code(run[1].get<std::string>(), path, ep);
        status.insert(status.end(), static_cast<std::size_t>(count), st);
      }
      if (status.size() != width) fail(path, rp, "run lengths do not cover col_range");
    }
    doc.staves.push_back(std::move(staff));
  }
  return doc;
}

void write_gt_json(
    const std::vector<std::array<std::vector<std::pair<double, double>>, 4>>& control_points,
    const std::string& path) {
  json staves = json::array();
  for (const auto& staff : control_points) {
    json lines = json::array();
    for (const auto& line : staff) {
      json pts = json::array();
      for (const auto& [col, row] : line) pts.push_back(json::array({col, row}));
      lines.push_back(std::move(pts));
    }
    staves.push_back(json{{"lines", std::move(lines)}});
  }
  dump_json(json{{"staves", std::move(staves)}}, path);
}

std::vector<std::array<std::vector<std::pair<double, double>>, 4>> read_gt_json(
    const std::string& path) {
  const json j = load_json(path);
  const json& staves = member(j, path, "$", "staves");
  if (!staves.is_array()) fail(path, "$.staves", "expected an array");
  std::vector<std::array<std::vector<std::pair<double, double>>, 4>> out;
  for (std::size_t si = 0; si < staves.size(); ++si) {
    const std::string sp = "$.staves[" + std::to_string(si) + "]";
    const json& lines = member(staves[si], path, sp, "lines");
    if (!lines.is_array() || lines.size() != 4) fail(path, sp + ".lines", "expected 4 lines");
    std::array<std::vector<std::pair<double, double>>, 4> staff;
    for (std::size_t li = 0; li < 4; ++li) {
      const std::string lp = sp + ".lines[" + std::to_string(li) + "]";
      const json& pts = lines[li];
      if (!pts.is_array() || pts.size() < 2)
        fail(path, lp, "expected at least 2 control points");
      double prev_col = 0.0;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const std::string pp = lp + "[" + std::to_string(k) + "]";
        const json& pt = pts[k];
        if (!pt.is_array() || pt.size() != 2) fail(path, pp, "expected [col, row]");
        const double col = as_number(pt[0], path, pp + "[0]");
        const double row = as_number(pt[1], path, pp + "[1]");
        if (k > 0 && col <= prev_col)
          fail(path, pp, "control columns must be strictly increasing");
        prev_col = col;
        staff[li].emplace_back(col, row);
      }
    }
    out.push_back(std::move(staff));
  }
  return out;
}

void write_report_json(const EvalReport& report, const std::string& path) {
  const EvalCounts& c = report.counts;
  json j{{"vertical_tol", report.vertical_tol},
         {"counts",
          json{{"detected", c.detected},
               {"interpolated", c.interpolated},
               {"missed_detection", c.missed_detection},
               {"missed_interpolation", c.missed_interpolation},
               {"false_detection", c.false_detection},
               {"false_interpolation", c.false_interpolation}}},
         {"ground_truth_pixels", c.ground_truth_total()},
         {"staff_line_pixels", c.staff_line_pixels()},
         {"correct_reconstructed", c.correct_reconstructed()}};
  if (report.percentages_defined) {
    j["percentages"] = json{{"staff_line_pixels", report.staff_line_pixels_pct},
                            {"correct_reconstructed", report.correct_reconstructed_pct},
                            {"detected", report.detected_pct},
                            {"interpolated", report.interpolated_pct},
                            {"missed_detection", report.missed_detection_pct},
                            {"missed_interpolation", report.missed_interpolation_pct},
                            {"false_detection", report.false_detection_pct},
                            {"false_interpolation", report.false_interpolation_pct}};
  } else {
    j["percentages"] = nullptr;
  }
  dump_json(j, path);
}

void write_separation_csv(const std::map<int, std::uint64_t>& histogram,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error(path + ": cannot open for writing");
  for (const auto& [offset, count] : histogram) out << offset << ',' << count << '\n';
  if (!out) throw io_error(path + ": write failed");
}

std::vector<SynthSpec> read_synth_specs(const std::string& path, std::uint64_t base_seed) {
  const json j = load_json(path);
  const json& pages = member(j, path, "$", "pages");
  if (!pages.is_array() || pages.empty()) fail(path, "$.pages", "expected a nonempty array");

  std::vector<SynthSpec> specs;
  for (std::size_t pi = 0; pi < pages.size(); ++pi) {
    const std::string pp = "$.pages[" + std::to_string(pi) + "]";
    const json& page = pages[pi];
    if (!page.is_object()) fail(path, pp, "expected an object");
    SynthSpec spec;
    spec.name = "page_" + std::to_string(pi);
    spec.seed = base_seed + pi;
    for (const auto& [key, value] : page.items()) {
      const std::string kp = pp + "." + key;
      if (key == "name") {
        if (!value.is_string()) fail(path, kp, "expected a string");
        spec.name = value.get<std::string>();
      } else if (key == "rows") {
        spec.rows = static_cast<int>(as_int(value, path, kp));
      } else if (key == "cols") {
        spec.cols = static_cast<int>(as_int(value, path, kp));
      } else if (key == "n_staves") {
        spec.n_staves = static_cast<int>(as_int(value, path, kp));
      } else if (key == "line_spacing") {
        spec.line_spacing = as_number(value, path, kp);
      } else if (key == "thickness") {
        spec.thickness = static_cast<int>(as_int(value, path, kp));
      } else if (key == "seed") {
        spec.seed = static_cast<std::uint64_t>(as_int(value, path, kp));
      } else if (key == "baseline") {
        const json& shape = member(value, path, kp, "shape");
        if (!shape.is_string()) fail(path, kp + ".shape", "expected a string");
        const std::string name = shape.get<std::string>();
        if (name == "flat") {
          spec.baseline = FlatShape{};
        } else if (name == "slope") {
          SlopeShape s;
          s.slope = as_number(member(value, path, kp, "slope"), path, kp + ".slope");
          spec.baseline = s;
        } else if (name == "sinusoid") {
          SinusoidShape s;
          s.amplitude = as_number(member(value, path, kp, "amplitude"), path, kp + ".amplitude");
          s.period = as_number(member(value, path, kp, "period"), path, kp + ".period");
          spec.baseline = s;
        } else {
          fail(path, kp + ".shape", "unknown shape '" + name + "'");
        }
      } else if (key == "gaps") {
        if (!value.is_array()) fail(path, kp, "expected an array");
        for (std::size_t gi = 0; gi < value.size(); ++gi) {
          const std::string gp = kp + "[" + std::to_string(gi) + "]";
          const json& g = value[gi];
          GapSpec gap;
          gap.staff = static_cast<int>(as_int(member(g, path, gp, "staff"), path, gp + ".staff"));
          if (g.contains("line"))
            gap.line = static_cast<int>(as_int(g["line"], path, gp + ".line"));
          gap.col_start =
              static_cast<int>(as_int(member(g, path, gp, "col_start"), path, gp + ".col_start"));
          gap.col_end =
              static_cast<int>(as_int(member(g, path, gp, "col_end"), path, gp + ".col_end"));
          spec.gaps.push_back(gap);
        }
      } else if (key == "artifacts") {
        spec.artifacts.count = static_cast<int>(
            as_int(member(value, path, kp, "count"), path, kp + ".count"));
        if (value.contains("area_min"))
          spec.artifacts.area_min = static_cast<int>(as_int(value["area_min"], path, kp + ".area_min"));
        if (value.contains("area_max"))
          spec.artifacts.area_max = static_cast<int>(as_int(value["area_max"], path, kp + ".area_max"));
      } else {
        fail(path, kp, "unknown key");
      }
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

void write_manifest_json(const std::vector<CorpusEntry>& entries, const std::string& path) {
  json pages = json::array();
  for (const auto& e : entries)
    pages.push_back(json{{"name", e.name},
                         {"image", e.image_file},
                         {"gt", e.gt_file},
                         {"seed", e.seed},
                         {"spec_hash", e.spec_hash},
                         {"degradation", e.degradation}});
  dump_json(json{{"pages", std::move(pages)}}, path);
}

}  // namespace staffrec
