#include "staffrec/config.hpp"

#include <fstream>

#include <json.hpp>

namespace staffrec {

namespace {

using nlohmann::json;

}  // namespace

void validate_config(const Config& config) {
  const auto& p = config.pipeline;
  auto check = [](bool ok, const char* what) {
    if (!ok) throw format_error(std::string("config: ") + what);
  };
  check(p.search.n_stripes >= 1, "stripes must be >= 1");
  check(p.search.ma_length >= 1 && p.search.ma_length % 2 == 1, "ma_length must be odd and >= 1");
  check(p.search.threshold_frac > 0.0 && p.search.threshold_frac <= 1.0,
        "proj_threshold_frac must lie in (0, 1]");
  check(p.search.sep_min >= 1, "sep_min must be >= 1");
  check(p.search.sep_min < p.search.sep_max, "sep_min must be < sep_max");
  check(p.search.spacing_tol > 0.0 && p.search.spacing_tol < 1.0,
        "spacing_tol must lie in (0, 1)");
  check(p.preprocess.min_area >= 1, "min_area must be >= 1");
  check(p.smoothing.p > 0.0 && p.smoothing.p < 1.0, "spline_p must lie in (0, 1)");
  check(p.tracker.seed_tile_width_frac > 0.0 && p.tracker.seed_tile_width_frac <= 1.0,
        "seed_tile_width_frac must lie in (0, 1]");
  check(p.tracker.seed_tile_height >= 1 && p.tracker.seed_tile_height % 2 == 1,
        "seed_tile_height must be odd and >= 1");
  check(p.tracker.slope_window_frac > 0.0 && p.tracker.slope_window_frac <= 1.0,
        "slope_window_frac must lie in (0, 1]");
  check(p.tracker.search_halfwidth_frac > 0.0 && p.tracker.search_halfwidth_frac <= 1.0,
        "search_halfwidth_frac must lie in (0, 1]");
  check(p.tracker.removal_margin_frac > 0.0 && p.tracker.removal_margin_frac <= 1.0,
        "removal_margin_frac must lie in (0, 1]");
  check(config.eval.vertical_tol >= 0, "vertical_tol must be >= 0 (0 derives it per image)");
  check(config.jobs >= 1, "jobs must be >= 1");
}

Config load_config_file(const std::string& path, const Config& base) {
  std::ifstream in(path);
  if (!in) throw io_error(path + ": cannot open for reading");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw format_error(path + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw format_error(path + ": config must be a JSON object");

  Config config = base;
  auto& p = config.pipeline;
  for (const auto& [key, value] : j.items()) {
    const std::string where = path + ": " + key;
    auto num = [&]() {
      if (!value.is_number()) throw format_error(where + ": expected a number");
      return value.get<double>();
    };
    auto integer = [&]() {
      if (!value.is_number_integer()) throw format_error(where + ": expected an integer");
      return static_cast<int>(value.get<std::int64_t>());
    };
    if (key == "stripes")
      p.search.n_stripes = integer();
    else if (key == "ma_length")
      p.search.ma_length = integer();
    else if (key == "proj_threshold_frac")
      p.search.threshold_frac = num();
    else if (key == "sep_min")
      p.search.sep_min = integer();
    else if (key == "sep_max")
      p.search.sep_max = integer();
    else if (key == "spacing_tol")
      p.search.spacing_tol = num();
    else if (key == "min_area")
      p.preprocess.min_area = integer();
    else if (key == "spline_p")
      p.smoothing.p = num();
    else if (key == "seed_tile_width_frac")
      p.tracker.seed_tile_width_frac = num();
    else if (key == "seed_tile_height")
      p.tracker.seed_tile_height = integer();
    else if (key == "slope_window_frac")
      p.tracker.slope_window_frac = num();
    else if (key == "search_halfwidth_frac")
      p.tracker.search_halfwidth_frac = num();
    else if (key == "removal_margin_frac")
      p.tracker.removal_margin_frac = num();
    else if (key == "vertical_tol")
      config.eval.vertical_tol = integer();
    else if (key == "jobs")
      config.jobs = integer();
    else if (key == "seed") {
      if (!value.is_number_integer()) throw format_error(where + ": expected an integer");
      config.seed = value.get<std::uint64_t>();
    } else {
      throw format_error(where + ": unknown configuration key");
    }
  }
  return config;
}

}  // namespace staffrec
