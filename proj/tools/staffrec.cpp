// staffrec: reconstructs the four lines of tetragram staves from binarized,
// partially erased score images, evaluates reconstructions against reference
// annotations, and synthesizes benchmark pages with exact references.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "staffrec/config.hpp"
#include "staffrec/evaluation.hpp"
#include "staffrec/morphology.hpp"
#include "staffrec/raster.hpp"
#include "staffrec/staff_io.hpp"
#include "staffrec/synth.hpp"
#include "staffrec/tracker.hpp"

namespace fs = std::filesystem;
using namespace staffrec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;     // usage, unreadable or malformed inputs
constexpr int kExitInternal = 3;  // broken invariant

struct FlagSet {
  Config values;
  std::map<std::string, CLI::Option*> opts;
  std::string config_path;
  CLI::Option* config_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, FlagSet& f) {
  auto& p = f.values.pipeline;
  f.opts["stripes"] = cmd->add_option("--stripes", p.search.n_stripes,
                                      "Number of vertical search stripes");
  f.opts["ma_length"] =
      cmd->add_option("--ma-length", p.search.ma_length, "Projection moving-average length (odd)");
  f.opts["threshold_frac"] = cmd->add_option("--proj-threshold-frac", p.search.threshold_frac,
                                             "Projection threshold as a fraction of stripe width");
  f.opts["sep_min"] = cmd->add_option("--sep-min", p.search.sep_min,
                                      "Minimum admissible line separation (px)");
  f.opts["sep_max"] = cmd->add_option("--sep-max", p.search.sep_max,
                                      "Maximum admissible line separation (px)");
  f.opts["spacing_tol"] = cmd->add_option("--spacing-tol", p.search.spacing_tol,
                                          "Allowed relative deviation between separations");
  f.opts["min_area"] = cmd->add_option("--min-area", p.preprocess.min_area,
                                       "Area opening threshold (px^2); also sizes the closing disc");
  f.opts["spline_p"] = cmd->add_option("--spline-p", p.smoothing.p, "Smoothing weight in (0,1)");
  f.opts["seed_tile_height"] = cmd->add_option("--seed-tile-height", p.tracker.seed_tile_height,
                                               "Seed tile height (odd px)");
  f.opts["slope_window_frac"] =
      cmd->add_option("--slope-window-frac", p.tracker.slope_window_frac,
                      "Slope window as a fraction of the line separation");
  f.opts["search_halfwidth_frac"] =
      cmd->add_option("--search-halfwidth-frac", p.tracker.search_halfwidth_frac,
                      "Detection window half-width as a fraction of the separation");
  f.opts["removal_margin_frac"] =
      cmd->add_option("--removal-margin-frac", p.tracker.removal_margin_frac,
                      "Removal stripe margin as a fraction of the separation");
  f.opts["jobs"] = cmd->add_option("--jobs", f.values.jobs, "Worker threads for directory inputs");
  f.opts["seed"] = cmd->add_option("--seed", f.values.seed, "Base seed for page synthesis");
  f.config_opt = cmd->add_option("--config", f.config_path, "JSON file with parameter overrides");
}

Config resolve_config(const FlagSet& f) {
  Config cfg;
  if (f.config_opt->count() > 0) cfg = load_config_file(f.config_path, cfg);
  auto& p = cfg.pipeline;
  const auto& v = f.values;
  auto set_if = [&](const char* key, auto& dst, const auto& src) {
    if (f.opts.at(key)->count() > 0) dst = src;
  };
  set_if("stripes", p.search.n_stripes, v.pipeline.search.n_stripes);
  set_if("ma_length", p.search.ma_length, v.pipeline.search.ma_length);
  set_if("threshold_frac", p.search.threshold_frac, v.pipeline.search.threshold_frac);
  set_if("sep_min", p.search.sep_min, v.pipeline.search.sep_min);
  set_if("sep_max", p.search.sep_max, v.pipeline.search.sep_max);
  set_if("spacing_tol", p.search.spacing_tol, v.pipeline.search.spacing_tol);
  set_if("min_area", p.preprocess.min_area, v.pipeline.preprocess.min_area);
  set_if("spline_p", p.smoothing.p, v.pipeline.smoothing.p);
  set_if("seed_tile_height", p.tracker.seed_tile_height, v.pipeline.tracker.seed_tile_height);
  set_if("slope_window_frac", p.tracker.slope_window_frac, v.pipeline.tracker.slope_window_frac);
  set_if("search_halfwidth_frac", p.tracker.search_halfwidth_frac,
         v.pipeline.tracker.search_halfwidth_frac);
  set_if("removal_margin_frac", p.tracker.removal_margin_frac,
         v.pipeline.tracker.removal_margin_frac);
  set_if("jobs", cfg.jobs, v.jobs);
  set_if("seed", cfg.seed, v.seed);
  validate_config(cfg);
  return cfg;
}

/// Runs work(i) over [0, n) on `jobs` threads. The first failure (lowest
/// index) is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& work) {
  if (n == 0) return;
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));

  std::mutex err_mutex;
  std::size_t err_index = n;
  int err_kind = 0;  // 1 io, 2 format, 3 contract, 4 other
  std::string err_msg;
  auto record = [&](std::size_t i, int kind, const std::string& msg) {
    std::lock_guard<std::mutex> lock(err_mutex);
    if (i < err_index) {
      err_index = i;
      err_kind = kind;
      err_msg = msg;
    }
  };

  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        work(i);
      } catch (const io_error& e) {
        record(i, 1, e.what());
      } catch (const format_error& e) {
        record(i, 2, e.what());
      } catch (const contract_violation& e) {
        record(i, 3, e.what());
      } catch (const std::exception& e) {
        record(i, 4, e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();

  if (err_index < n) {
    switch (err_kind) {
      case 1:
        throw io_error(err_msg);
      case 2:
        throw format_error(err_msg);
      case 3:
        throw contract_violation(err_msg);
      default:
        throw std::runtime_error(err_msg);
    }
  }
}

std::vector<fs::path> list_pages(const fs::path& dir) {
  std::vector<fs::path> pages;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".png" || ext == ".pgm") pages.push_back(entry.path());
  }
  std::sort(pages.begin(), pages.end());
  if (pages.empty()) throw io_error(dir.string() + ": no .png or .pgm pages found");
  return pages;
}

void reconstruct_one(const fs::path& input, const fs::path& out_dir, const Config& cfg) {
  const GrayRaster image = load_gray(input.string());

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error(out_dir.string() + ": cannot create output directory");

  StavesDocument doc;
  doc.rows = image.rows;
  doc.cols = image.cols;
  doc.staves = reconstruct_page(image, cfg.pipeline);
  write_staves_json(doc, cfg, (out_dir / "staves.json").string());

  save_binary_png(render_staff_image(image.rows, image.cols, doc.staves),
                  (out_dir / "staff_image.png").string());

  OverlayStats stats;
  const int overlay_thickness = doc.staves.empty() ? 1 : effective_vertical_tol(doc.staves, {});
  const RgbRaster overlay = render_overlay(image, doc.staves, overlay_thickness, &stats);
  save_rgb_png(overlay, (out_dir / "overlay.png").string());
  if (stats.clipped_pixels > 0)
    std::cerr << "warning: " << input.string() << ": " << stats.clipped_pixels
              << " overlay pixels fell outside the page and were clipped\n";
}

int cmd_reconstruct(const std::string& input, const std::string& out_dir, const Config& cfg) {
  if (fs::is_directory(input)) {
    const auto pages = list_pages(input);
    parallel_for(pages.size(), cfg.jobs, [&](std::size_t i) {
      reconstruct_one(pages[i], fs::path(out_dir) / pages[i].stem(), cfg);
    });
    std::cout << "reconstructed " << pages.size() << " pages into " << out_dir << "\n";
  } else {
    reconstruct_one(input, out_dir, cfg);
    std::cout << "wrote " << (fs::path(out_dir) / "staves.json").string() << "\n";
  }
  return kExitOk;
}

void print_report(const EvalReport& r, std::ostream& os) {
  const auto& c = r.counts;
  os << "ground truth pixels     " << c.ground_truth_total() << "\n";
  if (!r.percentages_defined) {
    os << "percentages undefined: empty ground truth\n";
    return;
  }
  os << "staff line pixels       " << c.staff_line_pixels() << "  ("
     << format_percent(r.staff_line_pixels_pct) << "%)\n"
     << "correct reconstructed   " << c.correct_reconstructed() << "  ("
     << format_percent(r.correct_reconstructed_pct) << "%)\n"
     << "correct detected        " << c.detected << "  (" << format_percent(r.detected_pct)
     << "%)\n"
     << "correct interpolated    " << c.interpolated << "  ("
     << format_percent(r.interpolated_pct) << "%)\n"
     << "missed detections       " << c.missed_detection << "  ("
     << format_percent(r.missed_detection_pct) << "%)\n"
     << "missed interpolations   " << c.missed_interpolation << "  ("
     << format_percent(r.missed_interpolation_pct) << "%)\n"
     << "false detections        " << c.false_detection << "  ("
     << format_percent(r.false_detection_pct) << "%)\n"
     << "false interpolations    " << c.false_interpolation << "  ("
     << format_percent(r.false_interpolation_pct) << "%)\n";
}

EvalReport evaluate_one(const fs::path& staves_path, const fs::path& gt_path,
                        const fs::path& image_path, const fs::path& out_dir, const Config& cfg) {
  const StavesDocument doc = read_staves_json(staves_path.string());
  const auto gt_cps = read_gt_json(gt_path.string());
  const GrayRaster image = load_gray(image_path.string());
  if (image.rows != doc.rows || image.cols != doc.cols)
    throw format_error(staves_path.string() + ": image dimensions " + std::to_string(doc.rows) +
                       "x" + std::to_string(doc.cols) + " do not match " + image_path.string() +
                       " (" + std::to_string(image.rows) + "x" + std::to_string(image.cols) + ")");
  const BinaryRaster binary = threshold_gray(image, 128);
  const GroundTruth gt = rasterize_ground_truth(gt_cps, doc.rows, doc.cols);

  const int tol = effective_vertical_tol(doc.staves, cfg.eval);
  const EvalCounts counts = classify_pixels(doc.staves, gt, binary, EvalParams{tol});
  const EvalReport report = compute_report(counts, tol);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw io_error(out_dir.string() + ": cannot create output directory");
  write_report_json(report, (out_dir / "report.json").string());
  write_separation_csv(counts.separation_histogram, (out_dir / "sep_hist.csv").string());
  return report;
}

int cmd_evaluate(const std::string& staves, const std::string& gt, const std::string& image,
                 const std::string& out_dir, const Config& cfg) {
  if (!fs::is_directory(staves)) {
    const EvalReport report = evaluate_one(staves, gt, image, out_dir, cfg);
    print_report(report, std::cout);
    return kExitOk;
  }

  // Batch layout: <staves>/<stem>/staves.json, <gt>/<stem>.gt.json,
  // <image>/<stem>.png|.pgm.
  std::vector<fs::path> stems;
  for (const auto& entry : fs::directory_iterator(staves))
    if (entry.is_directory() && fs::exists(entry.path() / "staves.json"))
      stems.push_back(entry.path());
  std::sort(stems.begin(), stems.end());
  if (stems.empty()) throw io_error(staves + ": no <page>/staves.json entries found");

  std::vector<EvalReport> reports(stems.size());
  parallel_for(stems.size(), cfg.jobs, [&](std::size_t i) {
    const std::string stem = stems[i].filename().string();
    fs::path image_path = fs::path(image) / (stem + ".png");
    if (!fs::exists(image_path)) image_path = fs::path(image) / (stem + ".pgm");
    reports[i] = evaluate_one(stems[i] / "staves.json", fs::path(gt) / (stem + ".gt.json"),
                              image_path, fs::path(out_dir) / stem, cfg);
  });

  EvalCounts total;
  for (const auto& r : reports) {
    const auto& c = r.counts;
    total.detected += c.detected;
    total.interpolated += c.interpolated;
    total.missed_detection += c.missed_detection;
    total.missed_interpolation += c.missed_interpolation;
    total.false_detection += c.false_detection;
    total.false_interpolation += c.false_interpolation;
    for (const auto& [offset, count] : c.separation_histogram)
      total.separation_histogram[offset] += count;
  }
  const EvalReport summary = compute_report(total, 0);
  write_report_json(summary, (fs::path(out_dir) / "summary.json").string());
  write_separation_csv(total.separation_histogram,
                       (fs::path(out_dir) / "summary_sep_hist.csv").string());
  std::cout << "evaluated " << stems.size() << " pages\n";
  print_report(summary, std::cout);
  return kExitOk;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, const Config& cfg) {
  const auto specs = read_synth_specs(spec_path, cfg.seed);
  const auto entries = generate_corpus(specs, out_dir);
  std::cout << "generated " << entries.size() << " pages into " << out_dir << "\n";
  return kExitOk;
}

int cmd_overlay(const std::string& image_path, const std::string& staves_path,
                const std::string& out_png) {
  const GrayRaster image = load_gray(image_path);
  const StavesDocument doc = read_staves_json(staves_path);
  if (image.rows != doc.rows || image.cols != doc.cols)
    throw format_error(staves_path + ": image dimensions do not match " + image_path);
  OverlayStats stats;
  const int thickness = doc.staves.empty() ? 1 : effective_vertical_tol(doc.staves, {});
  save_rgb_png(render_overlay(image, doc.staves, thickness, &stats), out_png);
  if (stats.clipped_pixels > 0)
    std::cerr << "warning: " << stats.clipped_pixels << " overlay pixels clipped\n";
  std::cout << "wrote " << out_png << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tetragram staff line reconstruction"};
  app.require_subcommand(1);

  FlagSet rec_flags, eval_flags, synth_flags, overlay_flags;
  std::string input, output, staves, gt, image, out_png;

  CLI::App* rec = app.add_subcommand(
      "reconstruct", "Reconstruct staff lines from a page image (or a directory of pages)");
  rec->add_option("input", input, "Input PNG/PGM page, or a directory of pages")->required();
  rec->add_option("output", output, "Output directory")->required();
  add_common_flags(rec, rec_flags);

  CLI::App* ev = app.add_subcommand(
      "evaluate", "Score a reconstruction against reference staff lines");
  ev->add_option("staves", staves, "staves.json, or a reconstruct batch directory")->required();
  ev->add_option("gt", gt, "Reference .gt.json, or a directory of them")->required();
  ev->add_option("image", image, "Binary page image, or a directory of them")->required();
  ev->add_option("output", output, "Output directory")->required();
  add_common_flags(ev, eval_flags);

  CLI::App* sy = app.add_subcommand("synth", "Generate synthetic pages with references");
  sy->add_option("spec", input, "Corpus spec JSON")->required();
  sy->add_option("output", output, "Output directory")->required();
  add_common_flags(sy, synth_flags);

  CLI::App* ov = app.add_subcommand("overlay", "Draw reconstructed lines over a page image");
  ov->add_option("image", image, "Base page image")->required();
  ov->add_option("staves", staves, "staves.json")->required();
  ov->add_option("output", out_png, "Output PNG")->required();
  add_common_flags(ov, overlay_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (rec->parsed()) return cmd_reconstruct(input, output, resolve_config(rec_flags));
    if (ev->parsed()) return cmd_evaluate(staves, gt, image, output, resolve_config(eval_flags));
    if (sy->parsed()) return cmd_synth(input, output, resolve_config(synth_flags));
    if (ov->parsed()) return cmd_overlay(image, staves, out_png);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const format_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const contract_violation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
