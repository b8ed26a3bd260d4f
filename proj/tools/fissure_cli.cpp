#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fissure/metrics.hpp"
#include "fissure/phantom.hpp"
#include "fissure/pipeline.hpp"
#include "fissure/render.hpp"
#include "fissure/volume_io.hpp"

namespace fs = std::filesystem;
using namespace fissure;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitStage = 3;

struct RawFlags {
  std::string dims, spacing, dtype;

  void add(CLI::App* cmd) {
    cmd->add_option("--dims", dims, "raw input dims nx,ny,nz");
    cmd->add_option("--spacing", spacing, "raw input spacing sx,sy,sz (mm)");
    cmd->add_option("--dtype", dtype, "raw input element type")
        ->check(CLI::IsMember({"u8", "i16", "u16", "f32"}));
  }

  std::optional<RawLayout> layout() const {
    if (dims.empty() && spacing.empty() && dtype.empty()) return std::nullopt;
    if (dims.empty()) throw InputError("--dims is required for raw input");
    RawLayout r;
    const auto d = split<std::size_t>(dims, "--dims");
    r.dims = {d[0], d[1], d[2]};
    if (!spacing.empty()) {
      const auto s = split<double>(spacing, "--spacing");
      r.spacing = {s[0], s[1], s[2]};
    }
    if (!dtype.empty()) r.type = parse_element_type(dtype);
    return r;
  }

  template <typename T>
  static std::array<T, 3> split(const std::string& text, const char* flag) {
    std::array<T, 3> out{};
    std::istringstream in(text);
    std::string item;
    std::size_t n = 0;
    while (std::getline(in, item, ',')) {
      if (n == 3) break;
      std::istringstream one(item);
      if (!(one >> out[n]) || !one.eof()) throw InputError(std::string(flag) + ": bad value '" + item + "'");
      ++n;
    }
    if (n != 3 || in.rdbuf()->in_avail() > 0) {
      throw InputError(std::string(flag) + " expects three comma-separated values");
    }
    return out;
  }
};

fs::path with_suffix(const fs::path& stem, const std::string& suffix) {
  fs::path p = stem;
  if (p.extension() == ".mhd" || p.extension() == ".raw") p.replace_extension();
  return p.string() + suffix;
}

struct SegmentArgs {
  std::string ct, lung_mask, config, out, report, dump_dir;
  int threads = -1;
  bool dump = false;
  RawFlags raw;
};

int run_segment(const SegmentArgs& a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : PipelineConfig::load(a.config);
  if (a.threads >= 0) cfg.threads = static_cast<unsigned>(a.threads);
  if (a.dump || !a.dump_dir.empty()) cfg.dump_intermediates = true;

  const auto layout = a.raw.layout();
  const ScalarVolume ct = load_volume(a.ct, layout);
  const ScalarVolume lungs = load_volume(a.lung_mask, layout);

  std::optional<IntermediateSink> sink;
  if (cfg.dump_intermediates) {
    const fs::path dir = a.dump_dir.empty() ? with_suffix(a.out, "_intermediates") : fs::path(a.dump_dir);
    fs::create_directories(dir);
    sink = IntermediateSink{dir};
  }
  const SegmentResult r = segment(ct, lungs, cfg, sink ? &*sink : nullptr);
  write_volume(r.final_mask, a.out);

  const fs::path report = a.report.empty() ? with_suffix(a.out, "_report.json") : fs::path(a.report);
  std::ofstream(report) << segment_report_json(r, cfg) << '\n';
  std::cout << "final mask: " << count_true(r.final_mask) << " voxels, report " << report.string()
            << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string seg, gt, batch, out_csv, case_id = "case";
  double band_mm = 3.0;
  RawFlags raw;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto layout = a.raw.layout();
  std::vector<std::array<std::string, 3>> cases;
  if (!a.batch.empty()) {
    std::ifstream in(a.batch);
    if (!in) throw InputError("cannot open batch list " + a.batch);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::array<std::string, 3> c;
      std::istringstream ls(line);
      for (auto& field : c) {
        if (!std::getline(ls, field, ',')) throw InputError("batch line needs case_id,seg,gt: " + line);
      }
      cases.push_back(c);
    }
    if (cases.empty()) throw InputError("batch list is empty");
  } else {
    if (a.seg.empty() || a.gt.empty()) throw InputError("evaluate needs --seg and --gt, or --batch");
    cases.push_back({a.case_id, a.seg, a.gt});
  }

  std::vector<MetricsReport> reports;
  for (const auto& [id, seg, gt] : cases) {
    MetricsReport r = score(load_mask(seg, layout), load_mask(gt, layout), a.band_mm);
    r.case_id = id;
    reports.push_back(r);
  }

  std::ofstream file;
  if (!a.out_csv.empty()) {
    file.open(a.out_csv);
    if (!file) throw std::runtime_error("cannot write " + a.out_csv);
  }
  std::ostream& out = a.out_csv.empty() ? std::cout : file;
  out << kCsvHeader << '\n';
  for (const auto& r : reports) write_csv_row(out, r);
  if (!a.batch.empty()) write_csv_summary(out, aggregate(reports), a.band_mm);
  return 0;
}

int run_phantom(const std::string& name, const std::string& out_dir) {
  const PhantomSpec spec = canonical_phantom(name);
  const Phantom ph = generate(spec);
  if (ph.clipped_structures > 0) {
    std::cerr << "warning: " << ph.clipped_structures << " structure(s) clipped at the volume border\n";
  }
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_volume(ph.volume, dir / name);
  write_volume(ph.plane_truth, dir / (name + "_plane_truth"));
  write_volume(ph.tube_truth, dir / (name + "_tube_truth"));
  write_volume(ph.solid_truth, dir / (name + "_solid_truth"));
  write_volume(ph.all_truth(), dir / (name + "_truth"));
  write_volume(ph.lung_mask, dir / (name + "_lung_mask"));
  return 0;
}

struct RenderArgs {
  std::string volume, mask, gt, axis = "sagittal", out;
  std::size_t slice = 0;
  RawFlags raw;
};

int run_render(const RenderArgs& a) {
  const auto layout = a.raw.layout();
  const ScalarVolume v = load_volume(a.volume, layout);
  std::optional<BinaryVolume> mask, gt;
  if (!a.mask.empty()) mask = load_mask(a.mask, layout);
  if (!a.gt.empty()) gt = load_mask(a.gt, layout);
  const RgbImage img =
      render_slice(v, mask ? &*mask : nullptr, gt ? &*gt : nullptr, parse_view_axis(a.axis), a.slice);
  write_png(img, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar structure (fissure) segmentation in 3D volumes"};
  app.require_subcommand(1);

  SegmentArgs seg;
  auto* s = app.add_subcommand("segment", "run the full segmentation pipeline");
  s->add_option("--ct", seg.ct, "input volume")->required();
  s->add_option("--lung-mask", seg.lung_mask, "lung mask (one or two labels)")->required();
  s->add_option("--config", seg.config, "key = value parameter file");
  s->add_option("--out", seg.out, "output mask (.mhd)")->required();
  s->add_option("--report", seg.report, "JSON report path (default <out>_report.json)");
  s->add_option("--threads", seg.threads, "worker threads, 0 = all cores");
  s->add_flag("--dump-intermediates", seg.dump, "write intermediate volumes");
  s->add_option("--dump-dir", seg.dump_dir, "directory for intermediate volumes");
  seg.raw.add(s);

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "score segmentations against references");
  e->add_option("--seg", ev.seg, "segmentation mask");
  e->add_option("--gt", ev.gt, "reference mask");
  e->add_option("--case-id", ev.case_id, "case identifier for the CSV row");
  e->add_option("--batch", ev.batch, "file of case_id,seg,gt lines");
  e->add_option("--band-mm", ev.band_mm, "tolerance band width (mm)")->check(CLI::NonNegativeNumber);
  e->add_option("--out-csv", ev.out_csv, "CSV output (default stdout)");
  ev.raw.add(e);

  std::string ph_name, ph_out;
  auto* p = app.add_subcommand("phantom", "write a canonical synthetic phantom");
  p->add_option("--name", ph_name, "phantom name")
      ->required()
      ->check(CLI::IsMember({"SOLID_CUBE", "HOLLOW_BOX", "TORUS", "STRAIGHT_TUBE", "Y_TUBE",
                             "OBLIQUE_PLANE", "COMPOSITE"}));
  p->add_option("--out", ph_out, "output directory")->required();

  RenderArgs rd;
  auto* r = app.add_subcommand("render", "overlay masks on a slice and write a PNG");
  r->add_option("--volume", rd.volume, "grey-level volume")->required();
  r->add_option("--mask", rd.mask, "segmentation (green)");
  r->add_option("--gt", rd.gt, "reference (yellow; overlap purple)");
  r->add_option("--axis", rd.axis, "sagittal, coronal or axial")
      ->check(CLI::IsMember({"sagittal", "coronal", "axial"}));
  r->add_option("--slice", rd.slice, "slice index")->required();
  r->add_option("--out", rd.out, "output PNG")->required();
  rd.raw.add(r);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (s->parsed()) return run_segment(seg);
    if (e->parsed()) return run_evaluate(ev);
    if (p->parsed()) return run_phantom(ph_name, ph_out);
    if (r->parsed()) return run_render(rd);
  } catch (const InputError& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return kExitInput;
  } catch (const StageError& err) {
    std::cerr << "stage '" << err.stage() << "' failed: " << err.what() << '\n';
    return kExitStage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitStage;
  }
  return 0;
}
