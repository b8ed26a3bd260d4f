#include "fissure/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fissure/parallel.hpp"
#include "fissure/volume_io.hpp"

namespace fissure {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw InputError("config: '" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw InputError("config: '" + key + "' expects an integer, got '" + value + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const long long v = parse_int(key, value);
  if (v < 0) throw InputError("config: '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InputError("config: '" + key + "' expects true/false, got '" + value + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <typename Fn>
auto run_stage(const std::string& stage, std::vector<StageTiming>& timings, Fn&& fn) {
  Stopwatch sw;
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      timings.push_back({stage, sw.seconds()});
    } else {
      auto out = fn();
      timings.push_back({stage, sw.seconds()});
      return out;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

BinaryVolume segment_one_lung(const ScalarVolume& ct, const BinaryVolume& lung,
                              const PipelineConfig& cfg, const IntermediateSink* sink,
                              const std::string& prefix, std::vector<StageTiming>& timings) {
  const ScalarVolume masked =
      run_stage(prefix + "mask", timings, [&] { return apply_mask(ct, lung, cfg.mask_fill); });

  std::array<ViewResponse, 3> per_view;
  for (ViewAxis axis : kAllViews) {
    per_view[view_slot(axis)] = run_stage(prefix + "odos_" + to_string(axis), timings,
                                          [&] { return run_view(masked, axis, cfg.filter); });
  }

  OrientationField field = run_stage(prefix + "fuse", timings, [&] {
    ScalarVolume fused = fuse_3d(per_view[view_slot(ViewAxis::sagittal)].response,
                                 per_view[view_slot(ViewAxis::axial)].response,
                                 per_view[view_slot(ViewAxis::coronal)].response);
    for (std::size_t i = 0; i < fused.size(); ++i) {
      if (!lung[i]) fused[i] = 0.0f;
    }
    return vector_field(std::move(fused), std::move(per_view), cfg.filter);
  });
  if (sink) {
    sink->write(prefix + "F3D", field.fused);
    for (ViewAxis axis : kAllViews) {
      sink->write(prefix + "theta_" + to_string(axis), field.view(axis).theta_deg);
      sink->write(prefix + "response_" + to_string(axis), field.view(axis).response);
    }
  }

  PreprocessResult pre = run_stage(prefix + "preprocess", timings, [&] {
    return preprocess(field, cfg.preprocess, sink != nullptr);
  });
  if (sink) {
    for (ViewAxis axis : kAllViews) {
      const auto slot = view_slot(axis);
      sink->write(prefix + "patch_" + to_string(axis), pre.per_view[slot]);
      for (std::size_t b = 0; b < pre.per_bin[slot].size(); ++b) {
        sink->write(prefix + "bin" + std::to_string(b + 1) + "_" + to_string(axis),
                    pre.per_bin[slot][b]);
      }
    }
    sink->write(prefix + "patch", pre.patch);
  }

  const auto& pp = cfg.postprocess;
  const BinaryVolume q =
      run_stage(prefix + "shape_measure", timings, [&] { return shape_measure_filter(pre.patch, pp); });
  const SkeletonVolume sk = run_stage(prefix + "skeletonize", timings, [&] { return skeletonize_3d(q); });
  const SkeletonVolume pruned =
      run_stage(prefix + "branch_points", timings, [&] { return remove_branch_points(sk); });
  const BinaryVolume fissure_skel = run_stage(prefix + "select_candidates", timings, [&] {
    return fill_holes(select_candidates(pruned, pp), pruned);
  });
  const BinaryVolume q_s = run_stage(prefix + "restore_thickness", timings, [&] {
    return restore_thickness(q, fissure_skel, mask_minus(sk.skeleton, fissure_skel));
  });
  BinaryVolume final_mask =
      run_stage(prefix + "repair", timings, [&] { return repair_fissures(q, q_s, pp); });
  if (sink) {
    sink->write(prefix + "Q", q);
    sink->write(prefix + "Q_k", sk.skeleton);
    sink->write(prefix + "pruned_skeleton", pruned.skeleton);
    sink->write(prefix + "Q_s", q_s);
    sink->write(prefix + "final", final_mask);
  }
  return final_mask;
}

}  // namespace

void PipelineConfig::validate() const {
  filter.validate();
  preprocess.validate();
  postprocess.validate();
  if (!(band_mm >= 0.0) || !std::isfinite(band_mm)) throw InputError("band_mm must be >= 0");
  if (!std::isfinite(mask_fill)) throw InputError("mask_fill must be finite");
}

PipelineConfig PipelineConfig::parse(const std::string& text) {
  PipelineConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw InputError("config: duplicate key '" + key + "'");

    if (key == "stick_length_vox") {
      c.filter.stick_length = static_cast<int>(parse_int(key, value));
    } else if (key == "stick_spacing_vox") {
      c.filter.stick_spacing = static_cast<int>(parse_int(key, value));
    } else if (key == "kappa") {
      c.filter.kappa = static_cast<float>(parse_double(key, value));
    } else if (key == "vector_threshold") {
      c.filter.threshold = static_cast<float>(parse_double(key, value));
    } else if (key == "orientation_bins") {
      c.preprocess.bins = static_cast<int>(parse_int(key, value));
    } else if (key == "min_3d_component_vox") {
      c.preprocess.min_3d_component = parse_count(key, value);
    } else if (key == "curvature_tolerance") {
      c.preprocess.curvature_tolerance = parse_double(key, value);
    } else if (key == "shape_ratio") {
      c.postprocess.shape_ratio = parse_double(key, value);
    } else if (key == "skel_min_component_vox") {
      c.postprocess.skel_min_component = parse_count(key, value);
    } else if (key == "repair_big_threshold_vox") {
      c.postprocess.repair_big_threshold = parse_count(key, value);
    } else if (key == "final_min_component_vox") {
      c.postprocess.final_min_component = parse_count(key, value);
    } else if (key == "band_mm") {
      c.band_mm = parse_double(key, value);
    } else if (key == "mask_fill") {
      c.mask_fill = static_cast<float>(parse_double(key, value));
    } else if (key == "dump_intermediates") {
      c.dump_intermediates = parse_bool(key, value);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(parse_count(key, value));
    } else {
      throw InputError("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::map<std::string, std::string> PipelineConfig::resolved() const {
  return {
      {"stick_length_vox", std::to_string(filter.stick_length)},
      {"stick_spacing_vox", std::to_string(filter.stick_spacing)},
      {"kappa", fmt(filter.kappa)},
      {"vector_threshold", fmt(filter.threshold)},
      {"orientation_bins", std::to_string(preprocess.bins)},
      {"min_3d_component_vox", std::to_string(preprocess.min_3d_component)},
      {"curvature_tolerance", fmt(preprocess.curvature_tolerance)},
      {"shape_ratio", fmt(postprocess.shape_ratio)},
      {"skel_min_component_vox", std::to_string(postprocess.skel_min_component)},
      {"repair_big_threshold_vox", std::to_string(postprocess.repair_big_threshold)},
      {"final_min_component_vox", std::to_string(postprocess.final_min_component)},
      {"band_mm", fmt(band_mm)},
      {"mask_fill", fmt(mask_fill)},
      {"dump_intermediates", dump_intermediates ? "true" : "false"},
      {"threads", std::to_string(threads)},
  };
}

std::string PipelineConfig::to_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : resolved()) os << k << " = " << v << '\n';
  return os.str();
}

void IntermediateSink::write(const std::string& name, const ScalarVolume& v) const {
  write_volume(v, dir / name);
}
void IntermediateSink::write(const std::string& name, const BinaryVolume& v) const {
  write_volume(v, dir / name);
}

SegmentResult segment(const ScalarVolume& ct, const ScalarVolume& lung_labels,
                      const PipelineConfig& cfg, const IntermediateSink* sink) {
  cfg.validate();
  if (!ct.same_grid(lung_labels)) {
    throw InputError("CT and lung mask differ in dimensions or spacing");
  }
  set_thread_count(cfg.threads);

  std::set<float> labels;
  for (float v : lung_labels.data()) {
    if (v != 0.0f) labels.insert(v);
  }
  std::vector<BinaryVolume> lungs;
  if (labels.size() == 2) {
    for (float label : labels) {
      BinaryVolume m(ct.dims(), ct.spacing());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = lung_labels[i] == label ? 1 : 0;
      lungs.push_back(std::move(m));
    }
  } else {
    BinaryVolume m(ct.dims(), ct.spacing());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = lung_labels[i] != 0.0f ? 1 : 0;
    lungs.push_back(std::move(m));
  }

  SegmentResult result;
  result.final_mask = BinaryVolume(ct.dims(), ct.spacing());
  for (std::size_t k = 0; k < lungs.size(); ++k) {
    const std::string prefix = lungs.size() > 1 ? "lung" + std::to_string(k + 1) + "_" : "";
    const BinaryVolume part = segment_one_lung(ct, lungs[k], cfg, sink, prefix, result.timings);
    result.final_mask = mask_or(result.final_mask, part);
  }
  result.lungs_processed = lungs.size();
  return result;
}

std::string segment_report_json(const SegmentResult& r, const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["parameters"] = cfg.resolved();
  j["lungs_processed"] = r.lungs_processed;
  j["final_voxels"] = count_true(r.final_mask);
  j["dims"] = {r.final_mask.dims().nx, r.final_mask.dims().ny, r.final_mask.dims().nz};
  j["spacing"] = {r.final_mask.spacing().sx, r.final_mask.spacing().sy,
                  r.final_mask.spacing().sz};
  auto& stages = j["timings"];
  stages = nlohmann::ordered_json::array();
  double total = 0.0;
  for (const auto& t : r.timings) {
    stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    total += t.seconds;
  }
  j["total_seconds"] = total;
  return j.dump(2);
}

}  // namespace fissure
