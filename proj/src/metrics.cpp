#include "fissure/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "fissure/parallel.hpp"

namespace fissure {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) along one line
/// of `n` samples with stride `stride`, sample distance `spacing` mm.
void edt_line(double* f, std::size_t n, std::size_t stride, double spacing,
              std::vector<double>& line, std::vector<std::size_t>& sites,
              std::vector<double>& bounds) {
  line.resize(n);
  for (std::size_t i = 0; i < n; ++i) line[i] = f[i * stride];
  const double w2 = spacing * spacing;
  sites.clear();
  bounds.clear();
  for (std::size_t q = 0; q < n; ++q) {
    if (line[q] == kInf) continue;
    const double fq = line[q] + w2 * static_cast<double>(q) * static_cast<double>(q);
    while (!sites.empty()) {
      const std::size_t v = sites.back();
      const double fv = line[v] + w2 * static_cast<double>(v) * static_cast<double>(v);
      const double s = (fq - fv) / (2.0 * w2 * static_cast<double>(q - v));
      if (s <= bounds.back()) {
        sites.pop_back();
        bounds.pop_back();
      } else {
        break;
      }
    }
    if (sites.empty()) {
      bounds.push_back(-kInf);
    } else {
      const std::size_t v = sites.back();
      const double fv = line[v] + w2 * static_cast<double>(v) * static_cast<double>(v);
      bounds.push_back((fq - fv) / (2.0 * w2 * static_cast<double>(q - v)));
    }
    sites.push_back(q);
  }
  if (sites.empty()) return;  // all infinite; line unchanged
  std::size_t k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (k + 1 < sites.size() && bounds[k + 1] < static_cast<double>(q)) ++k;
    const double dq = static_cast<double>(q) - static_cast<double>(sites[k]);
    f[q * stride] = w2 * dq * dq + line[sites[k]];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const BinaryVolume& mask) {
  const Dims d = mask.dims();
  std::vector<double> f(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) f[i] = mask[i] ? 0.0 : kInf;

  const Spacing s = mask.spacing();
  // x lines
  parallel_for(d.ny * d.nz, [&](std::size_t row) {
    std::vector<double> line, bounds;
    std::vector<std::size_t> sites;
    edt_line(f.data() + row * d.nx, d.nx, 1, s.sx, line, sites, bounds);
  });
  // y lines
  parallel_for(d.nx * d.nz, [&](std::size_t k) {
    std::vector<double> line, bounds;
    std::vector<std::size_t> sites;
    const std::size_t x = k % d.nx, z = k / d.nx;
    edt_line(f.data() + x + d.nx * d.ny * z, d.ny, d.nx, s.sy, line, sites, bounds);
  });
  // z lines
  parallel_for(d.nx * d.ny, [&](std::size_t k) {
    std::vector<double> line, bounds;
    std::vector<std::size_t> sites;
    edt_line(f.data() + k, d.nz, d.nx * d.ny, s.sz, line, sites, bounds);
  });
  return f;
}

bool within_band(double squared_distance_mm2, double width_mm) {
  const double w2 = width_mm * width_mm;
  return squared_distance_mm2 <= w2 + 1e-9 * std::max(1.0, w2);
}

BinaryVolume band(const BinaryVolume& mask, double width_mm) {
  if (!(width_mm >= 0.0) || !std::isfinite(width_mm)) {
    throw InputError("band width must be finite and >= 0");
  }
  const auto dist = squared_distance_transform(mask);
  BinaryVolume out(mask.dims(), mask.spacing());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = within_band(dist[i], width_mm) ? 1 : 0;
  return out;
}

double f1_score(double fdr, double fnr) {
  const double denom = 2.0 - fdr - fnr;
  if (denom <= 0.0) return 0.0;
  return 2.0 * (1.0 - fdr) * (1.0 - fnr) / denom;
}

MetricsReport score(const BinaryVolume& seg, const BinaryVolume& gt, double width_mm) {
  require_same_grid(seg, gt, "score");
  const BinaryVolume gt_band = band(gt, width_mm);
  const BinaryVolume seg_band = band(seg, width_mm);
  MetricsReport r;
  r.band_mm = width_mm;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    if (seg[i]) {
      (gt_band[i] ? r.tp1 : r.fp)++;
    }
    if (gt[i]) {
      (seg_band[i] ? r.tp2 : r.fn)++;
    }
  }
  r.fdr = r.tp1 + r.fp > 0 ? static_cast<double>(r.fp) / static_cast<double>(r.tp1 + r.fp) : 0.0;
  r.fnr = r.tp2 + r.fn > 0 ? static_cast<double>(r.fn) / static_cast<double>(r.tp2 + r.fn) : 0.0;
  r.f1 = f1_score(r.fdr, r.fnr);
  return r;
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw InputError("cannot summarise an empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + (values[hi] - values[lo]) * frac;
  };
  return {at(0.25), at(0.5), at(0.75)};
}

MetricsSummary aggregate(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw InputError("aggregate needs at least one report");
  std::vector<double> fdr, fnr, f1;
  for (const auto& r : reports) {
    fdr.push_back(r.fdr);
    fnr.push_back(r.fnr);
    f1.push_back(r.f1);
  }
  return {reports.size(), quartiles(fdr), quartiles(fnr), quartiles(f1)};
}

void write_csv_row(std::ostream& out, const MetricsReport& r) {
  const auto old_precision = out.precision(10);
  out << r.case_id << ',' << r.tp1 << ',' << r.fp << ',' << r.tp2 << ',' << r.fn << ',' << r.fdr
      << ',' << r.fnr << ',' << r.f1 << ',' << r.band_mm << '\n';
  out.precision(old_precision);
}

void write_csv_summary(std::ostream& out, const MetricsSummary& s, double band_mm) {
  const auto old_precision = out.precision(10);
  auto row = [&](const char* name, double fdr, double fnr, double f1) {
    out << name << ",,,,," << fdr << ',' << fnr << ',' << f1 << ',' << band_mm << '\n';
  };
  row("median", s.fdr.median, s.fnr.median, s.f1.median);
  row("q1", s.fdr.q1, s.fnr.q1, s.f1.q1);
  row("q3", s.fdr.q3, s.fnr.q3, s.f1.q3);
  out.precision(old_precision);
}

}  // namespace fissure
