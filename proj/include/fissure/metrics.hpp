#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fissure/volume.hpp"

namespace fissure {

/// Exact squared Euclidean distance (mm^2) to the nearest true voxel, with
/// anisotropic spacing. Infinity everywhere when the mask is empty.
std::vector<double> squared_distance_transform(const BinaryVolume& mask);

/// The tolerance comparison shared by band() and its tests.
bool within_band(double squared_distance_mm2, double width_mm);

/// Voxels within width_mm of the mask (the mask itself included).
BinaryVolume band(const BinaryVolume& mask, double width_mm);

struct MetricsReport {
  std::string case_id;
  std::size_t tp1 = 0;  ///< segmented voxels inside the reference band
  std::size_t fp = 0;
  std::size_t tp2 = 0;  ///< reference voxels inside the segmentation band
  std::size_t fn = 0;
  double fdr = 0.0;
  double fnr = 0.0;
  double f1 = 0.0;
  double band_mm = 3.0;
};

/// F1 from FDR and FNR; 0 when both are 1.
double f1_score(double fdr, double fnr);

MetricsReport score(const BinaryVolume& seg, const BinaryVolume& gt, double width_mm = 3.0);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Linear-interpolated quartiles of a non-empty sample.
Quartiles quartiles(std::vector<double> values);

struct MetricsSummary {
  std::size_t cases = 0;
  Quartiles fdr;
  Quartiles fnr;
  Quartiles f1;
};

MetricsSummary aggregate(const std::vector<MetricsReport>& reports);

inline constexpr const char* kCsvHeader = "case_id,tp1,fp,tp2,fn,fdr,fnr,f1,band_mm";

void write_csv_row(std::ostream& out, const MetricsReport& r);
/// Rows for the per-metric median, q1 and q3 (case ids "median", "q1", "q3").
void write_csv_summary(std::ostream& out, const MetricsSummary& s, double band_mm);

}  // namespace fissure
