#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fissure/metrics.hpp"
#include "fissure/phantom.hpp"
#include "fissure/volume_io.hpp"
#include "test_util.hpp"

using namespace fissure;
using testutil::run_cli;

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage and input errors exit with 2") {
    testutil::TempDir dir;
    CHECK(run_cli("") == 2);
    CHECK(run_cli("bogus") == 2);
    CHECK(run_cli("segment --ct x.mhd") == 2);
    CHECK(run_cli("segment --ct " + q(dir / "none.mhd") + " --lung-mask " + q(dir / "none.mhd") +
                  " --out " + q(dir / "o.mhd")) == 2);
    CHECK(run_cli("phantom --name NOPE --out " + q(dir.path())) == 2);
    CHECK(run_cli("evaluate --band-mm -1 --seg a --gt b") == 2);
    CHECK(run_cli("--help") == 0);
  }

  TEST_CASE("phantom, segment, evaluate and render end to end") {
    testutil::TempDir dir;
    REQUIRE(run_cli("phantom --name OBLIQUE_PLANE --out " + q(dir.path())) == 0);
    for (const char* f : {"OBLIQUE_PLANE", "OBLIQUE_PLANE_plane_truth", "OBLIQUE_PLANE_tube_truth",
                          "OBLIQUE_PLANE_solid_truth", "OBLIQUE_PLANE_truth", "OBLIQUE_PLANE_lung_mask"}) {
      CHECK_MESSAGE(std::filesystem::exists(dir / (std::string(f) + ".mhd")), f);
    }
    const auto ph = generate(canonical_phantom("OBLIQUE_PLANE"));
    CHECK(load_volume(dir / "OBLIQUE_PLANE.mhd") == ph.volume);

    testutil::write_text(dir / "cfg.txt", "final_min_component_vox = 50\n");
    REQUIRE(run_cli("segment --ct " + q(dir / "OBLIQUE_PLANE.mhd") + " --lung-mask " +
                    q(dir / "OBLIQUE_PLANE_lung_mask.mhd") + " --config " + q(dir / "cfg.txt") +
                    " --out " + q(dir / "seg.mhd") + " --threads 2 --dump-intermediates") == 0);
    CHECK(std::filesystem::exists(dir / "seg_intermediates" / "F3D.mhd"));
    std::ifstream rep(dir / "seg_report.json");
    const auto j = nlohmann::json::parse(rep);
    CHECK(j["parameters"]["final_min_component_vox"] == "50");
    CHECK(j["parameters"]["threads"] == "2");
    const auto seg = load_mask(dir / "seg.mhd");
    CHECK(j["final_voxels"] == count_true(seg));

    REQUIRE(run_cli("evaluate --seg " + q(dir / "seg.mhd") + " --gt " + q(dir / "OBLIQUE_PLANE_plane_truth.mhd") +
                    " --case-id oblique --band-mm 1 --out-csv " + q(dir / "one.csv")) == 0);
    const auto rows = read_csv(dir / "one.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "oblique");
    const auto r = score(seg, ph.plane_truth, 1.0);
    CHECK(std::stoul(rows[1][1]) == r.tp1);
    CHECK(std::stod(rows[1][7]) == doctest::Approx(r.f1).epsilon(1e-9));

    REQUIRE(run_cli("evaluate --seg " + q(dir / "OBLIQUE_PLANE_plane_truth.mhd") + " --gt " +
                    q(dir / "OBLIQUE_PLANE_plane_truth.mhd") + " --out-csv " + q(dir / "self.csv")) == 0);
    CHECK(read_csv(dir / "self.csv")[1][7] == "1");

    REQUIRE(run_cli("render --volume " + q(dir / "OBLIQUE_PLANE.mhd") + " --mask " + q(dir / "seg.mhd") +
                    " --gt " + q(dir / "OBLIQUE_PLANE_plane_truth.mhd") + " --axis coronal --slice 30 --out " +
                    q(dir / "r.png")) == 0);
    const auto png = testutil::read_bytes(dir / "r.png");
    REQUIRE(png.size() > 8);
    CHECK(png[1] == 'P');
    CHECK(png[2] == 'N');
    CHECK(png[3] == 'G');
    CHECK(run_cli("render --volume " + q(dir / "OBLIQUE_PLANE.mhd") + " --slice 64 --out " + q(dir / "x.png")) == 2);
  }

  TEST_CASE("batch evaluation appends quartile rows matching the aggregate") {
    testutil::TempDir dir;
    std::ofstream list(dir / "batch.txt");
    std::vector<MetricsReport> expected;
    int k = 0;
    for (const char* name : {"STRAIGHT_TUBE", "Y_TUBE", "SOLID_CUBE"}) {
      REQUIRE(run_cli(std::string("phantom --name ") + name + " --out " + q(dir.path())) == 0);
      const auto ph = generate(canonical_phantom(name));
      BinaryVolume seg = ph.all_truth();
      for (std::size_t i = 0; i < seg.size(); i += 3 + k) seg[i] = 0;  // varying damage
      for (std::size_t i = 0; i < 400u * static_cast<std::size_t>(k + 1); i += 7) seg[seg.size() - 1 - i] = 1;
      const auto seg_path = dir / (std::string(name) + "_seg.mhd");
      write_volume(seg, seg_path);
      list << name << ',' << seg_path.string() << ',' << (dir / (std::string(name) + "_truth.mhd")).string() << '\n';
      expected.push_back(score(seg, ph.all_truth(), 2.0));
      ++k;
    }
    list.close();
    REQUIRE(run_cli("evaluate --batch " + q(dir / "batch.txt") + " --band-mm 2 --out-csv " + q(dir / "b.csv")) == 0);
    const auto rows = read_csv(dir / "b.csv");
    REQUIRE(rows.size() == 7);
    const auto s = aggregate(expected);
    CHECK(rows[4][0] == "median");
    CHECK(std::stod(rows[4][5]) == doctest::Approx(s.fdr.median).epsilon(1e-9));
    CHECK(std::stod(rows[4][6]) == doctest::Approx(s.fnr.median).epsilon(1e-9));
    CHECK(std::stod(rows[4][7]) == doctest::Approx(s.f1.median).epsilon(1e-9));
    CHECK(rows[5][0] == "q1");
    CHECK(std::stod(rows[5][7]) == doctest::Approx(s.f1.q1).epsilon(1e-9));
    CHECK(rows[6][0] == "q3");
    CHECK(std::stod(rows[6][7]) == doctest::Approx(s.f1.q3).epsilon(1e-9));

    // Widening the band never lowers F1.
    REQUIRE(run_cli("evaluate --batch " + q(dir / "batch.txt") + " --band-mm 0 --out-csv " + q(dir / "b0.csv")) == 0);
    const auto rows0 = read_csv(dir / "b0.csv");
    for (std::size_t i = 1; i <= 3; ++i) CHECK(std::stod(rows0[i][7]) <= std::stod(rows[i][7]));
  }

  TEST_CASE("raw input with layout flags") {
    testutil::TempDir dir;
    std::vector<std::int16_t> data(6 * 5 * 4, -800);
    std::ofstream(dir / "v.raw", std::ios::binary)
        .write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * 2));
    CHECK(run_cli("render --volume " + q(dir / "v.raw") + " --dims 6,5,4 --dtype i16 --spacing 1,1,2 --axis axial --slice 3 --out " +
                  q(dir / "v.png")) == 0);
    CHECK(run_cli("render --volume " + q(dir / "v.raw") + " --dims 6,5,5 --dtype i16 --slice 0 --out " + q(dir / "w.png")) == 2);
    CHECK(run_cli("render --volume " + q(dir / "v.raw") + " --dims 6,5 --dtype i16 --slice 0 --out " + q(dir / "w.png")) == 2);
  }

  TEST_CASE("unwritable output is an internal failure with exit 3") {
    testutil::TempDir dir;
    REQUIRE(run_cli("phantom --name SOLID_CUBE --out " + q(dir.path())) == 0);
    testutil::write_text(dir / "blocker", "x");
    CHECK(run_cli("render --volume " + q(dir / "SOLID_CUBE.mhd") + " --slice 3 --out " + q(dir / "blocker" / "x.png")) == 3);
  }
}
