#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "landing/imaging.hpp"
#include "landing/mission.hpp"
#include "landing/plz.hpp"
#include "landing/pnm.hpp"
#include "landing/scenario.hpp"

namespace fs = std::filesystem;
using namespace landing;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitNoPlz = 2;
constexpr int kExitUsage = 4;

struct SimulateArgs {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> margin_s;
  std::optional<double> min_area_m2;
  std::optional<double> fps;
  bool trace = false;
};

int run_simulate(const SimulateArgs& a) {
  sim::Scenario s;
  try {
    s = mission::apply(sim::load_scenario(a.scenario), {a.seed, a.margin_s, a.min_area_m2, a.fps});
  } catch (const sim::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitUsage;
  }
  const mission::MissionResult r = mission::run_mission(s);
  mission::write_artifacts(r, a.out, a.trace);
  std::cout << "scenario " << s.id << ": " << mission::to_string(r.outcome) << " after " << r.total_time_s
            << " s, " << r.zones.size() << " zone(s), " << r.movers.size() << " mover(s)\n";
  if (!r.abort_reason.empty()) std::cout << "reason: " << r.abort_reason << "\n";
  return mission::exit_code(r.outcome);
}

struct DetectArgs {
  std::string image;
  std::string out;
  double altitude_m = 10.0;
  double focal_px = 500.0;
  double min_area_m2 = 3.0;
};

int run_detect(const DetectArgs& a) {
  const Frame img = pnm::read(a.image);
  CameraModel cam{a.focal_px, a.altitude_m, img.width, img.height};
  cam.validate();
  const EdgeMap edges = imaging::canny_edges(imaging::to_grayscale(img));
  plz::DetectParams params;
  params.min_area_m2 = a.min_area_m2;
  const auto candidates = plz::detect_candidates(edges, cam, params);

  fs::create_directories(a.out);
  {
    std::ofstream csv(fs::path(a.out) / "plz.csv", std::ios::binary);
    csv << mission::plz_csv(candidates, 0);
    if (!csv) throw std::runtime_error("cannot write plz.csv");
  }
  pnm::write_binary(fs::path(a.out) / "edges.pgm", edges);
  pnm::write(fs::path(a.out) / "overlay.ppm", mission::draw_zones(img, candidates));

  int admitted = 0;
  for (const plz::PLZ& z : candidates) {
    if (!z.admitted) continue;
    ++admitted;
    std::printf("zone %d: center (%.2f, %.2f) px, diameter %.3f m, area %.3f m2\n", z.id, z.center_px.row,
                z.center_px.col, z.diameter_m, z.area_m2);
  }
  std::printf("%d admitted of %zu candidate(s)\n", admitted, candidates.size());
  return admitted > 0 ? kExitOk : kExitNoPlz;
}

struct Pool {
  double sum = 0.0;
  int n = 0;
  void add(const nlohmann::json& v) {
    if (!v.is_number()) return;
    sum += std::abs(v.get<double>());
    ++n;
  }
  std::string mean() const {
    if (n == 0) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f%%", sum / n);
    return buf;
  }
};

int run_report(const std::vector<std::string>& dirs) {
  Pool dist, area, vel;
  int used = 0;
  std::vector<std::string> missing;
  for (const std::string& d : dirs) {
    const fs::path p = fs::path(d) / "report.json";
    std::ifstream in(p);
    if (!in) {
      missing.push_back(d);
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "unreadable report " << p << ": " << e.what() << "\n";
      missing.push_back(d);
      continue;
    }
    ++used;
    for (const auto& z : j.value("plz", nlohmann::json::array())) {
      dist.add(z.value("distance_error_pct", nlohmann::json()));
      area.add(z.value("area_error_pct", nlohmann::json()));
    }
    for (const auto& m : j.value("movers", nlohmann::json::array())) vel.add(m.value("velocity_error_pct", nlohmann::json()));
  }
  for (const std::string& d : missing) std::cerr << "missing report: " << d << "\n";
  std::printf("runs: %d\n", used);
  std::printf("mean |distance error|: %s over %d zone(s)\n", dist.mean().c_str(), dist.n);
  std::printf("mean |area error|: %s over %d zone(s)\n", area.mean().c_str(), area.n);
  std::printf("mean |velocity error|: %s over %d mover(s)\n", vel.mean().c_str(), vel.n);
  return used > 0 ? kExitOk : kExitIo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vision-based drone landing: simulate, detect and report"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run a full landing mission on a scenario");
  simulate->add_option("--scenario", sim_args.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim_args.out, "Output directory")->required();
  simulate->add_option("--seed", sim_args.seed, "Override the scenario seed");
  simulate->add_option("--margin-s", sim_args.margin_s, "Clearance margin in seconds (default 20)");
  simulate->add_option("--min-area-m2", sim_args.min_area_m2, "Minimum zone area (default 3)");
  simulate->add_option("--fps", sim_args.fps, "Camera frame rate (default 30)");
  simulate->add_flag("--trace", sim_args.trace, "Write per-frame traces");

  DetectArgs det_args;
  auto* detect = app.add_subcommand("detect", "Find landing zones in one nadir image (PGM/PPM)");
  detect->add_option("image", det_args.image, "Input image")->required()->check(CLI::ExistingFile);
  detect->add_option("--altitude-m", det_args.altitude_m, "Camera height above ground")->required();
  detect->add_option("--focal-px", det_args.focal_px, "Focal length in pixels")->required();
  detect->add_option("--min-area-m2", det_args.min_area_m2, "Minimum zone area");
  detect->add_option("--out", det_args.out, "Output directory")->required();

  std::vector<std::string> report_dirs;
  auto* report = app.add_subcommand("report", "Pool error statistics over simulate output directories");
  report->add_option("dirs", report_dirs, "Run directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim_args);
    if (*detect) return run_detect(det_args);
    if (*report) return run_report(report_dirs);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
