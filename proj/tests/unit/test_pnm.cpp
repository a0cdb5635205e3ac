#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "landing/descent.hpp"
#include "landing/pnm.hpp"

using namespace landing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "landing_pnm_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("pnm") {
  TEST_CASE("gray and color frames round-trip") {
    Frame g(7, 5, 1);
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = static_cast<std::uint8_t>(i * 7);
    pnm::write(scratch("g.pgm"), g);
    CHECK(pnm::read(scratch("g.pgm")) == g);

    Frame c(4, 3, 3);
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = static_cast<std::uint8_t>(255 - i);
    pnm::write(scratch("c.ppm"), c);
    CHECK(pnm::read(scratch("c.ppm")) == c);
  }

  TEST_CASE("binary maps are stored as 0/255") {
    BinaryMap m(6, 4);
    m.at(1, 2) = 1;
    m.at(3, 5) = 1;
    pnm::write_binary(scratch("m.pgm"), m);
    const Frame raw = pnm::read(scratch("m.pgm"));
    CHECK(raw.at(1, 2) == 255);
    CHECK(raw.at(0, 0) == 0);
    CHECK(pnm::read_binary(scratch("m.pgm")) == m);
  }

  TEST_CASE("depth frames keep millimeters and invalid pixels") {
    DepthFrame d(3, 2, CameraModel{});
    d.at(0, 0) = 1.2344f;
    d.at(0, 1) = 10.0f;
    d.at(0, 2) = std::nanf("");
    d.at(1, 0) = 65.0f;
    d.at(1, 1) = 0.0016f;
    d.at(1, 2) = 99.0f;
    pnm::write_depth(scratch("d.pgm"), d);
    const DepthFrame back = pnm::read_depth(scratch("d.pgm"));
    CHECK(back.at(0, 0) == doctest::Approx(1.234).epsilon(1e-6));
    CHECK(back.at(0, 1) == doctest::Approx(10.0));
    CHECK(std::isnan(back.at(0, 2)));
    CHECK(back.at(1, 0) == doctest::Approx(65.0));
    CHECK(back.at(1, 1) == doctest::Approx(0.002));
    CHECK(back.at(1, 2) == doctest::Approx(65.535));
  }

  TEST_CASE("malformed files raise PnmError") {
    {
      std::ofstream out(scratch("bad.pgm"), std::ios::binary);
      out << "P3\n2 2\n255\n0 0 0 0\n";
    }
    CHECK_THROWS_AS(pnm::read(scratch("bad.pgm")), pnm::PnmError);
    {
      std::ofstream out(scratch("short.pgm"), std::ios::binary);
      out << "P5\n4 4\n255\n";
      out.write("\x01\x02", 2);
    }
    CHECK_THROWS_AS(pnm::read(scratch("short.pgm")), pnm::PnmError);
    CHECK_THROWS_AS(pnm::read(scratch("does_not_exist.pgm")), pnm::PnmError);
  }
}
