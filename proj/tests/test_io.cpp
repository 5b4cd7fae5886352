#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pcc/cloud_io.hpp"
#include "pcc/rng.hpp"

using namespace pcc;
namespace fs = std::filesystem;

namespace {

PointCloud random_cloud(std::size_t n, RngStream& rng) {
    PointCloud cloud;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(-2.0, 2.0);
        const double y = rng.uniform(-2.0, 2.0);
        const double z = rng.uniform(-2.0, 2.0);
        cloud.points.push_back({x, y, z});
    }
    return cloud;
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "pccbench_io_tests";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("ply round-trip preserves order and values to 1e-6") {
    RngStream rng(0, "io", "ply");
    const PointCloud cloud = random_cloud(200, rng);
    std::ostringstream os;
    io::write_ply(os, cloud);
    std::istringstream is(os.str());
    const PointCloud back = io::read_ply(is, "<mem>");
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(std::abs(back.points[i].x - cloud.points[i].x) <= 1e-6);
        CHECK(std::abs(back.points[i].y - cloud.points[i].y) <= 1e-6);
        CHECK(std::abs(back.points[i].z - cloud.points[i].z) <= 1e-6);
    }
}

TEST_CASE("ply write-read-write is byte stable") {
    RngStream rng(1, "io", "stable");
    const PointCloud cloud = random_cloud(64, rng);
    std::ostringstream first;
    io::write_ply(first, cloud);
    std::istringstream is(first.str());
    const PointCloud back = io::read_ply(is, "<mem>");
    std::ostringstream second;
    io::write_ply(second, back);
    CHECK(first.str() == second.str());
}

TEST_CASE("ply header is the documented schema") {
    PointCloud cloud;
    cloud.points = {{0.5, -1, 2}};
    std::ostringstream os;
    io::write_ply(os, cloud);
    const std::string text = os.str();
    CHECK(text.rfind("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float "
                     "y\nproperty float z\nend_header\n",
                     0) == 0);
}

TEST_CASE("ply reader tolerates comments and extra properties") {
    const std::string text =
        "ply\n"
        "format ascii 1.0\n"
        "comment made by hand\n"
        "element vertex 2\n"
        "property float x\n"
        "property float y\n"
        "property float z\n"
        "property float confidence\n"
        "end_header\n"
        "0 0 0 0.9\n"
        "1 2 3 0.5\n";
    std::istringstream is(text);
    const PointCloud cloud = io::read_ply(is, "<mem>");
    REQUIRE(cloud.size() == 2);
    CHECK(cloud.points[1] == Vec3{1, 2, 3});
}

TEST_CASE("ply reader rejects malformed input") {
    const auto read = [](const std::string& text) {
        std::istringstream is(text);
        return io::read_ply(is, "<mem>");
    };
    CHECK_THROWS_AS(read(""), IoError);
    CHECK_THROWS_AS(read("not a ply\n"), IoError);
    CHECK_THROWS_AS(read("ply\nformat binary_little_endian 1.0\nend_header\n"), IoError);
    CHECK_THROWS_AS(read("ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty "
                         "float y\nproperty float z\nend_header\n0 0 0\n"),
                    IoError);  // truncated
    CHECK_THROWS_AS(read("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty "
                         "float y\nproperty float z\nend_header\n0 nan 0\n"),
                    IoError);  // non-finite
}

TEST_CASE("xyz round-trip and comments") {
    RngStream rng(2, "io", "xyz");
    const PointCloud cloud = random_cloud(100, rng);
    std::ostringstream os;
    io::write_xyz(os, cloud);
    std::istringstream is(os.str());
    const PointCloud back = io::read_xyz(is, "<mem>");
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(back.points[i] == cloud.points[i]);  // %.17g doubles round-trip exactly
    }

    std::istringstream commented("# header comment\n1 2 3  # trailing comment\n\n4 5 6\n");
    const PointCloud small = io::read_xyz(commented, "<mem>");
    REQUIRE(small.size() == 2);
    CHECK(small.points[0] == Vec3{1, 2, 3});
    CHECK(small.points[1] == Vec3{4, 5, 6});

    std::istringstream bad("1 2\n");
    CHECK_THROWS_AS(io::read_xyz(bad, "<mem>"), IoError);
}

TEST_CASE("load/save dispatch on extension with clear errors") {
    const fs::path dir = temp_dir();
    RngStream rng(3, "io", "dispatch");
    const PointCloud cloud = random_cloud(10, rng);

    io::save_cloud(dir / "a.ply", cloud);
    io::save_cloud(dir / "a.xyz", cloud);
    CHECK(io::load_cloud(dir / "a.ply").size() == 10);
    CHECK(io::load_cloud(dir / "a.xyz").size() == 10);
    CHECK(io::is_cloud_file("x.PLY"));
    CHECK(!io::is_cloud_file("x.obj"));

    CHECK_THROWS_AS(io::load_cloud(dir / "missing.ply"), IoError);
    CHECK_THROWS_AS(io::save_cloud(dir / "a.obj", cloud), IoError);
    try {
        io::load_cloud(dir / "missing.ply");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("missing.ply") != std::string::npos);
    }
}

TEST_CASE("ply reader accepts CRLF line endings") {
    const std::string text =
        "ply\r\nformat ascii 1.0\r\nelement vertex 1\r\nproperty float x\r\nproperty float "
        "y\r\nproperty float z\r\nend_header\r\n1 2 3\r\n";
    std::istringstream is(text);
    const PointCloud cloud = io::read_ply(is, "<mem>");
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points[0] == Vec3{1, 2, 3});
}

TEST_CASE("ply reader survives mutated input: success or IoError, never a crash") {
    RngStream rng(4, "io", "fuzz");
    const PointCloud cloud = random_cloud(20, rng);
    std::ostringstream os;
    io::write_ply(os, cloud);
    const std::string base = os.str();

    for (int trial = 0; trial < 400; ++trial) {
        std::string text = base;
        const int op = static_cast<int>(rng.uniform_index(3));
        const std::size_t pos = rng.uniform_index(text.size());
        if (op == 0) {
            text[pos] = static_cast<char>(rng.uniform_index(256));
        } else if (op == 1) {
            text.erase(pos, 1 + rng.uniform_index(8));
        } else {
            text.insert(pos, std::string(1 + rng.uniform_index(4),
                                         static_cast<char>('0' + rng.uniform_index(75))));
        }
        std::istringstream is(text);
        try {
            const PointCloud parsed = io::read_ply(is, "<fuzz>");
            (void)parsed;
        } catch (const IoError&) {
            // expected for most mutations
        }
        CHECK(true);  // reaching here without another exception type is the point
    }
}
