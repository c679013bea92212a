#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "cssir/io.hpp"
#include "test_util.hpp"

using namespace cssir;
using cssir::testing::kind_of;
using cssir::testing::TestRng;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cssir_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string parse_message(std::string_view text) {
  try {
    io::parse_dataset_csv(text, "mem.csv");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("format_double round-trips every double") {
    TestRng rng(81);
    std::vector<double> values{0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, -2.5e300, 4.9e-324,
                               std::numeric_limits<double>::max(), std::numeric_limits<double>::min()};
    for (int i = 0; i < 2000; ++i) values.push_back(rng.normal() * std::pow(10.0, rng.integer(-20, 20)));
    for (double v : values) {
      const std::string s = io::format_double(v);
      CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(0.1) == "0.10000000000000001");
  }

  TEST_CASE("dataset CSV layout and exact round trip") {
    Matrix x(2, 3);
    x << 1.0, 2.0, 3.0, 0.1, -0.25, 1e-20;
    Vector y(2);
    y << 7.0, -1.0 / 3.0;
    const std::string csv = io::dataset_to_csv(Dataset(y, x));
    CHECK(csv.substr(0, csv.find('\n')) == "y,x1,x2,x3");
    CHECK(csv.substr(csv.find('\n') + 1, 9) == "7,1,2,3\n-");

    TestRng rng(82);
    const Dataset data(rng.normal_vector(25), rng.normal_matrix(25, 7));
    const Dataset back = io::parse_dataset_csv(io::dataset_to_csv(data));
    CHECK(back.y() == data.y());
    CHECK(back.x() == data.x());
    CHECK(io::dataset_to_csv(back) == io::dataset_to_csv(data));

    const fs::path path = scratch("roundtrip.csv");
    io::write_dataset_csv(path, data);
    const Dataset from_file = io::read_dataset_csv(path);
    CHECK(from_file.x() == data.x());
    CHECK(from_file.y() == data.y());
  }

  TEST_CASE("CSV reader tolerates CRLF, spaces and trailing blank lines") {
    const Dataset d = io::parse_dataset_csv("y, x1 ,x2\r\n1, 2,3\r\n 4,5 ,6\r\n\n\n");
    CHECK(d.n() == 2);
    CHECK(d.d() == 2);
    CHECK(d.x()(1, 0) == 5.0);
    CHECK(d.y()(1) == 4.0);
  }

  TEST_CASE("CSV parse errors report line and column") {
    CHECK(parse_message("").find("line 1") != std::string::npos);
    CHECK(parse_message("z,x1\n1,2\n").find("line 1, column 1") != std::string::npos);
    CHECK(parse_message("y\n1\n").find("no covariate") != std::string::npos);
    CHECK(parse_message("y,x1,x3\n1,2,3\n").find("line 1, column 3") != std::string::npos);
    CHECK(parse_message("y,x1,x2\n1,2,3\n4,abc,6\n").find("line 3, column 2") != std::string::npos);
    CHECK(parse_message("y,x1,x2\n1,2,3\n4,5\n").find("line 3") != std::string::npos);
    CHECK(parse_message("y,x1,x2\n1,2,3\n4,5,6,7\n").find("line 3") != std::string::npos);
    CHECK(parse_message("y,x1\n1,2x\n").find("line 2, column 2") != std::string::npos);
    CHECK(parse_message("y,x1\n1,\n").find("line 2, column 2") != std::string::npos);
    CHECK(parse_message("z,x1\n").find("mem.csv: line 1") != std::string::npos);
  }

  TEST_CASE("missing files raise I/O errors") {
    CHECK(kind_of([] { io::read_dataset_csv("/nonexistent/dir/file.csv"); }) == ErrorKind::kIo);
    CHECK(kind_of([] { io::write_text("/nonexistent/dir/file.txt", "x"); }) == ErrorKind::kIo);
  }

  TEST_CASE("Pi binary dump round trip and validation") {
    TestRng rng(83);
    const SymMatrix pi(rng.symmetric(9));
    const fs::path path = scratch("pi.bin");
    io::write_pi_binary(path, pi);
    CHECK(fs::file_size(path) == 16 + 81 * 8);
    const std::string raw = io::read_text(path);
    CHECK(raw.substr(0, 8) == "CSSIRPI1");
    CHECK(io::read_pi_binary(path).matrix() == pi.matrix());

    io::write_text(path, raw.substr(0, raw.size() - 1));
    CHECK(kind_of([&] { io::read_pi_binary(path); }) == ErrorKind::kParse);
    io::write_text(path, "NOTMAGIC" + raw.substr(8));
    CHECK(kind_of([&] { io::read_pi_binary(path); }) == ErrorKind::kParse);
  }

  TEST_CASE("fit JSON uses one-based covariate numbers") {
    FitResult fit;
    Matrix pi = Matrix::Zero(4, 4);
    pi(1, 1) = 0.6;
    pi(3, 3) = 0.4;
    pi(1, 3) = pi(3, 1) = 0.2;
    fit.pi_hat = SymMatrix(pi);
    fit.directions = Matrix::Zero(4, 1);
    fit.directions(1, 0) = 1.0;
    fit.eigenvalues = Vector::Constant(1, 0.7);
    fit.support = {1, 3};
    fit.k = 1;
    fit.rho = 0.25;
    fit.report.converged = true;
    fit.report.iterations = 12;
    const io::Json j = io::fit_to_json(fit);
    CHECK(j["d"] == 4);
    CHECK(j["support"] == io::Json::array({2, 4}));
    CHECK(j["pi_diagonal"][1] == 0.6);
    CHECK(j["directions"][0][1] == 1.0);
    CHECK(j["convergence"]["converged"] == true);
    CHECK(j["convergence"]["iterations"] == 12);
    CHECK(j["convergence"]["final_objective"].is_null());
  }

  TEST_CASE("truth and CV JSON") {
    const SimSpec spec{3, 10, 6, 4};
    const io::Json t = io::truth_to_json(ground_truth(3, 6), spec);
    CHECK(t["K"] == 2);
    CHECK(t["support"] == io::Json::array({1, 2, 3, 4, 5}));
    CHECK(t["rng"] == Rng::kRngName);
    CHECK(t["directions"].size() == 2);

    CvReport report;
    report.grid = {{1, 0.5}, {2, 0.25}};
    report.errors = {3.0, 2.0};
    report.fold_errors = {{2.0, 4.0}, {1.0, 3.0}};
    report.best = {2, 0.25};
    report.folds = 2;
    const io::Json c = io::cv_to_json(report);
    CHECK(c["best"]["K"] == 2);
    CHECK(c["best"]["rho"] == 0.25);
    CHECK(c["grid"].size() == 2);
    CHECK(c["grid"][0]["fold_errors"] == io::Json::array({2.0, 4.0}));
  }

  TEST_CASE("replicate and summary CSV") {
    ReplicateTable table;
    table.rows.push_back({1, 11, {{"b", 0.5}, {"a", 1.0}}, std::nullopt});
    table.rows.push_back({2, 12, {}, std::string("numerical: boom")});
    table.rows.push_back({3, 13, {{"a", 2.0}}, std::nullopt});
    table.summary["a"] = {1.5, 0.5, 2};
    table.summary["b"] = {0.5, std::nullopt, 1};
    CHECK(io::replicate_table_csv(table) == "replicate,seed,status,a,b\n1,11,ok,1,0.5\n2,12,failed,,\n3,13,ok,2,\n");
    CHECK(io::summary_csv(table) == "metric,mean,se,count\na,1.5,0.5,2\nb,0.5,,1\n");

    std::vector<ScalingPoint> points{{100, 200, 0.25, 0.5, 0.01, 100}};
    CHECK(io::scaling_csv(points) == "d,n,x,mean_distance,se,replicates\n100,200,0.25,0.5,0.01,100\n");
  }
}
