#include <catch2/catch_amalgamated.hpp>

#include <hwlab/cli.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using namespace hwlab;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_kernel_csv_file(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("cli eigencheck verdicts and exit codes") {
  CliRun bulb = run({"eigencheck", "--lambda", "1"});
  CHECK(bulb.code == 0);
  CHECK(contains(bulb.out, "verdict: bulb"));
  CHECK(contains(bulb.out, "status: pass"));

  CliRun off_axis = run({"eigencheck", "--lambda", "1-0.7i"});
  CHECK(off_axis.code == 0);
  CHECK(contains(off_axis.out, "verdict: bulb"));

  CliRun stick = run({"eigencheck", "--lambda", "-0.5"});
  CHECK(stick.code == 0);
  CHECK(contains(stick.out, "verdict: stick"));
  CHECK(contains(stick.out, "graded toward 0.5"));

  CliRun zero = run({"eigencheck", "--lambda", "0"});
  CHECK(zero.code == 0);
  CHECK(contains(zero.out, "verdict: zero"));

  CHECK(run({"eigencheck", "--lambda", "-1"}).code == 3);
  CHECK(run({"eigencheck", "--lambda", "2"}).code == 3);
  CHECK(run({"eigencheck", "--lambda", "3"}).code == 3);
  CHECK(run({"eigencheck", "--lambda", "1+"}).code == 64);
  CHECK(run({"eigencheck"}).code == 64);
}

TEST_CASE("cli chain reports the polynomial ladder") {
  CliRun zero = run({"chain", "--lambda", "0", "--m", "2"});
  CHECK(zero.code == 0);
  CHECK(contains(zero.out, "p_1 = 1/2*u^4 - u^3"));
  CHECK(contains(zero.out, "p_2 = "));
  CHECK(contains(zero.out, "status: pass"));

  CliRun stick = run({"chain", "--lambda", "-0.3", "--m", "2"});
  CHECK(stick.code == 0);
  CHECK(contains(stick.out, "growth table"));
  CHECK(contains(stick.out, "status: pass"));

  CliRun endpoint = run({"chain", "--lambda", "-0.5", "--m", "2"});
  CHECK(endpoint.code == 3);
  CHECK(contains(endpoint.err, "-2/(2m+1)"));

  CHECK(run({"chain", "--lambda", "0.5"}).code == 3);
  CHECK(run({"chain", "--lambda", "0", "--m", "0"}).code == 64);
}

TEST_CASE("cli symbol emits json that round-trips") {
  CliRun r = run({"symbol", "--word", "H - Mx", "--index-at", "1", "--index-at", "0",
                  "--index-at", "1.2+0.4i", "--index-at", "3"});
  REQUIRE(r.code == 0);

  nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(r.out == doc.dump(2) + "\n");

  CHECK(doc["symbol"]["f_minus"][1][0].get<double>() == 1.0);
  CHECK(doc["symbol"]["f_plus"][1][0].get<double>() == 1.0);
  CHECK(doc["essential_spectrum"]["stick"].size() == 32);
  CHECK(doc["essential_spectrum"]["circle"].size() == 32);

  REQUIRE(doc["index"].size() == 4);
  CHECK(doc["index"][0]["lambda"][0].get<double>() == 1.0);
  CHECK(doc["index"][0]["index"].get<int>() == 1);
  CHECK(doc["index"][1]["index"].get<std::string>() == "undefined: essential");
  CHECK(doc["index"][2]["index"].get<int>() == 1);
  CHECK(doc["index"][3]["index"].get<int>() == 0);
}

TEST_CASE("cli symbol of a compact word is the zero pair") {
  CliRun r = run({"symbol", "--word", "H*Mx"});
  REQUIRE(r.code == 0);
  nlohmann::json doc = nlohmann::json::parse(r.out);
  for (const auto& entry : doc["symbol"]["f_minus"]) {
    CHECK(entry[0].get<double>() == 0.0);
    CHECK(entry[1].get<double>() == 0.0);
  }
  for (const auto& entry : doc["symbol"]["f_plus"]) {
    CHECK(entry[0].get<double>() == 0.0);
    CHECK(entry[1].get<double>() == 0.0);
  }
  CHECK(doc["index"].empty());
}

TEST_CASE("cli symbol points at parse failures") {
  CliRun r = run({"symbol", "--word", "H -"});
  CHECK(r.code == 64);
  CHECK(contains(r.err, "H -"));
  CHECK(contains(r.err, "^"));
}

TEST_CASE("cli scan writes csv and svg windows") {
  std::filesystem::path csv = temp_file("hwlab_test_cli_scan.csv");
  CliRun r = run({"scan", "--out", csv.string(), "--nx", "13", "--ny", "11", "--N", "16"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "wrote "));
  CHECK(contains(r.out, "13x11 points, N = 16"));

  std::string text = slurp(csv);
  CHECK(text.rfind("re,im,sigma_min\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 13 * 11 + 1);
  std::filesystem::remove(csv);

  std::filesystem::path svg = temp_file("hwlab_test_cli_scan.svg");
  CliRun rs = run({"scan", "--out", svg.string(), "--nx", "9", "--ny", "7", "--N", "8"});
  REQUIRE(rs.code == 0);
  std::string svg_text = slurp(svg);
  CHECK(svg_text.rfind("<?xml", 0) == 0);
  CHECK(contains(svg_text, "</svg>"));
  std::filesystem::remove(svg);
}

TEST_CASE("cli scan failure modes") {
  std::filesystem::path csv = temp_file("hwlab_test_cli_scan_bad.csv");
  CHECK(run({"scan", "--out", csv.string(), "--nx", "1"}).code == 64);
  CHECK_FALSE(std::filesystem::exists(csv));

  CliRun unwritable =
      run({"scan", "--out", "/nonexistent_dir_zz/x.csv", "--nx", "5", "--ny", "5", "--N", "8"});
  CHECK(unwritable.code == 73);
  CHECK(contains(unwritable.err, "cannot open"));

  CHECK(run({"scan", "--out", "scan.txt", "--nx", "5", "--ny", "5"}).code == 64);
}

TEST_CASE("cli compact-approx peels a triangular kernel csv") {
  std::filesystem::path volterra = temp_file("hwlab_test_cli_volterra.csv");
  write_kernel_csv_file(volterra, KernelFunction::volterra().sampled_at(64).samples);
  CliRun r = run({"compact-approx", "--kernel", volterra.string(), "--levels", "3"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "level  residual_bound"));
  CHECK(contains(r.out, "rank: 7"));
  CHECK(contains(r.out, "measured error:"));
  std::filesystem::remove(volterra);

  std::filesystem::path ones = temp_file("hwlab_test_cli_ones.csv");
  write_kernel_csv_file(ones, Eigen::MatrixXd::Ones(32, 32));
  CHECK(run({"compact-approx", "--kernel", ones.string(), "--levels", "2"}).code == 3);
  std::filesystem::remove(ones);

  std::filesystem::path odd = temp_file("hwlab_test_cli_odd.csv");
  write_kernel_csv_file(odd, KernelFunction::volterra().sampled_at(100).samples);
  CHECK(run({"compact-approx", "--kernel", odd.string(), "--levels", "3"}).code == 64);
  std::filesystem::remove(odd);

  std::filesystem::path ragged = temp_file("hwlab_test_cli_ragged.csv");
  {
    std::ofstream out(ragged);
    out << "1,2\n3\n";
  }
  CHECK(run({"compact-approx", "--kernel", ragged.string(), "--levels", "1"}).code == 65);
  std::filesystem::remove(ragged);

  CHECK(run({"compact-approx", "--kernel", "/nonexistent_dir_zz/k.csv"}).code == 66);
}

TEST_CASE("cli witness tables") {
  CliRun spike = run({"witness", "--kind", "spike", "--s", "0.3"});
  CHECK(spike.code == 0);
  CHECK(contains(spike.out, "predicted moment limit s^2 = 0.09"));
  CHECK(contains(spike.out, "n  moment  limit  error  h_norm"));
  CHECK(contains(spike.out, "\n4  "));
  CHECK(contains(spike.out, "\n64  "));

  CliRun narrow = run({"witness", "--kind", "spike", "--s", "0.3", "--n", "8", "--n", "16"});
  CHECK(narrow.code == 0);
  CHECK(contains(narrow.out, "\n8  "));
  CHECK_FALSE(contains(narrow.out, "\n4  "));

  CliRun upsilon = run({"witness", "--kind", "upsilon", "--tau", "1"});
  CHECK(upsilon.code == 0);
  CHECK(contains(upsilon.out, "upsilon witness toward tau = 1"));
  CHECK(contains(upsilon.out, "eigen_residual"));

  CHECK(run({"witness", "--kind", "bogus"}).code == 64);
  CHECK(run({"witness", "--kind", "upsilon", "--tau", "-1"}).code == 64);
  CHECK(run({"witness", "--kind", "spike", "--s", "0"}).code == 64);
}

TEST_CASE("cli top-level help and errors") {
  CliRun bare = run({});
  CHECK(bare.code == 0);
  CHECK(contains(bare.out, "laboratory"));

  CliRun help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(contains(help.out, "eigencheck"));

  CHECK(run({"bogus"}).code == 64);
}
