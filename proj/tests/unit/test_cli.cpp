#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "phasenet/config.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/field_io.hpp"
#include "phasenet/pipeline.hpp"

using namespace phasenet;
namespace fs = std::filesystem;

namespace {

const std::string kCli = PHASENET_CLI_PATH;
const std::string kSrc = PHASENET_SOURCE_DIR;

fs::path scratch() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("phasenet_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int sh(const std::string& cmd) {
  int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string sh_out(const std::string& cmd) {
  auto out = scratch() / "stdout.txt";
  std::system((cmd + " > " + out.string() + " 2>/dev/null").c_str());
  return read_text(out.string());
}

fs::path write(const std::string& name, const std::string& text) {
  auto p = scratch() / name;
  write_text(p.string(), text);
  return p;
}

bool is_config_error(const Error& e) { return e.code() == Errc::ConfigParse; }

const std::string kQuick = kSrc + "/scenarios/n3_disk_quick.json";

}  // namespace

TEST_CASE("config validation") {
  auto c = load_scenario_config(kQuick);
  CHECK(c.name == "n3_disk_quick");
  CHECK(c.epsilons.size() == 3);
  CHECK_THAT(c.alpha, Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-15));
  auto text = read_text(kQuick);
  auto j = nlohmann::json::parse(text);
  j["alpha"] = 0.6;
  CHECK_THROWS_MATCHES(parse_scenario_config(j.dump()), Error, Catch::Matchers::Predicate<Error>(is_config_error));
  j = nlohmann::json::parse(text);
  j["boundary"]["labels"] = {0, 1, 5};
  CHECK_THROWS_MATCHES(parse_scenario_config(j.dump()), Error, Catch::Matchers::Predicate<Error>(is_config_error));
  j = nlohmann::json::parse(text);
  j["surprise"] = 1;
  CHECK_THROWS_MATCHES(parse_scenario_config(j.dump()), Error, Catch::Matchers::Predicate<Error>(is_config_error));
  CHECK_THROWS_MATCHES(parse_scenario_config("{ not json"), Error, Catch::Matchers::Predicate<Error>(is_config_error));
  // echo parses back to the same config
  auto back = parse_scenario_config(scenario_config_json(c));
  CHECK(scenario_config_json(back) == scenario_config_json(c));
}

TEST_CASE("field dump round trip") {
  auto g = build_disk_grid(1.0, 1.0 / 20);
  std::vector<double> u(2 * g.size());
  for (int c = 0; c < g.size(); ++c) {
    u[2 * c] = g.center(c).x;
    u[2 * c + 1] = c;
  }
  auto path = (scratch() / "f.bin").string();
  write_field_bin(path, make_dump(g, u, 2, 0.03));
  auto d = read_field_bin(path);
  CHECK(d.nx == g.nx);
  CHECK(d.ny == g.ny);
  CHECK(d.m == 2);
  CHECK(d.h == g.h);
  CHECK(d.epsilon == 0.03);
  int nan = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      int c = g.at(i, j);
      if (c < 0) {
        nan += std::isnan(d.at(i, j, 0));
        continue;
      }
      CHECK(d.at(i, j, 0) == u[2 * c]);
      CHECK(d.at(i, j, 1) == u[2 * c + 1]);
    }
  CHECK(nan == g.nx * g.ny - g.size());
  write_text((scratch() / "junk.bin").string(), "NOTAFIELD");
  CHECK_THROWS_AS(read_field_bin((scratch() / "junk.bin").string()), Error);
}

TEST_CASE("run writes a complete, reproducible output tree") {
  auto out1 = scratch() / "run1", out2 = scratch() / "run2";
  REQUIRE(sh(kCli + " run " + kQuick + " --out " + out1.string()) == 0);
  REQUIRE(sh("PHASENET_OUT=" + out2.string() + " " + kCli + " run " + kQuick) == 0);
  auto dir = out1 / "n3_disk_quick";
  for (const char* f : {"sigma.csv", "network.json", "report.csv", "manifest.json", "eps_0.04/field.bin",
                        "eps_0.04/interface.svg", "eps_0.04/fibers.csv", "eps_0.04/decay.csv"})
    CHECK(fs::exists(dir / f));
  // manifest lists every file and nothing else
  auto man = nlohmann::json::parse(read_text((dir / "manifest.json").string()));
  std::set<std::string> listed, present;
  for (const auto& f : man["files"]) listed.insert(f.get<std::string>());
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) present.insert(fs::relative(e.path(), dir).string());
  CHECK(listed == present);
  CHECK(man["config"]["name"] == "n3_disk_quick");
  // identical config reproduces every CSV byte for byte
  for (const auto& f : present)
    if (f.size() > 4 && f.substr(f.size() - 4) == ".csv")
      CHECK(read_text((dir / f).string()) == read_text((out2 / "n3_disk_quick" / f).string()));
  auto dump = read_field_bin((dir / "eps_0.04/field.bin").string());
  CHECK(dump.m == 2);
  CHECK(dump.epsilon == 0.04);
}

TEST_CASE("run rejects bad configs with exit 2") {
  auto j = nlohmann::json::parse(read_text(kQuick));
  j["alpha"] = 0.6;
  CHECK(sh(kCli + " run " + write("alpha.json", j.dump()).string() + " --out " + (scratch() / "bad").string()) == 2);
  CHECK(sh(kCli + " run " + write("broken.json", "{\"name\": ").string()) == 2);
  CHECK(sh(kCli + " run " + (scratch() / "missing.json").string()) == 2);
  CHECK(sh(kCli) == 2);
}

TEST_CASE("compare") {
  auto dir = scratch() / "cmp";
  fs::create_directories(dir);
  REQUIRE(sh(kCli + " run " + kQuick + " --out " + dir.string()) == 0);
  auto rep = (dir / "n3_disk_quick" / "report.csv").string();
  // split the three-epsilon report into two files
  auto text = read_text(rep);
  auto head = text.substr(0, text.find('\n') + 1);
  auto body = text.substr(head.size());
  auto second = body.find('\n') + 1;
  auto a = write("a.csv", head + body.substr(0, second)), b = write("b.csv", head + body.substr(second));
  auto table = sh_out(kCli + " compare " + a.string() + " " + b.string());
  CHECK(table.find("scenario n3_disk_quick") != std::string::npos);
  CHECK(table.find("e decreasing: yes") != std::string::npos);
  auto s = compare_reports({a.string(), b.string()});
  CHECK(s.rows.size() == 3);
  CHECK(s.rows.front().epsilon > s.rows.back().epsilon);
  CHECK(s.have_q);
  CHECK(s.have_measure_exponent);
  // single report and mixed scenarios
  CHECK(sh(kCli + " compare " + a.string()) != 0);
  CHECK_THROWS_MATCHES(compare_reports({a.string()}), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::IncompatibleReports;
                       }));
  std::string other = body.substr(0, second);
  other.replace(0, std::string("n3_disk_quick").size(), "other");
  auto c = write("c.csv", head + other);
  CHECK_THROWS_MATCHES(compare_reports({a.string(), c.string()}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::IncompatibleReports;
                       }));
}

TEST_CASE("sigma and optimize commands") {
  auto sig = sh_out(kCli + " sigma " + kSrc + "/scenarios/double_well.json");
  CHECK(sig.rfind("i,j,sigma,tail_rate\n", 0) == 0);
  double s = std::stod(sig.substr(sig.find("0,1,") + 4));
  CHECK(std::abs(s - 2 * std::sqrt(2.0) / 3) < 1e-3);
  CHECK(sh(kCli + " optimize " + kSrc + "/scenarios/pol6.json") == 0);
  auto js = sh_out(kCli + " optimize " + kSrc + "/scenarios/n3_steiner.json");
  auto net = network_from_json(js);
  CHECK(std::abs(energy_F(net, equal_sigma(3, 1.0)) - 3.0) < 1e-6);
}
