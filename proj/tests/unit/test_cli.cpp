#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tileopt/cli.hpp"
#include "tileopt/errors.hpp"

using namespace tileopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tileopt_unit_" + name);
  fs::remove_all(p);
  return p;
}

int invoke(std::vector<std::string> args, const fs::path& out, std::string* err_text = nullptr) {
  args.push_back("--out");
  args.push_back(out.string());
  std::ostringstream o;
  std::ostringstream e;
  const int code = run_cli(args, o, e);
  if (err_text) *err_text = e.str();
  return code;
}

nlohmann::json load_report(const fs::path& out) {
  std::ifstream in(out / "report.json");
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("argument parsing") {
    const RunConfig rc = parse_arguments({"perimeter", "--grid.n", "5", "--kernel.family=exponential"});
    CHECK(rc.command == Command::perimeter);
    CHECK(rc.config.get_int("grid.n") == 5);
    CHECK(rc.config.get("kernel.family") == "exponential");
    CHECK(rc.config.get("grid.R") == "1");
    CHECK_THROWS_AS(parse_arguments({"perimeter", "--no.such.key", "1"}), ValidationError);
    CHECK_THROWS_AS(parse_arguments({"launch"}), ValidationError);
    CHECK_THROWS_AS(parse_arguments({}), ValidationError);
  }

  TEST_CASE("sweep axes") {
    const SweepAxis a = parse_sweep_axis("sweep.rho3", "0.5:1.5:3");
    CHECK(a.values() == std::vector<double>{0.5, 1.0, 1.5});
    CHECK(parse_sweep_axis("sweep.rho2", "1").values() == std::vector<double>{1.0});
    CHECK_THROWS_AS(parse_sweep_axis("sweep.rho3", "1:2"), ValidationError);
  }

  TEST_CASE("lattice from config") {
    Config c;
    c.set("lattice.kind", "basis");
    c.set("lattice.basis", "1,0;0.5,2");
    const Lattice l = lattice_from_config(c);
    CHECK(l.covolume() == doctest::Approx(2.0));
    c.set("lattice.basis", "1,0;2,0");
    CHECK_THROWS_AS(lattice_from_config(c), ValidationError);
  }

  TEST_CASE("check command") {
    const fs::path out = scratch("check");
    CHECK(invoke({"check", "--kernel.family", "fractional"}, out) == kExitOk);
    const auto rep = load_report(out);
    CHECK(rep.at("command") == "check");
    CHECK(rep.at("result").at("assumptions").at("satisfies_frac") == true);
    CHECK(rep.contains("timing"));
  }

  TEST_CASE("perimeter of the unit interval") {
    const fs::path out = scratch("perimeter");
    CHECK(invoke({"perimeter", "--lattice.dim", "1", "--kernel.family", "exponential",
                  "--grid.n", "64", "--grid.R", "2"},
                 out) == kExitOk);
    const double v = load_report(out).at("result").at("value").get<double>();
    CHECK(v == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-4));
    CHECK(fs::exists(out / "density.csv"));
  }

  TEST_CASE("exit codes") {
    std::string err;
    CHECK(invoke({"optimize", "--grid.n", "3"}, scratch("noseed"), &err) == kExitValidation);
    CHECK(err.find("seed") != std::string::npos);
    CHECK(invoke({"check", "--bogus", "1"}, scratch("bogus")) == kExitValidation);
    CHECK(invoke({"check", "--kernel.family", "cubic"}, scratch("family")) == kExitValidation);
    CHECK(invoke({"check", "--config", "/nonexistent/run.cfg"}, scratch("nofile")) ==
          kExitValidation);
    CHECK(invoke({"perimeter", "--kernel.family", "exponential", "--kernel.beta", "1e-9"},
                 scratch("diverge")) == kExitNumeric);
  }

  TEST_CASE("optimize is deterministic for a fixed seed") {
    const std::vector<std::string> args{"optimize", "--seed", "7", "--lattice.dim", "1", "--grid.n", "4",
                                        "--solver.max_iters", "200", "--solver.oracle", "true"};
    const fs::path a = scratch("opt_a");
    const fs::path b = scratch("opt_b");
    REQUIRE(invoke(args, a) == kExitOk);
    REQUIRE(invoke(args, b) == kExitOk);
    auto ra = load_report(a);
    auto rb = load_report(b);
    ra.erase("timing");
    rb.erase("timing");
    ra["config"].erase("out");
    rb["config"].erase("out");
    CHECK(ra == rb);
    CHECK(ra.at("result").at("oracle").at("candidates") == 81);
  }

  TEST_CASE("config file") {
    const fs::path dir = scratch("cfg");
    fs::create_directories(dir);
    {
      std::ofstream cfg(dir / "run.cfg");
      cfg << "# comment\nkernel.family = indicator\nkernel.radius = 0.5\n";
    }
    const fs::path out = dir / "out";
    CHECK(invoke({"check", "--config", (dir / "run.cfg").string()}, out) == kExitOk);
    const auto rep = load_report(out);
    CHECK(rep.at("config").at("kernel.family") == "indicator");
    CHECK(rep.at("result").at("assumptions").at("strict_clause") != "holds");
  }
}
