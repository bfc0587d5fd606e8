#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <periodlab/cli.hpp>

using namespace periodlab;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path fixture_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "periodlab_cli_fixtures";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_fixture(const std::string& name, const std::string& content) {
  const auto path = fixture_dir() / name;
  std::ofstream(path) << content;
  return path.string();
}

const char* kDiscRegion = R"({"schema":"periodlab/region/v1","vars":["x","y"],
 "tree":{"op":"leaf","rel":">=","poly":[{"c":"1","e":[0,0]},{"c":"-1","e":[2,0]},{"c":"-1","e":[0,2]}]},
 "box":[["-1","1"],["-1","1"]],"orientation":1,"dim":2})";

const char* kAreaForm = R"({"schema":"periodlab/form/v1","vars":["x","y"],"degree":2,
 "order":[0,1],"num":[{"c":"1","e":[0,0]}],"den":[{"c":"1","e":[0,0]}]})";

const char* kUnitInterval = R"({"schema":"periodlab/region/v1","vars":["t"],
 "tree":{"op":"and","args":[
   {"op":"leaf","rel":">=","poly":[{"c":"1","e":[1]}]},
   {"op":"leaf","rel":">=","poly":[{"c":"1","e":[0]},{"c":"-1","e":[1]}]}]},
 "box":[["0","1"]],"orientation":1,"dim":1})";

const char* kLengthForm = R"({"schema":"periodlab/form/v1","vars":["t"],"degree":1,
 "order":[0],"num":[{"c":"1","e":[0]}],"den":[{"c":"1","e":[0]}]})";

}  // namespace

TEST_CASE("registry partitions the module operation inventory") {
  std::vector<std::string> claimed;
  for (const SubcommandInfo& info : subcommand_registry())
    for (const std::string& op : info.operations) claimed.push_back(op);
  const std::set<std::string> unique(claimed.begin(), claimed.end());
  REQUIRE(unique.size() == claimed.size());

  const std::set<std::string> canonical(module_operations().begin(), module_operations().end());
  REQUIRE(canonical.size() == module_operations().size());
  REQUIRE(unique == canonical);
}

TEST_CASE("every registered subcommand is wired") {
  for (const SubcommandInfo& info : subcommand_registry()) {
    const CliResult r = cli({info.name, "--help"});
    CAPTURE(info.name);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find(info.name) != std::string::npos);
  }
}

TEST_CASE("identical invocations produce identical bytes") {
  const std::vector<std::string> argv = {"periods", "dlog", "--a", "3", "--b", "2"};
  const CliResult first = cli(argv);
  const CliResult second = cli(argv);
  REQUIRE(first.code == 0);
  REQUIRE(first.out == second.out);
  REQUIRE(!first.out.empty());

  const std::vector<std::string> csv_argv = {"periods",  "punctured-line", "--alpha", "2",
                                             "--format", "csv"};
  REQUIRE(cli(csv_argv).out == cli(csv_argv).out);
}

TEST_CASE("punctured line matrix through the front end") {
  const CliResult r = cli({"periods", "punctured-line", "--alpha", "2"});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("schema") == "periodlab/matrix/v1");
  REQUIRE(j.at("rows") == nlohmann::json::array({"dt/t", "dt"}));
  REQUIRE(j.at("cols") == nlohmann::json::array({"sigma", "[1,2]"}));
  const double ln2 = j.at("re")[0][1].get<double>();
  const double two_pi = j.at("im")[0][0].get<double>();
  const double interval_dt = j.at("re")[1][1].get<double>();
  REQUIRE(std::abs(ln2 - std::log(2.0)) < 1e-10);
  REQUIRE(std::abs(two_pi - 2.0 * M_PI) < 1e-10);
  REQUIRE(std::abs(interval_dt - 1.0) < 1e-10);
  REQUIRE(j.at("cycles") == j.at("cols"));

  const CliResult same = cli({"periods", "punctured-line", "--points", "1,2"});
  REQUIRE(same.code == 0);
  REQUIRE(same.out == r.out);

  REQUIRE(cli({"periods", "punctured-line"}).code == 2);
  REQUIRE(cli({"periods", "punctured-line", "--alpha", "2", "--points", "1,2"}).code == 2);
}

TEST_CASE("naive subcommand integrates files and probes membership") {
  const std::string disc = write_fixture("disc.json", kDiscRegion);
  const std::string area = write_fixture("area.json", kAreaForm);
  const CliResult r =
      cli({"naive", "--region", disc, "--form", area, "--tol", "1e-6", "--probe", "0.1,0.2"});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(std::abs(j.at("value").at("re").get<double>() - M_PI) < 1e-5);
  REQUIRE(j.at("value").at("im").get<double>() == 0.0);
  REQUIRE(j.at("probe_inside").get<bool>());
  REQUIRE(j.at("tol").get<double>() == 1e-6);
}

TEST_CASE("naive subcommand multiplies regions and forms") {
  const std::string interval = write_fixture("interval.json", kUnitInterval);
  const std::string length = write_fixture("length.json", kLengthForm);
  const CliResult r = cli({"naive", "--region", interval, "--form", length, "--region2",
                           interval, "--form2", length, "--tol", "1e-8"});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(std::abs(j.at("value").at("re").get<double>() - 1.0) < 1e-7);

  REQUIRE(cli({"naive", "--region", interval, "--form", length, "--region2", interval})
              .code == 2);
  REQUIRE(cli({"naive", "--region", "/nonexistent.json", "--form", length}).code == 2);
}

TEST_CASE("limit-mhs emits the double degeneration") {
  const CliResult r = cli({"limit-mhs", "--b", "-2", "--steps", "a1,origin"});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("schema") == "periodlab/mhs/v1");
  const double zeta2 = -j.at("columns_re")[0][3].get<double>();
  REQUIRE(std::abs(zeta2 - 1.6449340668482264) < 1e-3);
  REQUIRE(j.at("steps").size() == 2);
  REQUIRE(j.at("weight").contains("0"));
  REQUIRE(j.at("hodge").contains("0"));
}

TEST_CASE("polylog and hyperlog agree through the front end") {
  const CliResult series = cli({"polylog", "--mode", "series", "--word", "1,1", "--args",
                                "0.3,0.4", "--tol", "1e-12"});
  REQUIRE(series.code == 0);
  const double a =
      nlohmann::json::parse(series.out).at("value").at("re").get<double>();
  REQUIRE(std::abs(a - 0.03472708856371913) < 1e-10);

  const CliResult integral =
      cli({"hyperlog", "--word", "1,1", "--args", "0.3,0.4"});
  REQUIRE(integral.code == 0);
  const double b =
      nlohmann::json::parse(integral.out).at("value").at("re").get<double>();
  REQUIRE(std::abs(a - b) < 1e-9);

  const CliResult letters = cli({"hyperlog", "--letters", "2,0"});
  const CliResult li2_run = cli({"polylog", "--mode", "li2", "--x", "0.5"});
  REQUIRE(letters.code == 0);
  REQUIRE(li2_run.code == 0);
  const double c = nlohmann::json::parse(letters.out).at("value").at("re").get<double>();
  const double d = nlohmann::json::parse(li2_run.out).at("value").at("re").get<double>();
  REQUIRE(std::abs(c + d) < 1e-9);
}

TEST_CASE("monodromy subcommand builds loops and lassos") {
  const CliResult r = cli({"monodromy", "--function", "li1-over-a", "--center", "1",
                           "--radius", "0.5", "--base", "3"});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(std::abs(j.at("value").at("im").get<double>() + 2.0 * M_PI) < 1e-8);
  REQUIRE(std::abs(j.at("value").at("re").get<double>()) < 1e-8);
  REQUIRE(j.at("loop").get<std::string>().find("lasso") == 0);

  REQUIRE(cli({"monodromy", "--function", "nope", "--center", "1"}).code == 2);
  REQUIRE(cli({"monodromy", "--function", "li2", "--center", "1", "--radius", "-1"}).code ==
          2);
}

TEST_CASE("reduce subcommand maps elements to basis coordinates") {
  const std::string elem = write_fixture(
      "elem.json", R"({"form":[{"e":-1,"c":"2"},{"e":1,"c":"3"}],"constants":[{"re":"1"},{"re":"0"}]})");
  const CliResult r = cli({"reduce", "punctured-line", "--points", "1,2", "--element", elem});
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("basis") == nlohmann::json::array({"dt/t", "dt"}));
  REQUIRE(j.at("coordinates")[0].at("re") == "2");

  const std::string qelem = write_fixture(
      "qelem.json", R"({"dx":[{"ex":0,"ey":1,"c":"1"}],"dy":[{"ex":1,"ey":0,"c":"1"}]})");
  const CliResult q = cli({"reduce", "quadric", "--a", "1", "--b", "1", "--element", qelem});
  REQUIRE(q.code == 0);
  REQUIRE(nlohmann::json::parse(q.out).at("coordinates")[0].at("re") == "0");

  REQUIRE(cli({"reduce", "quadric", "--element", qelem}).code == 2);
}

TEST_CASE("coproduct entries agree between the two worked families") {
  const CliResult two = cli({"coproduct", "--alpha", "2", "--i", "0", "--j", "1"});
  const CliResult three =
      cli({"coproduct", "--alpha", "2", "--beta", "3", "--i", "1", "--j", "0"});
  REQUIRE(two.code == 0);
  REQUIRE(three.code == 0);
  const nlohmann::json ja = nlohmann::json::parse(two.out);
  const nlohmann::json jb = nlohmann::json::parse(three.out);
  REQUIRE(ja.at("terms") == jb.at("terms"));
  REQUIRE(ja.at("terms").size() == 3);

  REQUIRE(cli({"coproduct", "--alpha", "1", "--i", "0", "--j", "1"}).code == 2);
  REQUIRE(cli({"coproduct", "--alpha", "2", "--beta", "2", "--i", "0", "--j", "1"}).code == 2);
}

TEST_CASE("elliptic subcommand spans the lattice operations") {
  const CliResult ei = cli({"elliptic", "--op", "eisenstein", "--omega1", "1", "--omega2",
                            "2i", "--k", "2", "--cutoff", "100"});
  REQUIRE(ei.code == 0);
  const nlohmann::json j = nlohmann::json::parse(ei.out);
  REQUIRE(std::abs(j.at("value").at("re").get<double>() - 2.16645823815414) <
          j.at("tail").get<double>());

  const CliResult tau = cli({"elliptic", "--op", "tau", "--omega1", "1", "--omega2", "-i"});
  REQUIRE(tau.code == 0);
  REQUIRE(std::abs(nlohmann::json::parse(tau.out).at("tau").at("im").get<double>() - 1.0) <
          1e-12);

  const CliResult wp_run = cli({"elliptic", "--op", "wp", "--omega1", "1", "--omega2", "i",
                                "--z", "0.25+0.25i", "--cutoff", "60"});
  const CliResult wpp_run = cli({"elliptic", "--op", "wp-prime", "--omega1", "1", "--omega2",
                                 "i", "--z", "0.25+0.25i", "--cutoff", "60"});
  REQUIRE(wp_run.code == 0);
  REQUIRE(wpp_run.code == 0);

  const CliResult per = cli({"elliptic", "--op", "curve-periods", "--g4", "3.1512120021",
                             "--g6", "0"});
  REQUIRE(per.code == 0);
  const nlohmann::json pl = nlohmann::json::parse(per.out);
  const double w1re = pl.at("omega1").at("re").get<double>();
  REQUIRE(std::abs(std::abs(w1re) - 1.0) < 1e-6);

  REQUIRE(cli({"elliptic", "--op", "eisenstein", "--omega1", "1", "--omega2", "2i", "--k",
               "7", "--cutoff", "100"})
              .code == 2);
  REQUIRE(cli({"elliptic", "--op", "wp", "--omega1", "1", "--omega2", "i", "--z", "0",
               "--cutoff", "60"})
              .code == 1);
}

TEST_CASE("exit codes separate usage from domain failures") {
  REQUIRE(cli({}).code == 2);
  REQUIRE(cli({"unknown-subcommand"}).code == 2);
  REQUIRE(cli({"polylog", "--mode", "bogus"}).code == 2);
  // Li_{1,1} on the divisor y = 1 is a domain error, not a usage error.
  const CliResult r = cli({"polylog", "--mode", "li11", "--x", "0.5", "--y", "1"});
  REQUIRE(r.code == 1);
  REQUIRE(r.err.find("error") != std::string::npos);
}

TEST_CASE("environment variable sets the default tolerance") {
  setenv("PERIODLAB_TOL", "1e-5", 1);
  const CliResult r = cli({"polylog", "--mode", "li2", "--x", "0.5"});
  unsetenv("PERIODLAB_TOL");
  REQUIRE(r.code == 0);
  REQUIRE(nlohmann::json::parse(r.out).at("tol").get<double>() == 1e-5);

  setenv("PERIODLAB_TOL", "1e-5", 1);
  const CliResult overridden =
      cli({"polylog", "--mode", "li2", "--x", "0.5", "--tol", "1e-9"});
  unsetenv("PERIODLAB_TOL");
  REQUIRE(nlohmann::json::parse(overridden.out).at("tol").get<double>() == 1e-9);
}

TEST_CASE("csv output flattens the json tree") {
  const CliResult r = cli({"polylog", "--mode", "li2", "--x", "0.5", "--format", "csv"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("key,value\n") == 0);
  REQUIRE(r.out.find("value.re,0.5822405264") != std::string::npos);
  REQUIRE(r.out.find("schema,periodlab/value/v1") != std::string::npos);
}

TEST_CASE("complex literals cover the accepted grammar") {
  using detail_cli::parse_complex;
  REQUIRE(parse_complex("1.5", "t") == Complex(1.5, 0.0));
  REQUIRE(parse_complex("-2e-3", "t") == Complex(-2e-3, 0.0));
  REQUIRE(parse_complex("i", "t") == Complex(0.0, 1.0));
  REQUIRE(parse_complex("-i", "t") == Complex(0.0, -1.0));
  REQUIRE(parse_complex("0.5i", "t") == Complex(0.0, 0.5));
  REQUIRE(parse_complex("1+2i", "t") == Complex(1.0, 2.0));
  REQUIRE(parse_complex("1.5-0.25i", "t") == Complex(1.5, -0.25));
  REQUIRE(parse_complex("2e-2+1e-3i", "t") == Complex(0.02, 0.001));
  REQUIRE_THROWS_AS(parse_complex("", "t"), UsageError);
  REQUIRE_THROWS_AS(parse_complex("1OOPS", "t"), UsageError);
  REQUIRE_THROWS_AS(parse_complex("1+2j", "t"), UsageError);
}
