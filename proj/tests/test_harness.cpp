#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "adm/config.hpp"
#include "adm/csv.hpp"
#include "adm/experiment.hpp"
#include "adm/report.hpp"

using namespace adm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("adm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int run(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("configuration JSON round trip") {
  SimConfig c;
  c.n = 12;
  c.nu = 0.02;
  c.filter = HelmholtzPower{0.3, 4};
  c.orders = {0, 3};
  c.init.kind = InitialCondition::Kind::RandomSpectrum;
  c.init.seed = 99;
  c.init.decay = 1.5;
  c.output_dir = "somewhere";
  c.sobolev_constant = 3.5;
  const SimConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(SimConfig{}) != config_hash(c));
  CHECK(config_hash(SimConfig{}).size() == 16);

  for (const FilterSpec& f : {FilterSpec{Helmholtz{0.5, 2.0}}, FilterSpec{Gaussian{1.0}},
                              FilterSpec{GaussianApprox{1.0, 8}}, FilterSpec{HelmholtzPower{0.1, 2}}})
    CHECK(describe(filter_from_json(filter_to_json(f))) == describe(f));
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"bogus": 1})")), DomainError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"n": "sixteen"})")), DomainError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"n": 7})")), DomainError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"filter": {"type": "tophat"}})")), DomainError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"init": {"type": "vortex"}})")), DomainError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"C": 0})")), DomainError);
  CHECK_THROWS_AS(config_from_json(json::parse("[1, 2]")), DomainError);
  CHECK_THROWS_AS(load_config("/nonexistent/adm.json"), IoError);
  const auto partial = config_from_json(json::parse(R"({"nu": 0.2})"));
  CHECK(partial.nu == 0.2);
  CHECK(partial.n == SimConfig{}.n);
}

TEST_CASE("CSV writing and reading") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(parse_double("0.10000000000000001") == 0.1);
  CHECK(std::isnan(parse_double("nan")));
  CHECK(parse_double("4.9406564584124654e-324") > 0.0);
  CHECK_THROWS_AS(parse_double("1.0x"), IoError);

  CsvTable t("k=v", {"a", "b"});
  t.row() << 1 << 2.5;
  t.row() << 3 << std::nan("");
  CHECK(t.str() == "# k=v\na,b\n1,2.5\n3,nan\n");
  const auto dir = scratch("csv");
  t.save((dir / "t.csv").string());
  const auto d = read_csv((dir / "t.csv").string());
  CHECK(d.comments == std::vector<std::string>{"k=v"});
  CHECK(d.column("b") == 1);
  CHECK(d.rows.size() == 2);
  CHECK_THROWS_AS(d.column("c"), IoError);
}

TEST_CASE("experiment files") {
  const auto dir = scratch("experiment");
  SimConfig cfg;
  cfg.n = 8;
  cfg.nu = 0.1;
  cfg.dt = 0.01;
  cfg.t_final = 0.04;
  cfg.orders = {0, 1, 2, 3};
  cfg.sample_every = 2;
  cfg.snapshot_every = 2;
  cfg.output_dir = dir.string();
  const auto out = run_experiment(cfg);

  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "timeseries.csv"));
  CHECK(fs::exists(dir / "dns_step000002.admf"));
  CHECK(fs::exists(dir / "adm_N3_step000004.admf"));
  CHECK(config_from_json(json::parse(slurp(dir / "config.json"))).output_dir == cfg.output_dir);

  const auto text = slurp(dir / "timeseries.csv");
  CHECK(text.rfind("# config_hash=" + config_hash(cfg) + "\n", 0) == 0);
  const auto back = read_timeseries((dir / "timeseries.csv").string());
  REQUIRE(back.size() == out.samples.size());
  CHECK(back.size() == 4 * 3);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].eps_l2 == out.samples[i].eps_l2);
    CHECK(back[i].tau_l2 == out.samples[i].tau_l2);
  }

  const auto rep = build_report(cfg, back);
  CHECK(rep.beta_eps.has_value());
  CHECK(rep.all_hold());
  const auto snap = load_snapshot((dir / "adm_N3_step000004.admf").string());
  CHECK(snap.lattice() == WaveLattice(8));
}

TEST_CASE("command line determinism") {
  const std::string cli = ADM_CLI_PATH;
  const auto dir = scratch("cli");
  std::ofstream(dir / "cfg.json") << R"({"n": 8, "nu": 0.1, "N": [0, 1, 2, 4], "T": 0.05, "dt": 0.01,
                                        "init": {"type": "random", "seed": 3}})";
  const std::string cfg = (dir / "cfg.json").string();
  REQUIRE(run(cli + " simulate --deterministic --config " + cfg + " --out " + (dir / "a").string()) == 0);
  REQUIRE(run(cli + " simulate --deterministic --config " + cfg + " --out " + (dir / "b").string()) == 0);
  REQUIRE(run(cli + " simulate --threads 4 --config " + cfg + " --out " + (dir / "c").string()) == 0);
  const auto a = slurp(dir / "a" / "timeseries.csv");
  CHECK(!a.empty());
  // the hash covers output_dir, so only the data rows are compared across directories
  auto body = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
  CHECK(body(a) == body(slurp(dir / "b" / "timeseries.csv")));
  CHECK(body(a) == body(slurp(dir / "c" / "timeseries.csv")));

  REQUIRE(run(cli + " rates --config " + cfg + " --out " + (dir / "a").string()) == 0);
  REQUIRE(run(cli + " rates --config " + cfg + " --out " + (dir / "b").string()) == 0);
  CHECK(body(slurp(dir / "a" / "rates_summary.csv")) == body(slurp(dir / "b" / "rates_summary.csv")));
  CHECK(body(slurp(dir / "a" / "rates_detail.csv")) == body(slurp(dir / "b" / "rates_detail.csv")));
  CHECK(run(cli + " rates --config " + cfg + " --out " + (dir / "missing").string()) == 2);

  std::ofstream(dir / "shipped.json") << slurp(fs::path(ADM_SOURCE_DIR) / "configs" / "taylor_green.json");
  CHECK_NOTHROW(load_config((dir / "shipped.json").string()));
  CHECK_NOTHROW(load_config((fs::path(ADM_SOURCE_DIR) / "configs" / "random_power_filter.json").string()));
}
