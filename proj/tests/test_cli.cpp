#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "degen/cli.hpp"
#include "helpers.hpp"

using namespace degen;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run degen_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "degen");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("degen_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t data_rows(const std::string& csv) {
  return io::parse_sweep_csv(csv, "csv").rows.size();
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(degen_cli({"--help"}).code == 0);
  CHECK(degen_cli({}).code == 1);
  CHECK(degen_cli({"frobnicate"}).code == 1);
  CHECK(degen_cli({"fss"}).code == 1);  // --instance is required
}

TEST_CASE("generate writes an instance and its manifest") {
  const auto dir = scratch_dir("generate");
  const auto path = (dir / "inst.json").string();
  const auto r = degen_cli({"generate", "--seed", "5", "--out", path, "--timestamp", "2024-01-01T00:00:00Z"});
  REQUIRE(r.code == 0);
  const auto inst = io::load_instance(path);
  GeneratorConfig g;
  g.seed = 5;
  CHECK(inst == generate_instance(g));
  const auto man = io::parse_json(io::read_text((dir / "inst.manifest.json").string()), "m");
  CHECK(man.at("timestamp") == "2024-01-01T00:00:00Z");
  CHECK(man.at("master_seed") == 5);
  const auto embedded = io::parse_json(io::read_text(path), "i").at("manifest");
  CHECK(embedded.at("manifest_file") == "inst.manifest.json");
  CHECK_FALSE(embedded.contains("timestamp"));
}

TEST_CASE("fss on an all-clones instance reports baseline 0") {
  const auto dir = scratch_dir("fss");
  std::vector<Element> els;
  for (int i = 1; i <= 4; ++i) els.push_back(testkit::element("e" + std::to_string(i), {1, 1}, {0.5}));
  const auto path = (dir / "clones.json").string();
  io::write_text(path, io::dump(io::to_json(make_flat_instance(els, {"F1"}))));
  const auto out = (dir / "rep.json").string();
  const auto r = degen_cli({"fss", "--instance", path, "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("FSS(F1): n=4 baseline=0 ") != std::string::npos);
  const auto j = io::parse_json(io::read_text(out), "rep");
  CHECK(j.at("reports")[0].at("baseline") == 0.0);
}

TEST_CASE("metric flags override config file values") {
  const auto dir = scratch_dir("precedence");
  const auto inst_path = (dir / "red.json").string();
  REQUIRE(degen_cli({"generate", "--fixture", "redundancy", "--out", inst_path}).code == 0);
  const auto cfg_path = (dir / "cfg.json").string();
  io::write_text(cfg_path, R"({"metric": {"delta": 0.99}})");

  auto r = degen_cli({"--config", cfg_path, "fss", "--instance", inst_path, "--function", "F3", "--out",
                      (dir / "a.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("baseline=0 ") != std::string::npos);

  r = degen_cli({"--config", cfg_path, "fss", "--instance", inst_path, "--function", "F3", "--delta", "0.5", "--out",
                 (dir / "b.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("baseline=1 ") != std::string::npos);
}

TEST_CASE("exit codes for validation and I/O errors") {
  const auto dir = scratch_dir("errors");
  CHECK(degen_cli({"fss", "--instance", (dir / "nope.json").string()}).code == 2);

  const auto bad_cfg = (dir / "bad.json").string();
  io::write_text(bad_cfg, R"({"metric": {"deltaa": 0.3}})");
  const auto inst_path = (dir / "i.json").string();
  REQUIRE(degen_cli({"generate", "--out", inst_path}).code == 0);
  const auto r = degen_cli({"--config", bad_cfg, "fss", "--instance", inst_path});
  CHECK(r.code == 1);
  CHECK(r.err.find("metric.deltaa") != std::string::npos);

  CHECK(degen_cli({"fss", "--instance", inst_path, "--function", "F42", "--out", (dir / "x.json").string()}).code == 1);
  CHECK(degen_cli({"fss", "--instance", inst_path, "--delta", "abc"}).code == 1);
  CHECK(degen_cli({"mldi", "--instance", inst_path, "--fail", "zz", "--out", (dir / "y.json").string()}).code == 1);
}

TEST_CASE("arq and mldi commands") {
  const auto dir = scratch_dir("arq_mldi");
  const auto pf = (dir / "five.json").string();
  REQUIRE(degen_cli({"generate", "--fixture", "five-algorithm", "--out", pf}).code == 0);
  const auto prefix = (dir / "heat").string();
  auto r = degen_cli({"arq", "--portfolio", pf, "--epsilon", "1", "--delta", "0.5", "--sigma", "1", "--heatmap-prefix",
                      prefix, "--out", (dir / "arq.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("hard=0 ") != std::string::npos);
  CHECK(fs::exists(prefix + "_kernel.csv"));
  CHECK(fs::exists(prefix + "_dissim.csv"));

  const auto inst = (dir / "layered.json").string();
  REQUIRE(degen_cli({"generate", "--fixture", "layered", "--out", inst}).code == 0);
  r = degen_cli({"mldi", "--instance", inst, "--fail", "e1,e2", "--out", (dir / "mldi.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("L2: tau=") != std::string::npos);
  CHECK(degen_cli({"mldi", "--instance", inst, "--m", "3", "--out", (dir / "m3.json").string()}).code == 1);
}

TEST_CASE("default sweep yields seven q-rows per score") {
  const auto dir = scratch_dir("sweep");
  const auto prefix = (dir / "t1").string();
  const auto r = degen_cli({"sweep", "--fixture", "collapse", "--target", "fss", "--function", "F1", "--trials", "10",
                            "--delta", "0.5", "--a-min", "0.5", "--r-min", "0.5", "--mission-time", "168",
                            "--weight-mode", "Joint", "--out-prefix", prefix});
  REQUIRE(r.code == 0);
  const auto csv = io::read_text(prefix + ".csv");
  const auto t = io::parse_sweep_csv(csv, "t1");
  std::size_t base = 0, weighted = 0;
  for (const auto& row : t.rows) {
    base += row.rfind("fss_baseline,", 0) == 0;
    weighted += row.rfind("fss_weighted,", 0) == 0;
  }
  CHECK(base == 7);
  CHECK(weighted == 7);
  CHECK(fs::exists(prefix + ".json"));
  CHECK(fs::exists(prefix + ".manifest.json"));
  CHECK(csv.rfind("# degen sweep; manifest=t1.manifest.json\n", 0) == 0);
}

TEST_CASE("report merges sweep tables by concatenation") {
  const auto dir = scratch_dir("report");
  const auto a = (dir / "a").string(), b = (dir / "b").string();
  REQUIRE(degen_cli({"sweep", "--fixture", "layered", "--target", "mldi", "--trials", "2", "--out-prefix", a}).code == 0);
  REQUIRE(degen_cli({"sweep", "--fixture", "five-algorithm", "--target", "arq", "--trials", "2", "--out-prefix", b})
              .code == 0);
  const auto out = (dir / "merged.csv").string();
  REQUIRE(degen_cli({"report", a + ".csv", b + ".csv", "--out", out}).code == 0);
  const auto ta = io::read_text(a + ".csv"), tb = io::read_text(b + ".csv"), tm = io::read_text(out);
  CHECK(data_rows(tm) == data_rows(ta) + data_rows(tb));
  const auto merged = io::parse_sweep_csv(tm, "m");
  const auto pa = io::parse_sweep_csv(ta, "a");
  for (std::size_t i = 0; i < pa.rows.size(); ++i) CHECK(merged.rows[i] == pa.rows[i]);
  CHECK(degen_cli({"report", (dir / "missing.csv").string()}).code == 2);
}

TEST_CASE("sweep outputs are byte-identical across runs") {
  const auto d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
  for (const auto& d : {d1, d2}) {
    const auto r = degen_cli({"sweep", "--target", "mldi", "--trials", "3", "--seed", "9", "--threads", "2",
                              "--out-prefix", (d / "s").string()});
    REQUIRE(r.code == 0);
  }
  CHECK(io::read_text((d1 / "s.csv").string()) == io::read_text((d2 / "s.csv").string()));
  CHECK(io::read_text((d1 / "s.json").string()) == io::read_text((d2 / "s.json").string()));
}
