#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfldp/config.hpp"
#include "mfldp/error.hpp"
#include "mfldp/experiment.hpp"
#include "mfldp/report.hpp"

using namespace mfldp;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_error);
    return e.what();
  }
  return "";
}

bool has(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("config: syntax errors carry line and column") {
  const auto msg = error_of("{\n  \"kind\": \"verify\",\n  \"seed\": ,\n}");
  CHECK(has(msg, "line 3"));
  CHECK(has(msg, "column"));
}

TEST_CASE("config: schema errors carry the field path") {
  CHECK(has(error_of(R"({"kind": "verify"})"), "seed"));
  CHECK(has(error_of(R"({"kind": "verify", "seed": 1, "bogus": 2})"), "bogus: unknown field"));
  CHECK(has(error_of(R"({"kind": "dance", "seed": 1})"), "kind"));
  CHECK(has(error_of(R"({"kind": "minimize", "seed": 1,
      "model": {"space": {"kind": "spins"}, "alpha": [0.5, 0.5], "interactions": [{"beta": 1.5}]}})"),
            "model.interactions[0]"));
  CHECK(has(error_of(R"({"kind": "sample", "seed": 1, "model": {"preset": "spin", "beta": 1}, "n_list": [10], "replicas": -3})"),
            "replicas"));
  CHECK(has(error_of(R"({"kind": "wasserstein", "seed": 1, "measures": {"space": {"kind": "spins"},
      "mu": "missing_file.json", "nu": "missing_file.json"}})"),
            "file not found"));
}

TEST_CASE("config: defaults and hashing") {
  const auto a = parse_config(R"({"kind": "minimize", "seed": 4, "model": {"preset": "spin", "beta": 1.5}})");
  CHECK(a.kind == ExperimentKind::minimize);
  CHECK(a.seed == 4);
  CHECK(a.replicas == 20);
  CHECK(a.sampler.burn_in_sweeps == 200);
  const auto b = parse_config(R"({"seed": 4, "kind": "minimize", "model": {"beta": 1.5, "preset": "spin"}})");
  CHECK(a.hash() == b.hash());
  const auto c = parse_config(R"({"kind": "minimize", "seed": 5, "model": {"preset": "spin", "beta": 1.5}})");
  CHECK(a.hash() != c.hash());
}

TEST_CASE("model presets and general models") {
  const auto spin = build_model({{"preset", "spin"}, {"beta", 1.0}});
  CHECK(spin.space()->size() == 2);
  const auto qp = build_model({{"preset", "quadratic_product"}, {"theta", 0.25}, {"box", {-4, 4}}, {"cells", 81}});
  CHECK(qp.space()->size() == 81);
  const auto general = build_model(nlohmann::json::parse(R"({
    "space": {"kind": "finite", "labels": ["a", "b", "c"]},
    "alpha": [0.2, 0.3, 0.5],
    "interactions": [{"family": "constant", "order": 3, "c": 1.0}]})"));
  CHECK(general.max_order() == 3);
}

TEST_CASE("report: number formatting and CSV") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(kInf) == "inf");
  CHECK(format_double(-kInf) == "-inf");
  CHECK(format_double(kNaN) == "nan");
  Table t("demo", {"name", "value"});
  t.add_row({"plain", Table::cell(1.5)});
  t.add_row({"a,b", Table::cell(std::size_t{3})});
  CHECK_THROWS_AS(t.add_row({"short"}), Error);
  std::ostringstream out;
  t.write_csv(out);
  CHECK(out.str() == "name,value\nplain,1.5\n\"a,b\",3\n");
  CHECK(hash_hex(fnv1a("")) == "cbf29ce484222325");
  CHECK(hash_hex(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("report: binary frames round-trip") {
  Configuration x(3, 2);
  x.coords() = {0.1, -2.5, 3.0, 1e-300, -0.0, 7.0};
  std::stringstream buf;
  write_frame(buf, x);
  const auto bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "MFLD");
  CHECK(bytes.size() == 4 + 2 + 4 + 4 + 6 * 8);
  const auto y = read_frame(buf);
  CHECK(y.size() == 3);
  CHECK(y.dim() == 2);
  CHECK(y.coords() == x.coords());
  std::stringstream bad("XXXX");
  CHECK_THROWS(read_frame(bad));
}

TEST_CASE("report: SVG plots skip non-finite points") {
  PlotSpec p{"gaps", "Gap", "n", "gap", true, {{"exact", {10, 100, 1000}, {0.1, kNaN, 0.001}}}};
  const auto svg = svg_line_plot(p);
  CHECK(has(svg, "<svg"));
  CHECK(has(svg, "</svg>"));
  CHECK_FALSE(has(svg, "nan"));
}

TEST_CASE("experiments: bundles are reproducible") {
  const auto cfg = parse_config(R"({"kind": "minimize", "seed": 1, "model": {"preset": "spin", "beta": 1.5}})");
  const auto out = run_experiment(cfg);
  CHECK(out.numerical_failures.empty());
  const auto dir = std::filesystem::temp_directory_path() / "mfldp_test_bundle";
  std::filesystem::remove_all(dir);
  write_report(cfg, out, dir);
  CHECK(std::filesystem::exists(dir / "report.json"));
  std::ifstream in(dir / "report.json");
  const auto manifest = nlohmann::json::parse(in);
  CHECK(manifest["config_hash"] == hash_hex(cfg.hash()));
  CHECK(manifest["seed"] == 1);
  CHECK(make_manifest(cfg, run_experiment(cfg)) == make_manifest(cfg, out));
  std::filesystem::remove_all(dir);
}
