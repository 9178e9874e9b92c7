#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(ENTWIT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe))
    result.output.append(buf, n);
  const int raw = pclose(pipe);
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

std::string work_path(const std::string& name) {
  return std::string(ENTWIT_WORK_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// first data line of a sweep CSV (after the config comment and the header)
std::vector<std::string> first_csv_row(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int seen = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (++seen == 2) return split(line, ',');
  }
  return {};
}

void write_state_file(const std::string& path, const double (&re)[9][9]) {
  json doc;
  json rows = json::array();
  for (int i = 0; i < 9; ++i) {
    json row = json::array();
    for (int j = 0; j < 9; ++j) row.push_back(re[i][j]);
    rows.push_back(row);
  }
  doc["re"] = rows;
  std::ofstream out(path);
  out << doc.dump(1);
}

}  // namespace

TEST_CASE("sweep: single-point run in the first family") {
  const std::string out = work_path("sweep_t0.csv");
  const RunResult run = run_cli("sweep --family t --point 0 --alg 2 --out " + out);
  REQUIRE(run.exit_code == 0);
  const auto row = first_csv_row(read_file(out));
  // param1,param2,in_region,objective,status,iters,gap,s00,s11,s22,s04
  REQUIRE(row.size() == 11);
  CHECK(row[0] == "0");
  CHECK(row[2] == "1");
  CHECK(std::abs(std::stod(row[3])) <= 1e-6);
  CHECK(row[4] == "Optimal");
  CHECK(std::stoi(row[5]) > 0);
  CHECK(std::stod(row[6]) <= 1e-9);
}

TEST_CASE("sweep: byte-identical reruns") {
  const std::string a = work_path("sweep_det_a.csv");
  const std::string b = work_path("sweep_det_b.csv");
  REQUIRE(run_cli("sweep --family mn --grid 3x3 --alg 1 --out " + a).exit_code == 0);
  REQUIRE(run_cli("sweep --family mn --grid 3x3 --alg 1 --out " + b).exit_code == 0);
  CHECK(read_file(a) == read_file(b));
}

TEST_CASE("sweep: pinned reference minima are reproduced") {
  const std::string out = work_path("sweep_anchor.csv");
  RunResult run = run_cli(
      "sweep --family pq --point 0.439463,0.84786 --alg 2 --include-outside --out " +
      out);
  REQUIRE(run.exit_code == 0);
  auto row = first_csv_row(read_file(out));
  REQUIRE(row.size() == 19);  // 7 fixed columns + 12 signature entries
  CHECK(std::stod(row[3]) == doctest::Approx(-0.00160017).epsilon(1e-4));

  run = run_cli("sweep --family mn --point -0.97,0.97 --alg 2 --out " + out);
  REQUIRE(run.exit_code == 0);
  row = first_csv_row(read_file(out));
  REQUIRE(row.size() == 28);  // 7 fixed columns + 21 signature entries
  CHECK(row[2] == "1");
  CHECK(std::stod(row[3]) == doctest::Approx(-0.00745894).epsilon(1e-4));
}

TEST_CASE("sweep: out-of-region points are noted, not silently dropped") {
  const std::string out = work_path("sweep_skip.csv");
  REQUIRE(run_cli("sweep --family pq --point 0.5,1.2 --alg 1 --out " + out).exit_code ==
          0);
  auto row = first_csv_row(read_file(out));
  REQUIRE(row.size() == 19);
  CHECK(row[2] == "0");
  CHECK(row[3].empty());
  CHECK(row[4] == "Skipped");

  // with the explicit flag the point is solved
  REQUIRE(run_cli("sweep --family pq --point 0.5,1.2 --alg 1 --include-outside --out " +
                  out)
              .exit_code == 0);
  row = first_csv_row(read_file(out));
  CHECK(row[2] == "0");
  CHECK(row[4] != "Skipped");
}

TEST_CASE("sweep: json output carries the documented structure") {
  const std::string out = work_path("sweep.json");
  REQUIRE(
      run_cli("sweep --family t --point 1 --alg 2 --format json --out " + out)
          .exit_code == 0);
  const json doc = json::parse(read_file(out));
  REQUIRE(doc.contains("config"));
  REQUIRE(doc.contains("signature_fields"));
  REQUIRE(doc.contains("rows"));
  for (const char* key : {"hash", "family", "alg", "grid", "seed", "include_outside"})
    CHECK(doc["config"].contains(key));
  CHECK(doc["signature_fields"].size() == 4);
  REQUIRE(doc["rows"].size() == 1);
  const json& row = doc["rows"][0];
  for (const char* key : {"param1", "in_region", "status", "objective", "iters", "gap",
                          "signature"})
    CHECK(row.contains(key));
  CHECK(std::abs(row["objective"].get<double>()) <= 1e-6);
}

TEST_CASE("sweep: bad arguments exit with code 2") {
  CHECK(run_cli("sweep --family nosuch --out x.csv").exit_code == 2);
  CHECK(run_cli("sweep --family t --grid nonsense --out " + work_path("x.csv"))
            .exit_code == 2);
  CHECK(run_cli("sweep --family pq --point 0.5 --out " + work_path("x.csv")).exit_code ==
        2);
}

TEST_CASE("classify: family fixtures") {
  RunResult run = run_cli("classify --family t --params 1");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("is_co_cp: true") != std::string::npos);
  CHECK(run.output.find("is_cp: false") != std::string::npos);
  CHECK(run.output.find("spectrum_fixture: pass") != std::string::npos);

  run = run_cli("classify --family pq --params 0.4 0.8");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("region: inside") != std::string::npos);
  CHECK(run.output.find("is_cp: true") != std::string::npos);
  CHECK(run.output.find("kraus_rank1: pass") != std::string::npos);

  run = run_cli("classify --family mn --params -0.5 0.8");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("is_cp: true") != std::string::npos);
  CHECK(run.output.find("kraus_rank1: pass") != std::string::npos);

  run = run_cli("classify --family choi-family --params 1 1 1 1 1");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("region: outside") != std::string::npos);

  CHECK(run_cli("classify --family pq --params 0.4").exit_code == 2);
}

TEST_CASE("detect: fixtures and diagnostics") {
  // trace-1 PPT state with entanglement visible only through the adjoint lift
  double state[9][9] = {};
  const double diag[9] = {2, 1, 4, 4, 2, 1, 1, 4, 2};
  for (int i = 0; i < 9; ++i) state[i][i] = diag[i] / 21.0;
  state[0][4] = state[4][0] = 2.0 / 21.0;
  state[0][8] = state[8][0] = 2.0 / 21.0;
  state[4][8] = state[8][4] = 2.0 / 21.0;
  const std::string ppt_path = work_path("state_ppt.json");
  write_state_file(ppt_path, state);
  RunResult run = run_cli("detect --state " + ppt_path);
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("ppt: yes") != std::string::npos);
  CHECK(run.output.find("choi_map: negative") != std::string::npos);
  CHECK(run.output.find("entangled: yes") != std::string::npos);

  // pure state on the (0,0)/(2,2) diagonal pair: caught by transposition only
  double pure[9][9] = {};
  pure[0][0] = pure[0][8] = pure[8][0] = pure[8][8] = 0.5;
  const std::string pure_path = work_path("state_pure.json");
  write_state_file(pure_path, pure);
  run = run_cli("detect --state " + pure_path);
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("ppt: violated") != std::string::npos);
  CHECK(run.output.find("choi_map: nonnegative") != std::string::npos);

  double mixed[9][9] = {};
  for (int i = 0; i < 9; ++i) mixed[i][i] = 1.0 / 9.0;
  const std::string mixed_path = work_path("state_mixed.json");
  write_state_file(mixed_path, mixed);
  run = run_cli("detect --state " + mixed_path);
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("entangled: not detected") != std::string::npos);

  const std::string bad_path = work_path("state_bad.json");
  {
    std::ofstream out(bad_path);
    out << "{ \"re\": [[1, 2,\n  broken\n";
  }
  run = run_cli("detect --state " + bad_path);
  CHECK(run.exit_code == 2);
  CHECK(run.output.find("line") != std::string::npos);

  // valid JSON, invalid state
  double not_one[9][9] = {};
  not_one[0][0] = 0.5;
  const std::string trace_path = work_path("state_trace.json");
  write_state_file(trace_path, not_one);
  CHECK(run_cli("detect --state " + trace_path).exit_code == 2);
}

TEST_CASE("prescribe: named sets, output file, failure codes") {
  RunResult run = run_cli("prescribe --set choi --phase-grid 8");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("dimension: 5") != std::string::npos);

  const std::string basis_path = work_path("basis.json");
  run = run_cli("prescribe --set 't(2)' --phase-grid 8 --out " + basis_path);
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("dimension: 1") != std::string::npos);
  const json doc = json::parse(read_file(basis_path));
  CHECK(doc["dimension"] == 1);
  REQUIRE(doc["basis"].size() == 1);
  CHECK(doc["basis"][0]["re"].size() == 81);
  CHECK(doc["basis"][0]["im"].size() == 81);

  // projection residual of the generating map is reported and tiny
  const std::size_t pos = run.output.find("projection_residual: ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(run.output.substr(pos + 21)) <= 1e-8);

  CHECK(run_cli("prescribe --set 't(2)' --phase-grid 1").exit_code == 3);

  const std::string empty_path = work_path("empty_points.json");
  {
    std::ofstream out(empty_path);
    out << "{ \"points\": [] }";
  }
  CHECK(run_cli("prescribe --points-file " + empty_path).exit_code == 2);

  const std::string points_path = work_path("points.json");
  {
    json doc2;
    doc2["points"] = json::array();
    json p;
    p["x_re"] = {1.0, 1.0, -1.0};
    p["y_re"] = {1.0, 1.0, -1.0};
    doc2["points"].push_back(p);
    std::ofstream out(points_path);
    out << doc2.dump();
  }
  run = run_cli("prescribe --points-file " + points_path);
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("dimension: ") != std::string::npos);
}
