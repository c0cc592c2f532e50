#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Output {
  int code = -1;
  std::string out;
};

Output run(const std::string& args) {
  const std::string cmd = std::string(CDTW_CLI_PATH) + " " + args + " 2>/dev/null";
  Output r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Output run_with_stderr(const std::string& args) {
  const std::string cmd = std::string(CDTW_CLI_PATH) + " " + args + " 2>&1";
  Output r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("cdtw_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("compute") {
  TempDir dir;
  const auto a = dir.write("a.csv", "0\n1\n");
  const auto b = dir.write("b.json", "[0.5, 1.5]");
  const auto same = dir.write("same.csv", "0\n1\n");

  const Output r = run("compute " + a + " " + same);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == 0.0);

  const Output s = run("compute " + a + " " + b + " --stats");
  REQUIRE(s.code == 0);
  const auto j = nlohmann::json::parse(s.out);
  CHECK(j["measure"] == "cdtw");
  CHECK(j["value"].get<double>() == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(j["n"] == 2);
  CHECK(j["m"] == 2);
  CHECK(j.contains("stats"));
  CHECK_FALSE(j.contains("path"));

  const std::string path_file = (dir.path / "path.json").string();
  const Output p = run("compute " + a + " " + b + " --path " + path_file);
  REQUIRE(p.code == 0);
  std::ifstream pf(path_file);
  const auto pj = nlohmann::json::parse(pf);
  CHECK(pj["points"].size() == 4);

  const Output csv = run("compute " + a + " " + b + " --format csv --measure dtw");
  CHECK(csv.code == 0);
  CHECK(csv.out == "measure,value,n,m\ndtw,1,2,2\n");

  const Output grid = run("compute " + a + " " + b + " --measure cdtw-grid --resolution 1");
  CHECK(nlohmann::json::parse(grid.out)["value"].get<double>() == doctest::Approx(0.5));

  SUBCASE("repeated runs print identical output") {
    CHECK(run("compute " + a + " " + b).out == run("compute " + a + " " + b).out);
  }
}

TEST_CASE("compute errors") {
  TempDir dir;
  const auto a = dir.write("a.csv", "0\n1\n");
  const auto bad = dir.write("bad.csv", "0\n1\nx\n");
  CHECK(run("compute " + a + " " + a + " --measure cdtw-grid").code == 2);
  CHECK(run("compute " + a).code == 2);
  CHECK(run("compute " + a + " " + a + " --measure nope").code == 2);
  const Output e = run_with_stderr("compute " + a + " " + bad);
  CHECK(e.code == 2);
  CHECK(e.out.find("bad.csv:3") != std::string::npos);
  CHECK(run("compute " + a + " " + (dir.path / "missing.csv").string()).code == 2);
  const auto ts = dir.write("ts.csv", "0,100\n1,101\n");
  const Output w = run_with_stderr("compute " + a + " " + ts);
  CHECK(w.code == 0);
  CHECK(w.out.find("warning") != std::string::npos);
}

TEST_CASE("matrix") {
  TempDir dir;
  fs::create_directories(dir.path / "m");
  std::ofstream(dir.path / "m" / "b.csv") << "0\n1\n";
  std::ofstream(dir.path / "m" / "a.csv") << "0\n1\n";
  std::ofstream(dir.path / "m" / "c.csv") << "0\n1\n";
  const Output r = run("matrix " + (dir.path / "m").string() + " --jobs 2");
  REQUIRE(r.code == 0);
  const auto rows = read_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"name", "a.csv", "b.csv", "c.csv"});
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) CHECK(rows[i][j] == "0");

  fs::create_directories(dir.path / "pair");
  std::ofstream(dir.path / "pair" / "p.csv") << "0\n1\n";
  std::ofstream(dir.path / "pair" / "q.csv") << "0.5\n1.5\n";
  const std::string out = (dir.path / "pair.csv").string();
  REQUIRE(run("matrix " + (dir.path / "pair").string() + " --output " + out).code == 0);
  std::stringstream text;
  text << std::ifstream(out).rdbuf();
  const auto pr = read_csv(text.str());
  CHECK(std::stod(pr[1][2]) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(pr[1][2] == pr[2][1]);

  const Output d = run("matrix " + (dir.path / "pair").string() + " --measure dtw");
  CHECK(read_csv(d.out)[1][2] == "1");

  fs::create_directories(dir.path / "one");
  std::ofstream(dir.path / "one" / "x.csv") << "0\n1\n";
  CHECK(run("matrix " + (dir.path / "one").string()).code == 2);
}

TEST_CASE("oracle-check") {
  TempDir dir;
  const auto a = dir.write("a.csv", "0\n1\n");
  const auto b = dir.write("b.csv", "0.5\n1.5\n");
  const Output r = run("oracle-check " + a + " " + b);
  CHECK(r.code == 0);
  const auto rows = read_csv(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"resolution", "grid", "gap"});
  for (int k = 1; k <= 4; ++k) CHECK(std::stod(rows[k][2]) >= 0.0);
  CHECK(std::stod(rows[4][2]) <= 0.02);

  const Output same = run("oracle-check " + a + " " + a);
  CHECK(same.code == 0);
  for (const auto& row : read_csv(same.out))
    if (row[0] != "resolution" && row[0] != "exact") CHECK(std::stod(row[2]) == 0.0);

  CHECK(run("oracle-check " + a + " " + b + " --resolutions 64,16").code == 2);
  CHECK(run("oracle-check " + a + " " + b + " --resolutions 1 --tol-abs 0 --tol-rel 0").code == 4);
}

TEST_CASE("heatmap") {
  TempDir dir;
  const auto a = dir.write("a.csv", "0\n1\n");
  const auto b = dir.write("b.csv", "0.5\n1.5\n");
  const std::string prefix = (dir.path / "hm").string();
  REQUIRE(run("heatmap " + a + " " + b + " --out " + prefix + " --samples 11").code == 0);
  std::stringstream h, p, v;
  h << std::ifstream(prefix + "_height.csv").rdbuf();
  p << std::ifstream(prefix + "_path.csv").rdbuf();
  v << std::ifstream(prefix + "_valleys.csv").rdbuf();
  CHECK(read_csv(h.str()).size() == 1 + 11 * 11);
  const auto path = read_csv(p.str());
  REQUIRE(path.size() == 5);
  CHECK(path[2] == std::vector<std::string>{"0.5", "0", "valley"});
  CHECK(path[4][0] == "1");
  CHECK(read_csv(v.str()).size() == 2);

  CHECK(run("heatmap " + a + " " + b + " --samples 0 --out " + prefix).code == 2);
  CHECK(run("heatmap " + a + " " + b + " --out /nonexistent/dir/hm").code == 2);
}
