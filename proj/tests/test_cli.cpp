#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

using json = nlohmann::json;

struct Run {
  std::string out;
  int rc = -1;
};

Run run(const std::string& args) {
  std::string cmd = std::string(MHF_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  Run r;
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& rel) { return std::string(MHF_DATA_DIR) + "/" + rel; }

std::vector<json> lines(const std::string& s) {
  std::vector<json> out;
  std::istringstream is(s);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

TEST(Cli, GroupInfo) {
  auto r = run("group-info --group S3");
  ASSERT_EQ(r.rc, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["class_count"], 3);
  std::vector<int> dims;
  for (const auto& ch : j["characters"]) dims.push_back(ch["dim"].get<int>());
  EXPECT_EQ(dims, (std::vector<int>{1, 1, 2}));
  EXPECT_EQ(j["classes"][2]["eta"], "1/4");
  auto z2 = json::parse(run("group-info --group " + data("groups/z2_table.json")).out);
  EXPECT_EQ(z2["class_count"], 2);
  EXPECT_EQ(json::parse(run("group-info --group " + data("groups/s3.json")).out)["class_count"], 3);
  EXPECT_EQ(run("group-info --group " + data("groups/bad_row.json")).rc, 2);
  EXPECT_EQ(run("group-info --group " + data("groups/not_associative.json")).rc, 2);
  EXPECT_EQ(run("group-info --group Z5").rc, 2);
  EXPECT_EQ(run("group-info").rc, 2);
}

TEST(Cli, Faces) {
  auto torus = json::parse(run("faces --map " + data("maps/torus.json")).out);
  EXPECT_EQ(torus["faces"], 1);
  EXPECT_EQ(torus["euler_characteristic"], 0);
  auto theta = json::parse(run("faces --map " + data("maps/theta.json")).out);
  EXPECT_EQ(theta["faces"], 3);
  EXPECT_EQ(theta["face_cycles"].size(), 3u);
  auto klein = json::parse(run("faces --map " + data("maps/klein.json")).out);
  EXPECT_EQ(klein["orientable"], false);
  EXPECT_EQ(klein["euler_characteristic"], 0);
  auto sphere = json::parse(run("faces --map " + data("maps/three_holed_sphere.json")).out);
  EXPECT_EQ(sphere["boundary_components"], 3);
  EXPECT_EQ(run("faces --map " + data("maps/bad_alpha.json")).rc, 2);
  EXPECT_EQ(run("faces --map /nonexistent.json").rc, 2);
}

TEST(Cli, PartitionRoutesAgree) {
  for (const char* m : {"torus", "torus_two_faces", "klein", "projective"}) {
    auto r = run(std::string("partition --group S3 --map ") + data("maps/") + m + ".json");
    ASSERT_EQ(r.rc, 0) << m;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["route"], "graph");
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_NEAR(j["lhs"].get<double>(), j["rhs"].get<double>(), 1e-12);
  }
  auto f = json::parse(run("partition --group S3 --surface " + data("surfaces/torus.json")).out);
  auto g = json::parse(run("partition --group S3 --surface " + data("surfaces/torus.json") + " --via graph").out);
  EXPECT_NEAR(f["value"].get<double>(), g["value"].get<double>(), 1e-12);
  auto disk = run("partition --group S3 --levy " + data("levy/s3_transpositions.json") + " --map " + data("maps/disk.json") +
                  " --surface " + data("surfaces/s3_disk_transposition.json"));
  EXPECT_EQ(disk.rc, 0);
  // Z2 torus at t = 1: 1 + e^{-2}
  auto z2 = json::parse(run("partition --group Z2 --surface " + data("surfaces/torus.json") + " --time 1").out);
  EXPECT_NEAR(z2["value"].get<double>(), 1.1353352832366128, 1e-12);
}

TEST(Cli, PartitionErrors) {
  EXPECT_EQ(run("partition --group Z3 --levy " + data("levy/z3_one_sided.json") + " --surface " + data("surfaces/projective.json")).rc, 2);
  EXPECT_EQ(run("partition --group S3 --levy " + data("levy/s3_three_cycles.json") + " --surface " + data("surfaces/torus.json")).rc, 2);
  EXPECT_EQ(run("partition --group S3 --map " + data("maps/torus.json") + " --surface " + data("surfaces/klein.json")).rc, 2);
  EXPECT_EQ(run("partition --group S3 --map " + data("maps/disk.json")).rc, 2);
  EXPECT_EQ(run("partition --group S4 --map " + data("maps/torus_two_faces.json") + " --cap 10").rc, 3);
  EXPECT_EQ(run("partition --group S3 --surface " + data("surfaces/torus.json") + " --via magic").rc, 2);
  EXPECT_EQ(run("partition --group S3 --surface " + data("surfaces/torus.json") + " --tol -1").rc, 2);
}

TEST(Cli, CsvOutput) {
  auto r = run("partition --group S3 --surface " + data("surfaces/torus.json") + " --format csv");
  ASSERT_EQ(r.rc, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "command,lhs,rhs,max_abs_diff,pass");
}

TEST(Cli, VerifySuites) {
  auto a = run("verify all --group S3");
  ASSERT_EQ(a.rc, 0);
  auto j = json::parse(a.out);
  EXPECT_EQ(j["suites"].size(), 7u);
  for (const auto& s : j["suites"]) EXPECT_TRUE(s["pass"].get<bool>()) << s["suite"];
  EXPECT_EQ(run("verify all --group S3").out, a.out);
  EXPECT_EQ(run("verify semigroup --group Z4").rc, 0);
  EXPECT_EQ(run("verify tame --group S3 --perturb 0.01").rc, 1);
  EXPECT_EQ(run("verify holo-mono --group S3 --perturb 0.01").rc, 1);
  EXPECT_EQ(run("verify nonsense --group S3").rc, 2);
}

TEST(Cli, CoverEnumerateAndMass) {
  auto r = run("cover enumerate --group S3 --surface " + data("surfaces/sphere.json") + " -k 2");
  ASSERT_EQ(r.rc, 0);
  auto ls = lines(r.out);
  EXPECT_EQ(ls.size(), 5u);
  for (const auto& l : ls) EXPECT_EQ(l["d"].size(), 2u);
  auto t = run("cover enumerate --group S3 --levy " + data("levy/s3_transpositions.json") + " --surface " +
               data("surfaces/sphere.json") + " -k 2");
  int weighted = 0;
  for (const auto& l : lines(t.out))
    if (l["weight"].get<double>() > 0.0) ++weighted;
  EXPECT_EQ(weighted, 3);
  auto m = run("cover mass --group S3 --surface " + data("surfaces/torus.json"));
  EXPECT_EQ(m.rc, 0);
  EXPECT_TRUE(json::parse(m.out)["pass"].get<bool>());
  EXPECT_EQ(run("cover enumerate --group S3 --surface " + data("surfaces/torus.json") + " -k 9 --cap 1000").rc, 3);
}

TEST(Cli, CoverSampleIsSeeded) {
  const std::string args = "cover sample --group S3 --surface " + data("surfaces/torus.json") + " --count 25 --seed 7";
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.rc, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out).size(), 25u);
  auto c = run("cover sample --group S3 --surface " + data("surfaces/torus.json") + " --count 25 --seed 8");
  EXPECT_NE(a.out, c.out);
  auto mapped = run("cover sample --group S3 --map " + data("maps/torus_two_faces.json") + " --count 5 --seed 1");
  EXPECT_EQ(mapped.rc, 0);
  for (const auto& l : lines(mapped.out)) EXPECT_EQ(l["counts"].size(), 2u);
}

TEST(Cli, CoverHoloMono) {
  EXPECT_EQ(run("cover verify-holo-mono --group S3 --map " + data("maps/torus_two_faces.json")).rc, 0);
  EXPECT_EQ(run("cover verify-holo-mono --group S3 --map " + data("maps/three_holed_sphere.json") + " --surface " +
                data("surfaces/s3_three_holed_sphere.json"))
                .rc,
            0);
  EXPECT_EQ(run("cover verify-holo-mono --group S3 --map " + data("maps/torus_two_faces.json") + " --perturb 0.01").rc, 1);
  EXPECT_EQ(run("cover verify-holo-mono --group Z3 --levy " + data("levy/z3_one_sided.json") + " --map " +
                data("maps/projective.json"))
                .rc,
            2);
}

}  // namespace
