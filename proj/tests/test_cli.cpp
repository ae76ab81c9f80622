// End-to-end tests for the command-line tool: output schemas, numeric fields,
// determinism, exit codes.  The binary path is injected by the build as
// KWIDTHS_CLI_PATH.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef KWIDTHS_CLI_PATH
#error "KWIDTHS_CLI_PATH must point at the built CLI binary"
#endif

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(KWIDTHS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("theta subcommand emits schema-1 JSON with the exact root", "[cli]") {
  const auto r = run_cli("theta --q 0.5 --beta 0 --n 3");
  REQUIRE(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("schema").get<std::string>() == "1");
  CHECK(doc.at("command").get<std::string>() == "theta");
  CHECK(doc.at("q").get<double>() == 0.5);
  CHECK(doc.at("n").get<int>() == 3);
  // beta = 0 pins the root at exactly one half.
  CHECK(doc.at("theta").get<double>() == 0.5);
  CHECK(std::abs(doc.at("residual").get<double>()) < 1e-12);
}

TEST_CASE("threshold subcommand reports the certified index for q = 0.5", "[cli]") {
  const auto r = run_cli("threshold --q 0.5 --kind nqstar");
  REQUIRE(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("kind").get<std::string>() == "nq_star");
  CHECK(doc.at("n").get<long long>() == 963);
  CHECK(doc.at("lhs_at_n").get<double>() <= doc.at("rhs").get<double>());

  const auto r2 = run_cli("threshold --q 0.5");
  REQUIRE(r2.exit_code == 0);
  const auto doc2 = nlohmann::json::parse(r2.out);
  CHECK(doc2.at("kind").get<std::string>() == "nq");
  CHECK(doc2.at("n").get<long long>() == 969);
}

TEST_CASE("width subcommand matches the closed form at beta = 1", "[cli]") {
  const auto r = run_cli("width --q 0.5 --beta 1 --n 4");
  REQUIRE(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const double expected = (4.0 / M_PI) * std::atanh(0.0625);
  CHECK(doc.at("value").get<double>() ==
        Catch::Approx(expected).epsilon(1e-13));
  CHECK(doc.at("theta").get<double>() == 0.0);
  // n = 4 sits far below the certified range for q = 0.5.
  CHECK(doc.at("certified").get<std::string>() == "no");
}

TEST_CASE("cvd-check reports opposite-sign determinants at the defaults", "[cli]") {
  const auto r = run_cli("cvd-check");
  REQUIRE(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("q").get<double>() == 0.21);
  const double d1 = doc.at("first").at("value").get<double>();
  const double d2 = doc.at("second").at("value").get<double>();
  CHECK(d1 < 0.0);
  CHECK(d2 > 0.0);
  CHECK(doc.at("first").at("error_bound").get<double>() < std::abs(d1));
  CHECK(doc.at("second").at("error_bound").get<double>() < std::abs(d2));
  CHECK(doc.at("signs_certified").get<bool>());
  CHECK(doc.at("not_cvd").get<bool>());
}

TEST_CASE("repeated runs produce byte-identical output", "[cli][determinism]") {
  const std::string args = "gamma-report --q 0.3 --beta 1 --n 36 --k 5";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
}

TEST_CASE("sweep emits one CSV row per grid point in deterministic order", "[cli][sweep]") {
  const auto r = run_cli(
      "sweep width --grid-q 0.1:0.9:0.1 --grid-beta 0,1 --grid-n 1:16 --output csv");
  REQUIRE(r.exit_code == 0);
  const auto lines = split_lines(r.out);
  // Header plus 9 q-values x 2 betas x 16 n-values.
  REQUIRE(lines.size() == 1 + 9 * 2 * 16);
  CHECK(lines[0] == "q,beta,n,value,mantissa,log_value,theta,error");
  // Rows are ordered q-major, then beta, then n: row 1 is (0.1, 0, 1).
  CHECK(lines[1].rfind("0.1,0,1,", 0) == 0);
  // The first field of the last row is the largest q.
  CHECK(lines.back().rfind("0.9", 0) == 0);
  // Spot-check one row numerically: (q=0.5, beta=1, n=4).
  bool found = false;
  for (const auto& line : lines) {
    if (line.rfind("0.5,1,4,", 0) == 0) {
      found = true;
      const auto pos = line.find(",1,4,") + 5;
      const double value = std::stod(line.substr(pos));
      CHECK(value == Catch::Approx((4.0 / M_PI) * std::atanh(0.0625)).epsilon(1e-12));
    }
  }
  CHECK(found);
}

TEST_CASE("sweep threshold grid reproduces the certified table", "[cli][sweep]") {
  const auto r = run_cli("sweep threshold --grid-q 0.25:0.45:0.05 --output csv");
  REQUIRE(r.exit_code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "q,n_q,n_q_star,error");
  CHECK(lines[1] == "0.25,16,16,");
  CHECK(lines[4] == "0.4,120,120,");
}

TEST_CASE("usage errors exit with status 2", "[cli][exit]") {
  CHECK(run_cli("theta --q 0.5 --beta 0 --n 3 --no-such-flag").exit_code == 2);
  CHECK(run_cli("no-such-subcommand").exit_code == 2);
  CHECK(run_cli("theta --q 0.5 --beta 0").exit_code == 2);   // missing required --n
  CHECK(run_cli("theta --q 1.5 --beta 0 --n 3").exit_code == 2);  // q out of range
}

TEST_CASE("computation failures exit with status 1", "[cli][exit]") {
  // n ln(1/q) far beyond the representable envelope.
  const auto r = run_cli("gamma-report --q 0.1 --beta 0 --n 888");
  CHECK(r.exit_code == 1);
}

TEST_CASE("reproduce-paper fails only on the known discrepant bound", "[cli][reproduce]") {
  const auto r = run_cli("reproduce-paper");
  CHECK(r.exit_code == 1);
  const auto lines = split_lines(r.out);
  int pass = 0, fail = 0;
  std::string fail_line;
  for (const auto& line : lines) {
    if (line.rfind("PASS", 0) == 0) ++pass;
    if (line.rfind("FAIL", 0) == 0) {
      ++fail;
      fail_line = line;
    }
  }
  CHECK(pass == 14);
  CHECK(fail == 1);
  // The one failing check is the first determinant of the beta = 1 pattern,
  // whose computed value is reproducibly smaller in magnitude than the
  // published bound.
  CHECK(fail_line.find("beta=1") != std::string::npos);
  CHECK(fail_line.find("x(1)") != std::string::npos);
}

TEST_CASE("verify-cy2n reports an alternating certificate", "[cli]") {
  const auto r = run_cli("verify-cy2n --q 0.15 --beta 0 --n 6");
  REQUIRE(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("conforms").get<bool>());
  const auto signs = doc.at("signs").get<std::vector<int>>();
  REQUIRE(signs.size() == 12);
  for (size_t i = 0; i + 1 < signs.size(); ++i) CHECK(signs[i] == -signs[i + 1]);
}
