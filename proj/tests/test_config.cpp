#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "relq/config.hpp"
#include "relq/csv.hpp"

using namespace relq;

namespace {

const char* kSingle = R"(
[dynamics]
A = 0
B = 1
C = 0
D = 1
[cost]
L = 1
S = 0
R = 1
[robust]
family = single
rho = 2
alpha = 0.5
[solver]
x0 = 1
paths = 500
dt = 0.001
seed = 42
)";

}  // namespace

TEST_CASE("single-family config parses") {
  const auto rc = parse_config(kSingle, "inline");
  CHECK(rc.family == "single");
  CHECK(rc.problem.rho == 2.0);
  CHECK(rc.problem.alpha == 0.5);
  CHECK(rc.x0 == 1.0);
  CHECK(rc.sim.n_paths == 500);
  CHECK(rc.sim.seed == 42);
  CHECK_FALSE(rc.horizon_set);
  const auto& tp = std::get<TwoPointFamily>(rc.problem.family);
  CHECK(tp.theta1.B == 1.0);
  CHECK(tp.theta1.D == 1.0);
  CHECK(tp.theta2.B == 1.0);  // single: both scenarios identical
}

TEST_CASE("two-point config parses two values per field") {
  const std::string text = R"(
[dynamics]
A = 0.1 -0.2
B = 1 1
[cost]
L = 1 2
R = 1 1
[robust]
family = two_point
rho = 3
alpha = 1
lambda = 0.5
)";
  const auto rc = parse_config(text, "inline");
  const auto& tp = std::get<TwoPointFamily>(rc.problem.family);
  CHECK(tp.theta1.A == 0.1);
  CHECK(tp.theta2.A == -0.2);
  CHECK(tp.theta1.L == 1.0);
  CHECK(tp.theta2.L == 2.0);
  CHECK(tp.theta2.B == 1.0);
  CHECK(rc.lambda == 0.5);
}

TEST_CASE("uniform config parses polynomial coefficient lists") {
  const std::string text = R"(
[dynamics]
A = 0 1     ; A(theta) = theta
B = 1
D = 1
[cost]
L = 1 0.5
R = 1
[robust]
family = uniform
rho = 4
alpha = 1
a1 = 0.5
a2 = 1
)";
  const auto rc = parse_config(text, "inline");
  const auto& fam = std::get<UniformPolyFamily>(rc.problem.family);
  CHECK(fam.A(0.5) == doctest::Approx(0.5));
  CHECK(fam.L(1.0) == doctest::Approx(1.5));
  CHECK(fam.a1 == 0.5);
  CHECK(fam.a2 == 1.0);
}

TEST_CASE("config errors carry field context") {
  const std::string bad_r = R"(
[cost]
R = -1
[robust]
family = single
rho = 1
alpha = 1
)";
  CHECK_THROWS_WITH_AS(parse_config(bad_r, "inline"),
                       doctest::Contains("R must be > 0"), ConfigError);

  CHECK_THROWS_WITH_AS(parse_config("[robust]\nalpha = 1\n", "inline"),
                       doctest::Contains("rho"), ConfigError);

  CHECK_THROWS_WITH_AS(
      parse_config("[robust]\nfamily = gaussian\nrho = 1\nalpha = 1\n",
                   "inline"),
      doctest::Contains("family"), ConfigError);

  CHECK_THROWS_WITH_AS(parse_config("A = 1\n", "inline"),
                       doctest::Contains("outside any section"), ConfigError);

  CHECK_THROWS_WITH_AS(parse_config("[dynamics]\nA = abc\n[robust]\nrho=1\nalpha=1\nfamily=single\n",
                                    "inline"),
                       doctest::Contains("cannot parse"), ConfigError);
}

TEST_CASE("run ids are deterministic and input-sensitive") {
  const auto a = run_id("cfg", "solve", 1);
  CHECK(a == run_id("cfg", "solve", 1));
  CHECK(a != run_id("cfg", "solve", 2));
  CHECK(a != run_id("cfg2", "solve", 1));
  CHECK(a != run_id("cfg", "verify", 1));
  CHECK(a.size() == 16);
}

TEST_CASE("csv formatting") {
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
