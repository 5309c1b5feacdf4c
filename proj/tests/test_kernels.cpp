#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "relq/kernels.hpp"

using namespace relq::kernels;

namespace {

struct Block {
  std::vector<double> x, dw, cost;
};

Block random_block(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Block b;
  for (std::size_t i = 0; i < n; ++i) {
    b.x.push_back(nd(gen) * 3.0);
    b.dw.push_back(nd(gen) * 0.03);
    b.cost.push_back(nd(gen));
  }
  return b;
}

}  // namespace

TEST_CASE("scalar step kernel matches a hand-rolled loop") {
  const StepParams p{0.01, -0.002, 0.7, 0.1, 0.25};
  auto b = random_block(37, 1);
  auto ref = b;
  scalar_kernels().step(b.x.data(), b.dw.data(), b.x.size(), p);
  for (std::size_t i = 0; i < ref.x.size(); ++i) {
    const double xi = ref.x[i];
    const double diff = p.c * xi + p.d;
    const double want =
        xi + (p.a * xi + p.b) + std::sqrt(diff * diff + p.e) * ref.dw[i];
    CHECK(b.x[i] == want);
  }
}

TEST_CASE("scalar cost kernel matches a hand-rolled loop") {
  const CostParams p{0.5, -1.25, 2.0};
  const double w = 7.5e-4;
  auto b = random_block(41, 2);
  auto ref = b;
  scalar_kernels().cost(b.x.data(), b.cost.data(), b.x.size(), w, p);
  for (std::size_t i = 0; i < ref.x.size(); ++i) {
    const double xi = ref.x[i];
    CHECK(b.cost[i] == ref.cost[i] + w * ((p.ca * xi + p.cb) * xi + p.cc));
  }
}

TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
  if (!avx2_available()) {
    MESSAGE("AVX2 not available; skipping equivalence check");
    return;
  }
  const auto sk = scalar_kernels();
  const auto vk = avx2_kernels();
  const StepParams sp{0.013, -0.004, 0.9, -0.2, 0.33};
  const CostParams cp{1.7, 0.25, -0.5};
  // Sizes around the vector width boundary, including ragged tails.
  for (std::size_t n : {1u, 3u, 4u, 5u, 63u, 64u, 65u, 1024u, 1031u}) {
    auto a = random_block(n, static_cast<unsigned>(n));
    auto b = a;
    for (int rep = 0; rep < 50; ++rep) {
      sk.cost(a.x.data(), a.cost.data(), n, 1e-3, cp);
      vk.cost(b.x.data(), b.cost.data(), n, 1e-3, cp);
      sk.step(a.x.data(), a.dw.data(), n, sp);
      vk.step(b.x.data(), b.dw.data(), n, sp);
    }
    CHECK(std::memcmp(a.x.data(), b.x.data(), n * sizeof(double)) == 0);
    CHECK(std::memcmp(a.cost.data(), b.cost.data(), n * sizeof(double)) == 0);
  }
}

TEST_CASE("dispatch modes") {
  CHECK(std::string(get_kernels("scalar").name) == "scalar");
  if (avx2_available())
    CHECK(std::string(get_kernels("avx2").name) == "avx2");
  else
    CHECK_THROWS(get_kernels("avx2"));
  const auto k = get_kernels("auto");
  CHECK((std::string(k.name) == "scalar" || std::string(k.name) == "avx2"));
  CHECK_THROWS_AS(get_kernels("sse9"), std::invalid_argument);
}
