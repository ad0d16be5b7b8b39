#include "doctest.h"
#include "oracles.hpp"

namespace {

void expect(const oracle::Tally& t, std::size_t n) {
  INFO(t.summary());
  CHECK(t.instances >= n);
  CHECK(t.failures == 0);
  CHECK(t.bound_failures == 0);
}

}  // namespace

TEST_CASE("extractions agree with explicit terms") { expect(oracle::extraction_suite(201, 1000), 1000); }

TEST_CASE("preorder and hole grammars agree with traversals") { expect(oracle::traversal_suite(202, 500), 500); }

TEST_CASE("joint contexts agree on canonical dags") { expect(oracle::joint_suite(203, 1000), 1000); }

TEST_CASE("binding keeps Vdepth") { expect(oracle::vdepth_suite(204, 300), 300); }
