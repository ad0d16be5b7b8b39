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

TEST_CASE("unification agrees with Robinson") { expect(oracle::unify_suite(301, 1000), 1000); }

TEST_CASE("matching agrees with the explicit matcher") { expect(oracle::match_suite(302, 1000), 1000); }

TEST_CASE("context matching agrees with brute force") { expect(oracle::cmatch_suite(303, 1000), 1000); }

TEST_CASE("certificates survive round trips and reject tampering") { expect(oracle::certificate_suite(304, 200), 200); }
