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

TEST_CASE("eq_terms agrees with explicit equality") { expect(oracle::eq_terms_suite(101, 1000), 1000); }

TEST_CASE("first_diff agrees with a linear scan") { expect(oracle::first_diff_suite(102, 1000), 1000); }

TEST_CASE("occurs and first_var_index agree with scans") { expect(oracle::occurs_suite(103, 1000), 1000); }
