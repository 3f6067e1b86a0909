#include <random>
#include <sstream>

#include "doctest.h"
#include "qlab/errors.hpp"
#include "qlab/state_io.hpp"
#include "test_support.hpp"

using namespace qlab;

TEST_CASE("state csv roundtrip reproduces every value") {
  std::mt19937_64 rng(3);
  const auto g = GridSpec::make(16, 2.5);
  const auto values = test::random_complex(g.size(), rng);
  std::stringstream ss;
  write_state_csv(ss, g, "Q,q", 0.125, values);

  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  CHECK(header == "# grid n=16 L=2.5 axes=Q,q time=0.125");

  const auto rec = read_state_csv(ss);
  CHECK(rec.grid == g);
  CHECK(rec.axes == "Q,q");
  CHECK(rec.time == 0.125);
  CHECK(max_abs_diff(rec.values, values) <= 1e-15);
}

TEST_CASE("state csv rejects malformed input") {
  SUBCASE("missing header") {
    std::stringstream ss("i,j,re,im\n0,0,1,0\n");
    CHECK_THROWS_AS(read_state_csv(ss), ConfigError);
  }
  SUBCASE("duplicate entry") {
    std::stringstream ss("# grid n=8 L=1 axes=x,p time=0\ni,j,re,im\n0,0,1,0\n0,0,2,0\n");
    CHECK_THROWS_AS(read_state_csv(ss), ConfigError);
  }
  SUBCASE("index out of range") {
    std::stringstream ss("# grid n=8 L=1 axes=x,p time=0\ni,j,re,im\n8,0,1,0\n");
    CHECK_THROWS_AS(read_state_csv(ss), ConfigError);
  }
  SUBCASE("bad number") {
    std::stringstream ss("# grid n=8 L=1 axes=x,p time=0\ni,j,re,im\n0,0,abc,0\n");
    CHECK_THROWS_AS(read_state_csv(ss), ConfigError);
  }
}
