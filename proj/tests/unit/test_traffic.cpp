#include <doctest.h>

#include <stdexcept>

#include "bbt/time.hpp"
#include "bbt/traffic.hpp"

using namespace bbt;

TEST_CASE("flow rate doubles bits times frequency") {
  CHECK(flow_rate(8, 25'000'000) == 400'000'000);
  CHECK(flow_rate(1, 1) == 2);
  CHECK(flow_rate(16, 30'720'000) == 983'040'000);
  CHECK_THROWS_AS(flow_rate(0, 1'000'000), std::invalid_argument);
  CHECK_THROWS_AS(flow_rate(8, 0), std::invalid_argument);
  CHECK_THROWS_AS(flow_rate(8, -5), std::invalid_argument);
}

TEST_CASE("inter-arrival time in picoseconds") {
  // 1492-byte payload at 400 Mb/s
  CHECK(inter_arrival(11'936, 400'000'000) == 29'840'000);
  // 1 KB packet on a 1 Gb/s flow
  CHECK(inter_arrival(8'000, 1'000'000'000) == 8'000'000);
  CHECK(inter_arrival(1, 1) == kPsPerSec);
  // 1.5 Gb/s flow rounds half-up once
  CHECK(inter_arrival(8'000, 1'500'000'000) == 5'333'333);
  CHECK_THROWS_AS(inter_arrival(0, 100), std::invalid_argument);
  CHECK_THROWS_AS(inter_arrival(100, 0), std::invalid_argument);
}

TEST_CASE("transport deadline subtracts processing") {
  CHECK(transport_deadline(4 * kPsPerUs, 2 * kPsPerUs) == 2 * kPsPerUs);
  CHECK(transport_deadline(2 * kPsPerMs, 1'400'000'000) == 600'000'000);
  CHECK(transport_deadline(12'345, 0) == 12'345);
  CHECK_THROWS_AS(transport_deadline(kPsPerUs, kPsPerUs), std::invalid_argument);
  CHECK_THROWS_AS(transport_deadline(kPsPerUs, 2 * kPsPerUs), std::invalid_argument);
}

TEST_CASE("period shrinks strictly as quantization grows") {
  const std::int64_t b = 8'000;
  const std::int64_t f = 25'000'000;
  time_ps prev = inter_arrival(b, flow_rate(1, f));
  for (int q = 2; q <= 16; ++q) {
    const time_ps cur = inter_arrival(b, flow_rate(q, f));
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("seconds conversion rounds half-up") {
  CHECK(ps_from_seconds(1.5e-12) == 2);
  CHECK(ps_from_seconds(1.4e-12) == 1);
  CHECK(ps_from_seconds(0.0) == 0);
  CHECK_THROWS_AS(ps_from_seconds(-1.0), std::invalid_argument);
}

TEST_CASE("radio flow constructors derive and validate") {
  const radio_flow f = make_radio_flow(3, 25'000'000, 8, 8'000, 4 * kPsPerUs, 1);
  CHECK(f.rate == 400'000'000);
  CHECK(f.period() == 20'000'000);
  CHECK(f.has_sampling_params());
  const radio_flow r = make_rate_flow(4, 1'000'000'000, 8'000, 8 * kPsPerUs, 0);
  CHECK(!r.has_sampling_params());
  CHECK(r.period() == 8'000'000);
  CHECK_THROWS_AS(make_rate_flow(0, 0, 8'000, 1, 0), std::invalid_argument);
}
