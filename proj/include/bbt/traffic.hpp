#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bbt/time.hpp"

namespace bbt {

/// Transport data rate of a radio sampling complex (I and Q) baseband
/// samples at `sample_hz` with `quant_bits` bits per component:
/// rate = 2 * Q * f, in bits/s. Rejects non-positive inputs.
bits_per_sec flow_rate(std::int64_t quant_bits, std::int64_t sample_hz);

/// Inter-packet arrival time for a fixed payload of `payload_bits` emitted
/// at `rate` bits/s, in picoseconds (round half-up). Rejects non-positive
/// inputs.
time_ps inter_arrival(std::int64_t payload_bits, bits_per_sec rate);

/// Transport delay budget left after subtracting the worst-case processing
/// time from the protocol deadline. Errors when no budget remains.
time_ps transport_deadline(time_ps protocol_deadline, time_ps processing_time);

/// A (period, deadline) pair with the packet transmission time on the link
/// under test. Deadlines may be smaller, equal to, or larger than the
/// period. Immutable value type.
struct traffic_spec {
  time_ps period = 0;
  time_ps deadline = 0;
  time_ps tx_time = 0;

  bool operator==(const traffic_spec&) const = default;
};

/// One radio source: either (sample_hz, quant_bits) with the rate derived,
/// or an explicit rate. `payload_bits` is the fixed network packet size B
/// (headers ignored); `deadline` is the end-to-end transport bound D.
struct radio_flow {
  int id = 0;
  std::int64_t sample_hz = 0;   // 0 when the rate is given directly
  int quant_bits = 0;           // 0 when the rate is given directly
  bits_per_sec rate = 0;        // 2*Q*f when derived
  std::int64_t payload_bits = 0;
  time_ps deadline = 0;
  int edge = 0;

  /// Inter-arrival period B / rate in ps.
  time_ps period() const { return inter_arrival(payload_bits, rate); }

  /// True when the flow carries (f, Q) so the rate can be recomputed for a
  /// different quantization width.
  bool has_sampling_params() const { return sample_hz > 0 && quant_bits > 0; }

  bool operator==(const radio_flow&) const = default;
};

/// Convenience constructor validating and deriving the rate from (f, Q).
radio_flow make_radio_flow(int id, std::int64_t sample_hz, int quant_bits,
                           std::int64_t payload_bits, time_ps deadline, int edge);

/// Convenience constructor for a rate-specified flow.
radio_flow make_rate_flow(int id, bits_per_sec rate, std::int64_t payload_bits,
                          time_ps deadline, int edge);

}  // namespace bbt
