#include "bbt/traffic.hpp"

#include <stdexcept>

namespace bbt {

bits_per_sec flow_rate(std::int64_t quant_bits, std::int64_t sample_hz) {
  if (quant_bits < 1) throw std::invalid_argument("quantization width must be >= 1 bit");
  if (sample_hz <= 0) throw std::invalid_argument("sampling frequency must be positive");
  return 2 * quant_bits * sample_hz;
}

time_ps inter_arrival(std::int64_t payload_bits, bits_per_sec rate) {
  if (payload_bits <= 0) throw std::invalid_argument("payload size must be positive");
  if (rate <= 0) throw std::invalid_argument("flow rate must be positive");
  // B / R seconds, scaled to ps with one half-up rounding
  __int128 num = static_cast<__int128>(payload_bits) * kPsPerSec;
  __int128 den = rate;
  __int128 q = (num * 2 + den) / (den * 2);
  return static_cast<time_ps>(q);
}

time_ps transport_deadline(time_ps protocol_deadline, time_ps processing_time) {
  if (processing_time < 0 || protocol_deadline <= 0) {
    throw std::invalid_argument("deadlines must be positive, processing time non-negative");
  }
  if (processing_time >= protocol_deadline) {
    throw std::invalid_argument("processing time leaves no transport budget");
  }
  return protocol_deadline - processing_time;
}

radio_flow make_radio_flow(int id, std::int64_t sample_hz, int quant_bits,
                           std::int64_t payload_bits, time_ps deadline, int edge) {
  radio_flow f;
  f.id = id;
  f.sample_hz = sample_hz;
  f.quant_bits = quant_bits;
  f.rate = flow_rate(quant_bits, sample_hz);
  f.payload_bits = payload_bits;
  f.deadline = deadline;
  f.edge = edge;
  if (payload_bits <= 0) throw std::invalid_argument("payload size must be positive");
  if (deadline <= 0) throw std::invalid_argument("deadline must be positive");
  return f;
}

radio_flow make_rate_flow(int id, bits_per_sec rate, std::int64_t payload_bits,
                          time_ps deadline, int edge) {
  radio_flow f;
  f.id = id;
  f.rate = rate;
  f.payload_bits = payload_bits;
  f.deadline = deadline;
  f.edge = edge;
  if (rate <= 0) throw std::invalid_argument("flow rate must be positive");
  if (payload_bits <= 0) throw std::invalid_argument("payload size must be positive");
  if (deadline <= 0) throw std::invalid_argument("deadline must be positive");
  return f;
}

}  // namespace bbt
