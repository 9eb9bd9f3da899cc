#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bbt/time.hpp"
#include "bbt/traffic.hpp"

namespace bbt {

/// Flows competing for one link. All entries share the same transmission
/// time C (the network packet size is fixed). For fixed-priority tests the
/// list order encodes priority: index 0 is highest.
struct flow_set {
  std::vector<traffic_spec> flows;
  /// Worst lower-priority transmission blocking a non-preemptive start.
  /// Defaults to the common tx time; larger when a background source with
  /// bigger packets shares the link.
  std::optional<time_ps> np_blocking;

  time_ps tx_time() const;  // the common C; throws if the set is malformed
};

enum class horizon_kind { none, busy_period, hyperperiod };

/// Where a test condition failed. EDF verdicts carry the time instant at
/// which the demand expression exceeds 1; fixed-priority verdicts carry the
/// (flow index, job index) whose level function stays above 1.
struct sched_witness {
  time_ps instant = 0;
  int flow = -1;
  std::int64_t job = 0;
};

struct sched_verdict {
  bool schedulable = false;
  std::optional<sched_witness> witness;
  /// Set when the check horizon could not be bounded (utilization at or
  /// above 1, or the job-count cap was hit); reported as unschedulable.
  bool overload = false;
  horizon_kind horizon = horizon_kind::none;
};

struct sched_limits {
  time_ps hyperperiod_cap = 10 * kPsPerSec;
  std::int64_t job_cap = 10'000;
  std::int64_t point_cap = 20'000'000;
};

/// Deadline-driven (EDF) schedulability on one link, with or without
/// preemption. The demand conditions quantify over all t > 0 (t >= d_min
/// without preemption); between consecutive deadline instants the demand
/// expression is constant over t and scaled by C/t, so each interval's
/// supremum sits just after its left endpoint. The test enforces that
/// supremum at every deadline instant up to the check horizon and, on
/// failure, reports an interior instant where the expression itself
/// exceeds 1.
sched_verdict edf_test(const flow_set& fs, bool preemptive,
                       const sched_limits& limits = {});

/// Fixed-priority schedulability on one link (sufficient condition): for
/// every flow m, every job k in the synchronous level-m busy period must
/// have its level function W_m(k, (k-1)T_m + d_m) <= 1.
sched_verdict fixed_priority_test(const flow_set& fs, bool preemptive,
                                  const sched_limits& limits = {});

/// Shortest period first (stable for ties): rate-monotonic priority order.
flow_set rate_monotonic_order(flow_set fs);

/// Literal evaluation of the EDF demand expression
///   (C/t) * (blocking + sum_i ceil((t - d_i)/T_i)^+)
/// used to re-check unschedulability witnesses. `blocking` is 1 for the
/// non-preemptive variant and 0 otherwise.
double edf_expression(const flow_set& fs, bool preemptive, time_ps t);

/// W_m(k, x) evaluated at x = (k-1)T_m + d_m: the minimum over candidate
/// instants of the level-m demand ratio, for witness re-checks. Flow index
/// is zero-based in priority order.
double fixed_priority_level(const flow_set& fs, bool preemptive, int flow,
                            std::int64_t job);

/// Synchronous busy-period length (least fixed point of the cumulative
/// demand); nullopt when the iteration exceeds `cap` (utilization >= 1).
std::optional<time_ps> busy_period(const flow_set& fs, bool preemptive,
                                   time_ps cap);

/// lcm of all periods; nullopt when it exceeds `cap`.
std::optional<time_ps> hyperperiod(const flow_set& fs, time_ps cap);

}  // namespace bbt
