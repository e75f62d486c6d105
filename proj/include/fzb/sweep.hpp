#pragma once

// Batch evaluation of topological charges over a grid of matrix sizes, one
// row per (fiber spin, branch, size) point, plus CSV serialization of the
// resulting table.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fzb/chern.hpp"

namespace fzb {

enum class SweepFormat { Csv, Json };

/// Grid description for a charge sweep. two_nu_list entries are doubled
/// fiber spins and must be positive; two_N_max bounds the doubled base spin
/// and must leave room for at least one valid point per series. output_path
/// and format are carried for the caller that serializes the table, the
/// sweep itself only fills records.
struct SweepConfig {
  std::vector<int> two_nu_list;
  std::vector<Branch> branches{Branch::Plus, Branch::Minus};
  int two_N_max = 0;
  bool allow_half_integer_n = false;
  double tolerance = 1e-9;
  int workers = 1;
  std::string output_path;
  SweepFormat format = SweepFormat::Csv;
};

/// One sweep row. inv_N = 2/two_N = 1/N is the natural abscissa for the
/// large-N limit, where c1 approaches k_limit.
struct ChargeRecord {
  int two_N = 0;
  int two_nu = 0;
  Branch branch = Branch::Plus;
  double inv_N = 0.0;
  double q = 0.0;
  double c1 = 0.0;
  int k_limit = 0;
  double max_residual = 0.0;
};

struct SweepResult {
  std::vector<ChargeRecord> records;
  bool within_tolerance = true;
  double worst_residual = 0.0;
};

inline ChargeRecord charge_record_from(const ChargeReport& report) {
  ChargeRecord rec;
  rec.two_N = report.two_N.value();
  rec.two_nu = report.two_nu.value();
  rec.branch = report.branch;
  rec.inv_N = 2.0 / report.two_N.value();
  rec.q = report.q;
  rec.c1 = report.c1;
  rec.k_limit = report.k_limit;
  rec.max_residual = report.max_residual();
  return rec;
}

namespace detail {

struct SweepPoint {
  int two_N;
  int two_nu;
  Branch branch;
};

inline std::vector<SweepPoint> sweep_grid(const SweepConfig& config) {
  // Integer spins only by default: even two_N starting at 2. Half-integer
  // mode walks every doubled value starting at 1. The minus branch needs
  // two_N > two_nu and silently skips the sizes below that threshold.
  const int start = config.allow_half_integer_n ? 1 : 2;
  const int step = config.allow_half_integer_n ? 1 : 2;
  std::vector<SweepPoint> points;
  for (int two_nu : config.two_nu_list)
    for (Branch branch : config.branches)
      for (int two_N = start; two_N <= config.two_N_max; two_N += step) {
        if (branch == Branch::Minus && two_N <= two_nu) continue;
        points.push_back({two_N, two_nu, branch});
      }
  return points;
}

inline void validate_sweep_config(const SweepConfig& config) {
  if (config.two_nu_list.empty())
    throw DomainError("sweep: two_nu_list must be nonempty");
  int max_two_nu = 0;
  for (int two_nu : config.two_nu_list) {
    if (two_nu < 1)
      throw DomainError("sweep: fiber spins must be positive, got two_nu = " +
                        std::to_string(two_nu));
    max_two_nu = std::max(max_two_nu, two_nu);
  }
  if (config.branches.empty())
    throw DomainError("sweep: branch list must be nonempty");
  if (config.two_N_max < max_two_nu + 1)
    throw DomainError("sweep: two_N_max = " + std::to_string(config.two_N_max) +
                      " leaves no valid points (need at least " +
                      std::to_string(max_two_nu + 1) + ")");
  if (!(config.tolerance > 0.0))
    throw DomainError("sweep: tolerance must be positive");
  if (config.workers < 1)
    throw DomainError("sweep: workers must be at least 1");
}

}  // namespace detail

/// Evaluates the charge pipeline at every grid point and returns the table
/// sorted by (two_nu, branch, two_N) with plus before minus. Points are
/// independent, so they are distributed over `workers` threads; the result
/// does not depend on the worker count.
inline SweepResult run_sweep(const SweepConfig& config) {
  detail::validate_sweep_config(config);
  const std::vector<detail::SweepPoint> points = detail::sweep_grid(config);

  std::vector<ChargeRecord> records(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        const detail::SweepPoint& pt = points[i];
        records[i] = charge_record_from(
            chern_number(TwoJ(pt.two_N), TwoJ(pt.two_nu), pt.branch));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const int workers =
      static_cast<int>(std::min<std::size_t>(config.workers, points.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::sort(records.begin(), records.end(),
            [](const ChargeRecord& a, const ChargeRecord& b) {
              if (a.two_nu != b.two_nu) return a.two_nu < b.two_nu;
              if (a.branch != b.branch) return a.branch == Branch::Plus;
              return a.two_N < b.two_N;
            });

  SweepResult result;
  result.records = std::move(records);
  for (const ChargeRecord& rec : result.records)
    result.worst_residual = std::max(result.worst_residual, rec.max_residual);
  result.within_tolerance = result.worst_residual <= config.tolerance;
  return result;
}

namespace detail {

inline std::string shortest_double(double x) {
  // %.17g always round-trips a double; no std::format on this toolchain.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

inline std::string to_csv(const std::vector<ChargeRecord>& records) {
  std::string out = "two_N,two_nu,branch,inv_N,q,c1,k_limit,max_residual\n";
  for (const ChargeRecord& rec : records) {
    out += std::to_string(rec.two_N);
    out += ',';
    out += std::to_string(rec.two_nu);
    out += ',';
    out += to_string(rec.branch);
    out += ',';
    out += detail::shortest_double(rec.inv_N);
    out += ',';
    out += detail::shortest_double(rec.q);
    out += ',';
    out += detail::shortest_double(rec.c1);
    out += ',';
    out += std::to_string(rec.k_limit);
    out += ',';
    out += detail::shortest_double(rec.max_residual);
    out += '\n';
  }
  return out;
}

inline std::string to_csv(const SweepResult& result) {
  return to_csv(result.records);
}

}  // namespace fzb
