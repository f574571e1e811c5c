#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <thread>
#include <vector>

#include "fmt/format.h"
#include "negosim/protocol.hpp"
#include "negosim/scenario.hpp"

namespace negosim {

struct JointPoint {
  Offer offer;  // lexicographically smallest offer reaching (u_a, u_b)
  double u_a = 0.0;
  double u_b = 0.0;
  std::vector<Offer> equivalent;  // every offer reaching (u_a, u_b), sorted

  double product() const { return u_a * u_b; }
};

// Non-dominated joint utilities sorted by u_a ascending (u_b descending).
struct ParetoFront {
  std::vector<JointPoint> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

namespace detail {

// Incremental 2-D skyline keyed by u_a. Invariant: u_b strictly decreases
// as u_a increases.
class Skyline {
 public:
  void insert(double ua, double ub, const Offer& x) {
    if (Entry* e = locate(ua, ub)) e->offers.push_back(x);
  }

  void insert(double ua, double ub, std::vector<Offer> offers) {
    if (Entry* e = locate(ua, ub))
      e->offers.insert(e->offers.end(), std::make_move_iterator(offers.begin()), std::make_move_iterator(offers.end()));
  }

  void merge(Skyline&& other) {
    for (auto& [ua, e] : other.points_) insert(ua, e.ub, std::move(e.offers));
  }

  ParetoFront finish() && {
    ParetoFront front;
    front.points.reserve(points_.size());
    for (auto& [ua, e] : points_) {
      std::sort(e.offers.begin(), e.offers.end());
      JointPoint p;
      p.offer = e.offers.front();
      p.u_a = ua;
      p.u_b = e.ub;
      p.equivalent = std::move(e.offers);
      front.points.push_back(std::move(p));
    }
    return front;
  }

 private:
  struct Entry {
    double ub;
    std::vector<Offer> offers;
  };

  // Entry that should receive offers with utilities (ua, ub), creating it
  // and evicting newly dominated points as needed; nullptr when dominated.
  Entry* locate(double ua, double ub) {
    auto it = points_.lower_bound(ua);
    if (it != points_.end() && it->first == ua) {
      if (it->second.ub > ub) return nullptr;
      if (it->second.ub == ub) return &it->second;
      it = points_.erase(it);
    }
    if (it != points_.end() && it->second.ub >= ub) return nullptr;
    it = points_.emplace_hint(it, ua, Entry{ub, {}});
    while (it != points_.begin()) {
      auto prev = std::prev(it);
      if (prev->second.ub > ub) break;
      points_.erase(prev);
    }
    return &it->second;
  }

  std::map<double, Entry> points_;
};

}  // namespace detail

// Exhaustive Pareto front of two utilities over their shared domain. The
// result does not depend on the number of worker threads.
inline ParetoFront enumerate_front(const WeightedConstraintUtility& a, const WeightedConstraintUtility& b,
                                   unsigned threads = 1) {
  if (!(a.domain() == b.domain())) throw DomainError("utilities are defined over different domains");
  const IssueDomain& d = a.domain();
  if (!d.enumerable())
    throw CapabilityError(fmt::format("Pareto front enumeration refused for {:.0f} offers (limit {:.0f})",
                                      d.cardinality(), kMaxEnumerableOffers));
  const auto total = static_cast<std::uint64_t>(d.cardinality());
  const SatisfactionMasks ma(d, a.constraints());
  const SatisfactionMasks mb(d, b.constraints());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(total, 64))));

  std::vector<detail::Skyline> parts(threads);
  auto work = [&](unsigned part) {
    const std::uint64_t first = total * part / threads;
    const std::uint64_t last = total * (part + 1) / threads;
    // Utilities of b are computed alongside a by a second odometer pass.
    std::vector<double> ub;
    ub.reserve(last - first);
    mb.for_each(first, last, [&](std::uint64_t, const Offer&, double raw) { ub.push_back(raw / b.max_raw()); });
    ma.for_each(first, last, [&](std::uint64_t i, const Offer& x, double raw) {
      parts[part].insert(raw / a.max_raw(), ub[i - first], x);
    });
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& t : pool) t.join();
  }
  for (unsigned t = 1; t < threads; ++t) parts[0].merge(std::move(parts[t]));
  return std::move(parts[0]).finish();
}

// Front point maximizing u_a * u_b; ties prefer the smaller |u_a - u_b|,
// then the lexicographically smaller offer.
inline const JointPoint& nash_point(const ParetoFront& front) {
  if (front.empty()) throw Error("nash_point of an empty front");
  const JointPoint* best = &front.points.front();
  for (const auto& p : front.points) {
    const double pp = p.product(), bp = best->product();
    if (pp > bp) {
      best = &p;
    } else if (pp == bp) {
      const double pg = std::abs(p.u_a - p.u_b), bg = std::abs(best->u_a - best->u_b);
      if (pg < bg || (pg == bg && p.offer < best->offer)) best = &p;
    }
  }
  return *best;
}

inline double joint_distance(double ua, double ub, const JointPoint& p) { return std::hypot(ua - p.u_a, ub - p.u_b); }

struct OutcomeMetrics {
  bool agreed = false;
  double u_a = std::numeric_limits<double>::quiet_NaN();
  double u_b = std::numeric_limits<double>::quiet_NaN();
  double dist_pareto = std::numeric_limits<double>::quiet_NaN();
  double dist_nash = std::numeric_limits<double>::quiet_NaN();
  int rounds = 0;
  std::int64_t samples_a = 0;
  std::int64_t samples_b = 0;
};

// Distances are measured in normalized joint-utility space and left NaN
// for failed negotiations.
inline OutcomeMetrics outcome_metrics(const Transcript& tr, const WeightedConstraintUtility& a,
                                      const WeightedConstraintUtility& b, const ParetoFront& front) {
  OutcomeMetrics m;
  m.rounds = tr.rounds();
  m.samples_a = tr.samples_a;
  m.samples_b = tr.samples_b;
  if (const auto* ag = tr.agreement()) {
    m.agreed = true;
    m.u_a = a.evaluate(ag->offer);
    m.u_b = b.evaluate(ag->offer);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : front.points) best = std::min(best, joint_distance(m.u_a, m.u_b, p));
    m.dist_pareto = best;
    m.dist_nash = joint_distance(m.u_a, m.u_b, nash_point(front));
  }
  return m;
}

// Offers explored by evolutionary sampling over n_round rounds.
inline std::int64_t samples_evo_closed_form(std::int64_t n_round, std::int64_t k, std::int64_t m,
                                            std::int64_t n_cross, std::int64_t n_mut) {
  return n_round * k * (m * n_cross * (1 + n_mut) + n_mut);
}

// Storage for `samples` offers of N 32-bit integers, in KiB.
inline double memory_kb(double samples, int issues) { return samples * issues * 32.0 / 8.0 / 1024.0; }

}  // namespace negosim
