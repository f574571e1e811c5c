#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "negosim/errors.hpp"
#include "negosim/random.hpp"

namespace negosim {

// Exact enumeration (max_raw, Pareto front, full-curve agents) is refused
// above this many offers.
inline constexpr double kMaxEnumerableOffers = 1e7;

// A point of the issue space: one integer value per issue.
class Offer {
 public:
  Offer() = default;
  explicit Offer(std::vector<int> values) : values_(std::move(values)) {}
  Offer(std::initializer_list<int> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  int operator[](std::size_t i) const { return values_[i]; }
  int& operator[](std::size_t i) { return values_[i]; }
  std::span<const int> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const Offer&, const Offer&) = default;
  friend auto operator<=>(const Offer&, const Offer&) = default;

 private:
  std::vector<int> values_;
};

struct OfferHash {
  std::size_t operator()(const Offer& o) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int v : o) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
    return static_cast<std::size_t>(h);
  }
};

// "1,2,5"
inline std::string to_string(const Offer& o) {
  std::string s;
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(o[i]);
  }
  return s;
}

struct IssueDomain {
  int issue_count = 1;
  int lower = 0;
  int upper = 9;

  IssueDomain() = default;
  IssueDomain(int issues, int lo, int hi) : issue_count(issues), lower(lo), upper(hi) { validate(); }

  void validate() const {
    if (issue_count < 1) throw DomainError("issue domain needs at least one issue");
    if (lower >= upper) throw DomainError("issue domain needs lower < upper");
  }

  int span() const { return upper - lower; }
  int values_per_issue() const { return upper - lower + 1; }
  double cardinality() const { return std::pow(static_cast<double>(values_per_issue()), issue_count); }
  bool enumerable() const { return cardinality() <= kMaxEnumerableOffers; }

  bool contains(const Offer& x) const {
    if (static_cast<int>(x.size()) != issue_count) return false;
    return std::all_of(x.begin(), x.end(), [&](int v) { return v >= lower && v <= upper; });
  }

  void require(const Offer& x) const {
    if (static_cast<int>(x.size()) != issue_count)
      throw DomainError("offer (" + to_string(x) + ") has " + std::to_string(x.size()) +
                        " issues, domain has " + std::to_string(issue_count));
    if (!contains(x)) throw DomainError("offer (" + to_string(x) + ") lies outside the domain");
  }

  // Offers in lexicographic order are numbered as a mixed-radix integer with
  // issue 0 most significant.
  Offer decode(std::uint64_t index) const {
    std::vector<int> v(static_cast<std::size_t>(issue_count));
    const auto base = static_cast<std::uint64_t>(values_per_issue());
    for (int i = issue_count - 1; i >= 0; --i) {
      v[static_cast<std::size_t>(i)] = lower + static_cast<int>(index % base);
      index /= base;
    }
    return Offer(std::move(v));
  }

  friend bool operator==(const IssueDomain&, const IssueDomain&) = default;
};

// One closed interval lo <= x[issue] <= hi of a hyper-rectangular constraint.
struct IssueInterval {
  int issue = 0;
  int lo = 0;
  int hi = 0;
  friend bool operator==(const IssueInterval&, const IssueInterval&) = default;
};

// A valued region of the issue space. Issues without an interval are
// unconstrained. Intervals are kept sorted by issue.
struct Constraint {
  std::vector<IssueInterval> intervals;
  double value = 0.0;

  std::size_t cardinality() const { return intervals.size(); }
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

inline bool constraint_satisfied(const Constraint& c, const Offer& x) {
  for (const auto& iv : c.intervals) {
    if (iv.issue < 0 || static_cast<std::size_t>(iv.issue) >= x.size())
      throw DomainError("constraint refers to issue " + std::to_string(iv.issue) + " of a " +
                        std::to_string(x.size()) + "-issue offer");
    const int v = x[static_cast<std::size_t>(iv.issue)];
    if (v < iv.lo || v > iv.hi) return false;
  }
  return true;
}

inline void validate_constraint(const Constraint& c, const IssueDomain& d) {
  if (c.intervals.empty() || static_cast<int>(c.intervals.size()) > d.issue_count)
    throw DomainError("constraint cardinality must lie in [1, " + std::to_string(d.issue_count) + "]");
  if (!(c.value >= 0.0) || !std::isfinite(c.value)) throw DomainError("constraint value must be a finite nonnegative number");
  int previous = -1;
  for (const auto& iv : c.intervals) {
    if (iv.issue < 0 || iv.issue >= d.issue_count) throw DomainError("constraint issue index out of range");
    if (iv.issue <= previous) throw DomainError("constraint intervals must name distinct issues in ascending order");
    previous = iv.issue;
    if (iv.lo < d.lower || iv.hi > d.upper || iv.lo > iv.hi)
      throw DomainError("interval [" + std::to_string(iv.lo) + "," + std::to_string(iv.hi) + "] on issue " +
                        std::to_string(iv.issue) + " violates lower <= lo <= hi <= upper");
  }
}

// Per-issue, per-value bitsets of the constraints an issue value is
// compatible with. ANDing the masks of an offer's values yields its set of
// satisfied constraints, which makes exhaustive enumeration cheap.
class SatisfactionMasks {
 public:
  SatisfactionMasks(const IssueDomain& d, std::span<const Constraint> constraints)
      : domain_(d), words_((constraints.size() + 63) / 64) {
    values_.reserve(constraints.size());
    for (const auto& c : constraints) values_.push_back(c.value);
    const auto per_issue = static_cast<std::size_t>(d.values_per_issue());
    masks_.assign(static_cast<std::size_t>(d.issue_count) * per_issue * words_, 0);
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      for (int issue = 0; issue < d.issue_count; ++issue) {
        auto it = std::find_if(constraints[c].intervals.begin(), constraints[c].intervals.end(),
                               [&](const IssueInterval& iv) { return iv.issue == issue; });
        for (int v = d.lower; v <= d.upper; ++v) {
          const bool ok = it == constraints[c].intervals.end() || (v >= it->lo && v <= it->hi);
          if (ok) word(issue, v)[c / 64] |= (std::uint64_t{1} << (c % 64));
        }
      }
    }
  }

  // Sums satisfied constraint values in constraint order, exactly as the
  // direct evaluation does.
  double raw(const Offer& x) const {
    std::vector<std::uint64_t> acc(words_, ~std::uint64_t{0});
    for (int issue = 0; issue < domain_.issue_count; ++issue) {
      const std::uint64_t* m = word(issue, x[static_cast<std::size_t>(issue)]);
      for (std::size_t w = 0; w < words_; ++w) acc[w] &= m[w];
    }
    return sum(acc.data());
  }

  // Calls fn(index, offer, raw) for every offer with lexicographic index in
  // [first, last).
  template <class Fn>
  void for_each(std::uint64_t first, std::uint64_t last, Fn&& fn) const {
    if (first >= last) return;
    const int n = domain_.issue_count;
    Offer x = domain_.decode(first);
    // prefix[d] holds the AND over issues < d.
    std::vector<std::uint64_t> prefix(static_cast<std::size_t>(n + 1) * words_, ~std::uint64_t{0});
    auto rebuild = [&](int from) {
      for (int d = from; d < n; ++d) {
        const std::uint64_t* m = word(d, x[static_cast<std::size_t>(d)]);
        const std::uint64_t* src = &prefix[static_cast<std::size_t>(d) * words_];
        std::uint64_t* dst = &prefix[static_cast<std::size_t>(d + 1) * words_];
        for (std::size_t w = 0; w < words_; ++w) dst[w] = src[w] & m[w];
      }
    };
    rebuild(0);
    for (std::uint64_t index = first;;) {
      fn(index, static_cast<const Offer&>(x), sum(&prefix[static_cast<std::size_t>(n) * words_]));
      if (++index >= last) break;
      int d = n - 1;
      while (x[static_cast<std::size_t>(d)] == domain_.upper) {
        x[static_cast<std::size_t>(d)] = domain_.lower;
        --d;
      }
      ++x[static_cast<std::size_t>(d)];
      rebuild(d);
    }
  }

 private:
  std::uint64_t* word(int issue, int value) {
    return &masks_[(static_cast<std::size_t>(issue) * static_cast<std::size_t>(domain_.values_per_issue()) +
                    static_cast<std::size_t>(value - domain_.lower)) *
                   words_];
  }
  const std::uint64_t* word(int issue, int value) const {
    return const_cast<SatisfactionMasks*>(this)->word(issue, value);
  }
  double sum(const std::uint64_t* bits) const {
    double total = 0.0;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t b = bits[w];
      while (b) {
        const int bit = std::countr_zero(b);
        total += values_[w * 64 + static_cast<std::size_t>(bit)];
        b &= b - 1;
      }
    }
    return total;
  }

  IssueDomain domain_;
  std::size_t words_;
  std::vector<double> values_;
  std::vector<std::uint64_t> masks_;
};

// Exact maximum of the raw constraint sum over the whole domain.
inline double exact_max_raw(const IssueDomain& d, std::span<const Constraint> constraints) {
  if (!d.enumerable())
    throw CapabilityError("domain of " + std::to_string(d.cardinality()) +
                          " offers is too large for exact normalization; supply max_raw explicitly");
  SatisfactionMasks masks(d, constraints);
  double best = 0.0;
  masks.for_each(0, static_cast<std::uint64_t>(d.cardinality()), [&](std::uint64_t, const Offer&, double raw) {
    best = std::max(best, raw);
  });
  return best;
}

// Sum of satisfied constraint values divided by a normalization constant.
// Immutable after construction.
class WeightedConstraintUtility {
 public:
  // Without max_raw the exact global maximum is computed by enumeration. An
  // all-zero utility normalizes by 1 so every offer evaluates to 0.
  WeightedConstraintUtility(IssueDomain domain, std::vector<Constraint> constraints,
                            std::optional<double> max_raw = std::nullopt)
      : domain_(domain), constraints_(std::move(constraints)) {
    domain_.validate();
    for (auto& c : constraints_) {
      std::sort(c.intervals.begin(), c.intervals.end(),
                [](const IssueInterval& a, const IssueInterval& b) { return a.issue < b.issue; });
      validate_constraint(c, domain_);
    }
    if (max_raw) {
      if (!(*max_raw > 0.0) || !std::isfinite(*max_raw)) throw DomainError("max_raw must be positive");
      max_raw_ = *max_raw;
    } else {
      const double m = exact_max_raw(domain_, constraints_);
      max_raw_ = m > 0.0 ? m : 1.0;
    }
  }

  const IssueDomain& domain() const { return domain_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  double max_raw() const { return max_raw_; }

  double raw_value(const Offer& x) const {
    domain_.require(x);
    return raw_unchecked(x);
  }

  double evaluate(const Offer& x) const { return raw_value(x) / max_raw_; }

  double raw_unchecked(const Offer& x) const {
    double total = 0.0;
    for (const auto& c : constraints_)
      if (constraint_satisfied(c, x)) total += c.value;
    return total;
  }

  friend bool operator==(const WeightedConstraintUtility&, const WeightedConstraintUtility&) = default;

 private:
  IssueDomain domain_;
  std::vector<Constraint> constraints_;
  double max_raw_ = 1.0;
};

inline double raw_value(const WeightedConstraintUtility& u, const Offer& x) { return u.raw_value(x); }
inline double evaluate(const WeightedConstraintUtility& u, const Offer& x) { return u.evaluate(x); }

struct ScenarioSpec {
  IssueDomain domain{4, 0, 9};
  int constraints_per_cardinality = 5;
  double value_range_scale = 100.0;
  int width_min = 2;
  int width_max = 4;
  std::uint64_t seed = 0;

  void validate() const {
    domain.validate();
    if (constraints_per_cardinality < 1) throw ConfigError("constraints_per_cardinality must be >= 1");
    if (!(value_range_scale >= 0.0)) throw ConfigError("value_range_scale must be >= 0");
    if (width_min < 0 || width_min > width_max) throw ConfigError("width range must satisfy 0 <= min <= max");
  }
};

// A bilateral negotiation case: one utility per agent over a shared domain.
struct Scenario {
  IssueDomain domain;
  std::uint64_t seed = 0;
  std::vector<WeightedConstraintUtility> agents;

  const WeightedConstraintUtility& agent(std::size_t i) const { return agents.at(i); }
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline std::vector<Constraint> generate_constraints(const ScenarioSpec& spec, Rng& rng) {
  const IssueDomain& d = spec.domain;
  std::vector<int> issues(static_cast<std::size_t>(d.issue_count));
  std::iota(issues.begin(), issues.end(), 0);
  std::vector<Constraint> out;
  out.reserve(static_cast<std::size_t>(d.issue_count * spec.constraints_per_cardinality));
  for (int n = 1; n <= d.issue_count; ++n) {
    for (int j = 0; j < spec.constraints_per_cardinality; ++j) {
      std::vector<int> chosen;
      std::sample(issues.begin(), issues.end(), std::back_inserter(chosen), n, rng);
      Constraint c;
      for (int issue : chosen) {
        const int w = uniform_int(rng, spec.width_min, spec.width_max);
        // A width-w interval covers w + 1 values: lo in [lower, upper - w].
        if (w > d.span())
          throw ConfigError("constraint width " + std::to_string(w) + " exceeds the issue span " +
                            std::to_string(d.span()));
        const int lo = uniform_int(rng, d.lower, d.upper - w);
        c.intervals.push_back({issue, lo, lo + w});
      }
      c.value = uniform_real(rng, 0.0, spec.value_range_scale * n);
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace detail

// Draws both agents' constraint sets from rng, agent A first.
inline Scenario generate_scenario(const ScenarioSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.width_max > spec.domain.span())
    throw ConfigError("constraint width " + std::to_string(spec.width_max) + " exceeds the issue span " +
                      std::to_string(spec.domain.span()));
  Scenario s;
  s.domain = spec.domain;
  s.seed = spec.seed;
  for (int agent = 0; agent < 2; ++agent) s.agents.emplace_back(spec.domain, detail::generate_constraints(spec, rng));
  return s;
}

inline Scenario generate_scenario(const ScenarioSpec& spec) {
  Rng rng(spec.seed);
  return generate_scenario(spec, rng);
}

}  // namespace negosim
