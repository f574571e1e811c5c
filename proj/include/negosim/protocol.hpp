#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "fmt/format.h"
#include "negosim/errors.hpp"
#include "negosim/scenario.hpp"

namespace negosim {

enum class Side { A, B };

inline Side other(Side s) { return s == Side::A ? Side::B : Side::A; }
inline const char* side_name(Side s) { return s == Side::A ? "A" : "B"; }

struct Propose {
  std::vector<Offer> offers;
  friend bool operator==(const Propose&, const Propose&) = default;
};
struct Accept {
  Offer offer;
  friend bool operator==(const Accept&, const Accept&) = default;
};
struct Exit {
  friend bool operator==(const Exit&, const Exit&) = default;
};

using Message = std::variant<Propose, Accept, Exit>;

// A negotiating party. The protocol only ever calls act(); the remaining
// members exist so transcripts can record what each side saw.
class Agent {
 public:
  virtual ~Agent() = default;

  // own_turn counts this agent's previous turns; received is the opponent's
  // most recent proposal (empty on the initiator's first turn).
  virtual Message act(int own_turn, std::span<const Offer> received) = 0;

  virtual const IssueDomain& domain() const = 0;
  virtual double utility(const Offer& x) const = 0;
  virtual std::int64_t samples_explored() const { return 0; }
  // Free-form description of the last act() call for trace logs.
  virtual std::string last_turn_note() const { return {}; }
};

struct Violation {
  enum class Kind { EmptyProposal, TooManyOffers, OutOfDomain, DuplicateOffer, AcceptUnknown };
  Kind kind;
  std::string detail;
};

inline std::optional<Violation> validate_message(const Message& msg, int k, const IssueDomain& domain,
                                                 std::span<const Offer> last_opponent_propose) {
  if (const auto* p = std::get_if<Propose>(&msg)) {
    if (p->offers.empty()) return Violation{Violation::Kind::EmptyProposal, "proposal carries no offers"};
    if (static_cast<int>(p->offers.size()) > k)
      return Violation{Violation::Kind::TooManyOffers,
                       fmt::format("proposal carries {} offers, protocol allows {}", p->offers.size(), k)};
    std::unordered_set<Offer, OfferHash> seen;
    for (const auto& o : p->offers) {
      if (!domain.contains(o))
        return Violation{Violation::Kind::OutOfDomain, "offer (" + to_string(o) + ") lies outside the domain"};
      if (!seen.insert(o).second)
        return Violation{Violation::Kind::DuplicateOffer, "offer (" + to_string(o) + ") proposed twice"};
    }
    return std::nullopt;
  }
  if (const auto* a = std::get_if<Accept>(&msg)) {
    if (std::find(last_opponent_propose.begin(), last_opponent_propose.end(), a->offer) ==
        last_opponent_propose.end())
      return Violation{Violation::Kind::AcceptUnknown,
                       "accepted offer (" + to_string(a->offer) + ") was not in the opponent's last proposal"};
  }
  return std::nullopt;
}

class ProtocolViolation : public Error {
 public:
  ProtocolViolation(Side side, Violation v)
      : Error(std::string("protocol violation by side ") + side_name(side) + ": " + v.detail),
        side_(side),
        violation_(std::move(v)) {}
  Side side() const { return side_; }
  const Violation& violation() const { return violation_; }

 private:
  Side side_;
  Violation violation_;
};

struct SessionConfig {
  int k = 3;
  int max_rounds = 100;  // safety cap; agents normally end the session first
  std::uint64_t seed = 0;

  void validate() const {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  }
};

struct TranscriptEvent {
  int round = 0;
  Side side = Side::A;
  Message message;
  std::vector<double> sender_utilities;  // one per offer in the message
  std::string note;
};

struct Agreement {
  Offer offer;
  Side accepted_by;
  int proposal_round;  // round in which the accepted offer was proposed
};
struct Failure {
  Side exited_by;
};
struct DeadlineFailure {};

using Outcome = std::variant<Agreement, Failure, DeadlineFailure>;

struct Transcript {
  std::vector<TranscriptEvent> events;
  Outcome outcome = DeadlineFailure{};
  std::int64_t samples_a = 0;
  std::int64_t samples_b = 0;

  bool agreed() const { return std::holds_alternative<Agreement>(outcome); }
  const Agreement* agreement() const { return std::get_if<Agreement>(&outcome); }

  // Rounds the negotiation took: the proposal round of the accepted offer on
  // agreement, otherwise the last round started.
  int rounds() const {
    if (const auto* a = agreement()) return a->proposal_round;
    return events.empty() ? 0 : events.back().round;
  }
};

// Drives the k-alternating protocol with agent A as initiator.
inline Transcript run_session(Agent& a, Agent& b, const SessionConfig& cfg) {
  cfg.validate();
  if (!(a.domain() == b.domain())) throw ConfigError("agents negotiate over different issue domains");
  const IssueDomain& domain = a.domain();

  Transcript tr;
  std::vector<Offer> last[2];
  int turns[2] = {0, 0};
  auto finish = [&](Outcome o) {
    tr.outcome = std::move(o);
    tr.samples_a = a.samples_explored();
    tr.samples_b = b.samples_explored();
    return tr;
  };

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    for (Side side : {Side::A, Side::B}) {
      Agent& me = side == Side::A ? a : b;
      const int self = side == Side::A ? 0 : 1;
      const std::vector<Offer>& incoming = last[1 - self];
      Message msg = me.act(turns[self]++, incoming);
      if (auto v = validate_message(msg, cfg.k, domain, incoming)) throw ProtocolViolation(side, std::move(*v));

      TranscriptEvent ev{round, side, msg, {}, me.last_turn_note()};
      if (const auto* p = std::get_if<Propose>(&msg)) {
        for (const auto& o : p->offers) ev.sender_utilities.push_back(me.utility(o));
      } else if (const auto* acc = std::get_if<Accept>(&msg)) {
        ev.sender_utilities.push_back(me.utility(acc->offer));
      }
      tr.events.push_back(std::move(ev));

      if (const auto* acc = std::get_if<Accept>(&msg))
        return finish(Agreement{acc->offer, side, side == Side::A ? round - 1 : round});
      if (std::holds_alternative<Exit>(msg)) return finish(Failure{side});
      last[self] = std::get<Propose>(msg).offers;
    }
  }
  return finish(DeadlineFailure{});
}

// Line-oriented event log: round, side, kind, offers, sender utilities, note
// (tab separated), followed by one outcome line.
inline std::string serialize_transcript(const Transcript& tr) {
  std::ostringstream out;
  out << "round\tside\tkind\toffers\tutilities\tnote\n";
  for (const auto& ev : tr.events) {
    std::string kind, offers, utils;
    auto join_offer = [&](const Offer& o) {
      if (!offers.empty()) offers += '|';
      offers += to_string(o);
    };
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Propose>) {
            kind = "PROPOSE";
            for (const auto& o : m.offers) join_offer(o);
          } else if constexpr (std::is_same_v<T, Accept>) {
            kind = "ACCEPT";
            join_offer(m.offer);
          } else {
            kind = "EXIT";
          }
        },
        ev.message);
    for (double u : ev.sender_utilities) {
      if (!utils.empty()) utils += '|';
      utils += fmt::format("{:.4f}", u);
    }
    out << ev.round << '\t' << side_name(ev.side) << '\t' << kind << '\t' << (offers.empty() ? "-" : offers) << '\t'
        << (utils.empty() ? "-" : utils) << '\t' << (ev.note.empty() ? "-" : ev.note) << '\n';
  }
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Agreement>) {
          out << "# outcome=agreement offer=" << to_string(o.offer) << " accepted_by=" << side_name(o.accepted_by)
              << " rounds=" << o.proposal_round;
        } else if constexpr (std::is_same_v<T, Failure>) {
          out << "# outcome=failure exited_by=" << side_name(o.exited_by) << " rounds=" << tr.rounds();
        } else {
          out << "# outcome=deadline rounds=" << tr.rounds();
        }
      },
      tr.outcome);
  out << " samples_a=" << tr.samples_a << " samples_b=" << tr.samples_b << '\n';
  return out.str();
}

}  // namespace negosim
