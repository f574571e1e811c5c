#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "negosim/niching.hpp"
#include "negosim/scenario.hpp"

namespace negosim {

namespace io {

using json = nlohmann::json;

// Reads a member of a JSON object, reporting the full field path on failure.
template <class T>
T field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "/" + key + ": missing field");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(path + "/" + key + ": " + e.what());
  }
}

inline const json& array_field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "/" + key + ": missing field");
  if (!it->is_array()) throw ParseError(path + "/" + key + ": expected an array");
  return *it;
}

inline json parse_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(origin + ":" + std::to_string(line) + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot open file for writing");
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

inline json domain_to_json(const IssueDomain& d) {
  return json{{"issues", d.issue_count}, {"lower", d.lower}, {"upper", d.upper}};
}

inline IssueDomain domain_from_json(const json& j, const std::string& path) {
  IssueDomain d;
  d.issue_count = field<int>(j, "issues", path);
  d.lower = field<int>(j, "lower", path);
  d.upper = field<int>(j, "upper", path);
  try {
    d.validate();
  } catch (const DomainError& e) {
    throw ParseError(path + ": " + e.what());
  }
  return d;
}

inline json offer_to_json(const Offer& o) { return json(std::vector<int>(o.begin(), o.end())); }

inline Offer offer_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of issue values");
  try {
    return Offer(j.get<std::vector<int>>());
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline json utility_to_json(const WeightedConstraintUtility& u) {
  json constraints = json::array();
  for (const auto& c : u.constraints()) {
    json intervals = json::array();
    for (const auto& iv : c.intervals) intervals.push_back({{"issue", iv.issue}, {"lo", iv.lo}, {"hi", iv.hi}});
    constraints.push_back({{"intervals", std::move(intervals)}, {"value", c.value}});
  }
  return json{{"constraints", std::move(constraints)}, {"max_raw", u.max_raw()}};
}

inline WeightedConstraintUtility utility_from_json(const json& j, const IssueDomain& d, const std::string& path,
                                                   std::ostream* warn) {
  std::vector<Constraint> constraints;
  const json& arr = array_field(j, "constraints", path);
  for (std::size_t ci = 0; ci < arr.size(); ++ci) {
    const std::string cpath = path + "/constraints/" + std::to_string(ci);
    Constraint c;
    c.value = field<double>(arr[ci], "value", cpath);
    const json& ivs = array_field(arr[ci], "intervals", cpath);
    for (std::size_t k = 0; k < ivs.size(); ++k) {
      const std::string ipath = cpath + "/intervals/" + std::to_string(k);
      c.intervals.push_back({field<int>(ivs[k], "issue", ipath), field<int>(ivs[k], "lo", ipath),
                             field<int>(ivs[k], "hi", ipath)});
    }
    try {
      validate_constraint(c, d);
    } catch (const DomainError& e) {
      throw ParseError(cpath + ": " + e.what());
    }
    constraints.push_back(std::move(c));
  }
  std::optional<double> max_raw;
  if (j.contains("max_raw")) {
    max_raw = field<double>(j, "max_raw", path);
    if (!(*max_raw > 0.0)) throw ParseError(path + "/max_raw: must be positive");
  } else if (warn) {
    *warn << "warning: " << path << "/max_raw missing; recomputing the exact maximum\n";
  }
  return WeightedConstraintUtility(d, std::move(constraints), max_raw);
}

}  // namespace io

inline std::string scenario_to_string(const Scenario& s) {
  io::json agents = io::json::array();
  for (const auto& a : s.agents) agents.push_back(io::utility_to_json(a));
  io::json doc{{"format", "negosim-scenario/1"},
               {"domain", io::domain_to_json(s.domain)},
               {"seed", s.seed},
               {"agents", std::move(agents)}};
  return doc.dump(2) + "\n";
}

inline Scenario scenario_from_string(const std::string& text, const std::string& origin = "<scenario>",
                                     std::ostream* warn = &std::cerr) {
  const io::json doc = io::parse_text(text, origin);
  Scenario s;
  s.domain = io::domain_from_json(doc.contains("domain") ? doc.at("domain") : io::json{}, origin + ":/domain");
  s.seed = io::field<std::uint64_t>(doc, "seed", origin + ":");
  const io::json& agents = io::array_field(doc, "agents", origin + ":");
  if (agents.size() != 2) throw ParseError(origin + ":/agents: expected exactly two agents");
  for (std::size_t i = 0; i < agents.size(); ++i)
    s.agents.push_back(io::utility_from_json(agents[i], s.domain, origin + ":/agents/" + std::to_string(i), warn));
  return s;
}

inline void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  io::write_file(path, scenario_to_string(s));
}

inline Scenario load_scenario(const std::filesystem::path& path, std::ostream* warn = &std::cerr) {
  return scenario_from_string(io::read_file(path), path.string(), warn);
}

inline std::string population_to_string(const Population& p) {
  io::json members = io::json::array();
  for (const auto& m : p.members) members.push_back({{"offer", io::offer_to_json(m.offer)}, {"fitness", m.fitness}});
  io::json doc{{"format", "negosim-population/1"}, {"generation", p.generation}, {"population", std::move(members)}};
  return doc.dump(2) + "\n";
}

// Fitness values are taken from the file as written; callers that need them
// consistent with a utility should rescore.
inline Population population_from_string(const std::string& text, const IssueDomain& d,
                                         const std::string& origin = "<population>") {
  const io::json doc = io::parse_text(text, origin);
  Population p;
  p.generation = io::field<int>(doc, "generation", origin + ":");
  const io::json& arr = io::array_field(doc, "population", origin + ":");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = origin + ":/population/" + std::to_string(i);
    if (!arr[i].contains("offer")) throw ParseError(path + "/offer: missing field");
    Offer o = io::offer_from_json(arr[i].at("offer"), path + "/offer");
    if (!d.contains(o)) throw ParseError(path + "/offer: (" + to_string(o) + ") lies outside the domain");
    p.members.push_back({std::move(o), io::field<double>(arr[i], "fitness", path)});
  }
  return p;
}

}  // namespace negosim
