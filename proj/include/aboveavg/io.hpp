#pragma once

// Plain-text instance formats. Variables are 1-based in files and 0-based in
// memory; '#' starts a comment.
//
//   p lin2 <n> <m> <c>     then  <weight> <rhs> <v1> [v2 ...]
//   p csp  <n> <m> <c>     then  pred <name> <arity> <bits>   and  <weight> <name> <v1> ...
//   p ord  <n> <m>         then  <weight> <v1> <v2> [v3]
//   p perm <n> <m> <c>     then  pperm <name> <arity> <p1,p2,...>  and  <weight> <name> <v1> ...

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aboveavg/boolean_csp.hpp"
#include "aboveavg/lin2.hpp"
#include "aboveavg/ordering.hpp"

namespace aboveavg {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      std::size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
      if (j > i) line.tokens.push_back(raw.substr(i, j - i));
      i = j;
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

inline std::int64_t parse_int(std::string_view token, std::size_t line, std::string_view what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected integer " + std::string(what) + ", got '" + std::string(token) + "'");
  }
  return value;
}

inline Var parse_var(std::string_view token, std::size_t line, std::size_t num_vars) {
  const auto v = parse_int(token, line, "variable index");
  if (v < 1 || static_cast<std::uint64_t>(v) > num_vars) {
    throw ParseError(line, "variable index " + std::string(token) + " out of range 1.." + std::to_string(num_vars));
  }
  return static_cast<Var>(v - 1);
}

inline Weight parse_weight(std::string_view token, std::size_t line) {
  const auto w = parse_int(token, line, "weight");
  if (w < 1) throw ParseError(line, "weight must be at least 1");
  return w;
}

inline void check_distinct(const std::vector<Var>& vars, std::size_t line) {
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      if (vars[i] == vars[j]) throw ParseError(line, "variable repeated within a constraint");
}

struct Header {
  std::size_t num_vars;
  std::size_t count;
  unsigned arity;
};

inline Header parse_header(const std::vector<Line>& lines, std::string_view kind, bool has_arity) {
  if (lines.empty()) throw ParseError(1, "missing header 'p " + std::string(kind) + "'");
  const auto& h = lines.front();
  const std::size_t expected = has_arity ? 5 : 4;
  if (h.tokens.size() != expected || h.tokens[0] != "p" || h.tokens[1] != kind) {
    throw ParseError(h.number, "malformed header, expected 'p " + std::string(kind) + (has_arity ? " <n> <m> <c>'" : " <n> <m>'"));
  }
  const auto n = parse_int(h.tokens[2], h.number, "variable count");
  const auto m = parse_int(h.tokens[3], h.number, "constraint count");
  const auto c = has_arity ? parse_int(h.tokens[4], h.number, "arity bound") : 3;
  if (n < 0 || m < 0) throw ParseError(h.number, "counts must be non-negative");
  if (c < 1 || c > 62) throw ParseError(h.number, "arity bound out of range");
  return {static_cast<std::size_t>(n), static_cast<std::size_t>(m), static_cast<unsigned>(c)};
}

inline void check_count(std::size_t expected, std::size_t actual, std::size_t line) {
  if (expected != actual) {
    throw ParseError(line, "header declares " + std::to_string(expected) + " constraints but " + std::to_string(actual) +
                               " were given");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// lin2

inline Lin2System parse_lin2(std::string_view text) {
  const auto lines = detail::tokenize(text);
  const auto h = detail::parse_header(lines, "lin2", true);
  Lin2System sys;
  sys.num_vars = h.num_vars;
  sys.arity_bound = h.arity;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.tokens.size() < 3) throw ParseError(l.number, "equation needs '<weight> <rhs> <v1> ...'");
    const Weight w = detail::parse_weight(l.tokens[0], l.number);
    const auto rhs = detail::parse_int(l.tokens[1], l.number, "rhs");
    if (rhs != 0 && rhs != 1) throw ParseError(l.number, "rhs must be 0 or 1");
    std::vector<Var> vars;
    for (std::size_t t = 2; t < l.tokens.size(); ++t) vars.push_back(detail::parse_var(l.tokens[t], l.number, h.num_vars));
    detail::check_distinct(vars, l.number);
    if (vars.size() > h.arity) throw ParseError(l.number, "equation has more than c variables");
    sys.equations.push_back(make_equation(std::move(vars), static_cast<std::uint8_t>(rhs), w));
  }
  detail::check_count(h.count, sys.equations.size(), lines.back().number);
  return sys;
}

inline std::string serialize_lin2(const Lin2System& sys) {
  std::ostringstream os;
  os << "p lin2 " << sys.num_vars << ' ' << sys.equations.size() << ' ' << sys.arity_bound << '\n';
  if (sys.offset != 0) os << "# offset " << sys.offset << '\n';
  for (const auto& e : sys.equations) {
    os << e.weight << ' ' << int{e.rhs};
    for (Var v : e.vars) os << ' ' << v + 1;
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// csp

inline BooleanCspInstance parse_csp(std::string_view text) {
  const auto lines = detail::tokenize(text);
  const auto h = detail::parse_header(lines, "csp", true);
  BooleanCspInstance inst;
  inst.num_vars = h.num_vars;
  inst.arity_bound = h.arity;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.tokens[0] == "pred") {
      if (l.tokens.size() != 4) throw ParseError(l.number, "predicate needs 'pred <name> <arity> <bits>'");
      Predicate p;
      p.name = std::string(l.tokens[1]);
      const auto arity = detail::parse_int(l.tokens[2], l.number, "arity");
      if (arity < 1 || arity > static_cast<std::int64_t>(kMaxPredicateArity)) throw ParseError(l.number, "predicate arity out of range");
      p.arity = static_cast<unsigned>(arity);
      if (l.tokens[3].size() != (std::size_t{1} << p.arity)) throw ParseError(l.number, "truth table must have 2^arity bits");
      for (char ch : l.tokens[3]) {
        if (ch != '0' && ch != '1') throw ParseError(l.number, "truth table bits must be 0 or 1");
        p.truth_table.push_back(static_cast<std::uint8_t>(ch - '0'));
      }
      for (const auto& q : inst.predicates)
        if (q.name == p.name) throw ParseError(l.number, "predicate '" + p.name + "' defined twice");
      inst.predicates.push_back(std::move(p));
      continue;
    }
    if (l.tokens.size() < 3) throw ParseError(l.number, "constraint needs '<weight> <pred> <v1> ...'");
    BooleanConstraint c;
    c.weight = detail::parse_weight(l.tokens[0], l.number);
    const auto name = l.tokens[1];
    auto it = std::find_if(inst.predicates.begin(), inst.predicates.end(), [&](const auto& p) { return p.name == name; });
    if (it == inst.predicates.end()) throw ParseError(l.number, "unknown predicate '" + std::string(name) + "'");
    c.predicate = static_cast<std::size_t>(it - inst.predicates.begin());
    for (std::size_t t = 2; t < l.tokens.size(); ++t) c.tuple.push_back(detail::parse_var(l.tokens[t], l.number, h.num_vars));
    if (c.tuple.size() != it->arity) throw ParseError(l.number, "tuple length differs from predicate arity");
    if (it->arity > h.arity) throw ParseError(l.number, "predicate arity exceeds c");
    detail::check_distinct(c.tuple, l.number);
    inst.constraints.push_back(std::move(c));
  }
  detail::check_count(h.count, inst.constraints.size(), lines.back().number);
  return inst;
}

inline std::string serialize_csp(const BooleanCspInstance& inst) {
  std::ostringstream os;
  os << "p csp " << inst.num_vars << ' ' << inst.constraints.size() << ' ' << inst.arity_bound << '\n';
  for (const auto& p : inst.predicates) {
    os << "pred " << p.name << ' ' << p.arity << ' ';
    for (auto b : p.truth_table) os << int{b};
    os << '\n';
  }
  for (const auto& c : inst.constraints) {
    os << c.weight << ' ' << inst.predicates[c.predicate].name;
    for (Var v : c.tuple) os << ' ' << v + 1;
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// ord

inline OrderingInstance parse_ordering(std::string_view text) {
  const auto lines = detail::tokenize(text);
  const auto h = detail::parse_header(lines, "ord", false);
  OrderingInstance inst;
  inst.num_vars = h.num_vars;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.tokens.size() != 3 && l.tokens.size() != 4) throw ParseError(l.number, "ordering constraint needs '<weight> <v1> <v2> [v3]'");
    OrderingConstraint c;
    c.weight = detail::parse_weight(l.tokens[0], l.number);
    std::vector<Var> vars;
    for (std::size_t t = 1; t < l.tokens.size(); ++t) vars.push_back(detail::parse_var(l.tokens[t], l.number, h.num_vars));
    detail::check_distinct(vars, l.number);
    std::copy(vars.begin(), vars.end(), c.vars.begin());
    inst.constraints.push_back(c);
  }
  detail::check_count(h.count, inst.constraints.size(), lines.back().number);
  return inst;
}

inline std::string serialize_ordering(const OrderingInstance& inst) {
  std::ostringstream os;
  os << "p ord " << inst.num_vars << ' ' << inst.constraints.size() << '\n';
  for (const auto& c : inst.constraints) {
    os << c.weight;
    for (Var v : c.tuple()) os << ' ' << v + 1;
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// perm

inline PermCspInstance parse_perm(std::string_view text) {
  const auto lines = detail::tokenize(text);
  const auto h = detail::parse_header(lines, "perm", true);
  if (h.arity > 3) throw ParseError(lines.front().number, "permutation CSPs support arity at most 3");
  PermCspInstance inst;
  inst.num_vars = h.num_vars;
  inst.arity_bound = h.arity;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.tokens[0] == "pperm") {
      if (l.tokens.size() != 4) throw ParseError(l.number, "predicate needs 'pperm <name> <arity> <p1,p2,...>'");
      PermPredicate p;
      p.name = std::string(l.tokens[1]);
      const auto arity = detail::parse_int(l.tokens[2], l.number, "arity");
      if (arity != 2 && arity != 3) throw ParseError(l.number, "permutation predicate arity must be 2 or 3");
      p.arity = static_cast<unsigned>(arity);
      std::string_view list = l.tokens[3];
      while (!list.empty()) {
        const auto comma = list.find(',');
        const auto item = list.substr(0, comma);
        std::vector<std::uint8_t> pattern;
        for (char ch : item) {
          if (ch < '1' || ch > '9') throw ParseError(l.number, "pattern digits must be 1..arity");
          pattern.push_back(static_cast<std::uint8_t>(ch - '0'));
        }
        p.satisfying.push_back(std::move(pattern));
        if (comma == std::string_view::npos) break;
        list = list.substr(comma + 1);
      }
      try {
        p.validate();
      } catch (const std::invalid_argument& e) {
        throw ParseError(l.number, e.what());
      }
      for (const auto& q : inst.predicates)
        if (q.name == p.name) throw ParseError(l.number, "predicate '" + p.name + "' defined twice");
      inst.predicates.push_back(std::move(p));
      continue;
    }
    if (l.tokens.size() < 3) throw ParseError(l.number, "constraint needs '<weight> <pred> <v1> ...'");
    PermConstraint c;
    c.weight = detail::parse_weight(l.tokens[0], l.number);
    const auto name = l.tokens[1];
    auto it = std::find_if(inst.predicates.begin(), inst.predicates.end(), [&](const auto& p) { return p.name == name; });
    if (it == inst.predicates.end()) throw ParseError(l.number, "unknown predicate '" + std::string(name) + "'");
    c.predicate = static_cast<std::size_t>(it - inst.predicates.begin());
    for (std::size_t t = 2; t < l.tokens.size(); ++t) c.tuple.push_back(detail::parse_var(l.tokens[t], l.number, h.num_vars));
    if (c.tuple.size() != it->arity) throw ParseError(l.number, "tuple length differs from predicate arity");
    if (it->arity > h.arity) throw ParseError(l.number, "predicate arity exceeds c");
    detail::check_distinct(c.tuple, l.number);
    inst.constraints.push_back(std::move(c));
  }
  detail::check_count(h.count, inst.constraints.size(), lines.back().number);
  return inst;
}

inline std::string serialize_perm(const PermCspInstance& inst) {
  std::ostringstream os;
  os << "p perm " << inst.num_vars << ' ' << inst.constraints.size() << ' ' << inst.arity_bound << '\n';
  for (const auto& p : inst.predicates) {
    os << "pperm " << p.name << ' ' << p.arity << ' ';
    for (std::size_t i = 0; i < p.satisfying.size(); ++i) {
      if (i) os << ',';
      for (auto d : p.satisfying[i]) os << int{d};
    }
    os << '\n';
  }
  for (const auto& c : inst.constraints) {
    os << c.weight << ' ' << inst.predicates[c.predicate].name;
    for (Var v : c.tuple) os << ' ' << v + 1;
    os << '\n';
  }
  return os.str();
}

}  // namespace aboveavg
