#pragma once

// Text formats.
//
//   ranking line   4,2,0,3,1
//   profile file   header "n,r[,beta]", then r lines "S:0,2,4|R:4,0,2"
//   selection file header "n,r", then r lines "S:0,2,4"
//
// Readers collect every problem they find with its 1-based line number
// (the header is line 1) instead of stopping at the first.

#include <charconv>
#include <cstdio>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "selmallows/core.hpp"
#include "selmallows/sampling.hpp"

namespace selmallows {

struct FileIssue {
  std::size_t line = 0;
  std::string message;
};

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(std::vector<FileIssue> issues)
      : std::runtime_error(summary(issues)), issues_(std::move(issues)) {}
  [[nodiscard]] const std::vector<FileIssue>& issues() const { return issues_; }

 private:
  static std::string summary(const std::vector<FileIssue>& issues) {
    std::string s = "malformed input";
    for (const auto& i : issues) s += "\n  line " + std::to_string(i.line) + ": " + i.message;
    return s;
  }
  std::vector<FileIssue> issues_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

// Comma-separated item list. Reports bad tokens through `bad`.
inline std::vector<Item> parse_items(std::string_view s, std::string* bad) {
  std::vector<Item> out;
  if (trim(s).empty()) return out;
  for (auto tok : split(s, ',')) {
    auto v = parse_number<unsigned long long>(tok);
    if (!v || *v > 0xFFFFFFFFULL) {
      if (bad) *bad = std::string(trim(tok));
      return {};
    }
    out.push_back(static_cast<Item>(*v));
  }
  return out;
}

}  // namespace detail

inline std::string format_ranking(const Ranking& pi) {
  std::ostringstream os;
  os << pi;
  return os.str();
}

inline std::string format_items(const std::vector<Item>& items) {
  std::string s;
  for (std::size_t t = 0; t < items.size(); ++t) {
    if (t) s += ',';
    s += std::to_string(items[t]);
  }
  return s;
}

inline Ranking parse_ranking(std::string_view line) {
  std::string bad;
  auto items = detail::parse_items(line, &bad);
  if (!bad.empty()) throw std::invalid_argument("not an item identifier: '" + bad + "'");
  if (items.empty()) throw std::invalid_argument("empty ranking line");
  return Ranking(std::move(items));
}

inline void write_profile(std::ostream& os, const SampleProfile& profile, std::optional<double> beta = std::nullopt) {
  os << profile.n() << ',' << profile.size();
  if (beta) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *beta);
    os << ',' << buf;
  }
  os << '\n';
  for (std::size_t l = 0; l < profile.size(); ++l) {
    os << "S:" << format_items(profile.selection()[l]) << "|R:" << profile[l] << '\n';
  }
}

inline void write_selection(std::ostream& os, const SelectionSequence& selection) {
  os << selection.n() << ',' << selection.size() << '\n';
  for (const auto& s : selection.sets()) os << "S:" << format_items(s) << '\n';
}

// Parsed profile or selection file. `rankings` is set when every line has
// an R: part.
struct ParsedFile {
  std::size_t n = 0;
  std::size_t declared_r = 0;
  std::optional<double> beta;
  std::vector<std::vector<Item>> sets;
  std::vector<std::vector<Item>> rankings;
  bool has_rankings = false;
  std::vector<FileIssue> issues;

  [[nodiscard]] bool ok() const { return issues.empty(); }
};

inline ParsedFile parse_file(std::istream& in) {
  ParsedFile f;
  std::string line;
  std::size_t lineno = 0;
  auto issue = [&](std::string msg) { f.issues.push_back({lineno, std::move(msg)}); };

  bool header = false;
  std::size_t with_r = 0, without_r = 0;
  // Rejected lines keep a placeholder so positions follow line order.
  auto reject = [&] {
    f.sets.emplace_back();
    f.rankings.emplace_back();
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    if (!header) {
      header = true;
      const auto parts = detail::split(text, ',');
      const auto n = parts.size() >= 2 ? detail::parse_number<std::size_t>(parts[0]) : std::nullopt;
      const auto r = parts.size() >= 2 ? detail::parse_number<std::size_t>(parts[1]) : std::nullopt;
      if (!n || !r || parts.size() > 3) {
        issue("header must be 'n,r' or 'n,r,beta'");
        return f;
      }
      f.n = *n;
      f.declared_r = *r;
      if (parts.size() == 3) {
        auto b = detail::parse_number<double>(parts[2]);
        if (!b || !(*b > 0.0)) {
          issue("beta in header must be a positive number");
        } else {
          f.beta = *b;
        }
      }
      continue;
    }

    const std::size_t bar = text.find('|');
    const std::string_view s_part = text.substr(0, bar);
    if (s_part.substr(0, 2) != "S:") {
      issue("expected 'S:' at start of line");
      reject();
      continue;
    }
    std::string bad;
    auto set = detail::parse_items(s_part.substr(2), &bad);
    if (!bad.empty()) {
      issue("not an item identifier: '" + bad + "'");
      reject();
      continue;
    }
    bool line_ok = true;
    std::set<Item> members;
    for (auto i : set) {
      if (i >= f.n) {
        issue("item " + std::to_string(i) + " is outside 0.." + std::to_string(f.n == 0 ? 0 : f.n - 1));
        line_ok = false;
      }
      if (!members.insert(i).second) {
        issue("duplicate item " + std::to_string(i) + " in set");
        line_ok = false;
      }
    }
    if (set.size() < 2) {
      issue("set has fewer than 2 items");
      line_ok = false;
    }

    std::vector<Item> ranking;
    if (bar != std::string_view::npos) {
      ++with_r;
      const std::string_view r_part = detail::trim(text.substr(bar + 1));
      if (r_part.substr(0, 2) != "R:") {
        issue("expected 'R:' after '|'");
        reject();
        continue;
      }
      ranking = detail::parse_items(r_part.substr(2), &bad);
      if (!bad.empty()) {
        issue("not an item identifier: '" + bad + "'");
        reject();
        continue;
      }
      std::set<Item> seen;
      for (auto i : ranking) {
        if (!seen.insert(i).second) {
          issue("duplicate item " + std::to_string(i) + " in ranking");
          line_ok = false;
        } else if (!members.count(i)) {
          issue("ranking item " + std::to_string(i) + " is not in the set");
          line_ok = false;
        }
      }
      // A missing item is only reported on its own; after a duplicate or a
      // foreign item it adds nothing.
      const bool clean = line_ok;
      for (auto i : members) {
        if (clean && !seen.count(i)) {
          issue("set item " + std::to_string(i) + " is missing from the ranking");
          line_ok = false;
        }
      }
    } else {
      ++without_r;
    }
    if (line_ok) {
      f.sets.push_back(std::move(set));
      f.rankings.push_back(std::move(ranking));
    } else {
      reject();
    }
  }

  if (!header) {
    lineno = 0;
    issue("empty file");
    return f;
  }
  ++lineno;
  if (with_r > 0 && without_r > 0) {
    issue("some lines have an R: part and some do not");
  }
  f.has_rankings = with_r > 0 && without_r == 0;
  if (f.sets.size() != f.declared_r) {
    issue("header declares r = " + std::to_string(f.declared_r) + " but the file has " +
          std::to_string(f.sets.size()) + " lines");
  }
  return f;
}

inline ParsedFile parse_file_text(const std::string& text) {
  std::istringstream in(text);
  return parse_file(in);
}

inline SelectionSequence to_selection(const ParsedFile& f) {
  if (!f.ok()) throw FormatError(f.issues);
  return SelectionSequence(f.n, f.sets);
}

inline SampleProfile to_profile(const ParsedFile& f) {
  if (!f.ok()) throw FormatError(f.issues);
  if (!f.has_rankings) throw FormatError({{0, "file has no R: parts; it is a selection file, not a profile"}});
  std::vector<Ranking> rankings;
  rankings.reserve(f.rankings.size());
  for (const auto& r : f.rankings) rankings.emplace_back(r);
  return SampleProfile(SelectionSequence(f.n, f.sets), std::move(rankings));
}

inline SampleProfile read_profile(std::istream& in) { return to_profile(parse_file(in)); }
inline SelectionSequence read_selection(std::istream& in) { return to_selection(parse_file(in)); }

}  // namespace selmallows
