#ifndef METAGUARD_NAMES_HPP
#define METAGUARD_NAMES_HPP

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "metaguard/error.hpp"

namespace metaguard {

using StateId = std::string;

// Orders "p2" before "p10": digit runs compare by value, everything else by
// character. Falls back to plain comparison so the order stays total.
inline bool natural_less(std::string_view a, std::string_view b) noexcept {
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      std::size_t is = i;
      std::size_t js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      std::string_view da = a.substr(is, ie - is);
      std::string_view db = b.substr(js, je - js);
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

struct NaturalLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const noexcept {
    return natural_less(a, b);
  }
};

inline bool is_identifier(std::string_view s) noexcept {
  if (s.empty()) return false;
  auto head = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9') || c == '.'; };
  if (!head(s.front())) return false;
  return std::all_of(s.begin() + 1, s.end(), tail);
}

// A transition name: a nonempty set of atomic labels. Component automata use
// singletons; a synchronized step of a composition carries one label per
// participating component.
class TransitionName {
 public:
  TransitionName() = default;

  TransitionName(std::initializer_list<std::string> labels)
      : TransitionName(std::vector<std::string>(labels)) {}

  explicit TransitionName(std::string label)
      : TransitionName(std::vector<std::string>{std::move(label)}) {}

  explicit TransitionName(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) {
      throw Error(ErrorCode::InvalidName, "transition name needs at least one label");
    }
    for (const auto& l : labels_) {
      if (l.empty()) throw Error(ErrorCode::InvalidName, "empty transition label");
    }
    std::sort(labels_.begin(), labels_.end(), NaturalLess{});
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool is_atomic() const noexcept { return labels_.size() == 1; }

  bool contains(std::string_view label) const {
    return std::binary_search(labels_.begin(), labels_.end(), label, NaturalLess{});
  }

  TransitionName merged(const TransitionName& other) const {
    std::vector<std::string> all = labels_;
    all.insert(all.end(), other.labels_.begin(), other.labels_.end());
    return TransitionName(std::move(all));
  }

  // "p1" for singletons, "{p1,p15}" for composite names.
  std::string str() const {
    if (labels_.size() == 1) return labels_.front();
    std::string out = "{";
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (i) out += ',';
      out += labels_[i];
    }
    out += '}';
    return out;
  }

  friend bool operator==(const TransitionName&, const TransitionName&) = default;

  friend std::strong_ordering operator<=>(const TransitionName& a, const TransitionName& b) {
    const auto n = std::min(a.labels_.size(), b.labels_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.labels_[i] == b.labels_[i]) continue;
      return natural_less(a.labels_[i], b.labels_[i]) ? std::strong_ordering::less
                                                       : std::strong_ordering::greater;
    }
    return a.labels_.size() <=> b.labels_.size();
  }

  friend std::ostream& operator<<(std::ostream& os, const TransitionName& n) {
    return os << n.str();
  }

 private:
  std::vector<std::string> labels_;
};

// Composite state naming: "q11" when every part is a single character,
// "m1.u1" otherwise.
inline std::string join_state_names(const std::vector<std::string>& parts) {
  const bool single = std::all_of(parts.begin(), parts.end(),
                                  [](const std::string& p) { return p.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i && !single) out += '.';
    out += parts[i];
  }
  return out;
}

}  // namespace metaguard

#endif  // METAGUARD_NAMES_HPP
