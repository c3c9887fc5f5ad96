#pragma once

#include "econv/ext_real.hpp"

#include <string>
#include <utility>
#include <vector>

namespace econv {

enum class Outcome { Pass, Fail, Vacuous, Inconclusive };

std::string to_string(Outcome o);

using NamedValue = std::pair<std::string, ExtReal>;

/// A concrete point (in X, kind "x") or triple (in W, kind "w", laid out as
/// x*, u*, alpha) together with the values that decided the check.
struct Witness {
  std::string kind;
  std::vector<double> coords;
  std::vector<NamedValue> values;
  std::string note;
};

struct Verdict {
  Outcome outcome = Outcome::Vacuous;
  /// A positive outcome that rests on finitely many samples.
  bool sampled = false;
  std::string detail;
  std::vector<Witness> witnesses;
  std::vector<NamedValue> values;
  std::size_t checked = 0;

  bool passed() const { return outcome == Outcome::Pass || outcome == Outcome::Vacuous; }
  void record_pass() {
    ++checked;
    if (outcome == Outcome::Vacuous) {
      outcome = Outcome::Pass;
    }
  }
  void record_fail(Witness w) {
    ++checked;
    outcome = Outcome::Fail;
    witnesses.push_back(std::move(w));
  }
  void record_inconclusive(std::string why) {
    if (outcome != Outcome::Fail) {
      outcome = Outcome::Inconclusive;
    }
    if (!detail.empty()) {
      detail += "; ";
    }
    detail += std::move(why);
  }
  /// FAIL dominates INCONCLUSIVE, which dominates PASS, which dominates VACUOUS.
  void merge(const Verdict& other);
};

} // namespace econv
