#include "econv/verdict.hpp"

namespace econv {

std::string to_string(Outcome o) {
  switch (o) {
  case Outcome::Pass:
    return "PASS";
  case Outcome::Fail:
    return "FAIL";
  case Outcome::Vacuous:
    return "VACUOUS";
  case Outcome::Inconclusive:
    return "INCONCLUSIVE";
  }
  return "?";
}

namespace {
int rank(Outcome o) {
  switch (o) {
  case Outcome::Vacuous:
    return 0;
  case Outcome::Pass:
    return 1;
  case Outcome::Inconclusive:
    return 2;
  case Outcome::Fail:
    return 3;
  }
  return 0;
}
} // namespace

void Verdict::merge(const Verdict& other) {
  if (rank(other.outcome) > rank(outcome)) {
    outcome = other.outcome;
  }
  sampled = sampled || other.sampled;
  checked += other.checked;
  witnesses.insert(witnesses.end(), other.witnesses.begin(), other.witnesses.end());
  values.insert(values.end(), other.values.begin(), other.values.end());
  if (!other.detail.empty()) {
    detail += (detail.empty() ? "" : "; ") + other.detail;
  }
}

} // namespace econv
