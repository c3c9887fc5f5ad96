#include "econv/harness.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>

namespace econv::harness {

namespace {

Json values_json(const std::vector<NamedValue>& values) {
  Json out = Json::object();
  for (const auto& [name, v] : values) {
    out[name] = ext_to_json(v);
  }
  return out;
}

Json witness_json(const Witness& w) {
  Json out = Json::object();
  out["kind"] = w.kind;
  Json coords = Json::array();
  for (double c : w.coords) {
    coords.push_back(ext_to_json(c));
  }
  out["coords"] = coords;
  out["values"] = values_json(w.values);
  if (!w.note.empty()) {
    out["note"] = w.note;
  }
  return out;
}

void dump_to(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
  case Json::value_t::object: {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) {
        out += ",\n";
      }
      first = false;
      out += inner + Json(key).dump() + ": ";
      dump_to(value, out, indent + 1);
    }
    out += "\n" + pad + "}";
    return;
  }
  case Json::value_t::array: {
    if (j.empty()) {
      out += "[]";
      return;
    }
    const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (flat) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) {
          out += ", ";
        }
        dump_to(j[i], out, indent + 1);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) {
        out += ",\n";
      }
      out += inner;
      dump_to(j[i], out, indent + 1);
    }
    out += "\n" + pad + "]";
    return;
  }
  case Json::value_t::number_float: {
    const double v = j.get<double>();
    if (std::isinf(v)) {
      out += v > 0 ? "\"inf\"" : "\"-inf\"";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    out += buf;
    return;
  }
  default:
    out += j.dump();
  }
}

} // namespace

Json to_json(const Report& r) {
  Json doc = Json::object();
  doc["version"] = std::string(kVersion);
  doc["input_hash"] = r.input_hash;
  std::map<Outcome, std::size_t> counts;
  Json records = Json::array();
  Json trace = Json::array();
  for (const CheckRecord& rec : r.records) {
    const Verdict& v = rec.verdict;
    ++counts[v.outcome];
    Json j = Json::object();
    j["check_id"] = rec.check_id;
    j["label"] = rec.label;
    j["anchor"] = rec.anchor;
    j["mode"] = rec.mode;
    j["verdict"] = to_string(v.outcome);
    if (rec.expected) {
      j["expected"] = to_string(*rec.expected);
      j["outcome"] = to_string(*rec.outcome);
    }
    j["sampled"] = v.sampled;
    j["checked"] = v.checked;
    j["detail"] = v.detail;
    j["values"] = values_json(v.values);
    Json ws = Json::array();
    for (const Witness& w : v.witnesses) {
      ws.push_back(witness_json(w));
    }
    j["witnesses"] = ws;
    if (r.timing) {
      j["runtime_s"] = rec.runtime_s;
    }
    records.push_back(j);
    trace.push_back(Json{{"check", rec.label}, {"anchor", rec.anchor}, {"verdict", to_string(v.outcome)}});
  }
  doc["checks"] = records;
  doc["summary"] = Json{{"total", r.records.size()},
                        {"PASS", counts[Outcome::Pass]},
                        {"FAIL", counts[Outcome::Fail]},
                        {"VACUOUS", counts[Outcome::Vacuous]},
                        {"INCONCLUSIVE", counts[Outcome::Inconclusive]}};
  doc["traceability"] = trace;
  return doc;
}

std::string dump(const Json& j) {
  std::string out;
  dump_to(j, out, 0);
  out += "\n";
  return out;
}

std::string traceability_table(const Report& r) {
  std::size_t wl = 5;
  std::size_t wa = 6;
  for (const CheckRecord& rec : r.records) {
    wl = std::max(wl, rec.label.size());
    wa = std::max(wa, rec.anchor.size());
  }
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(wl)) << "check" << "  " << std::setw(static_cast<int>(wa)) << "anchor"
     << "  verdict\n";
  for (const CheckRecord& rec : r.records) {
    os << std::setw(static_cast<int>(wl)) << rec.label << "  " << std::setw(static_cast<int>(wa)) << rec.anchor << "  "
       << to_string(rec.verdict.outcome) << "\n";
  }
  return os.str();
}

int exit_code(const Report& r) {
  bool inconclusive = false;
  for (const CheckRecord& rec : r.records) {
    if (rec.verdict.outcome == Outcome::Fail) {
      return 1;
    }
    inconclusive = inconclusive || rec.verdict.outcome == Outcome::Inconclusive;
  }
  return inconclusive ? 2 : 0;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

} // namespace econv::harness
