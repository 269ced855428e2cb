#include "causelog/log.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>

#include "json.hpp"

namespace causelog {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_hex64(const std::string& s) {
  if (s.size() != 64) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
}

// Scalars become strings; everything else is rejected.
std::string scalar_to_string(const ordered_json& v, int line, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned() || v.is_boolean()) return v.dump();
  throw ParseError("value of '" + key + "' must be a string or integer scalar", line);
}

ordered_json to_canonical_json(const LogRecord& r, bool with_hash) {
  ordered_json j = ordered_json::object();
  j["t"] = r.t;
  j["comp"] = r.comp;
  j["event"] = r.event;
  if (!r.params.empty()) {
    ordered_json p = ordered_json::object();
    for (const auto& [k, v] : r.params) p[k] = v;
    j["params"] = std::move(p);
  }
  if (r.parent) j["parent"] = *r.parent;
  if (with_hash && r.h) j["h"] = *r.h;
  return j;
}

void validate_new_record(const LogRecord& r, const LogFile& file) {
  if (r.comp.empty()) throw Error("record component must be non-empty");
  if (r.event.empty()) throw Error("record event must be non-empty");
  if (r.t < 0) throw Error("record timestamp must be non-negative");
  if (!file.records.empty() && r.t < file.records.back().t)
    throw Error("timestamp regression: " + std::to_string(r.t) + " after " +
                std::to_string(file.records.back().t));
  if (r.parent) {
    bool seen = std::any_of(file.records.begin(), file.records.end(),
                            [&](const LogRecord& e) { return e.comp == *r.parent; });
    if (!seen) throw Error("parent '" + *r.parent + "' has no earlier record");
  }
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string canonical_body(const LogRecord& record) {
  return to_canonical_json(record, false).dump();
}

std::string canonical_line(const LogRecord& record) {
  return to_canonical_json(record, true).dump();
}

LogFile parse_log(std::string_view text) {
  LogFile file;
  int line_no = 0;
  std::size_t pos = 0;
  int with_hash = 0;

  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) {
      if (pos >= text.size()) break;  // trailing newline
      throw ParseError("empty line", line_no);
    }

    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::exception& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("record must be a JSON object", line_no);

    LogRecord r;
    bool have_t = false, have_comp = false, have_event = false;
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const ordered_json& v = it.value();
      if (key == "t") {
        if (!v.is_number_integer() && !v.is_number_unsigned())
          throw ParseError("'t' must be an integer", line_no);
        r.t = v.get<std::int64_t>();
        have_t = true;
      } else if (key == "comp") {
        if (!v.is_string()) throw ParseError("'comp' must be a string", line_no);
        r.comp = v.get<std::string>();
        have_comp = true;
      } else if (key == "event") {
        if (!v.is_string()) throw ParseError("'event' must be a string", line_no);
        r.event = v.get<std::string>();
        have_event = true;
      } else if (key == "params") {
        if (!v.is_object()) throw ParseError("'params' must be an object", line_no);
        for (auto pit = v.begin(); pit != v.end(); ++pit)
          r.params.emplace_back(pit.key(), scalar_to_string(pit.value(), line_no, pit.key()));
      } else if (key == "parent") {
        if (!v.is_string() || v.get<std::string>().empty())
          throw ParseError("'parent' must be a non-empty string", line_no);
        r.parent = v.get<std::string>();
      } else if (key == "h") {
        if (!v.is_string() || !is_hex64(v.get<std::string>()))
          throw ParseError("'h' must be 64 lowercase hex chars", line_no);
        r.h = v.get<std::string>();
      } else {
        // Extendability: unknown scalar keys land in params.
        r.params.emplace_back(key, scalar_to_string(v, line_no, key));
      }
    }
    if (!have_t) throw ParseError("missing 't'", line_no);
    if (!have_comp || r.comp.empty()) throw ParseError("missing or empty 'comp'", line_no);
    if (!have_event || r.event.empty()) throw ParseError("missing or empty 'event'", line_no);
    if (r.t < 0) throw ParseError("'t' must be non-negative", line_no);
    if (!file.records.empty() && r.t < file.records.back().t)
      throw ParseError("decreasing timestamp " + std::to_string(r.t), line_no);
    if (r.parent) {
      bool seen = std::any_of(file.records.begin(), file.records.end(),
                              [&](const LogRecord& e) { return e.comp == *r.parent; });
      if (!seen)
        throw ParseError("parent '" + *r.parent + "' has no earlier record", line_no);
    }
    if (r.h) ++with_hash;
    file.records.push_back(std::move(r));
  }

  if (with_hash != 0 && with_hash != static_cast<int>(file.records.size()))
    throw ParseError("mixed chained and unchained records", line_no);
  file.chained = file.records.empty() || with_hash == static_cast<int>(file.records.size());
  return file;
}

std::string serialize(const LogFile& file) {
  std::string out;
  for (const LogRecord& r : file.records) {
    out += canonical_line(r);
    out += '\n';
  }
  return out;
}

LogFile append_record(const LogFile& file, LogRecord record) {
  if (!file.chained) throw Error("cannot append to an unchained log");
  validate_new_record(record, file);
  const std::string& prev = file.records.empty() ? kChainGenesis : *file.records.back().h;
  record.h = sha256_hex(prev + "\n" + canonical_body(record));
  LogFile out = file;
  out.records.push_back(std::move(record));
  return out;
}

ChainReport verify_chain(const LogFile& file) {
  if (!file.chained) throw Error("log is not chained");
  std::string prev = kChainGenesis;
  for (std::size_t i = 0; i < file.records.size(); ++i) {
    const LogRecord& r = file.records[i];
    std::string expected = sha256_hex(prev + "\n" + canonical_body(r));
    if (!r.h || *r.h != expected) return {false, static_cast<std::int64_t>(i)};
    prev = *r.h;
  }
  return {true, -1};
}

}  // namespace causelog
