#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causelog/error.hpp"

namespace causelog {

/// One timestamped fact. `seq` is implicit: a record's position in the file.
struct LogRecord {
  std::int64_t t = 0;
  std::string comp;
  std::string event;
  std::vector<std::pair<std::string, std::string>> params;  // ordered
  std::optional<std::string> parent;
  std::optional<std::string> h;  // chain hash, lowercase hex

  bool operator==(const LogRecord&) const = default;
};

struct LogFile {
  std::vector<LogRecord> records;
  bool chained = true;  // every record carries h; vacuously true when empty

  bool operator==(const LogFile&) const = default;
};

/// 64 zero hex chars; record 0 chains from this value.
inline const std::string kChainGenesis(64, '0');

std::string sha256_hex(std::string_view data);

/// Canonical serialization of a record without its hash: JSON object with
/// keys t, comp, event, params (when non-empty), parent (when present), in
/// that order, no whitespace, params keys in insertion order.
std::string canonical_body(const LogRecord& record);

/// Canonical line including h when present.
std::string canonical_line(const LogRecord& record);

/// Parses JSON-lines text. Unknown scalar keys are preserved in params.
/// Throws ParseError with a line number on malformed input, decreasing
/// timestamps, unseen parent components, or mixed chained/unchained records.
LogFile parse_log(std::string_view text);

/// Canonical serialization of the whole file, one line per record.
std::string serialize(const LogFile& file);

/// Returns a new file with the record appended and its chain hash computed
/// over (previous hash, canonical body). The input must be chained.
LogFile append_record(const LogFile& file, LogRecord record);

struct ChainReport {
  bool ok = true;
  std::int64_t first_bad_seq = -1;  // valid iff !ok

  bool operator==(const ChainReport&) const = default;
};

/// Recomputes every hash; reports the first index where stored differs
/// from recomputed. Throws Error on an unchained file.
ChainReport verify_chain(const LogFile& file);

}  // namespace causelog
