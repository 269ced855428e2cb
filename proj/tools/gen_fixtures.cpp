// Regenerates the chained .log fixtures. Run with the output directory as
// the only argument; the committed fixtures are the output of this tool.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "causelog/log.hpp"

namespace {

using causelog::LogFile;
using causelog::LogRecord;

LogRecord rec(std::int64_t t, std::string comp, std::string event,
              std::vector<std::pair<std::string, std::string>> params = {},
              std::optional<std::string> parent = std::nullopt) {
  LogRecord r;
  r.t = t;
  r.comp = std::move(comp);
  r.event = std::move(event);
  r.params = std::move(params);
  r.parent = std::move(parent);
  return r;
}

LogFile chain(const std::vector<LogRecord>& records) {
  LogFile file;
  for (const LogRecord& r : records) file = causelog::append_record(file, r);
  return file;
}

void write(const std::string& dir, const std::string& name, const LogFile& file) {
  std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(1);
  }
  out << causelog::serialize(file);
  std::cout << "wrote " << path << " (" << file.records.size() << " records)\n";
}

LogFile firing_squad() {
  return chain({
      rec(0, "court", "order"),
      rec(1, "captain", "signal", {}, "court"),
      rec(2, "rifleman_a", "shoot", {}, "captain"),
      rec(2, "rifleman_b", "shoot", {}, "captain"),
      rec(3, "prisoner", "dies"),
  });
}

LogFile uav_pilot() {
  return chain({
      rec(0, "pilot", "start"),
      rec(1000, "control", "cmd_takeoff", {}, "pilot"),
      rec(2000, "flight_controller", "takeoff", {}, "control"),
      rec(3000, "uav", "telemetry", {{"alt", "5"}, {"zone", "free"}}, "flight_controller"),
      rec(5000, "uav", "telemetry", {{"alt", "25"}, {"zone", "free"}}, "flight_controller"),
      rec(10000, "pilot", "cmd_left"),
      rec(10500, "control", "cmd_left", {}, "pilot"),
      rec(11000, "flight_controller", "motion", {{"dir", "left"}}, "control"),
      rec(13000, "pilot", "cmd_left"),
      rec(13500, "control", "cmd_left", {}, "pilot"),
      rec(14000, "flight_controller", "motion", {{"dir", "left"}}, "control"),
      rec(16000, "uav", "telemetry", {{"alt", "25"}, {"zone", "restricted"}},
          "flight_controller"),
  });
}

LogFile uav_rogue() {
  return chain({
      rec(0, "pilot", "start"),
      rec(1000, "control", "cmd_takeoff", {}, "pilot"),
      rec(2000, "flight_controller", "takeoff", {}, "control"),
      rec(3000, "uav", "telemetry", {{"alt", "5"}, {"zone", "free"}}, "flight_controller"),
      rec(5000, "uav", "telemetry", {{"alt", "25"}, {"zone", "free"}}, "flight_controller"),
      rec(10000, "flight_controller", "motion", {{"dir", "left"}}),
      rec(13000, "flight_controller", "motion", {{"dir", "left"}}),
      rec(16000, "uav", "telemetry", {{"alt", "25"}, {"zone", "restricted"}},
          "flight_controller"),
  });
}

LogFile roomba() {
  return chain({
      rec(0, "operator", "start"),
      rec(1000, "robot", "lane_start", {{"lane", "1"}}, "operator"),
      rec(31000, "robot", "bump"),
      rec(36000, "robot", "lane_start", {{"lane", "2"}}),
      rec(66000, "robot", "bump"),
      rec(71000, "robot", "lane_start", {{"lane", "3"}}),
      rec(86000, "robot", "bump"),
  });
}

LogFile roomba_clean() {
  return chain({
      rec(0, "operator", "start"),
      rec(1000, "robot", "lane_start", {{"lane", "1"}}, "operator"),
      rec(31000, "robot", "bump"),
      rec(36000, "robot", "lane_start", {{"lane", "2"}}),
      rec(66000, "robot", "bump"),
  });
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen_fixtures <output-dir>\n";
    return 1;
  }
  std::string dir = argv[1];
  write(dir, "firing_squad.log", firing_squad());
  write(dir, "uav_pilot.log", uav_pilot());
  write(dir, "uav_rogue.log", uav_rogue());
  write(dir, "roomba.log", roomba());
  write(dir, "roomba_clean.log", roomba_clean());
  return 0;
}
