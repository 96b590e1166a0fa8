#ifndef HEUN_CLI_REPORT_HPP
#define HEUN_CLI_REPORT_HPP

#include "heun/cli/config.hpp"

#include <json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace heun::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Output of one command. `csv` is the tabular view of `results`; it is not part of the JSON.
struct Report {
  std::string command;
  nlohmann::json config_echo = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();  ///< non-empty means exit status 1
  nlohmann::json notes = nlohmann::json::array();     ///< informational strings
  std::optional<double> timing_ms;
  CsvTable csv;

  int exit_code() const { return failures.empty() ? 0 : 1; }
};

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["command"] = r.command;
  j["config_echo"] = r.config_echo;
  j["results"] = r.results;
  j["failures"] = r.failures;
  j["notes"] = r.notes;
  j["timing_ms"] = r.timing_ms ? nlohmann::json(*r.timing_ms) : nlohmann::json(nullptr);
  return j;
}

inline Report report_from_json(const nlohmann::json& j) {
  Report r;
  r.command = j.at("command").get<std::string>();
  r.config_echo = j.at("config_echo");
  r.results = j.at("results");
  r.failures = j.at("failures");
  r.notes = j.at("notes");
  if (!j.at("timing_ms").is_null()) r.timing_ms = j.at("timing_ms").get<double>();
  return r;
}

inline bool same_json_content(const Report& a, const Report& b) {
  return a.command == b.command && a.config_echo == b.config_echo && a.results == b.results &&
         a.failures == b.failures && a.notes == b.notes && a.timing_ms == b.timing_ms;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string render_csv(const CsvTable& t) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
    os << "\n";
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
  return os.str();
}

inline std::string render(const Report& r, OutputFormat format) {
  if (format == OutputFormat::csv) return render_csv(r.csv);
  return to_json(r).dump(2) + "\n";
}

}  // namespace heun::cli

#endif  // HEUN_CLI_REPORT_HPP
