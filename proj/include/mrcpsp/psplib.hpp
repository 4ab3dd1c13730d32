#pragma once

#include <cctype>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mrcpsp/project.hpp"

namespace mrcpsp {

enum class ParseErrorKind {
  MalformedHeader,      // missing or out-of-order section banner / header field
  InconsistentJobCount, // declared vs listed jobs differ
  DanglingSuccessor,    // successor id out of range
  BadModeRow,           // wrong column count in a mode or availability row
  DuplicateKey,         // repeated (parameter, instance) key in a bounds table
  NonIntegerMakespan,   // bounds row without a positive integer makespan
};

struct ParseError : std::runtime_error {
  ParseErrorKind kind;
  ParseError(ParseErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Best-known makespans keyed by (parameter number, instance number).
class BoundsTable {
 public:
  void insert(int parameter, int number, int makespan) {
    auto [it, fresh] = entries_.emplace(std::make_pair(parameter, number), makespan);
    if (!fresh)
      throw ParseError(ParseErrorKind::DuplicateKey,
                       "duplicate bounds key (" + std::to_string(parameter) + ", " +
                           std::to_string(number) + ")");
  }
  std::optional<int> lookup(int parameter, int number) const {
    auto it = entries_.find({parameter, number});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::pair<int, int>, int>& entries() const { return entries_; }

 private:
  std::map<std::pair<int, int>, int> entries_;
};

namespace detail {

inline std::optional<std::vector<long long>> parse_ints(const std::string& line) {
  std::vector<long long> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    std::size_t pos = 0;
    long long value = 0;
    try {
      value = std::stoll(tok, &pos);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (pos != tok.size()) return std::nullopt;
    out.push_back(value);
  }
  return out;
}

inline bool is_blank(const std::string& line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

inline bool is_separator(const std::string& line) {
  bool seen = false;
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c != '*' && c != '-' && c != '=') return false;
    seen = true;
  }
  return seen;
}

// Last integer on a header line such as "jobs (incl. supersource/sink ):  12".
inline std::optional<long long> last_int(const std::string& line) {
  std::optional<long long> found;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(tok, &pos);
      if (pos == tok.size()) found = v;
    } catch (const std::exception&) {
    }
  }
  return found;
}

inline std::optional<long long> first_int(const std::string& line) {
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(tok, &pos);
      if (pos == tok.size()) return v;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Reads one multi-mode instance file. Section banners must appear in the
// order PRECEDENCE RELATIONS, REQUESTS/DURATIONS, RESOURCEAVAILABILITIES;
// within lines the parser only cares about whitespace-separated values.
// File job ids 1..J+2 are shifted down by one so the dummies come out as
// activities 0 and J+1.
inline ProjectInstance parse_instance(std::istream& text) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(text, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }

  auto find_banner = [&](const std::string& needle, std::size_t from) -> std::optional<std::size_t> {
    for (std::size_t i = from; i < lines.size(); ++i)
      if (lines[i].find(needle) != std::string::npos) return i;
    return std::nullopt;
  };

  auto header_value = [&](const std::string& needle, const char* what) {
    auto at = find_banner(needle, 0);
    if (!at)
      throw ParseError(ParseErrorKind::MalformedHeader, std::string("missing header field: ") + what);
    auto value = detail::last_int(lines[*at]);
    if (!value)
      throw ParseError(ParseErrorKind::MalformedHeader, std::string("header field has no value: ") + what);
    return *value;
  };

  const long long total_jobs = header_value("jobs (incl.", "job count");
  if (total_jobs < 2)
    throw ParseError(ParseErrorKind::MalformedHeader, "job count must include the two dummies");
  const long long horizon = header_value("horizon", "horizon");

  auto renewable_line = find_banner("- renewable", 0);
  auto nonrenewable_line = find_banner("- nonrenewable", 0);
  if (!renewable_line || !nonrenewable_line)
    throw ParseError(ParseErrorKind::MalformedHeader, "missing resource count headers");
  auto renew_count = detail::first_int(lines[*renewable_line]);
  auto nonren_count = detail::first_int(lines[*nonrenewable_line]);
  if (!renew_count || !nonren_count || *renew_count < 0 || *nonren_count < 0)
    throw ParseError(ParseErrorKind::MalformedHeader, "unreadable resource counts");
  const int renew = static_cast<int>(*renew_count);
  const int nonren = static_cast<int>(*nonren_count);

  auto prec_banner = find_banner("PRECEDENCE RELATIONS", 0);
  if (!prec_banner)
    throw ParseError(ParseErrorKind::MalformedHeader, "missing PRECEDENCE RELATIONS section");
  auto req_banner = find_banner("REQUESTS/DURATIONS", 0);
  if (!req_banner)
    throw ParseError(ParseErrorKind::MalformedHeader, "missing REQUESTS/DURATIONS section");
  auto avail_banner = find_banner("RESOURCEAVAILABILITIES", 0);
  if (!avail_banner)
    throw ParseError(ParseErrorKind::MalformedHeader, "missing RESOURCEAVAILABILITIES section");
  if (!(*prec_banner < *req_banner && *req_banner < *avail_banner))
    throw ParseError(ParseErrorKind::MalformedHeader, "sections out of order");

  // --- precedence section: jobnr, #modes, #successors, successors...
  std::vector<int> declared_modes(total_jobs + 1, 0);
  std::vector<std::vector<int>> successors(total_jobs + 1);
  {
    std::size_t row = *prec_banner + 2;  // skip banner and column header
    long long job = 0;
    for (; row < *req_banner; ++row) {
      const std::string& line = lines[row];
      if (detail::is_blank(line) || detail::is_separator(line)) continue;
      auto toks = detail::parse_ints(line);
      if (!toks)
        throw ParseError(ParseErrorKind::InconsistentJobCount,
                         "non-numeric row in precedence section: " + line);
      ++job;
      if (toks->size() < 3 || (*toks)[0] != job)
        throw ParseError(ParseErrorKind::InconsistentJobCount,
                         "precedence row " + std::to_string(job) + " is malformed");
      const long long mode_count = (*toks)[1];
      const long long succ_count = (*toks)[2];
      if (mode_count < 1 || succ_count < 0 ||
          static_cast<long long>(toks->size()) != 3 + succ_count)
        throw ParseError(ParseErrorKind::InconsistentJobCount,
                         "successor count mismatch on job " + std::to_string(job));
      declared_modes[job] = static_cast<int>(mode_count);
      for (long long s = 0; s < succ_count; ++s) {
        const long long succ = (*toks)[3 + s];
        if (succ < 1 || succ > total_jobs)
          throw ParseError(ParseErrorKind::DanglingSuccessor,
                           "job " + std::to_string(job) + " lists successor " +
                               std::to_string(succ) + " outside 1.." + std::to_string(total_jobs));
        successors[job].push_back(static_cast<int>(succ));
      }
    }
    if (job != total_jobs)
      throw ParseError(ParseErrorKind::InconsistentJobCount,
                       "precedence section lists " + std::to_string(job) + " jobs, header declares " +
                           std::to_string(total_jobs));
  }

  // --- requests/durations section. A row opening a new job carries the job
  // id and has one more column than the continuation rows for its later
  // modes; the two shapes are told apart by column count.
  std::vector<std::vector<Mode>> job_modes(total_jobs + 1);
  {
    std::size_t row = *req_banner + 2;  // skip banner and column header
    long long job = 0;
    for (; row < *avail_banner; ++row) {
      const std::string& line = lines[row];
      if (detail::is_blank(line) || detail::is_separator(line)) continue;
      auto toks = detail::parse_ints(line);
      if (!toks)
        throw ParseError(ParseErrorKind::BadModeRow, "non-numeric mode row: " + line);
      const std::size_t new_job_cols = static_cast<std::size_t>(3 + renew + nonren);
      const std::size_t continuation_cols = new_job_cols - 1;
      long long mode_id = 0;
      std::size_t cursor = 0;
      if (toks->size() == new_job_cols) {
        ++job;
        if ((*toks)[0] != job)
          throw ParseError(ParseErrorKind::BadModeRow,
                           "jobs out of order in requests section at job " + std::to_string((*toks)[0]));
        mode_id = (*toks)[1];
        cursor = 2;
      } else if (toks->size() == continuation_cols) {
        if (job == 0)
          throw ParseError(ParseErrorKind::BadModeRow, "continuation row before any job row");
        mode_id = (*toks)[0];
        cursor = 1;
      } else {
        throw ParseError(ParseErrorKind::BadModeRow,
                         "mode row has " + std::to_string(toks->size()) + " columns, expected " +
                             std::to_string(continuation_cols) + " or " +
                             std::to_string(new_job_cols));
      }
      if (mode_id != static_cast<long long>(job_modes[job].size()) + 1)
        throw ParseError(ParseErrorKind::BadModeRow,
                         "mode ids of job " + std::to_string(job) + " are not 1,2,...");
      Mode mode;
      mode.duration = static_cast<int>((*toks)[cursor++]);
      for (int k = 0; k < renew; ++k) mode.renewable.push_back(static_cast<int>((*toks)[cursor++]));
      for (int l = 0; l < nonren; ++l)
        mode.nonrenewable.push_back(static_cast<int>((*toks)[cursor++]));
      job_modes[job].push_back(std::move(mode));
    }
    if (job != total_jobs)
      throw ParseError(ParseErrorKind::InconsistentJobCount,
                       "requests section lists " + std::to_string(job) + " jobs, header declares " +
                           std::to_string(total_jobs));
    for (long long j = 1; j <= total_jobs; ++j)
      if (static_cast<int>(job_modes[j].size()) != declared_modes[j])
        throw ParseError(ParseErrorKind::BadModeRow,
                         "job " + std::to_string(j) + " declares " + std::to_string(declared_modes[j]) +
                             " modes but lists " + std::to_string(job_modes[j].size()));
  }

  // --- availabilities: renewables first, then nonrenewables
  std::vector<int> renewable_capacity, nonrenewable_capacity;
  {
    std::size_t row = *avail_banner + 2;  // skip banner and column header
    bool found = false;
    for (; row < lines.size(); ++row) {
      const std::string& line = lines[row];
      if (detail::is_blank(line) || detail::is_separator(line)) continue;
      auto toks = detail::parse_ints(line);
      if (!toks || static_cast<int>(toks->size()) != renew + nonren)
        throw ParseError(ParseErrorKind::BadModeRow,
                         "availability row must list exactly " + std::to_string(renew + nonren) +
                             " values");
      for (int k = 0; k < renew; ++k) renewable_capacity.push_back(static_cast<int>((*toks)[k]));
      for (int l = 0; l < nonren; ++l)
        nonrenewable_capacity.push_back(static_cast<int>((*toks)[renew + l]));
      found = true;
      break;
    }
    if (!found)
      throw ParseError(ParseErrorKind::MalformedHeader, "missing availability row");
  }

  ProjectInstance inst;
  inst.real_count = static_cast<int>(total_jobs) - 2;
  inst.horizon_hint = static_cast<int>(horizon);
  inst.renewable_capacity = std::move(renewable_capacity);
  inst.nonrenewable_capacity = std::move(nonrenewable_capacity);
  inst.activities.resize(inst.total_count());
  for (long long j = 1; j <= total_jobs; ++j) {
    auto& act = inst.activities[j - 1];
    act.modes = std::move(job_modes[j]);
    for (std::size_t m = 0; m < act.modes.size(); ++m)
      act.original_mode_ids.push_back(static_cast<int>(m) + 1);
    for (int succ : successors[j]) inst.precedence.emplace_back(static_cast<int>(j) - 1, succ - 1);
  }
  std::sort(inst.precedence.begin(), inst.precedence.end());
  for (int l = 0; l < inst.nonrenewable_count(); ++l)
    inst.original_nonrenewable_ids.push_back(l + 1);
  rebuild_adjacency(inst);
  return inst;
}

inline ProjectInstance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

// Emits the same file layout parse_instance reads; parse(write(x)) is
// structurally equal to x.
inline std::string write_instance(const ProjectInstance& inst) {
  std::ostringstream out;
  const std::string rule(72, '*');
  const int renew = inst.renewable_count();
  const int nonren = inst.nonrenewable_count();

  auto resource_columns = [&]() {
    std::string cols;
    for (int k = 0; k < renew; ++k) cols += "  R" + std::to_string(k + 1);
    for (int l = 0; l < nonren; ++l) cols += "  N" + std::to_string(l + 1);
    return cols;
  };

  out << rule << '\n';
  out << "file with basedata            : " << (inst.name.empty() ? "generated" : inst.name)
      << '\n';
  out << "initial value random generator: 0\n";
  out << rule << '\n';
  out << "projects                      :  1\n";
  out << "jobs (incl. supersource/sink ):  " << inst.total_count() << '\n';
  out << "horizon                       :  " << inst.horizon_hint << '\n';
  out << "RESOURCES\n";
  out << "  - renewable                 :  " << renew << "   R\n";
  out << "  - nonrenewable              :  " << nonren << "   N\n";
  out << "  - doubly constrained        :  0   D\n";
  out << rule << '\n';
  out << "PROJECT INFORMATION:\n";
  out << "pronr.  #jobs rel.date duedate tardcost  MPM-Time\n";
  out << "    1     " << inst.real_count << "      0       " << inst.horizon_hint
      << "        0       " << inst.horizon_hint << '\n';
  out << rule << '\n';
  out << "PRECEDENCE RELATIONS:\n";
  out << "jobnr.    #modes  #successors   successors\n";
  for (int j = 0; j < inst.total_count(); ++j) {
    const auto& act = inst.activities[j];
    out << "  " << (j + 1) << "   " << act.modes.size() << "   " << act.successors.size();
    for (int succ : act.successors) out << "   " << (succ + 1);
    out << '\n';
  }
  out << rule << '\n';
  out << "REQUESTS/DURATIONS:\n";
  out << "jobnr. mode duration" << resource_columns() << '\n';
  out << std::string(72, '-') << '\n';
  for (int j = 0; j < inst.total_count(); ++j) {
    const auto& act = inst.activities[j];
    for (std::size_t m = 0; m < act.modes.size(); ++m) {
      const auto& mode = act.modes[m];
      if (m == 0)
        out << "  " << (j + 1) << "   " << (m + 1);
      else
        out << "      " << (m + 1);
      out << "   " << mode.duration;
      for (int r : mode.renewable) out << "   " << r;
      for (int r : mode.nonrenewable) out << "   " << r;
      out << '\n';
    }
  }
  out << rule << '\n';
  out << "RESOURCEAVAILABILITIES:\n";
  out << resource_columns() << '\n';
  out << " ";
  for (int c : inst.renewable_capacity) out << "  " << c;
  for (int c : inst.nonrenewable_capacity) out << "  " << c;
  out << '\n';
  out << rule << '\n';
  return out.str();
}

// Reads a whitespace-delimited bounds table: one row per instance holding
// parameter number, instance number and best-known makespan; anything after
// the third column is ignored. Lines opening with a non-digit are headers or
// separators and are skipped.
inline BoundsTable parse_bounds_table(std::istream& text) {
  BoundsTable table;
  for (std::string line; std::getline(text, line);) {
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (!std::isdigit(static_cast<unsigned char>(line[first]))) continue;
    std::istringstream in(line);
    std::string p, n, m;
    if (!(in >> p >> n >> m))
      throw ParseError(ParseErrorKind::NonIntegerMakespan, "bounds row too short: " + line);
    auto as_int = [&](const std::string& tok) -> std::optional<long long> {
      try {
        std::size_t pos = 0;
        long long v = std::stoll(tok, &pos);
        if (pos != tok.size()) return std::nullopt;
        return v;
      } catch (const std::exception&) {
        return std::nullopt;
      }
    };
    auto param = as_int(p), number = as_int(n), makespan = as_int(m);
    if (!param || !number)
      throw ParseError(ParseErrorKind::NonIntegerMakespan, "bounds row has non-integer key: " + line);
    if (!makespan || *makespan <= 0)
      throw ParseError(ParseErrorKind::NonIntegerMakespan,
                       "bounds row has no positive integer makespan: " + line);
    table.insert(static_cast<int>(*param), static_cast<int>(*number), static_cast<int>(*makespan));
  }
  return table;
}

inline BoundsTable parse_bounds_table(const std::string& text) {
  std::istringstream in(text);
  return parse_bounds_table(in);
}

}  // namespace mrcpsp
