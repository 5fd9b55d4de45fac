#include "geosocial/io.hpp"

#include "geosocial/error.hpp"

#include <fmt/format.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unordered_map>

namespace geosocial {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool skippable(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t[0] == '#';
}

double parse_coordinate(const std::string& field, std::size_t line, const char* name) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw IngestError(std::string("cannot parse ") + name + " '" + field + "'", line);
  }
  if (!std::isfinite(v)) throw IngestError(std::string("non-finite ") + name, line);
  return v;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path.string() + "'", 0);
  return in;
}

std::string number(double v) { return fmt::format("{}", v); }

}  // namespace

Roster parse_roster(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::array<std::size_t, 4> column{};  // id, x, y, gang
  bool have_header = false;
  std::size_t width = 0;
  std::vector<Individual> people;
  std::unordered_map<std::string, std::size_t> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_csv(line);
    if (!have_header) {
      const std::array<const char*, 4> names{"id", "x", "y", "gang"};
      for (std::size_t c = 0; c < names.size(); ++c) {
        std::size_t found = fields.size();
        for (std::size_t f = 0; f < fields.size(); ++f) {
          if (fields[f] == names[c]) found = f;
        }
        if (found == fields.size()) {
          throw IngestError(std::string("roster header lacks column '") + names[c] +
                                "' (expected id,x,y,gang)",
                            line_no);
        }
        column[c] = found;
      }
      width = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != width) {
      throw IngestError("expected " + std::to_string(width) + " fields, found " +
                            std::to_string(fields.size()),
                        line_no);
    }
    Individual ind;
    ind.id = fields[column[0]];
    ind.gang = fields[column[3]];
    if (ind.id.empty()) throw IngestError("missing id", line_no);
    if (ind.gang.empty()) throw IngestError("missing gang for '" + ind.id + "'", line_no);
    ind.x = parse_coordinate(fields[column[1]], line_no, "x");
    ind.y = parse_coordinate(fields[column[2]], line_no, "y");
    if (auto [it, inserted] = seen.emplace(ind.id, line_no); !inserted) {
      throw IngestError("duplicate id '" + ind.id + "' (first seen on line " +
                            std::to_string(it->second) + ")",
                        line_no);
    }
    people.push_back(std::move(ind));
  }
  if (!have_header) throw IngestError("roster is empty (missing header id,x,y,gang)", line_no);
  if (people.empty()) throw IngestError("roster has no individuals", line_no);
  return Roster(std::move(people));
}

Roster ingest_roster(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_roster(in);
}

std::vector<Edge> parse_edges(std::istream& in, const Roster& roster,
                              std::vector<std::string>* warnings) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) throw IngestError("edge rows need exactly two ids", line_no);
    if (first) {
      first = false;
      if (fields[0] == "id_i" && fields[1] == "id_j") continue;
    }
    for (const auto& id : fields) {
      if (!roster.position(id)) throw IngestError("unknown id '" + id + "'", line_no);
    }
    if (fields[0] == fields[1]) {
      if (warnings) {
        warnings->push_back("line " + std::to_string(line_no) + ": self-loop '" + fields[0] +
                            "' ignored");
      }
      continue;
    }
    edges.emplace_back(fields[0], fields[1]);
  }
  return edges;
}

std::vector<Edge> ingest_edges(const std::filesystem::path& path, const Roster& roster,
                               std::vector<std::string>* warnings) {
  auto in = open(path);
  return parse_edges(in, roster, warnings);
}

std::string roster_csv(const Roster& roster) {
  std::string out = "# units: x,y in feet\nid,x,y,gang\n";
  for (const auto& ind : roster.individuals()) {
    out += ind.id + "," + number(ind.x) + "," + number(ind.y) + "," + ind.gang + "\n";
  }
  return out;
}

std::string edges_csv(const std::vector<Edge>& edges) {
  std::string out = "id_i,id_j\n";
  for (const auto& [a, b] : edges) out += a + "," + b + "\n";
  return out;
}

std::string partition_csv(const Partition& p, const Roster& roster) {
  validate_partition(p, roster.size());
  std::string out = "id,cluster\n";
  for (std::size_t i = 0; i < roster.size(); ++i) {
    out += roster[i].id + "," + std::to_string(p.assign[i]) + "\n";
  }
  return out;
}

std::vector<Edge> edges_from_matrix(const SymmetricMatrix& m, const Roster& roster) {
  if (m.size() != roster.size()) throw DimensionError("matrix does not match roster");
  std::vector<Edge> out;
  for (const auto& [i, j] : upper_links(m)) out.emplace_back(roster[i].id, roster[j].id);
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace geosocial
