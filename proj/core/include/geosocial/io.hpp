#pragma once

#include "geosocial/graph.hpp"
#include "geosocial/model.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace geosocial {

// Roster CSV with header `id,x,y,gang` (any column order), coordinates in feet.
// Blank lines and lines starting with '#' are skipped.
Roster parse_roster(std::istream& in);
Roster ingest_roster(const std::filesystem::path& path);

// Edge CSV `id_i,id_j`; an optional header row `id_i,id_j` is accepted. Self-loops
// are dropped with a warning; unknown ids are errors.
std::vector<Edge> parse_edges(std::istream& in, const Roster& roster,
                              std::vector<std::string>* warnings = nullptr);
std::vector<Edge> ingest_edges(const std::filesystem::path& path, const Roster& roster,
                               std::vector<std::string>* warnings = nullptr);

std::string roster_csv(const Roster& roster);
std::string edges_csv(const std::vector<Edge>& edges);
std::string partition_csv(const Partition& p, const Roster& roster);

// Strictly-upper links of a 0/1 matrix as id pairs.
std::vector<Edge> edges_from_matrix(const SymmetricMatrix& m, const Roster& roster);

// Writes via a temporary sibling and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// FNV-1a 64-bit digest as 16 hex digits.
std::string content_hash(const std::string& bytes);

}  // namespace geosocial
