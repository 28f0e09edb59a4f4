#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddwalk/system.hpp"

namespace ddwalk {
namespace io {

// Triplet matrix file: '#' starts a comment; first data line "n nnz_offdiag";
// then n lines "i diag_value"; then nnz lines "i j value"; optionally n more
// lines "i b_value" (b defaults to zero when absent). 0-indexed ASCII reals.
SparseDDSystem read_triplet_file(const std::string& path);
void write_triplet_file(const std::string& path, const SparseDDSystem& s,
                        const std::vector<std::string>& comment_lines = {});

// Edge-list file: lines "u v w" with w optional (default 1.0), undirected,
// 0-indexed. n is max vertex id + 1 unless a larger n is forced.
struct EdgeList {
    int n = 0;
    std::vector<std::pair<std::pair<int, int>, double>> edges;
};
EdgeList read_edge_list(const std::string& path, int force_n = 0);
void write_edge_list(const std::string& path, const EdgeList& el);

std::vector<double> read_opinions(const std::string& path);
void write_opinions(const std::string& path, const std::vector<double>& values);

}  // namespace io
}  // namespace ddwalk
