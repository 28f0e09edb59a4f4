#include "ddwalk/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ddwalk/errors.hpp"

namespace ddwalk {
namespace io {

namespace {

// Yields data lines with comments and blank lines stripped.
std::vector<std::string> data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

SparseDDSystem read_triplet_file(const std::string& path) {
    const auto lines = data_lines(path);
    std::size_t pos = 0;
    auto next_line = [&]() -> std::istringstream {
        if (pos >= lines.size()) throw ParseError(path + ": unexpected end of file");
        return std::istringstream(lines[pos++]);
    };

    int n = 0;
    long long nnz = 0;
    {
        auto ls = next_line();
        if (!(ls >> n >> nnz) || n <= 0 || nnz < 0)
            throw ParseError(path + ": bad header line");
    }
    std::vector<std::pair<int, double>> diag;
    diag.reserve(n);
    for (int i = 0; i < n; ++i) {
        auto ls = next_line();
        int idx;
        double v;
        if (!(ls >> idx >> v)) throw ParseError(path + ": bad diagonal line");
        diag.push_back({idx, v});
    }
    std::vector<std::pair<std::pair<int, int>, double>> offdiag;
    offdiag.reserve(nnz);
    for (long long e = 0; e < nnz; ++e) {
        auto ls = next_line();
        int i, j;
        double v;
        if (!(ls >> i >> j >> v)) throw ParseError(path + ": bad off-diagonal line");
        offdiag.push_back({{i, j}, v});
    }
    std::vector<double> b(n, 0.0);
    if (pos < lines.size()) {
        for (int i = 0; i < n; ++i) {
            auto ls = next_line();
            int idx;
            double v;
            if (!(ls >> idx >> v)) throw ParseError(path + ": bad rhs line");
            if (idx < 0 || idx >= n) throw ParseError(path + ": rhs index out of range");
            b[idx] = v;
        }
    }
    try {
        return SparseDDSystem::from_triplets(n, diag, offdiag, b);
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_triplet_file(const std::string& path, const SparseDDSystem& s,
                        const std::vector<std::string>& comment_lines) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out.precision(17);
    for (const auto& c : comment_lines) out << "# " << c << "\n";
    const Triplets t = s.to_triplets();
    out << t.n << " " << t.offdiag.size() << "\n";
    for (const auto& [i, v] : t.diag) out << i << " " << v << "\n";
    for (const auto& [ij, v] : t.offdiag) out << ij.first << " " << ij.second << " " << v << "\n";
    for (int i = 0; i < t.n; ++i) out << i << " " << t.b[i] << "\n";
    if (!out) throw IoError("write failed on " + path);
}

EdgeList read_edge_list(const std::string& path, int force_n) {
    EdgeList el;
    el.n = force_n;
    for (const auto& line : data_lines(path)) {
        std::istringstream ls(line);
        int u, v;
        double w = 1.0;
        if (!(ls >> u >> v)) throw ParseError(path + ": bad edge line '" + line + "'");
        ls >> w;  // optional weight
        if (u < 0 || v < 0) throw ParseError(path + ": negative vertex id");
        el.edges.push_back({{u, v}, w});
        el.n = std::max({el.n, u + 1, v + 1});
    }
    return el;
}

void write_edge_list(const std::string& path, const EdgeList& el) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out.precision(17);
    for (const auto& [uv, w] : el.edges)
        out << uv.first << " " << uv.second << " " << w << "\n";
    if (!out) throw IoError("write failed on " + path);
}

std::vector<double> read_opinions(const std::string& path) {
    std::vector<double> values;
    for (const auto& line : data_lines(path)) {
        std::istringstream ls(line);
        double v;
        if (!(ls >> v)) throw ParseError(path + ": bad opinion line");
        values.push_back(v);
    }
    return values;
}

void write_opinions(const std::string& path, const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out.precision(17);
    for (double v : values) out << v << "\n";
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace io
}  // namespace ddwalk
