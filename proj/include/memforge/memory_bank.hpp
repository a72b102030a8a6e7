#pragma once
// The LTM embedding bank: one row per canonical edge, rows in edge-key order.
//
// Binary export layout (all little-endian):
//   u64 N | u64 d | N*d IEEE-754 doubles, row-major | JSON trailer
// The trailer holds {"built_from": str, "provenance": [[s, r, o], ...]} and is
// optional when the file only carries a matrix (e.g. a projection).

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include "memforge/embedding.hpp"
#include "memforge/error.hpp"
#include "memforge/graph.hpp"
#include "memforge/matrix.hpp"
#include "memforge/snapshot.hpp"

namespace memforge {

struct MemoryBank {
    Matrix matrix;
    std::vector<EdgeKey> provenance;
    std::string built_from;  // SHA-256 of the source snapshot serialization

    std::size_t size() const { return matrix.rows(); }
    std::size_t dimension() const { return matrix.cols(); }

    bool operator==(const MemoryBank&) const = default;
};

inline MemoryBank build_memory_bank(const KnowledgeGraph& graph, const EmbeddingProvider& provider) {
    if (graph.empty()) throw DataError("empty_ltm", "empty LTM");
    MemoryBank bank;
    const std::size_t d = provider.dimension();
    bank.matrix = Matrix(graph.edges().size(), d);
    std::size_t i = 0;
    for (const auto& [key, _] : graph.edges()) {
        const Vector v = provider.embed(key.to_string());
        if (v.size() != d) throw InternalError("dimension_mismatch", "provider returned wrong dimension");
        std::copy(v.begin(), v.end(), bank.matrix.row(i).begin());
        bank.provenance.push_back(key);
        ++i;
    }
    bank.built_from = sha256(snapshot_to_string(graph)).hex();
    return bank;
}

namespace detail {

inline void write_u64_le(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, 8);
}

inline bool read_u64_le(std::istream& in, std::uint64_t& v) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8)) return false;
    v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return true;
}

}  // namespace detail

inline void write_matrix_binary(std::ostream& out, const Matrix& m) {
    detail::write_u64_le(out, m.rows());
    detail::write_u64_le(out, m.cols());
    for (double x : m.data()) detail::write_u64_le(out, std::bit_cast<std::uint64_t>(x));
}

inline nlohmann::json provenance_to_json(const std::vector<EdgeKey>& provenance) {
    nlohmann::json arr = nlohmann::json::array();
    for (const EdgeKey& k : provenance) arr.push_back({k.subject, k.relation, k.object});
    return arr;
}

inline void write_bank_binary(std::ostream& out, const MemoryBank& bank) {
    write_matrix_binary(out, bank.matrix);
    nlohmann::json trailer{{"built_from", bank.built_from},
                           {"provenance", provenance_to_json(bank.provenance)}};
    out << trailer.dump();
}

inline nlohmann::json bank_to_json(const MemoryBank& bank) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < bank.size(); ++i) {
        auto r = bank.matrix.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return {{"n", bank.size()},
            {"d", bank.dimension()},
            {"built_from", bank.built_from},
            {"rows", std::move(rows)},
            {"provenance", provenance_to_json(bank.provenance)}};
}

struct BinaryMatrixFile {
    Matrix matrix;
    std::string trailer;  // raw bytes after the matrix, possibly empty
};

inline BinaryMatrixFile read_matrix_binary(std::istream& in) {
    std::uint64_t n = 0, d = 0;
    if (!detail::read_u64_le(in, n) || !detail::read_u64_le(in, d)) {
        throw DataError("corrupt_bank", "bank file too short for its header");
    }
    if (d != 0 && n > (std::uint64_t{1} << 40) / d) {
        throw DataError("corrupt_bank", "bank header declares an implausible size");
    }
    std::vector<double> data(n * d);
    for (double& x : data) {
        std::uint64_t bits = 0;
        if (!detail::read_u64_le(in, bits)) throw DataError("corrupt_bank", "bank matrix truncated");
        x = std::bit_cast<double>(bits);
    }
    BinaryMatrixFile out{Matrix(n, d, std::move(data)), {}};
    out.trailer.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return out;
}

inline MemoryBank read_bank_binary(std::istream& in) {
    BinaryMatrixFile file = read_matrix_binary(in);
    MemoryBank bank;
    bank.matrix = std::move(file.matrix);
    try {
        const auto trailer = nlohmann::json::parse(file.trailer);
        bank.built_from = trailer.at("built_from").get<std::string>();
        for (const auto& k : trailer.at("provenance")) {
            bank.provenance.push_back(
                {k.at(0).get<std::string>(), k.at(1).get<std::string>(), k.at(2).get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt_bank", std::string("bank trailer is malformed: ") + e.what());
    }
    if (bank.provenance.size() != bank.size()) {
        throw DataError("corrupt_bank", "bank provenance does not match row count");
    }
    return bank;
}

// Loads a d x d projection stored in the bank binary layout.
inline Matrix load_projection(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("file_not_found", "cannot open '" + path.string() + "'");
    Matrix m = read_matrix_binary(in).matrix;
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DataError("invalid_projection", "projection '" + path.string() + "' is not square");
    }
    return m;
}

}  // namespace memforge
