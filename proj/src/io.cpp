#include "fer/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fer/error.hpp"

namespace fer::io {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
    T value{};
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
    return value;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

void check_written(std::ostream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

/// Parses `# n=<N>` and returns N, or nothing when the line has another shape.
std::optional<Index> parse_n_header(std::string_view line, std::size_t lineno) {
    auto toks = split_ws(line);
    if (toks.size() == 2 && toks[0] == "#" && toks[1].starts_with("n="))
        return parse_number<Index>(toks[1].substr(2), lineno, "node count");
    if (toks.size() == 1 && toks[0].starts_with("#n="))
        return parse_number<Index>(toks[0].substr(3), lineno, "node count");
    return std::nullopt;
}

struct RawEntry {
    Triplet t;
    std::size_t line;
};

ReadResult finish(Index n, std::vector<RawEntry>& raw, WeightMode mode) {
    // Duplicate detection here so the error can name the line.
    std::vector<std::size_t> order(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto key = [&](std::size_t i) {
        return static_cast<std::uint64_t>(raw[i].t.row) * static_cast<std::uint64_t>(n) +
               static_cast<std::uint64_t>(raw[i].t.col);
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return key(a) != key(b) ? key(a) < key(b) : raw[a].line < raw[b].line;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (key(order[i]) == key(order[i - 1]))
            throw ParseError(raw[order[i]].line, "duplicate coordinate");
    }
    std::vector<Triplet> triplets;
    triplets.reserve(raw.size());
    for (const auto& r : raw) triplets.push_back(r.t);
    std::size_t dropped = 0;
    auto m = WeightedSparseMatrix::from_triplets(n, triplets, mode, &dropped);
    return ReadResult{std::move(m), dropped};
}

ReadResult read_matrix_market(const std::filesystem::path& path, bool want_real) {
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw ParseError(1, "empty file");
    ++lineno;
    auto banner = split_ws(line);
    if (banner.size() != 5 || lower(banner[0]) != "%%matrixmarket" || lower(banner[1]) != "matrix")
        throw ParseError(lineno, "malformed Matrix Market header");
    if (lower(banner[2]) != "coordinate")
        throw ParseError(lineno, "only coordinate format is supported");
    const std::string field = lower(banner[3]);
    const bool file_pattern = field == "pattern";
    if (!file_pattern && field != "real" && field != "integer")
        throw ParseError(lineno, "unsupported field '" + std::string(banner[3]) + "'");
    if (lower(banner[4]) != "general")
        throw ParseError(lineno, "only general symmetry is supported, got '" +
                                     std::string(banner[4]) + "'");
    if (file_pattern == want_real)
        throw ParseError(lineno, want_real ? "expected a real matrix, file holds a pattern"
                                           : "expected a pattern matrix, file holds values");

    WeightMode mode = want_real ? WeightMode::external : WeightMode::all_ones;
    bool have_size = false;
    Index n = 0;
    std::size_t declared = 0;
    std::vector<RawEntry> raw;

    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        if (line.front() == '%') {
            constexpr std::string_view tag = "% weight_mode=";
            if (want_real && std::string_view(line).starts_with(tag)) {
                auto text = std::string_view(line).substr(tag.size());
                while (!text.empty() && (text.back() == '\r' || text.back() == ' '))
                    text.remove_suffix(1);
                try {
                    mode = parse_weight_mode(text);
                } catch (const Error& e) {
                    throw ParseError(lineno, e.what());
                }
            }
            continue;
        }
        auto toks = split_ws(line);
        if (!have_size) {
            if (toks.size() != 3) throw ParseError(lineno, "malformed size line");
            const auto rows = parse_number<Index>(toks[0], lineno, "row count");
            const auto cols = parse_number<Index>(toks[1], lineno, "column count");
            const auto nnz = parse_number<Index>(toks[2], lineno, "entry count");
            if (rows != cols)
                throw ParseError(lineno, "non-square matrix " + std::to_string(rows) + "x" +
                                             std::to_string(cols));
            if (rows < 1) throw ParseError(lineno, "matrix dimension must be positive");
            if (nnz < 0 || static_cast<double>(nnz) > static_cast<double>(rows) * rows)
                throw ParseError(lineno, "invalid entry count");
            n = rows;
            declared = static_cast<std::size_t>(nnz);
            raw.reserve(declared);
            have_size = true;
            continue;
        }
        const std::size_t expected_tokens = want_real ? 3 : 2;
        if (toks.size() != expected_tokens)
            throw ParseError(lineno, "expected " + std::to_string(expected_tokens) +
                                         " fields per entry");
        if (raw.size() == declared) throw ParseError(lineno, "more entries than declared");
        const auto i = parse_number<Index>(toks[0], lineno, "row index");
        const auto j = parse_number<Index>(toks[1], lineno, "column index");
        if (i < 1 || i > n || j < 1 || j > n)
            throw ParseError(lineno, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                                         ") out of range");
        double v = 1.0;
        if (want_real) {
            v = parse_number<double>(toks[2], lineno, "value");
            if (!std::isfinite(v)) throw ParseError(lineno, "non-finite value");
        }
        raw.push_back({{i - 1, j - 1, v}, lineno});
    }
    if (!have_size) throw ParseError(lineno, "missing size line");
    if (raw.size() != declared)
        throw ParseError(lineno, "expected " + std::to_string(declared) + " entries, found " +
                                     std::to_string(raw.size()));
    return finish(n, raw, mode);
}

ReadResult read_edge_list(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    std::optional<Index> n;
    std::vector<RawEntry> raw;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        if (!n) {
            n = parse_n_header(line, lineno);
            if (!n) throw ParseError(lineno, "edge list must start with '# n=<N>'");
            if (*n < 1) throw ParseError(lineno, "node count must be positive");
            continue;
        }
        if (line.front() == '#') continue;
        auto toks = split_ws(line);
        if (toks.size() != 2) throw ParseError(lineno, "expected 'src dst'");
        const auto src = parse_number<Index>(toks[0], lineno, "source node");
        const auto dst = parse_number<Index>(toks[1], lineno, "target node");
        if (src < 0 || src >= *n || dst < 0 || dst >= *n)
            throw ParseError(lineno, "node index out of range");
        // Edge src→dst is entry (dst, src).
        raw.push_back({{dst, src, 1.0}, lineno});
    }
    if (!n) throw ParseError(lineno, "missing '# n=<N>' header");
    return finish(*n, raw, WeightMode::all_ones);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::string format_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string_view to_string(MatrixFileFormat f) {
    switch (f) {
        case MatrixFileFormat::matrix_market_real: return "matrix-market-real";
        case MatrixFileFormat::matrix_market_pattern: return "matrix-market-pattern";
        case MatrixFileFormat::edge_list: return "edge-list";
    }
    return "edge-list";
}

MatrixFileFormat parse_format(std::string_view text) {
    if (text == "matrix-market-real" || text == "mtx") return MatrixFileFormat::matrix_market_real;
    if (text == "matrix-market-pattern") return MatrixFileFormat::matrix_market_pattern;
    if (text == "edge-list") return MatrixFileFormat::edge_list;
    throw Error("unknown matrix format '" + std::string(text) + "'");
}

MatrixFileFormat detect_format(const std::filesystem::path& path) {
    const auto ext = lower(path.extension().string());
    if (ext == ".el" || ext == ".edges" || ext == ".txt") return MatrixFileFormat::edge_list;
    if (ext != ".mtx") throw Error("cannot infer matrix format from '" + path.string() + "'");
    std::ifstream in(path);
    std::string line;
    if (in && std::getline(in, line)) {
        auto toks = split_ws(line);
        if (toks.size() >= 4 && lower(toks[3]) == "pattern")
            return MatrixFileFormat::matrix_market_pattern;
    }
    return MatrixFileFormat::matrix_market_real;
}

ReadResult read_matrix(const std::filesystem::path& path, MatrixFileFormat format) {
    switch (format) {
        case MatrixFileFormat::matrix_market_real: return read_matrix_market(path, true);
        case MatrixFileFormat::matrix_market_pattern: return read_matrix_market(path, false);
        case MatrixFileFormat::edge_list: return read_edge_list(path);
    }
    throw Error("unknown matrix format");
}

ReadResult read_matrix(const std::filesystem::path& path) {
    return read_matrix(path, detect_format(path));
}

void write_matrix(const WeightedSparseMatrix& m, const std::filesystem::path& path,
                  MatrixFileFormat format) {
    auto out = open_out(path);
    const auto entries = m.pattern().entries();
    const auto values = m.values();
    switch (format) {
        case MatrixFileFormat::matrix_market_real:
            out << "%%MatrixMarket matrix coordinate real general\n";
            out << "% weight_mode=" << to_string(m.weight_mode()) << '\n';
            out << m.n() << ' ' << m.n() << ' ' << m.nnz() << '\n';
            for (std::size_t i = 0; i < entries.size(); ++i)
                out << entries[i].row + 1 << ' ' << entries[i].col + 1 << ' '
                    << format_double(values[i]) << '\n';
            break;
        case MatrixFileFormat::matrix_market_pattern:
            out << "%%MatrixMarket matrix coordinate pattern general\n";
            out << m.n() << ' ' << m.n() << ' ' << m.nnz() << '\n';
            for (const auto& e : entries) out << e.row + 1 << ' ' << e.col + 1 << '\n';
            break;
        case MatrixFileFormat::edge_list:
            out << "# n=" << m.n() << '\n';
            for (const auto& e : entries) out << e.col << ' ' << e.row << '\n';
            break;
    }
    check_written(out, path);
}

DegreeDistributions read_degdist(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    std::optional<Index> n;
    std::map<Index, double> rows[2];

    while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        if (line.front() == '#') {
            if (auto v = parse_n_header(line, lineno)) {
                if (n) throw ParseError(lineno, "repeated n header");
                n = v;
            }
            continue;
        }
        auto cols = split_csv(line);
        if (cols.size() != 3) throw ParseError(lineno, "expected kind,degree,frequency");
        if (cols[0] == "kind") continue;
        int kind;
        if (cols[0] == "in") kind = 0;
        else if (cols[0] == "out") kind = 1;
        else throw ParseError(lineno, "unknown kind '" + std::string(cols[0]) + "'");
        const auto k = parse_number<Index>(cols[1], lineno, "degree");
        if (k < 0) throw ParseError(lineno, "negative degree");
        const auto f = parse_number<double>(cols[2], lineno, "frequency");
        if (!(f >= 0.0 && f <= 1.0)) throw ParseError(lineno, "frequency outside [0,1]");
        if (!rows[kind].emplace(k, f).second) throw ParseError(lineno, "repeated degree");
    }
    if (!n) throw ParseError(0, "missing '# n=<N>' header");
    if (*n < 1) throw ParseError(0, "node count must be positive");

    auto build = [&](int kind) {
        const DegreeKind dk = kind == 0 ? DegreeKind::in : DegreeKind::out;
        if (rows[kind].empty())
            throw ParseError(0, "no rows for kind '" + std::string(to_string(dk)) + "'");
        const Index max_k = rows[kind].rbegin()->first;
        if (max_k > *n) throw ParseError(0, "degree exceeds node count");
        std::vector<double> probs(static_cast<std::size_t>(max_k) + 1, 0.0);
        for (auto [k, f] : rows[kind]) probs[static_cast<std::size_t>(k)] = f;
        try {
            return DegreeDistribution::from_frequencies(std::move(probs), *n, dk);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(0, e.what());
        }
    };
    auto p_in = build(0);
    auto p_out = build(1);
    return DegreeDistributions{std::move(p_in), std::move(p_out), *n};
}

void write_degdist(const DegreeDistribution& p_in, const DegreeDistribution& p_out, Index n,
                   const std::filesystem::path& path) {
    if (n < 1) throw Error("node count must be positive");
    if (p_in.support().empty() || p_out.support().empty())
        throw Error("degree distribution has empty support");
    auto out = open_out(path);
    out << "# n=" << n << '\n' << "kind,degree,frequency\n";
    for (const auto* d : {&p_in, &p_out}) {
        for (Index k : d->support())
            out << to_string(d->kind()) << ',' << k << ',' << format_double(d->prob(k)) << '\n';
    }
    check_written(out, path);
}

void append_bench_record(const BenchRecord& rec, const std::filesystem::path& path) {
    auto require_finite = [](double v, const char* what) {
        if (!std::isfinite(v)) throw Error(std::string("bench record has non-finite ") + what);
    };
    require_finite(rec.k_avg, "k_avg");
    require_finite(rec.r_m, "r_m");
    require_finite(rec.t_seconds, "t_seconds");
    if (rec.gamma) require_finite(*rec.gamma, "gamma");
    if (rec.t_seconds < 0.0) throw Error("bench record has negative t_seconds");

    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot open '" + path.string() + "' for appending");
    if (fresh) out << kBenchHeader << '\n';
    out << to_string(rec.experiment) << ',' << to_string(rec.method) << ',' << to_string(rec.dist)
        << ',' << rec.n << ',' << format_shortest(rec.k_avg) << ','
        << (rec.gamma ? format_shortest(*rec.gamma) : std::string()) << ','
        << to_string(rec.weight_mode) << ',' << rec.seed << ',' << rec.rank << ','
        << format_shortest(rec.r_m) << ',' << format_shortest(rec.t_seconds) << ','
        << (rec.converged ? (*rec.converged ? "true" : "false") : "") << '\n';
    check_written(out, path);
}

}  // namespace fer::io
