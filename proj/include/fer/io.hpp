#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "fer/bench_record.hpp"
#include "fer/core.hpp"

namespace fer::io {

enum class MatrixFileFormat { matrix_market_real, matrix_market_pattern, edge_list };

std::string_view to_string(MatrixFileFormat f);
MatrixFileFormat parse_format(std::string_view text);

/// `.mtx` files are sniffed for `real`/`pattern` in their banner; `.el`,
/// `.edges` and `.txt` are edge lists.
MatrixFileFormat detect_format(const std::filesystem::path& path);

struct ReadResult {
    WeightedSparseMatrix matrix;
    std::size_t dropped_zeros = 0;
};

/// Pattern and edge-list inputs get value 1 everywhere and weight mode all-ones.
/// Errors are ParseError with the offending line number.
ReadResult read_matrix(const std::filesystem::path& path, MatrixFileFormat format);
ReadResult read_matrix(const std::filesystem::path& path);

/// Real values are written with 17 significant digits so they read back bit-identical.
void write_matrix(const WeightedSparseMatrix& m, const std::filesystem::path& path,
                  MatrixFileFormat format);

struct DegreeDistributions {
    DegreeDistribution p_in;
    DegreeDistribution p_out;
    Index n;
};

/// Format:
///     # n=<N>
///     kind,degree,frequency
///     in,1,0.5
///     ...
DegreeDistributions read_degdist(const std::filesystem::path& path);
void write_degdist(const DegreeDistribution& p_in, const DegreeDistribution& p_out, Index n,
                   const std::filesystem::path& path);

/// Column order of the benchmark CSV.
inline constexpr std::string_view kBenchHeader =
    "experiment,method,dist,n,k_avg,gamma,weight_mode,seed,rank,r_m,t_seconds,converged";

/// Appends one line, writing the header first when the file is absent or empty.
/// Single writer per file.
void append_bench_record(const BenchRecord& rec, const std::filesystem::path& path);

/// 17 significant digits, `%.17g` style.
std::string format_double(double v);

/// Shortest text that parses back to the same double.
std::string format_shortest(double v);

}  // namespace fer::io
