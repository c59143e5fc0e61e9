#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hellinger/estimation.hpp"

namespace hellinger::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// --- JSON -----------------------------------------------------------------------

/// {"rows", "cols", "data": [[re, im], ...]} in row-major order.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const Realization& r);
Realization realization_from_json(const Json& j);

Json to_json(const FilterBank& g);
FilterBank bank_from_json(const Json& j);

Json to_json(const RealVector& v);
RealVector real_vector_from_json(const Json& j);

/// {"a": [[re, im], ...], "sigma_e": s} with a_0 = 1.
ArModel ar_model_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

// --- CSV ------------------------------------------------------------------------

/// Shortest round-trip decimal form, independent of the locale.
std::string format_double(double x);
double parse_double(std::string_view s);

/// Header t,re_1,im_1,...; one sample per row.
void write_time_series(const std::filesystem::path& path, const TimeSeries& y);
/// Accepts the layout above, or only re_k columns for real data.
TimeSeries read_time_series(const std::filesystem::path& path);

/// Header theta,re_11,im_11,re_12,... with entries row-major.
void write_spectrum(const std::filesystem::path& path, const std::vector<double>& thetas,
                    const std::vector<Matrix>& values);

struct SpectrumTable {
  std::vector<double> thetas;
  std::vector<Matrix> values;
};
SpectrumTable read_spectrum(const std::filesystem::path& path);

/// Header iter,J,grad_norm,t,backtracks,constraint_residual,decrease.
void write_trace(const std::filesystem::path& path, const SolverTrace& trace);

/// theta,<column> pairs.
void write_curve(const std::filesystem::path& path, const std::vector<double>& thetas,
                 const RealVector& values, const std::string& column);

// --- hashing --------------------------------------------------------------------

/// 64-bit FNV-1a of the file contents as 16 hex digits.
std::string fnv1a_file(const std::filesystem::path& path);
std::string fnv1a(std::string_view bytes);

}  // namespace hellinger::io
