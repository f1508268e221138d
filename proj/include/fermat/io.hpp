#pragma once

#include <filesystem>
#include <stdexcept>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fermat/geometry.hpp"
#include "fermat/metric.hpp"
#include "fermat/persistence.hpp"
#include "fermat/signal.hpp"

namespace fermat::io {

/// Malformed input file; the message names the file and line when known.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip representation with at most 17 significant digits;
/// +-inf as "inf" / "-inf".
std::string format_double(double value);
/// Accepts anything format_double produces; rejects NaN and trailing junk.
double parse_double(std::string_view text);

// Every writer takes extra comment lines, emitted as "# <line>" after the
// format's own header. Readers skip comment lines they do not recognise.
using Comments = std::vector<std::string>;

void write_point_cloud(std::ostream& out, const PointCloud& cloud, const Comments& comments = {});
PointCloud read_point_cloud(std::istream& in, const std::string& source = "<stream>");

void write_time_series(std::ostream& out, const TimeSeries& series, const Comments& comments = {});
/// `fallback_dt` is used when the file has no "# dt=" header.
TimeSeries read_time_series(std::istream& in, std::optional<double> fallback_dt = std::nullopt,
                            const std::string& source = "<stream>");

void write_distance_matrix(std::ostream& out, const DistanceMatrix& matrix, const Comments& comments = {});
DistanceMatrix read_distance_matrix(std::istream& in, const std::string& source = "<stream>");

void write_diagram(std::ostream& out, const PersistenceDiagram& diagram, const Comments& comments = {});
PersistenceDiagram read_diagram(std::istream& in, const std::string& source = "<stream>");

void write_score(std::ostream& out, const ChangePointScore& score, const Comments& comments = {});

// Path helpers; they throw std::runtime_error on I/O failure.
PointCloud load_point_cloud(const std::filesystem::path& path);
TimeSeries load_time_series(const std::filesystem::path& path, std::optional<double> fallback_dt = std::nullopt);
DistanceMatrix load_distance_matrix(const std::filesystem::path& path);
PersistenceDiagram load_diagram(const std::filesystem::path& path);

/// Opens `path` for writing, calls write(stream), and checks the stream.
template <typename Write>
void save(const std::filesystem::path& path, Write&& write);

}  // namespace fermat::io

#include <fstream>

template <typename Write>
void fermat::io::save(const std::filesystem::path& path, Write&& write) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write(out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}
