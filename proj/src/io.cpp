#include "fermat/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fermat::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Reads data lines; comment lines go to on_comment (text after '#').
class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    template <typename OnComment>
    bool next(std::string_view& line, OnComment&& on_comment) {
        while (std::getline(in_, buffer_)) {
            ++number_;
            std::string_view view = trim(buffer_);
            if (view.empty()) continue;
            if (view.front() == '#') {
                view.remove_prefix(1);
                on_comment(trim(view));
                continue;
            }
            line = view;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw FormatError(source_ + ":" + std::to_string(number_) + ": " + message);
    }

    double number(std::string_view text) const {
        try {
            return parse_double(text);
        } catch (const FormatError& e) {
            fail(e.what());
        }
    }

private:
    std::istream& in_;
    std::string source_;
    std::string buffer_;
    std::size_t number_ = 0;
};

/// Parses "key=value key=value" header comments.
std::map<std::string, std::string, std::less<>> key_values(std::string_view text) {
    std::map<std::string, std::string, std::less<>> out;
    for (auto token : split(text, ' ')) {
        auto eq = token.find('=');
        if (token.empty() || eq == std::string_view::npos) continue;
        out.emplace(std::string(token.substr(0, eq)), std::string(token.substr(eq + 1)));
    }
    return out;
}

void write_comments(std::ostream& out, const Comments& comments) {
    for (const auto& line : comments) out << "# " << line << '\n';
}

template <typename T>
T load(const std::filesystem::path& path, auto&& read) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read(in, path.string());
}

}  // namespace

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || result.ec != std::errc() || result.ptr != text.data() + text.size())
        throw FormatError("not a number: '" + std::string(text) + "'");
    if (std::isnan(value)) throw FormatError("NaN is not allowed");
    return value;
}

// ---------------------------------------------------------------------------
// Point clouds

void write_point_cloud(std::ostream& out, const PointCloud& cloud, const Comments& comments) {
    write_comments(out, comments);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        for (std::size_t c = 0; c < p.size(); ++c) out << (c ? "," : "") << format_double(p[c]);
        out << '\n';
    }
}

PointCloud read_point_cloud(std::istream& in, const std::string& source) {
    LineReader reader(in, source);
    std::string_view line;
    std::vector<double> coords;
    std::size_t dim = 0;
    while (reader.next(line, [](std::string_view) {})) {
        auto fields = split(line, ',');
        if (dim == 0) dim = fields.size();
        else if (fields.size() != dim)
            reader.fail("expected " + std::to_string(dim) + " coordinates, found " + std::to_string(fields.size()));
        for (auto f : fields) {
            double v = reader.number(f);
            if (!std::isfinite(v)) reader.fail("coordinates must be finite");
            coords.push_back(v);
        }
    }
    if (coords.empty()) throw FormatError(source + ": no points");
    return PointCloud(dim, std::move(coords), "file:" + source);
}

// ---------------------------------------------------------------------------
// Time series

void write_time_series(std::ostream& out, const TimeSeries& series, const Comments& comments) {
    out << "# dt=" << format_double(series.dt) << '\n';
    write_comments(out, comments);
    for (double v : series.values) out << format_double(v) << '\n';
}

TimeSeries read_time_series(std::istream& in, std::optional<double> fallback_dt, const std::string& source) {
    LineReader reader(in, source);
    std::string_view line;
    TimeSeries series;
    std::optional<double> dt;
    auto on_comment = [&](std::string_view comment) {
        auto kv = key_values(comment);
        if (auto it = kv.find("dt"); it != kv.end() && !dt) dt = reader.number(it->second);
    };
    while (reader.next(line, on_comment)) {
        auto fields = split(line, ',');
        if (fields.size() != 1) reader.fail("expected a single column");
        series.values.push_back(reader.number(fields[0]));
    }
    if (!dt) dt = fallback_dt;
    if (!dt) throw FormatError(source + ": missing '# dt=' header and no sampling step given");
    series.dt = *dt;
    if (series.values.empty()) throw FormatError(source + ": empty series");
    try {
        series.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(source + ": " + e.what());
    }
    return series;
}

// ---------------------------------------------------------------------------
// Distance matrices

void write_distance_matrix(std::ostream& out, const DistanceMatrix& matrix, const Comments& comments) {
    const auto& tag = matrix.tag();
    out << "# kind=" << to_string(tag.kind) << " n=" << matrix.size();
    if (!std::isnan(tag.p)) out << " p=" << format_double(tag.p);
    if (tag.k > 0) out << " k=" << tag.k;
    if (tag.rescaled) out << " rescaled=1";
    out << '\n';
    write_comments(out, comments);
    for (std::size_t i = 1; i < matrix.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) out << (j ? "," : "") << format_double(matrix(i, j));
        out << '\n';
    }
}

DistanceMatrix read_distance_matrix(std::istream& in, const std::string& source) {
    LineReader reader(in, source);
    std::optional<std::size_t> n;
    MetricTag tag;
    auto on_comment = [&](std::string_view comment) {
        auto kv = key_values(comment);
        auto kind = kv.find("kind");
        if (kind == kv.end() || n) return;
        try {
            tag.kind = parse_metric_kind(kind->second);
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
        auto size = kv.find("n");
        if (size == kv.end()) reader.fail("header lacks n=");
        double value = reader.number(size->second);
        if (!(value >= 0) || value != std::floor(value)) reader.fail("n must be a non-negative integer");
        n = static_cast<std::size_t>(value);
        if (auto p = kv.find("p"); p != kv.end() && !p->second.empty()) tag.p = reader.number(p->second);
        if (auto k = kv.find("k"); k != kv.end() && !k->second.empty())
            tag.k = static_cast<std::size_t>(reader.number(k->second));
        if (auto r = kv.find("rescaled"); r != kv.end()) tag.rescaled = r->second == "1" || r->second == "true";
    };
    std::string_view line;
    std::vector<double> lower;
    std::size_t row = 0;
    while (reader.next(line, on_comment)) {
        if (!n) reader.fail("data before the '# kind=... n=...' header");
        ++row;
        if (row >= *n) reader.fail("more rows than n - 1");
        auto fields = split(line, ',');
        if (fields.size() != row)
            reader.fail("row " + std::to_string(row) + " must have " + std::to_string(row) + " entries");
        for (auto f : fields) lower.push_back(reader.number(f));
    }
    if (!n) throw FormatError(source + ": missing '# kind=... n=...' header");
    if (*n > 0 && row != *n - 1) throw FormatError(source + ": expected " + std::to_string(*n - 1) + " rows");
    try {
        return DistanceMatrix(*n, std::move(lower), tag);
    } catch (const std::invalid_argument& e) {
        throw FormatError(source + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Diagrams and scores

void write_diagram(std::ostream& out, const PersistenceDiagram& diagram, const Comments& comments) {
    out << "# threshold=" << format_double(diagram.threshold) << '\n';
    write_comments(out, comments);
    for (const auto& bar : diagram.bars)
        out << bar.degree << ',' << format_double(bar.birth) << ',' << format_double(bar.death) << '\n';
}

PersistenceDiagram read_diagram(std::istream& in, const std::string& source) {
    LineReader reader(in, source);
    PersistenceDiagram diagram;
    bool have_threshold = false;
    auto on_comment = [&](std::string_view comment) {
        auto kv = key_values(comment);
        if (auto it = kv.find("threshold"); it != kv.end() && !have_threshold) {
            diagram.threshold = reader.number(it->second);
            have_threshold = true;
        }
    };
    std::string_view line;
    while (reader.next(line, on_comment)) {
        auto fields = split(line, ',');
        if (fields.size() != 3) reader.fail("expected degree,birth,death");
        double degree = reader.number(fields[0]);
        if (!(degree >= 0) || degree != std::floor(degree)) reader.fail("degree must be a non-negative integer");
        Bar bar{static_cast<int>(degree), reader.number(fields[1]), reader.number(fields[2])};
        if (!(bar.birth >= 0) || !(bar.death >= bar.birth) || std::isinf(bar.birth))
            reader.fail("bars need 0 <= birth <= death");
        if (bar.death > bar.birth) diagram.bars.push_back(bar);
    }
    if (!have_threshold) throw FormatError(source + ": missing '# threshold=' header");
    diagram.canonicalize();
    return diagram;
}

void write_score(std::ostream& out, const ChangePointScore& score, const Comments& comments) {
    write_comments(out, comments);
    out << "index,time,raw,smoothed\n";
    for (std::size_t i = 0; i < score.raw.size(); ++i)
        out << score.indices[i] << ',' << format_double(score.times[i]) << ',' << format_double(score.raw[i]) << ','
            << format_double(score.smoothed[i]) << '\n';
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
    return load<PointCloud>(path, [](std::istream& in, const std::string& s) { return read_point_cloud(in, s); });
}

TimeSeries load_time_series(const std::filesystem::path& path, std::optional<double> fallback_dt) {
    return load<TimeSeries>(
        path, [&](std::istream& in, const std::string& s) { return read_time_series(in, fallback_dt, s); });
}

DistanceMatrix load_distance_matrix(const std::filesystem::path& path) {
    return load<DistanceMatrix>(path,
                                [](std::istream& in, const std::string& s) { return read_distance_matrix(in, s); });
}

PersistenceDiagram load_diagram(const std::filesystem::path& path) {
    return load<PersistenceDiagram>(path, [](std::istream& in, const std::string& s) { return read_diagram(in, s); });
}

}  // namespace fermat::io
