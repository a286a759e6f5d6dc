#include "ssahc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace ssahc::io {

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream stream(line);
    std::string token;
    while (stream >> token) tokens.push_back(token);
    return tokens;
}

double parse_double(const std::string& token, const std::filesystem::path& path, int line_no) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + token + "'");
    return value;
}

long parse_long(const std::string& token, const std::filesystem::path& path, int line_no) {
    long value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": not an integer: '" + token + "'");
    return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Recording read_embeddings(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ":1: empty file");
    auto header = split_tokens(line);
    if (header.size() != 3)
        throw ParseError(path.string() + ":1: header must be '<id> <num_segments> <dim>'");
    Recording rec;
    rec.id = header[0];
    const long n = parse_long(header[1], path, 1);
    const long d = parse_long(header[2], path, 1);
    if (n < 1 || d < 1) throw ParseError(path.string() + ":1: segment count and dim must be >= 1");

    rec.segments.reserve(static_cast<std::size_t>(n));
    rec.embeddings.resize(n, d);
    for (long row = 0; row < n; ++row) {
        const int line_no = static_cast<int>(row) + 2;
        if (!std::getline(in, line))
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unexpected end of file");
        auto tokens = split_tokens(line);
        if (static_cast<long>(tokens.size()) != d + 2)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(d + 2) + " fields, got " + std::to_string(tokens.size()));
        Segment seg;
        seg.start_sec = parse_double(tokens[0], path, line_no);
        seg.end_sec = parse_double(tokens[1], path, line_no);
        if (!(seg.end_sec > seg.start_sec))
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": segment end <= start");
        if (seg.start_sec < 0.0)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": negative segment start");
        if (!rec.segments.empty() && seg.start_sec < rec.segments.back().start_sec)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": segment starts must be non-decreasing");
        rec.segments.push_back(seg);
        for (long col = 0; col < d; ++col)
            rec.embeddings(row, col) = parse_double(tokens[static_cast<std::size_t>(col) + 2], path, line_no);
    }
    rec.validate();
    return rec;
}

void write_embeddings(const Recording& recording, const std::filesystem::path& path) {
    recording.validate();
    std::ofstream out = open_output(path);
    out << recording.id << ' ' << recording.num_segments() << ' ' << recording.dim() << '\n';
    for (int row = 0; row < recording.num_segments(); ++row) {
        const Segment& seg = recording.segments[static_cast<std::size_t>(row)];
        out << format_full(seg.start_sec) << ' ' << format_full(seg.end_sec);
        for (int col = 0; col < recording.dim(); ++col)
            out << ' ' << format_full(recording.embeddings(row, col));
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

std::vector<SpeakerTurn> read_rttm(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<SpeakerTurn> turns;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = split_tokens(line);
        if (tokens.empty() || tokens[0] != "SPEAKER") continue;
        if (tokens.size() != 10)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": SPEAKER line must have 10 fields, got " + std::to_string(tokens.size()));
        SpeakerTurn turn;
        turn.recording_id = tokens[1];
        turn.onset_sec = parse_double(tokens[3], path, line_no);
        turn.duration_sec = parse_double(tokens[4], path, line_no);
        turn.speaker = tokens[7];
        if (turn.onset_sec < 0.0)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": negative onset");
        if (!(turn.duration_sec > 0.0))
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": non-positive duration");
        turns.push_back(std::move(turn));
    }
    return turns;
}

void write_rttm(const std::vector<SpeakerTurn>& turns, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    char buf[64];
    for (const SpeakerTurn& turn : turns) {
        std::snprintf(buf, sizeof(buf), "%.3f %.3f", turn.onset_sec, turn.duration_sec);
        out << "SPEAKER " << turn.recording_id << " 1 " << buf << " <NA> <NA> " << turn.speaker
            << " <NA> <NA>\n";
    }
    if (!out) throw Error("write failed: " + path.string());
}

Matrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = split_tokens(line);
        if (tokens.empty()) continue;
        std::vector<double> row;
        row.reserve(tokens.size());
        for (const auto& token : tokens) row.push_back(parse_double(token, path, line_no));
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path.string() + ": empty matrix");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

void write_matrix(const Matrix& m, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_full(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

Matrix read_affinity_file(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ":1: empty file");
    auto header = split_tokens(line);
    if (header.size() != 1) throw ParseError(path.string() + ":1: expected the matrix size N");
    const long n = parse_long(header[0], path, 1);
    if (n < 1) throw ParseError(path.string() + ":1: N must be >= 1");
    Matrix m(n, n);
    for (long i = 0; i < n; ++i) {
        const int line_no = static_cast<int>(i) + 2;
        if (!std::getline(in, line))
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unexpected end of file");
        auto tokens = split_tokens(line);
        if (static_cast<long>(tokens.size()) != n)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(n) + " values, got " + std::to_string(tokens.size()));
        for (long j = 0; j < n; ++j) m(i, j) = parse_double(tokens[static_cast<std::size_t>(j)], path, line_no);
    }
    return m;
}

void write_affinity_file(const Matrix& m, const std::filesystem::path& path) {
    if (m.rows() != m.cols()) throw DimensionError("affinity matrix must be square");
    std::ofstream out = open_output(path);
    out << m.rows() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_full(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace ssahc::io
