#include "mbda/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mbda {

namespace io {

void write_u32(std::ostream& out, std::uint32_t value) {
    unsigned char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

void write_f64(std::ostream& out, double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

void write_string(std::ostream& out, const std::string& value) {
    write_u32(out, static_cast<std::uint32_t>(value.size()));
    out.write(value.data(), static_cast<std::streamsize>(value.size()));
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) throw std::runtime_error("binary read: truncated stream");
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) value |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return value;
}

double read_f64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw std::runtime_error("binary read: truncated stream");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    double value;
    std::memcpy(&value, &bits, sizeof(value));
    return value;
}

std::string read_string(std::istream& in) {
    const std::uint32_t size = read_u32(in);
    std::string value(size, '\0');
    in.read(value.data(), static_cast<std::streamsize>(size));
    if (!in) throw std::runtime_error("binary read: truncated string");
    return value;
}

void write_matrix(std::ostream& out, const Matrix& m) {
    write_u32(out, static_cast<std::uint32_t>(m.rows()));
    write_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) write_f64(out, m(r, c));
}

Matrix read_matrix(std::istream& in) {
    const Index rows = static_cast<Index>(read_u32(in));
    const Index cols = static_cast<Index>(read_u32(in));
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = read_f64(in);
    return m;
}

namespace {

void write_magic(std::ostream& out, const char magic[4]) { out.write(magic, 4); }

void expect_magic(std::istream& in, const char magic[4], const char* what) {
    char buf[4];
    in.read(buf, 4);
    if (!in || std::memcmp(buf, magic, 4) != 0)
        throw std::runtime_error(std::string(what) + ": bad magic header");
}

}  // namespace

}  // namespace io

void save_tensor(std::ostream& out, const Tensor& tensor) {
    io::write_magic(out, "MBT1");
    io::write_u32(out, static_cast<std::uint32_t>(tensor.order()));
    for (Index d : tensor.dims()) io::write_u32(out, static_cast<std::uint32_t>(d));
    for (Index n = 0; n < tensor.size(); ++n) io::write_f64(out, tensor[n]);
    if (!out) throw std::runtime_error("save_tensor: write failed");
}

Tensor load_tensor(std::istream& in) {
    io::expect_magic(in, "MBT1", "load_tensor");
    const std::uint32_t order = io::read_u32(in);
    std::vector<Index> dims(order);
    for (std::uint32_t i = 0; i < order; ++i) dims[i] = static_cast<Index>(io::read_u32(in));
    Tensor tensor(dims);
    for (Index n = 0; n < tensor.size(); ++n) tensor[n] = io::read_f64(in);
    return tensor;
}

void save_tensor(const std::string& path, const Tensor& tensor) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_tensor: cannot open " + path);
    save_tensor(out, tensor);
}

Tensor load_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_tensor: cannot open " + path);
    return load_tensor(in);
}

void save_subspace(std::ostream& out, const Subspace& subspace, const std::string& echo) {
    io::write_magic(out, "MBSS");
    io::write_u32(out, static_cast<std::uint32_t>(subspace.order()));
    for (const Matrix& m : subspace.mats) {
        io::write_u32(out, static_cast<std::uint32_t>(m.cols()));  // input extent
        io::write_u32(out, static_cast<std::uint32_t>(m.rows()));  // output extent
    }
    for (const Matrix& m : subspace.mats)
        for (Index r = 0; r < m.rows(); ++r)
            for (Index c = 0; c < m.cols(); ++c) io::write_f64(out, m(r, c));
    io::write_u32(out, static_cast<std::uint32_t>(subspace.iterations_run));
    io::write_u32(out, static_cast<std::uint32_t>(subspace.objective_trace.size()));
    for (double v : subspace.objective_trace) io::write_f64(out, v);
    io::write_string(out, echo);
    if (!out) throw std::runtime_error("save_subspace: write failed");
}

Subspace load_subspace(std::istream& in, std::string* echo) {
    io::expect_magic(in, "MBSS", "load_subspace");
    const std::uint32_t order = io::read_u32(in);
    std::vector<std::pair<Index, Index>> shapes(order);
    for (auto& [cols, rows] : shapes) {
        cols = static_cast<Index>(io::read_u32(in));
        rows = static_cast<Index>(io::read_u32(in));
    }
    Subspace subspace;
    subspace.mats.reserve(order);
    for (const auto& [cols, rows] : shapes) {
        Matrix m(rows, cols);
        for (Index r = 0; r < rows; ++r)
            for (Index c = 0; c < cols; ++c) m(r, c) = io::read_f64(in);
        subspace.mats.push_back(std::move(m));
    }
    subspace.iterations_run = static_cast<int>(io::read_u32(in));
    const std::uint32_t trace_size = io::read_u32(in);
    subspace.objective_trace.resize(trace_size);
    for (std::uint32_t i = 0; i < trace_size; ++i) subspace.objective_trace[i] = io::read_f64(in);
    const std::string echo_value = io::read_string(in);
    if (echo) *echo = echo_value;
    return subspace;
}

void save_subspace(const std::string& path, const Subspace& subspace, const std::string& echo) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_subspace: cannot open " + path);
    save_subspace(out, subspace, echo);
}

Subspace load_subspace(const std::string& path, std::string* echo) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_subspace: cannot open " + path);
    return load_subspace(in, echo);
}

void save_svm(std::ostream& out, const SvmModel& model) {
    io::write_magic(out, "MBSV");
    io::write_matrix(out, model.support_vectors);
    io::write_u32(out, static_cast<std::uint32_t>(model.dual_coefs.size()));
    for (Index i = 0; i < model.dual_coefs.size(); ++i) io::write_f64(out, model.dual_coefs[i]);
    io::write_f64(out, model.bias);
    io::write_f64(out, model.gamma);
    io::write_f64(out, model.c);
}

SvmModel load_svm(std::istream& in) {
    io::expect_magic(in, "MBSV", "load_svm");
    SvmModel model;
    model.support_vectors = io::read_matrix(in);
    const std::uint32_t n = io::read_u32(in);
    model.dual_coefs.resize(static_cast<Index>(n));
    for (std::uint32_t i = 0; i < n; ++i) model.dual_coefs[static_cast<Index>(i)] = io::read_f64(in);
    model.bias = io::read_f64(in);
    model.gamma = io::read_f64(in);
    model.c = io::read_f64(in);
    return model;
}

void save_pgm(const std::string& path, const Matrix& image) {
    if (image.rows() < 1 || image.cols() < 1)
        throw std::invalid_argument("save_pgm: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_pgm: cannot open " + path);
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(image.cols()));
    for (Index r = 0; r < image.rows(); ++r) {
        for (Index c = 0; c < image.cols(); ++c) {
            const double v = std::clamp(image(r, c), 0.0, 1.0);
            row[static_cast<std::size_t>(c)] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("save_pgm: write failed for " + path);
}

namespace {

// Reads the next whitespace-delimited PGM header token, skipping # comments.
std::string pgm_token(std::istream& in) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!token.empty()) return token;
            continue;
        }
        token += static_cast<char>(ch);
    }
    if (token.empty()) throw std::runtime_error("load_pgm: truncated header");
    return token;
}

}  // namespace

Matrix load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_pgm: cannot open " + path);
    if (pgm_token(in) != "P5") throw std::runtime_error("load_pgm: not a binary PGM: " + path);
    const int cols = std::stoi(pgm_token(in));
    const int rows = std::stoi(pgm_token(in));
    const int maxval = std::stoi(pgm_token(in));
    if (cols < 1 || rows < 1 || maxval != 255)
        throw std::runtime_error("load_pgm: unsupported PGM parameters in " + path);
    // The single whitespace byte after maxval was consumed by pgm_token.
    Matrix image(rows, cols);
    std::vector<unsigned char> row(static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!in) throw std::runtime_error("load_pgm: truncated pixel data in " + path);
        for (int c = 0; c < cols; ++c)
            image(r, c) = static_cast<double>(row[static_cast<std::size_t>(c)]) / 255.0;
    }
    return image;
}

void save_track(const std::string& path, const LandmarkTrack& track) {
    if (track.frames.empty()) throw std::invalid_argument("save_track: no frames");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_track: cannot open " + path);
    out << "frame,point_id,x,y\n";
    std::ostringstream line;
    line.precision(17);
    for (std::size_t f = 0; f < track.frames.size(); ++f) {
        const Matrix& pts = track.frames[f];
        for (Index p = 0; p < pts.rows(); ++p) {
            line.str("");
            line << (f + 1) << ',' << track.point_ids[static_cast<std::size_t>(p)] << ','
                 << pts(p, 0) << ',' << pts(p, 1) << '\n';
            out << line.str();
        }
    }
    if (!out) throw std::runtime_error("save_track: write failed for " + path);
}

LandmarkTrack load_track(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_track: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("frame,point_id,x,y", 0) != 0)
        throw std::runtime_error("load_track: missing header in " + path);

    struct Row {
        int frame;
        int point_id;
        double x, y;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Row row;
        char comma;
        std::istringstream fields(line);
        if (!(fields >> row.frame >> comma >> row.point_id >> comma >> row.x >> comma >> row.y))
            throw std::runtime_error("load_track: bad row '" + line + "' in " + path);
        rows.push_back(row);
    }
    if (rows.empty()) throw std::runtime_error("load_track: no rows in " + path);

    LandmarkTrack track;
    int max_frame = 0;
    for (const Row& row : rows) max_frame = std::max(max_frame, row.frame);
    for (const Row& row : rows) {
        if (row.frame == 1) track.point_ids.push_back(row.point_id);
    }
    if (track.point_ids.empty()) throw std::runtime_error("load_track: no frame-1 rows in " + path);
    const Index points = static_cast<Index>(track.point_ids.size());
    std::map<int, Index> row_of;
    for (Index p = 0; p < points; ++p) row_of[track.point_ids[static_cast<std::size_t>(p)]] = p;

    track.frames.assign(static_cast<std::size_t>(max_frame), Matrix::Zero(points, 2));
    std::vector<Index> seen(static_cast<std::size_t>(max_frame), 0);
    for (const Row& row : rows) {
        if (row.frame < 1) throw std::runtime_error("load_track: frames are 1-based in " + path);
        auto it = row_of.find(row.point_id);
        if (it == row_of.end())
            throw std::runtime_error("load_track: point id not present in frame 1 in " + path);
        Matrix& pts = track.frames[static_cast<std::size_t>(row.frame - 1)];
        pts(it->second, 0) = row.x;
        pts(it->second, 1) = row.y;
        ++seen[static_cast<std::size_t>(row.frame - 1)];
    }
    for (Index count : seen)
        if (count != points)
            throw std::runtime_error("load_track: inconsistent point count across frames in " + path);
    return track;
}

}  // namespace mbda
