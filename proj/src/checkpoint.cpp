#include "sbmdyn/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sbmdyn {

namespace {

constexpr char kMagic[8] = {'S', 'B', 'M', 'D', 'Y', 'N', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open " + path + " for writing");
    }
    template <class T>
    void pod(const T& v) { out_.write(reinterpret_cast<const char*>(&v), sizeof(T)); }
    void i64(long long v) { pod(static_cast<std::int64_t>(v)); }
    void f64(double v) { pod(v); }
    void str(const std::string& s) {
        i64(static_cast<long long>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void matrix(const Matrix& m) {
        i64(m.rows());
        i64(m.cols());
        out_.write(reinterpret_cast<const char*>(m.data()),
                   static_cast<std::streamsize>(sizeof(cplx) * m.size()));
    }
    void doubles(const std::vector<double>& v) {
        i64(static_cast<long long>(v.size()));
        out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * v.size()));
    }
    void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void finish(const std::string& path) {
        out_.flush();
        if (!out_) throw ConfigError("write failed: " + path);
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw NotFoundError("checkpoint not found: " + path);
    }
    template <class T>
    T pod() {
        T v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        check();
        return v;
    }
    long long i64(long long max = (1LL << 40)) {
        const auto v = pod<std::int64_t>();
        if (v < 0 || v > max) throw ConfigError(path_ + ": corrupt checkpoint (size field)");
        return v;
    }
    double f64() { return pod<double>(); }
    std::string str() {
        std::string s(static_cast<std::size_t>(i64(1 << 20)), '\0');
        in_.read(s.data(), static_cast<std::streamsize>(s.size()));
        check();
        return s;
    }
    Matrix matrix() {
        const auto r = i64(1 << 24), c = i64(1 << 24);
        Matrix m(r, c);
        in_.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(cplx) * m.size()));
        check();
        return m;
    }
    std::vector<double> doubles() {
        std::vector<double> v(static_cast<std::size_t>(i64(1 << 28)));
        in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * v.size()));
        check();
        return v;
    }
    void raw(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        check();
    }

private:
    void check() {
        if (!in_) throw ConfigError(path_ + ": truncated checkpoint");
    }
    std::string path_;
    std::ifstream in_;
};

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    Writer w(path);
    w.raw(kMagic, sizeof(kMagic));
    w.pod(kVersion);
    w.f64(ck.t);
    w.str(ck.tag);
    const MpsState& s = ck.state;
    w.i64(s.size());
    for (int k = 0; k < s.size(); ++k) {
        const Tensor3& t = s.tensors[k];
        w.i64(t.dl);
        w.i64(t.dp);
        w.i64(t.dr);
        w.matrix(t.m);
        w.matrix(s.obb[k]);
        w.i64(s.phys_dim[k]);
        w.i64(s.anc_dim[k]);
        w.i64(s.fixed_basis[k]);
        w.f64(s.shifts[k]);
    }
    w.i64(s.center);
    w.f64(s.trunc_weight);
    const TrajectoryRecord& r = ck.trajectory;
    w.doubles(r.times);
    w.doubles(r.sigma_z);
    w.doubles(r.norm);
    w.doubles(r.energy);
    w.doubles(r.trunc_err);
    w.finish(path);
}

Checkpoint load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw ConfigError(path + ": not a checkpoint file");
    const auto version = r.pod<std::uint32_t>();
    if (version != kVersion) throw ConfigError(path + ": unsupported checkpoint version");
    Checkpoint ck;
    ck.t = r.f64();
    ck.tag = r.str();
    const int n = static_cast<int>(r.i64(1 << 20));
    MpsState& s = ck.state;
    for (int k = 0; k < n; ++k) {
        Tensor3 t;
        t.dl = static_cast<int>(r.i64());
        t.dp = static_cast<int>(r.i64());
        t.dr = static_cast<int>(r.i64());
        t.m = r.matrix();
        if (t.m.rows() != static_cast<Eigen::Index>(t.dl) * t.dp || t.m.cols() != t.dr)
            throw ConfigError(path + ": tensor shape mismatch");
        s.tensors.push_back(std::move(t));
        s.obb.push_back(r.matrix());
        s.phys_dim.push_back(static_cast<int>(r.i64()));
        s.anc_dim.push_back(static_cast<int>(r.i64()));
        s.fixed_basis.push_back(static_cast<char>(r.i64(1)));
        s.shifts.push_back(r.f64());
    }
    s.center = static_cast<int>(r.i64(n));
    s.trunc_weight = r.f64();
    TrajectoryRecord& tr = ck.trajectory;
    tr.times = r.doubles();
    tr.sigma_z = r.doubles();
    tr.norm = r.doubles();
    tr.energy = r.doubles();
    tr.trunc_err = r.doubles();
    return ck;
}

void write_shift_table(const std::string& path, const std::vector<double>& shifts) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    std::fprintf(f, "k,x_k\n");
    for (std::size_t k = 0; k < shifts.size(); ++k) std::fprintf(f, "%zu,%.15g\n", k, shifts[k]);
    std::fclose(f);
}

std::vector<double> read_shift_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("shift table not found: " + path);
    std::string line;
    std::getline(in, line);
    if (line != "k,x_k") throw ConfigError(path + ": unexpected shift table header");
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path + ": malformed row");
        out.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
    }
    return out;
}

}  // namespace sbmdyn
