#include "landau/snapshot_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "landau/coefficients.hpp"

namespace landau {

namespace {

constexpr char kFieldMagic[8] = {'L', 'N', 'D', 'F', '0', '0', '0', '1'};
constexpr char kCoeffMagic[8] = {'L', 'N', 'D', 'C', '0', '0', '0', '1'};

void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_i64(std::ostream& os, std::int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }

double get_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
std::int64_t get_i64(std::istream& is) {
    std::int64_t v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const DistributionField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
    os.write(kFieldMagic, 8);
    put_f64(os, f.time);
    put_i64(os, f.grid.space.dim);
    put_i64(os, f.grid.space.n);
    put_f64(os, f.grid.space.period);
    put_i64(os, f.grid.velocity.n);
    put_f64(os, f.grid.velocity.half_width);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * 8));
    if (!os) throw std::runtime_error("write_snapshot: write failed for " + path);
}

DistributionField read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kFieldMagic, 8) != 0)
        throw std::runtime_error("read_snapshot: bad magic in " + path);
    double time = get_f64(is);
    auto dim = static_cast<int>(get_i64(is));
    auto nx = static_cast<int>(get_i64(is));
    double lx = get_f64(is);
    auto nv = static_cast<int>(get_i64(is));
    double lv = get_f64(is);
    PhaseGrid grid{SpatialGrid(dim, nx, lx), VelocityGrid(nv, lv)};
    DistributionField f(grid, time);
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * 8));
    if (!is) throw std::runtime_error("read_snapshot: truncated data in " + path);
    return f;
}

void write_coefficients(const std::string& path, const CoefficientField& c) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_coefficients: cannot open " + path);
    os.write(kCoeffMagic, 8);
    put_f64(os, c.time);
    put_i64(os, 0);
    put_i64(os, 1);
    put_f64(os, c.gamma);
    put_i64(os, c.grid.n);
    put_f64(os, c.grid.half_width);
    auto dump = [&](const std::vector<double>& comp) {
        os.write(reinterpret_cast<const char*>(comp.data()),
                 static_cast<std::streamsize>(comp.size() * 8));
    };
    for (const auto& comp : c.a) dump(comp);
    for (const auto& comp : c.b) dump(comp);
    dump(c.c);
    if (!os) throw std::runtime_error("write_coefficients: write failed for " + path);
}

}  // namespace landau
