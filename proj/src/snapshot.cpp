#include "hflow/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hflow {

namespace {
constexpr char kMagic[4] = {'H', 'F', 'S', 'N'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_snapshot(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path);
    const Lattice& lat = f.lattice();
    std::uint32_t hdr[5] = {kVersion, static_cast<std::uint32_t>(lat.dim()),
                            static_cast<std::uint32_t>(lat.n()),
                            static_cast<std::uint32_t>(f.shape().kind),
                            static_cast<std::uint32_t>(f.ncomp())};
    double period = lat.period();
    os.write(kMagic, 4);
    os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    os.write(reinterpret_cast<const char*>(&period), sizeof period);
    // node-major, component-minor
    std::vector<double> row(f.ncomp());
    for (std::size_t node = 0; node < f.nodes(); ++node) {
        for (int c = 0; c < f.ncomp(); ++c) row[c] = f.at(c, node);
        os.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(double));
    }
    if (!os) throw std::runtime_error("snapshot write failed: " + path);
}

Field read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open snapshot: " + path);
    char magic[4];
    std::uint32_t hdr[5];
    double period;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    is.read(reinterpret_cast<char*>(&period), sizeof period);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad snapshot header: " + path);
    if (hdr[0] != kVersion) throw std::runtime_error("unsupported snapshot version");
    Lattice lat(static_cast<int>(hdr[1]), static_cast<int>(hdr[2]), period);
    TensorShape shape{static_cast<TensorKind>(hdr[3]), lat.dim(), 0};
    if (shape.kind == TensorKind::Raw) shape.raw_ncomp = static_cast<int>(hdr[4]);
    Field f(lat, shape);
    if (f.ncomp() != static_cast<int>(hdr[4]))
        throw std::runtime_error("snapshot component count mismatch");
    std::vector<double> row(f.ncomp());
    for (std::size_t node = 0; node < f.nodes(); ++node) {
        is.read(reinterpret_cast<char*>(row.data()), row.size() * sizeof(double));
        for (int c = 0; c < f.ncomp(); ++c) f.at(c, node) = row[c];
    }
    if (!is) throw std::runtime_error("snapshot truncated: " + path);
    return f;
}

}  // namespace hflow
