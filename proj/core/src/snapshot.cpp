#include "nlch/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "nlch/errors.hpp"

namespace nlch {

namespace {
constexpr char kMagic[6] = {'N', 'L', 'C', 'H', 'F', '1'};

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
} // namespace

void write_snapshot(const std::string& path, const ScalarField& f, double t) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(errc::invalid_input, "cannot open snapshot for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().dim));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().n));
    put<double>(os, f.grid().length);
    put<double>(os, t);
    os.write(reinterpret_cast<const char*>(f.values().data()),
             static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    if (!os) fail(errc::invalid_input, "snapshot write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(errc::invalid_input, "cannot open snapshot: " + path);
    char magic[6];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        fail(errc::invalid_input, "not a field snapshot: " + path);
    const auto dim = get<std::uint32_t>(is);
    const auto n = get<std::uint32_t>(is);
    const double L = get<double>(is);
    const double t = get<double>(is);
    if (!is) fail(errc::invalid_input, "truncated snapshot header: " + path);
    const TorusGrid g = TorusGrid::make(static_cast<int>(dim), static_cast<int>(n), L);
    std::vector<double> values(g.size());
    is.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!is) fail(errc::invalid_input, "truncated snapshot payload: " + path);
    return Snapshot{ScalarField(g, std::move(values)), t};
}

} // namespace nlch
