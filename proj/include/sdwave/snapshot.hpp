#pragma once

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sdwave/state.hpp"

namespace sdwave {

// Field snapshot format: a self-describing header followed by raw 64-bit
// IEEE-754 little-endian interleaved complex values, axis 0 slowest.
//
//   bytes 0..7   magic "SDWFLD01"
//   u32          endianness tag 0x01020304 (as written by the producer)
//   u32          dimension n
//   u32          points per axis N
//   u32          component count
//   f64          box size L
//   data         components x N^n x (re, im) f64

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "snapshot writer assumes a little-endian host");

inline constexpr char snapshot_magic[8] = {'S', 'D', 'W', 'F', 'L', 'D', '0', '1'};
inline constexpr std::uint32_t endian_tag = 0x01020304u;

template <class T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void read_raw(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof v);
}

}  // namespace detail

inline void write_snapshot(const std::filesystem::path& path,
                           const std::vector<SpectralField>& components) {
    if (components.empty()) throw ShapeError("write_snapshot: no components");
    const Grid& g = components.front().grid();
    for (const auto& c : components)
        if (!(c.grid() == g)) throw ShapeError("write_snapshot: mixed grids");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw NumericalError("write_snapshot: cannot open " + path.string());
    os.write(detail::snapshot_magic, sizeof detail::snapshot_magic);
    detail::write_raw(os, detail::endian_tag);
    detail::write_raw(os, static_cast<std::uint32_t>(g.n));
    detail::write_raw(os, static_cast<std::uint32_t>(g.points));
    detail::write_raw(os, static_cast<std::uint32_t>(components.size()));
    detail::write_raw(os, g.box);
    for (const auto& c : components) {
        const auto& v = c.values();
        os.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * sizeof(cplx)));
    }
    if (!os) throw NumericalError("write_snapshot: write failed for " + path.string());
}

inline std::vector<SpectralField> read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw NumericalError("read_snapshot: cannot open " + path.string());
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, detail::snapshot_magic, sizeof magic) != 0)
        throw NumericalError("read_snapshot: bad magic in " + path.string());
    std::uint32_t endian = 0, n = 0, points = 0, comps = 0;
    double box = 0.0;
    detail::read_raw(is, endian);
    detail::read_raw(is, n);
    detail::read_raw(is, points);
    detail::read_raw(is, comps);
    detail::read_raw(is, box);
    if (endian != detail::endian_tag)
        throw NumericalError("read_snapshot: foreign endianness in " + path.string());
    const Grid g = make_grid(static_cast<int>(n), static_cast<int>(points), box);
    std::vector<SpectralField> out;
    for (std::uint32_t c = 0; c < comps; ++c) {
        std::vector<cplx> v(g.size());
        is.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(cplx)));
        if (!is) throw NumericalError("read_snapshot: truncated data in " + path.string());
        out.emplace_back(g, std::move(v));
    }
    return out;
}

/// Deterministic shortest-faithful decimal for doubles in text outputs.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV export of a field for small grids: coordinates, re, im.
inline void write_field_csv(const std::filesystem::path& path, const SpectralField& f) {
    const Grid& g = f.grid();
    std::ofstream os(path);
    if (!os) throw NumericalError("write_field_csv: cannot open " + path.string());
    os << "x0";
    if (g.n > 1) os << ",x1";
    if (g.n > 2) os << ",x2";
    os << ",re,im\n";
    const auto& v = f.values();
    for_each_coord(g, [&](std::size_t flat, const std::array<double, 3>& x) {
        os << format_double(x[0]);
        if (g.n > 1) os << ',' << format_double(x[1]);
        if (g.n > 2) os << ',' << format_double(x[2]);
        os << ',' << format_double(v[flat].real()) << ',' << format_double(v[flat].imag())
           << '\n';
    });
}

}  // namespace sdwave
