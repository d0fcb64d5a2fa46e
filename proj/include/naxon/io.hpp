#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "naxon/errors.hpp"
#include "naxon/solver.hpp"

namespace naxon {

/// Trajectory as CSV: one row per (snapshot, grid point), columns t, x, u, x_1..x_d.
inline void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec) {
    if (rec.size() == 0) return;
    const std::size_t d = rec.x.front().components();
    os << "t,x,u";
    for (std::size_t i = 1; i <= d; ++i) os << ",x_" << i;
    os << "\n";
    os.precision(17);
    for (std::size_t j = 0; j < rec.size(); ++j) {
        const auto& u = rec.u[j];
        const auto& g = u.grid();
        for (std::size_t k = 0; k < g.size(); ++k) {
            os << rec.t[j] << "," << g.point(k) << "," << u[k];
            for (std::size_t i = 0; i < d; ++i) os << "," << rec.x[j](i, k);
            os << "\n";
        }
    }
}

/// Monitor series: t, R_t, G_t, running max excursion.
inline void write_monitor_csv(std::ostream& os, const TrajectoryRecord& rec) {
    os << "t,R_t,G_t,max_excursion\n";
    os.precision(17);
    for (std::size_t j = 0; j < rec.size(); ++j) {
        os << rec.t[j] << "," << rec.R[j] << "," << rec.G[j] << "," << rec.excursion[j] << "\n";
    }
}

inline constexpr std::uint16_t kBinaryVersion = 1;

/**
 * Binary trajectory, little-endian. Header (16 bytes): "NAXS", u16 version,
 * u16 n, u16 d, 6 zero bytes. Then per snapshot: f64 t, f64 u[0..n],
 * f64 x_i[0..n] for i = 1..d.
 */
inline void write_trajectory_binary(std::ostream& os, const TrajectoryRecord& rec) {
    static_assert(std::endian::native == std::endian::little, "binary writer assumes a little-endian host");
    if (rec.size() == 0) throw DomainError("write_trajectory_binary: empty trajectory");
    const std::size_t n = rec.u.front().grid().n();
    const std::size_t d = rec.x.front().components();
    if (n > 0xFFFF || d > 0xFFFF) throw DomainError("write_trajectory_binary: n or d exceeds 16 bits");
    char header[16] = {'N', 'A', 'X', 'S'};
    const std::uint16_t fields[3] = {kBinaryVersion, static_cast<std::uint16_t>(n), static_cast<std::uint16_t>(d)};
    std::memcpy(header + 4, fields, sizeof fields);
    os.write(header, sizeof header);
    for (std::size_t j = 0; j < rec.size(); ++j) {
        os.write(reinterpret_cast<const char*>(&rec.t[j]), sizeof(double));
        const auto u = rec.u[j].values();
        os.write(reinterpret_cast<const char*>(u.data()), static_cast<std::streamsize>(u.size() * sizeof(double)));
        const auto x = rec.x[j].data();
        os.write(reinterpret_cast<const char*>(x.data()), static_cast<std::streamsize>(x.size() * sizeof(double)));
    }
}

struct BinaryTrajectory {
    std::uint16_t version = 0;
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> t;
    std::vector<std::vector<double>> frames;  // u followed by x rows
};

inline BinaryTrajectory read_trajectory_binary(std::istream& is) {
    char header[16];
    if (!is.read(header, sizeof header) || std::memcmp(header, "NAXS", 4) != 0) {
        throw DomainError("read_trajectory_binary: bad magic");
    }
    std::uint16_t fields[3];
    std::memcpy(fields, header + 4, sizeof fields);
    BinaryTrajectory out{fields[0], fields[1], fields[2], {}, {}};
    const std::size_t frame = (out.d + 1) * (out.n + 1);
    double t;
    while (is.read(reinterpret_cast<char*>(&t), sizeof t)) {
        std::vector<double> v(frame);
        if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(frame * sizeof(double)))) {
            throw DomainError("read_trajectory_binary: truncated frame");
        }
        out.t.push_back(t);
        out.frames.push_back(std::move(v));
    }
    return out;
}

}  // namespace naxon
