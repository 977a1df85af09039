#pragma once

// Disk cache for orthonormal bases. A cache entry is keyed by the exact
// inputs that determine the basis (potential descriptor, n, grid size,
// precision mode, format version); on load the orthonormality residual is
// recomputed from the stored samples so a corrupt or stale file is rejected
// instead of trusted. Writes go to a temp file and are renamed into place.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <unistd.h>

#include <json.hpp>

#include "ump/opuc.hpp"
#include "ump/potential.hpp"

namespace ump {

inline constexpr int kFormatVersion = 1;

inline std::string cache_key(const Potential& p, int n, int grid_m, PrecisionMode mode) {
    nlohmann::json j{{"potential", p.descriptor()},
                     {"n", n},
                     {"grid_m", grid_m},
                     {"precision", to_string(mode)},
                     {"format_version", kFormatVersion}};
    return j.dump();
}

inline std::string cache_file_name(const std::string& key) {
    // FNV-1a 64-bit over the canonical key string.
    std::uint64_t hv = 1469598103934665603ull;
    for (unsigned char c : key) {
        hv ^= c;
        hv *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hv));
    return std::string("basis-") + buf + ".umpb";
}

namespace detail {

constexpr char kCacheMagic[4] = {'U', 'M', 'P', 'B'};

inline double gram_residual(const OrthonormalBasis& b) {
    const int m = b.grid.size();
    const double h = b.grid.step();
    double res = 0.0;
    for (int k = 0; k <= b.n; ++k) {
        for (int l = k; l <= b.n; ++l) {
            cdouble acc(0.0, 0.0);
            for (int j = 0; j < m; ++j) acc += b.psi[k][j] * std::conj(b.psi[l][j]);
            acc *= h;
            const double d = std::abs(acc - (k == l ? cdouble(1.0, 0.0) : cdouble(0.0, 0.0)));
            if (std::isnan(d) || d > res) res = d; // sticky-NaN max: corruption must not look clean
        }
    }
    return res;
}

} // namespace detail

inline void save_basis(const std::string& dir, const std::string& key,
                       const OrthonormalBasis& b) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path final_path = fs::path(dir) / cache_file_name(key);
    const fs::path tmp_path = final_path.string() + ".tmp" + std::to_string(::getpid());

    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigInvalid("cannot open cache temp file: " + tmp_path.string());
        out.write(detail::kCacheMagic, 4);
        const std::uint32_t ver = kFormatVersion;
        out.write(reinterpret_cast<const char*>(&ver), sizeof(ver));
        const std::uint64_t klen = key.size();
        out.write(reinterpret_cast<const char*>(&klen), sizeof(klen));
        out.write(key.data(), static_cast<std::streamsize>(klen));

        const std::int32_t n = b.n, m = b.grid.size();
        const std::uint8_t mode = b.mode == PrecisionMode::Extended ? 1 : 0;
        out.write(reinterpret_cast<const char*>(&n), sizeof(n));
        out.write(reinterpret_cast<const char*>(&m), sizeof(m));
        out.write(reinterpret_cast<const char*>(&mode), sizeof(mode));
        out.write(reinterpret_cast<const char*>(&b.dynamic_range), sizeof(double));
        out.write(reinterpret_cast<const char*>(&b.orthonormality_residual), sizeof(double));
        out.write(reinterpret_cast<const char*>(b.gamma.data()),
                  static_cast<std::streamsize>(sizeof(double) * b.gamma.size()));
        out.write(reinterpret_cast<const char*>(b.weight_sqrt.data()),
                  static_cast<std::streamsize>(sizeof(double) * b.weight_sqrt.size()));
        for (const auto& row : b.psi)
            out.write(reinterpret_cast<const char*>(row.data()),
                      static_cast<std::streamsize>(sizeof(cdouble) * row.size()));
    }
    fs::rename(tmp_path, final_path);
}

inline std::optional<OrthonormalBasis> load_basis(const std::string& dir,
                                                  const std::string& key) {
    namespace fs = std::filesystem;
    const fs::path path = fs::path(dir) / cache_file_name(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, detail::kCacheMagic, 4) != 0) return std::nullopt;
    std::uint32_t ver = 0;
    in.read(reinterpret_cast<char*>(&ver), sizeof(ver));
    if (ver != static_cast<std::uint32_t>(kFormatVersion)) return std::nullopt;
    std::uint64_t klen = 0;
    in.read(reinterpret_cast<char*>(&klen), sizeof(klen));
    if (!in || klen > (1u << 20)) return std::nullopt;
    std::string stored(klen, '\0');
    in.read(stored.data(), static_cast<std::streamsize>(klen));
    if (!in || stored != key) return std::nullopt;

    std::int32_t n = 0, m = 0;
    std::uint8_t mode = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&m), sizeof(m));
    in.read(reinterpret_cast<char*>(&mode), sizeof(mode));
    if (!in || n < 1 || m < 256 || m % 2 != 0) return std::nullopt;

    OrthonormalBasis b;
    b.n = n;
    b.grid = PeriodicGrid(m);
    b.mode = mode ? PrecisionMode::Extended : PrecisionMode::Double;
    in.read(reinterpret_cast<char*>(&b.dynamic_range), sizeof(double));
    in.read(reinterpret_cast<char*>(&b.orthonormality_residual), sizeof(double));
    b.gamma.resize(n + 1);
    in.read(reinterpret_cast<char*>(b.gamma.data()),
            static_cast<std::streamsize>(sizeof(double) * b.gamma.size()));
    b.weight_sqrt.resize(m);
    in.read(reinterpret_cast<char*>(b.weight_sqrt.data()),
            static_cast<std::streamsize>(sizeof(double) * b.weight_sqrt.size()));
    b.psi.assign(n + 1, std::vector<cdouble>(m));
    for (auto& row : b.psi)
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(sizeof(cdouble) * row.size()));
    if (!in) return std::nullopt;

    for (double v : b.gamma)
        if (!std::isfinite(v)) return std::nullopt;
    for (double v : b.weight_sqrt)
        if (!std::isfinite(v)) return std::nullopt;
    for (const auto& row : b.psi)
        for (cdouble v : row)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return std::nullopt;

    // Never trust stored numbers: recheck orthonormality before use. The
    // negated form also rejects NaN-laden payloads.
    if (!(detail::gram_residual(b) <= 1e-8)) return std::nullopt;
    return b;
}

} // namespace ump
