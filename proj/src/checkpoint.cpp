#include "beltrami/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace beltrami::io {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[5] = {'D', 'B', 'H', 'M', '1'};

void write_raw(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::istream& is, void* p, std::size_t n) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n)
        throw CheckpointError("checkpoint: truncated file");
}

void write_field(std::ostream& os, const SpectralVectorField& f) {
    for (int c = 0; c < 3; ++c)
        write_raw(os, f.comp[c].data(), f.comp[c].size() * sizeof(complexd));
}

void read_field(std::istream& is, SpectralVectorField& f) {
    for (int c = 0; c < 3; ++c) read_raw(is, f.comp[c].data(), f.comp[c].size() * sizeof(complexd));
}

} // namespace

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw CheckpointError("checkpoint: cannot open " + path + " for writing");

    write_raw(os, kMagic, sizeof(kMagic));
    std::uint8_t variant = cp.b_only ? 1 : 0;
    write_raw(os, &variant, 1);
    std::uint32_t n = static_cast<std::uint32_t>(cp.B.grid.n);
    write_raw(os, &n, sizeof(n));
    double header[4] = {cp.t, cp.params.nu, cp.params.eta, cp.params.hall};
    write_raw(os, header, sizeof(header));
    if (!cp.b_only) {
        if (cp.u.grid != cp.B.grid) throw CheckpointError("checkpoint: u and B grids differ");
        write_field(os, cp.u);
    }
    write_field(os, cp.B);
    if (!os) throw CheckpointError("checkpoint: write failed for " + path);
}

void write_checkpoint(const std::string& path, const dynamics::SimState& s) {
    Checkpoint cp;
    cp.b_only = false;
    cp.t = s.t;
    cp.params = s.params;
    cp.u = s.u;
    cp.B = s.B;
    write_checkpoint(path, cp);
}

void write_checkpoint_b_only(const std::string& path, const SpectralVectorField& B) {
    Checkpoint cp;
    cp.b_only = true;
    cp.B = B;
    write_checkpoint(path, cp);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CheckpointError("checkpoint: cannot open " + path);

    char magic[5];
    read_raw(is, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw CheckpointError("checkpoint: bad magic in " + path);
    std::uint8_t variant = 0;
    read_raw(is, &variant, 1);
    if (variant > 1)
        throw CheckpointError("checkpoint: unknown variant byte " + std::to_string(variant));
    std::uint32_t n = 0;
    read_raw(is, &n, sizeof(n));
    double header[4];
    read_raw(is, header, sizeof(header));

    Checkpoint cp;
    cp.b_only = (variant == 1);
    cp.t = header[0];
    cp.params.nu = header[1];
    cp.params.eta = header[2];
    cp.params.hall = header[3];
    GridSpec g(static_cast<int>(n));
    cp.B = SpectralVectorField(g);
    if (!cp.b_only) {
        cp.u = SpectralVectorField(g);
        read_field(is, cp.u);
    }
    read_field(is, cp.B);

    char extra;
    if (is.read(&extra, 1)) throw CheckpointError("checkpoint: trailing bytes in " + path);
    return cp;
}

dynamics::SimState read_state(const std::string& path) {
    Checkpoint cp = read_checkpoint(path);
    if (cp.b_only) throw CheckpointError("checkpoint: " + path + " is B-only, not a full state");
    dynamics::SimState s;
    s.t = cp.t;
    s.params = cp.params;
    s.u = std::move(cp.u);
    s.B = std::move(cp.B);
    return s;
}

} // namespace beltrami::io
