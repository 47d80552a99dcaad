#pragma once

#include <optional>
#include <string>

#include "beltrami/dynamics.hpp"

namespace beltrami::io {

/// Binary state file. Layout, all little-endian:
///   bytes 0..4   magic "DBHM1"
///   byte  5      variant: 0 = full (u, B), 1 = B-only
///   u32          n (grid points per axis)
///   f64          t, nu, eta, hall
///   arrays       full:  u_x, u_y, u_z, B_x, B_y, B_z
///                B-only: B_x, B_y, B_z
/// Each array is n^3 complex coefficients as interleaved (re, im) f64 in the
/// grid's row-major index order (x slowest, FFT frequency layout per axis).
struct Checkpoint {
    bool b_only = false;
    double t = 0.0;
    dynamics::PhysicalParams params;
    SpectralVectorField u; // empty (zero-size grid) when b_only
    SpectralVectorField B;
};

void write_checkpoint(const std::string& path, const Checkpoint& cp);
void write_checkpoint(const std::string& path, const dynamics::SimState& s);
/// B-only variant (variational results).
void write_checkpoint_b_only(const std::string& path, const SpectralVectorField& B);

Checkpoint read_checkpoint(const std::string& path);

/// Full checkpoint as a simulation state; throws CheckpointError on a B-only file.
dynamics::SimState read_state(const std::string& path);

} // namespace beltrami::io
