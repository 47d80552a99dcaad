#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "beltrami/field.hpp"

namespace beltrami::diag {

/// L2 norm-squared energies (no 1/2 factor): E_u = |u|^2, E_B = |B|^2.
struct EnergyBreakdown {
    double E_u;
    double E_B;
    double E; // E_u + E_B
};
EnergyBreakdown energy(const SpectralVectorField& u, const SpectralVectorField& B);

/// Magnetic helicity integral A . B with A = invert_curl(B) (mean-free
/// solenoidal gauge). Requires mean(B) = 0; asserts the spectral sum is real
/// to 1e-12 relative.
double magnetic_helicity(const SpectralVectorField& B);

/// Magneto-vorticity helicity integral (A + u) . (B + omega), omega = curl u.
/// Equals H_B + 2 int u.B + int u.omega; a mean of u drops out exactly.
double magneto_vorticity_helicity(const SpectralVectorField& u, const SpectralVectorField& B);

/// Deviation fields of the alignment equations:
///   Phi = B + curl u - alpha u,  Psi = u - curl B + beta B.
struct DeviationFields {
    SpectralVectorField phi;
    SpectralVectorField psi;
};
DeviationFields phi_psi_fields(const SpectralVectorField& u, const SpectralVectorField& B,
                               double alpha, double beta);

/// L2 and H^{1/2} norms of Phi and Psi. The H^{1/2} norm is
/// sqrt(L2^2 + homogeneous-half^2); the mean contributes once, via L2.
struct DeviationNorms {
    double phi_l2;
    double phi_h12;
    double psi_l2;
    double psi_h12;
};
DeviationNorms phi_psi(const SpectralVectorField& u, const SpectralVectorField& B, double alpha,
                       double beta);

/// One diagnostics row of a simulation.
struct DiagnosticsRecord {
    double t = 0.0;
    double E_u = 0.0, E_B = 0.0, E = 0.0;
    double H_B = 0.0, H_Bw = 0.0;
    double phi_l2 = 0.0, phi_h12 = 0.0, psi_l2 = 0.0, psi_h12 = 0.0;
    std::optional<double> err_u; // relative L2 error vs a closed-form reference
    std::optional<double> err_B;
};

/// Measure all scalar diagnostics of a state at time t.
DiagnosticsRecord measure(const SpectralVectorField& u, const SpectralVectorField& B, double t,
                          double alpha, double beta);

/// Exact CSV column set, in order.
extern const char* const kCsvHeader;

/// Write records as CSV: '#'-prefixed comment lines, the fixed header, then
/// one row per record with %.17g formatting (value-exact roundtrip); absent
/// optional fields become empty cells.
void emit_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records,
              const std::vector<std::string>& comments = {});
void emit_csv_file(const std::string& path, const std::vector<DiagnosticsRecord>& records,
                   const std::vector<std::string>& comments = {});

/// Generic CSV read-back (used by decay fitting and tests).
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;

    /// Column index by name; throws Error if absent.
    std::size_t column_index(const std::string& name) const;
};
CsvTable parse_csv(std::istream& is);
CsvTable parse_csv_file(const std::string& path);

} // namespace beltrami::diag
