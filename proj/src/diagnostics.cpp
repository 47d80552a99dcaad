#include "beltrami/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "beltrami/operators.hpp"

namespace beltrami::diag {

using spectral::curl_hat;
using spectral::invert_curl;

EnergyBreakdown energy(const SpectralVectorField& u, const SpectralVectorField& B) {
    double eu = spectral::inner(u, u);
    double eb = spectral::inner(B, B);
    return {eu, eb, eu + eb};
}

namespace {

// complex-valued Parseval sum, used to assert reality of helicity integrals
complexd inner_complex(const SpectralVectorField& u, const SpectralVectorField& v) {
    complexd acc(0.0, 0.0);
    for (int c = 0; c < 3; ++c) {
        const auto& a = u.comp[c];
        const auto& b = v.comp[c];
        for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
    }
    return volume_total() * acc;
}

double real_checked(const complexd& z, double scale, const char* what) {
    if (std::abs(z.imag()) > 1e-12 * std::max(scale, 1e-300))
        throw Error(std::string(what) + ": spectral sum has a non-real residue");
    return z.real();
}

} // namespace

double magnetic_helicity(const SpectralVectorField& B) {
    SpectralVectorField A = invert_curl(B); // rejects nonzero mean / compressive input
    double scale = spectral::norm(A) * spectral::norm(B);
    return real_checked(inner_complex(A, B), scale, "magnetic_helicity");
}

double magneto_vorticity_helicity(const SpectralVectorField& u, const SpectralVectorField& B) {
    if (u.grid != B.grid) throw SizeMismatch("magneto_vorticity_helicity: grids differ");
    SpectralVectorField Au = invert_curl(B) + u;       // A + u
    SpectralVectorField Bw = B + curl_hat(u);          // B + omega
    double scale = spectral::norm(Au) * spectral::norm(Bw);
    return real_checked(inner_complex(Au, Bw), scale, "magneto_vorticity_helicity");
}

DeviationFields phi_psi_fields(const SpectralVectorField& u, const SpectralVectorField& B,
                               double alpha, double beta) {
    if (u.grid != B.grid) throw SizeMismatch("phi_psi_fields: grids differ");
    DeviationFields d;
    d.phi = curl_hat(u);
    d.phi.axpy(1.0, B);
    d.phi.axpy(-alpha, u);
    d.psi = curl_hat(B);
    d.psi.scale(-1.0);
    d.psi.axpy(1.0, u);
    d.psi.axpy(beta, B);
    return d;
}

namespace {

std::pair<double, double> l2_and_h12(const SpectralVectorField& f) {
    double l2sq = spectral::inner(f, f);
    double hom = spectral::homogeneous_sobolev_sq(f, 0.5);
    return {std::sqrt(std::max(0.0, l2sq)), std::sqrt(std::max(0.0, l2sq + hom))};
}

} // namespace

DeviationNorms phi_psi(const SpectralVectorField& u, const SpectralVectorField& B, double alpha,
                       double beta) {
    DeviationFields d = phi_psi_fields(u, B, alpha, beta);
    auto [pl2, ph12] = l2_and_h12(d.phi);
    auto [sl2, sh12] = l2_and_h12(d.psi);
    return {pl2, ph12, sl2, sh12};
}

DiagnosticsRecord measure(const SpectralVectorField& u, const SpectralVectorField& B, double t,
                          double alpha, double beta) {
    DiagnosticsRecord r;
    r.t = t;
    auto e = energy(u, B);
    r.E_u = e.E_u;
    r.E_B = e.E_B;
    r.E = e.E;
    r.H_B = magnetic_helicity(B);
    r.H_Bw = magneto_vorticity_helicity(u, B);
    auto d = phi_psi(u, B, alpha, beta);
    r.phi_l2 = d.phi_l2;
    r.phi_h12 = d.phi_h12;
    r.psi_l2 = d.psi_l2;
    r.psi_h12 = d.psi_h12;
    return r;
}

const char* const kCsvHeader = "t,E_u,E_B,E,H_B,H_Bw,phi_l2,phi_h12,psi_l2,psi_h12,err_u,err_B";

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

} // namespace

void emit_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records,
              const std::vector<std::string>& comments) {
    for (const auto& c : comments) os << "# " << c << "\n";
    os << kCsvHeader << "\n";
    for (const auto& r : records) {
        os << fmt(r.t) << ',' << fmt(r.E_u) << ',' << fmt(r.E_B) << ',' << fmt(r.E) << ','
           << fmt(r.H_B) << ',' << fmt(r.H_Bw) << ',' << fmt(r.phi_l2) << ',' << fmt(r.phi_h12)
           << ',' << fmt(r.psi_l2) << ',' << fmt(r.psi_h12) << ',' << fmt_opt(r.err_u) << ','
           << fmt_opt(r.err_B) << "\n";
    }
}

void emit_csv_file(const std::string& path, const std::vector<DiagnosticsRecord>& records,
                   const std::vector<std::string>& comments) {
    std::ofstream os(path);
    if (!os) throw Error("emit_csv_file: cannot open " + path);
    emit_csv(os, records, comments);
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw Error("csv: no column named '" + name + "'");
}

CsvTable parse_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
            t.comments.push_back(line.substr(start));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (!have_header) {
            t.columns = cells;
            have_header = true;
            continue;
        }
        std::vector<std::optional<double>> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            if (c.empty()) {
                row.push_back(std::nullopt);
            } else {
                try {
                    row.push_back(std::stod(c));
                } catch (const std::exception&) {
                    throw Error("csv: cannot parse cell '" + c + "'");
                }
            }
        }
        row.resize(t.columns.size());
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw Error("csv: no header line found");
    return t;
}

CsvTable parse_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("parse_csv_file: cannot open " + path);
    return parse_csv(is);
}

} // namespace beltrami::diag
