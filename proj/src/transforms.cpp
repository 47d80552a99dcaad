#include "beltrami/transforms.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace beltrami::spectral {
namespace {

// One cached plan per (n, sign). Plans are created with FFTW_ESTIMATE (no
// runtime measurement, deterministic codelet choice) and FFTW_UNALIGNED so the
// same plan can execute on any caller buffer via fftw_execute_dft.
class PlanCache {
  public:
    static fftw_plan get(int n, int sign) {
        static PlanCache cache;
        std::lock_guard<std::mutex> lock(cache.mutex_);
        auto key = std::make_pair(n, sign);
        auto it = cache.plans_.find(key);
        if (it != cache.plans_.end()) return it->second;

        std::vector<complexd> scratch(static_cast<std::size_t>(n) * n * n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft_3d(n, n, n, buf, buf, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        cache.plans_.emplace(key, p);
        return p;
    }

  private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

void execute(int n, int sign, std::vector<complexd>& data) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(PlanCache::get(n, sign), buf, buf);
}

// Samples live at x_i = -pi + 2 pi i / n while FFTW assumes x_i = 2 pi i / n,
// so the true coefficient of e^{i k x} differs from the raw DFT output by
// e^{-i pi (kx+ky+kz)} = (-1)^{kx+ky+kz}. The factor is its own inverse and is
// applied on the spectral side, scaled by `scale`, together with an optional
// extra uniform factor (the forward 1/N normalization).
std::vector<double> axis_parity_signs(const GridSpec& g) {
    std::vector<double> s(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) s[static_cast<std::size_t>(i)] = g.freq(i) % 2 != 0 ? -1.0 : 1.0;
    return s;
}

void apply_center_phase(const GridSpec& g, std::vector<complexd>& a, double scale) {
    const std::vector<double> s = axis_parity_signs(g);
    std::size_t flat = 0;
    for (int ix = 0; ix < g.n; ++ix) {
        for (int iy = 0; iy < g.n; ++iy) {
            double sxy = scale * s[static_cast<std::size_t>(ix)] * s[static_cast<std::size_t>(iy)];
            for (int iz = 0; iz < g.n; ++iz, ++flat) {
                a[flat] *= sxy * s[static_cast<std::size_t>(iz)];
            }
        }
    }
}

} // namespace

std::vector<complexd> forward_transform_scalar(const GridSpec& g, const std::vector<double>& s) {
    if (s.size() != g.size()) throw SizeMismatch("forward_transform_scalar: sample count");
    std::vector<complexd> out(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = complexd(s[i], 0.0);
    execute(g.n, FFTW_FORWARD, out);
    apply_center_phase(g, out, 1.0 / static_cast<double>(g.size()));
    return out;
}

std::vector<double> inverse_transform_scalar(const GridSpec& g, const std::vector<complexd>& s) {
    if (s.size() != g.size()) throw SizeMismatch("inverse_transform_scalar: coefficient count");
    std::vector<complexd> work = s;
    apply_center_phase(g, work, 1.0);
    execute(g.n, FFTW_BACKWARD, work);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = work[i].real();
    return out;
}

SpectralVectorField forward_transform(const RealVectorField& u) {
    SpectralVectorField out(u.grid);
    for (int c = 0; c < 3; ++c) out.comp[c] = forward_transform_scalar(u.grid, u.comp[c]);
    return out;
}

RealVectorField inverse_transform(const SpectralVectorField& u) {
    RealVectorField out(u.grid);
    for (int c = 0; c < 3; ++c) out.comp[c] = inverse_transform_scalar(u.grid, u.comp[c]);
    return out;
}

} // namespace beltrami::spectral
