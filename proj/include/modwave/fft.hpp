#pragma once

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "modwave/errors.hpp"
#include "modwave/grid.hpp"

namespace modwave {

// Real-to-complex transforms on the periodic box. Plans are cached per
// (rank, N) with FFTW_ESTIMATE (deterministic) and created under a lock;
// execution on distinct buffers is safe from many threads.
class fft {
  public:
    // spectrum layout: 1D -> N/2+1 complex; 2D -> N x (N/2+1) complex, row-major
    static std::size_t spec_size(const grid& g) {
        const std::size_t half = static_cast<std::size_t>(g.points / 2 + 1);
        return g.n == 1 ? half : static_cast<std::size_t>(g.points) * half;
    }

    static void forward(const grid_field& f, std::vector<std::complex<double>>& out) {
        plan_pair& p = plans(f.g);
        out.resize(spec_size(f.g));
        buffer& buf = scratch(f.g);
        std::memcpy(buf.real, f.v.data(), sizeof(double) * f.v.size());
        fftw_execute_dft_r2c(p.fwd, buf.real, buf.cplx);
        std::memcpy(out.data(), buf.cplx, sizeof(std::complex<double>) * out.size());
    }

    static void inverse(const grid& g, const std::vector<std::complex<double>>& spec,
                        grid_field& out) {
        plan_pair& p = plans(g);
        out.g = g;
        out.v.resize(g.size());
        buffer& buf = scratch(g);
        std::memcpy(buf.cplx, spec.data(), sizeof(std::complex<double>) * spec.size());
        fftw_execute_dft_c2r(p.bwd, buf.cplx, buf.real);
        const double scale = 1.0 / static_cast<double>(g.size());
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = buf.real[i] * scale;
    }

    // |xi| for spectrum entry idx
    static double xi_abs(const grid& g, std::size_t idx) {
        if (g.n == 1) return g.xi(static_cast<int>(idx));
        const std::size_t half = static_cast<std::size_t>(g.points / 2 + 1);
        const int iy = static_cast<int>(idx / half);
        const int ix = static_cast<int>(idx % half);
        const double xx = g.xi(ix);
        const double xy = g.xi(g.wave_index(iy));
        return std::hypot(xx, xy);
    }

    // Parseval weight of spectrum entry idx: 2 for interior columns of the
    // half-spectrum (conjugate pair counted once), 1 for the self-conjugate ones.
    static double pair_weight(const grid& g, std::size_t idx) {
        const int half_last = g.points / 2;
        int ix;
        if (g.n == 1) ix = static_cast<int>(idx);
        else ix = static_cast<int>(idx % static_cast<std::size_t>(half_last + 1));
        return (ix == 0 || ix == half_last) ? 1.0 : 2.0;
    }

  private:
    struct buffer {
        double* real = nullptr;
        fftw_complex* cplx = nullptr;
        explicit buffer(const grid& g) {
            real = fftw_alloc_real(g.size());
            cplx = fftw_alloc_complex(spec_size(g));
            if (!real || !cplx) throw std::bad_alloc();
        }
        ~buffer() {
            fftw_free(real);
            fftw_free(cplx);
        }
        buffer(const buffer&) = delete;
        buffer& operator=(const buffer&) = delete;
    };

    struct plan_pair {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
    };

    // per-thread reusable aligned work arrays, one set per grid shape
    static buffer& scratch(const grid& g) {
        thread_local std::map<std::pair<int, int>, buffer> cache;
        auto key = std::make_pair(g.n, g.points);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, g).first;
        return it->second;
    }

    struct plan_cache : std::map<std::pair<int, int>, plan_pair> {
        ~plan_cache() {
            for (auto& [key, p] : *this) {
                fftw_destroy_plan(p.fwd);
                fftw_destroy_plan(p.bwd);
            }
        }
    };

    static plan_pair& plans(const grid& g) {
        static std::mutex mu;
        static plan_cache cache;
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(g.n, g.points);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        buffer buf(g);
        plan_pair p;
        if (g.n == 1) {
            p.fwd = fftw_plan_dft_r2c_1d(g.points, buf.real, buf.cplx, FFTW_ESTIMATE);
            p.bwd = fftw_plan_dft_c2r_1d(g.points, buf.cplx, buf.real, FFTW_ESTIMATE);
        } else {
            p.fwd = fftw_plan_dft_r2c_2d(g.points, g.points, buf.real, buf.cplx, FFTW_ESTIMATE);
            p.bwd = fftw_plan_dft_c2r_2d(g.points, g.points, buf.cplx, buf.real, FFTW_ESTIMATE);
        }
        if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
        return cache.emplace(key, p).first->second;
    }
};

} // namespace modwave
