#pragma once

// Device-distance models. Each kind supplies a radial pdf over [0, R_max]
// (except the degenerate fixed point), the mean distance, and a sampler.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fraccache/rng.hpp"

namespace fraccache {

struct FixedDistance {
    double r = 0.0; // m
};

struct UniformDisk {
    double R = 0.0; // m; pdf f_R(r) = 2r/R^2 on [0, R]
};

// Homogeneous Poisson process on the disk conditioned on at least one point,
// with the requesting device chosen uniformly among the points. The chosen
// point is then uniform on the disk, so the radial law equals UniformDisk's;
// the kind is kept distinct and sampled through the full process.
struct PoissonDisk {
    double intensity = 0.0; // points per m^2
    double R = 0.0;         // m
};

// Piecewise-linear density over sorted (r, density) nodes.
struct TabulatedPdf {
    std::vector<std::pair<double, double>> samples;
};

class DistanceModel {
public:
    explicit DistanceModel(FixedDistance fixed) : kind_(fixed) {
        if (!(fixed.r > 0.0)) throw std::domain_error("DistanceModel: fixed r must be > 0");
    }
    explicit DistanceModel(UniformDisk disk) : kind_(disk) {
        if (!(disk.R > 0.0)) throw std::domain_error("DistanceModel: disk R must be > 0");
    }
    explicit DistanceModel(PoissonDisk disk) : kind_(disk) {
        if (!(disk.R > 0.0)) throw std::domain_error("DistanceModel: disk R must be > 0");
        if (!(disk.intensity > 0.0))
            throw std::domain_error("DistanceModel: intensity must be > 0");
    }
    explicit DistanceModel(TabulatedPdf tab) : kind_(std::move(tab)) {
        auto& s = std::get<TabulatedPdf>(kind_).samples;
        if (s.size() < 2)
            throw std::domain_error("DistanceModel: tabulated pdf needs >= 2 nodes");
        double mass = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i].first < 0.0 || s[i].second < 0.0)
                throw std::domain_error("DistanceModel: tabulated nodes must be >= 0");
            if (i > 0) {
                if (!(s[i].first > s[i - 1].first))
                    throw std::domain_error("DistanceModel: tabulated radii must increase");
                mass += 0.5 * (s[i].second + s[i - 1].second) *
                        (s[i].first - s[i - 1].first);
            }
        }
        if (std::abs(mass - 1.0) > 1e-8)
            throw std::domain_error("DistanceModel: tabulated pdf must integrate to 1");
        build_cdf();
    }

    bool is_point_mass() const { return std::holds_alternative<FixedDistance>(kind_); }
    double point_distance() const { return std::get<FixedDistance>(kind_).r; }

    double max_radius() const {
        if (auto* f = std::get_if<FixedDistance>(&kind_)) return f->r;
        if (auto* u = std::get_if<UniformDisk>(&kind_)) return u->R;
        if (auto* p = std::get_if<PoissonDisk>(&kind_)) return p->R;
        return std::get<TabulatedPdf>(kind_).samples.back().first;
    }

    double min_radius() const {
        if (auto* t = std::get_if<TabulatedPdf>(&kind_)) return t->samples.front().first;
        return 0.0;
    }

    // Radial density; not defined for the point mass.
    double pdf(double r) const {
        if (is_point_mass())
            throw std::domain_error("DistanceModel: point mass has no density");
        if (auto* u = std::get_if<UniformDisk>(&kind_))
            return (r < 0.0 || r > u->R) ? 0.0 : 2.0 * r / (u->R * u->R);
        if (auto* p = std::get_if<PoissonDisk>(&kind_))
            return (r < 0.0 || r > p->R) ? 0.0 : 2.0 * r / (p->R * p->R);
        const auto& s = std::get<TabulatedPdf>(kind_).samples;
        if (r <= s.front().first || r >= s.back().first) {
            if (r == s.front().first) return s.front().second;
            if (r == s.back().first) return s.back().second;
            return 0.0;
        }
        std::size_t hi = 1;
        while (s[hi].first < r) ++hi;
        const auto& [ra, da] = s[hi - 1];
        const auto& [rb, db] = s[hi];
        return da + (db - da) * (r - ra) / (rb - ra);
    }

    double mean_distance() const {
        if (auto* f = std::get_if<FixedDistance>(&kind_)) return f->r;
        if (auto* u = std::get_if<UniformDisk>(&kind_)) return 2.0 * u->R / 3.0;
        if (auto* p = std::get_if<PoissonDisk>(&kind_)) return 2.0 * p->R / 3.0;
        const auto& s = std::get<TabulatedPdf>(kind_).samples;
        double m = 0.0;
        for (std::size_t i = 1; i < s.size(); ++i) {
            // exact integral of r * linear density over the segment
            const double ra = s[i - 1].first, rb = s[i].first;
            const double da = s[i - 1].second, db = s[i].second;
            const double h = rb - ra;
            m += h * (da * (2.0 * ra + rb) + db * (ra + 2.0 * rb)) / 6.0;
        }
        return m;
    }

    double sample(CounterRng& rng) const {
        if (auto* f = std::get_if<FixedDistance>(&kind_)) return f->r;
        if (auto* u = std::get_if<UniformDisk>(&kind_))
            return u->R * std::sqrt(rng.next_double());
        if (auto* p = std::get_if<PoissonDisk>(&kind_)) {
            const double mean = p->intensity * M_PI * p->R * p->R;
            std::uint64_t n = 0;
            while (n == 0) n = rng.poisson(mean); // condition on a non-empty disk
            // pick the requesting device among the n iid uniform points;
            // only its own radius needs to be materialised
            (void)(rng.next_u64() % n);
            return p->R * std::sqrt(rng.next_double());
        }
        return sample_tabulated(rng.next_double());
    }

    std::string kind_name() const {
        if (std::holds_alternative<FixedDistance>(kind_)) return "fixed";
        if (std::holds_alternative<UniformDisk>(kind_)) return "uniform";
        if (std::holds_alternative<PoissonDisk>(kind_)) return "poisson";
        return "tabulated";
    }

    // Radial laws of the two disk processes coincide, so closed forms
    // derived for the uniform disk apply to both.
    bool has_uniform_disk_law() const {
        return std::holds_alternative<UniformDisk>(kind_) ||
               std::holds_alternative<PoissonDisk>(kind_);
    }

private:
    std::variant<FixedDistance, UniformDisk, PoissonDisk, TabulatedPdf> kind_;
    std::vector<double> cdf_; // at tabulated nodes

    void build_cdf() {
        const auto& s = std::get<TabulatedPdf>(kind_).samples;
        cdf_.assign(s.size(), 0.0);
        for (std::size_t i = 1; i < s.size(); ++i)
            cdf_[i] = cdf_[i - 1] + 0.5 * (s[i].second + s[i - 1].second) *
                                        (s[i].first - s[i - 1].first);
    }

    double sample_tabulated(double u) const {
        const auto& s = std::get<TabulatedPdf>(kind_).samples;
        const double target = u * cdf_.back();
        std::size_t hi = 1;
        while (hi + 1 < cdf_.size() && cdf_[hi] < target) ++hi;
        const double ra = s[hi - 1].first, rb = s[hi].first;
        const double da = s[hi - 1].second, db = s[hi].second;
        const double rest = target - cdf_[hi - 1];
        const double slope = (db - da) / (rb - ra);
        // invert rest = da*t + slope*t^2/2 on t in [0, rb-ra]
        if (std::abs(slope) < 1e-300) return ra + (da > 0.0 ? rest / da : 0.0);
        const double disc = std::max(0.0, da * da + 2.0 * slope * rest);
        double t = (-da + std::sqrt(disc)) / slope;
        if (t < 0.0) t = 0.0;
        if (t > rb - ra) t = rb - ra;
        return ra + t;
    }
};

} // namespace fraccache
