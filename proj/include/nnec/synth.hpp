#ifndef NNEC_SYNTH_HPP
#define NNEC_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "dataset.hpp"
#include "error.hpp"

/**
 * @file synth.hpp
 *
 * @brief Reproducible isotropic Gaussian mixtures.
 *
 * Samples come from std::mt19937_64 (fully specified by the standard) through a
 * hand-written Box-Muller transform, so a seed yields the same bytes on every
 * conforming toolchain.
 */

namespace nnec {

struct MixtureComponent {
    std::vector<double> mean;
    double scale = 1.0;
    std::size_t count = 0;
};

struct MixtureSpec {
    std::vector<MixtureComponent> components;

    void validate() const {
        if (components.empty()) {
            throw ValidationError("mixture needs at least one component");
        }
        const auto d = components.front().mean.size();
        if (d == 0) {
            throw ValidationError("mixture component mean must be non-empty");
        }
        std::size_t total = 0;
        for (const auto& c : components) {
            if (c.mean.size() != d) {
                throw ValidationError("mixture components have different dimensions");
            }
            if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
                throw ValidationError("mixture component scale must be positive");
            }
            for (double m : c.mean) {
                if (!std::isfinite(m)) {
                    throw ValidationError("mixture component mean must be finite");
                }
            }
            if (c.count == 0) {
                throw ValidationError("mixture component count must be positive");
            }
            total += c.count;
        }
        if (total < 2) {
            throw ValidationError("mixture must produce at least 2 points");
        }
    }

    /// {"components": [{"mean": [..], "scale": s, "count": c}, ...]}
    static MixtureSpec from_json(const nlohmann::json& j) {
        MixtureSpec spec;
        try {
            for (const auto& c : j.at("components")) {
                spec.components.push_back(
                    {c.at("mean").get<std::vector<double>>(), c.at("scale").get<double>(), c.at("count").get<std::size_t>()});
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("invalid mixture description: ") + e.what());
        }
        spec.validate();
        return spec;
    }

    /**
     * Five 2-D components of 200 points each with scales from 0.5 to 1.5, one of
     * them at the origin.
     */
    static MixtureSpec five_blobs() {
        return {{
            {{0.0, 0.0}, 0.8, 200},
            {{7.0, 6.0}, 0.5, 200},
            {{-7.0, 6.0}, 1.2, 200},
            {{-7.0, -6.0}, 0.7, 200},
            {{7.0, -6.0}, 1.5, 200},
        }};
    }
};

namespace detail {

inline double uniform_open(std::mt19937_64& engine) {
    // 53 random bits mapped to (0, 1).
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Points of component c are contiguous and labelled c.
inline Dataset sample_mixture(const MixtureSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::size_t n = 0;
    for (const auto& c : spec.components) {
        n += c.count;
    }
    const std::size_t d = spec.components.front().mean.size();

    std::mt19937_64 engine(seed);
    bool have_spare = false;
    double spare = 0.0;
    const auto normal = [&] {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = detail::uniform_open(engine);
        const double u2 = detail::uniform_open(engine);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare = radius * std::sin(angle);
        have_spare = true;
        return radius * std::cos(angle);
    };

    Dataset out;
    out.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    out.labels = std::vector<int>(n);
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
        const auto& comp = spec.components[c];
        for (std::size_t i = 0; i < comp.count; ++i, ++row) {
            for (std::size_t k = 0; k < d; ++k) {
                out.points(row, static_cast<Eigen::Index>(k)) = comp.mean[k] + comp.scale * normal();
            }
            (*out.labels)[static_cast<std::size_t>(row)] = static_cast<int>(c);
        }
    }
    return out;
}

/// CSV with header x0,...,x{d-1}[,label]; values printed with 17 significant digits.
inline std::string to_csv(const Dataset& data) {
    std::string out;
    for (std::size_t c = 0; c < data.d(); ++c) {
        out += (c ? ",x" : "x") + std::to_string(c);
    }
    if (data.labels) {
        out += ",label";
    }
    out += '\n';
    char buf[32];
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t c = 0; c < data.d(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
            if (c) {
                out += ',';
            }
            out += buf;
        }
        if (data.labels) {
            out += ',' + std::to_string((*data.labels)[i]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace nnec

#endif  // NNEC_SYNTH_HPP
