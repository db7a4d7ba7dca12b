#ifndef NNEC_TESTS_FIXTURES_HPP
#define NNEC_TESTS_FIXTURES_HPP

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nnec/cli.hpp"
#include "nnec/nnec.hpp"

namespace fixture {

inline nnec::PointMatrix column(const std::vector<double>& xs) {
    nnec::PointMatrix m(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m(static_cast<Eigen::Index>(i), 0) = xs[i];
    }
    return m;
}

/// 0, 1, 2, 10, 11, 12 on a line.
inline nnec::PointMatrix six_points() { return column({0, 1, 2, 10, 11, 12}); }

/// Three tight points and one far outlier.
inline nnec::PointMatrix outlier_points() { return column({0, 1, 2, 100}); }

inline nnec::PointMatrix uniform(std::size_t n, std::size_t d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    nnec::PointMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(i, c) = u(rng);
        }
    }
    return m;
}

/// Two 2-D blobs of `per` points each, 20 standard deviations apart.
inline nnec::Dataset two_blobs(std::size_t per, std::uint64_t seed) {
    nnec::MixtureSpec spec{{{{0.0, 0.0}, 1.0, per}, {{20.0, 0.0}, 1.0, per}}};
    return nnec::sample_mixture(spec, seed);
}

inline std::vector<int> random_labels(std::size_t n, int classes, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> u(0, classes - 1);
    std::vector<int> out(n);
    for (auto& l : out) {
        l = u(rng);
    }
    return out;
}

/// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("nnec_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    nnec::cli::detail::write_text(path.string(), text);
}

}  // namespace fixture

#endif  // NNEC_TESTS_FIXTURES_HPP
