#pragma once

// Binary performance matrix: rows are classifiers, columns are training
// samples, entry 1 iff the classifier labels the sample correctly. This is
// the sole input of all three inference engines.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace irtens {

class PerformanceMatrix {
public:
    PerformanceMatrix() = default;
    PerformanceMatrix(std::size_t n_classifiers, std::size_t n_samples)
        : n_(n_classifiers), m_(n_samples), entries_(n_classifiers * n_samples, 0) {
        if (n_ == 0 || m_ == 0) {
            throw std::invalid_argument("PerformanceMatrix: dimensions must be positive");
        }
    }

    std::size_t n_classifiers() const { return n_; }
    std::size_t n_samples() const { return m_; }

    std::uint8_t& at(std::size_t i, std::size_t j) { return entries_[i * m_ + j]; }
    std::uint8_t at(std::size_t i, std::size_t j) const { return entries_[i * m_ + j]; }

    double row_mean(std::size_t i) const {
        double s = 0.0;
        for (std::size_t j = 0; j < m_; ++j) s += at(i, j);
        return s / static_cast<double>(m_);
    }

    double column_mean(std::size_t j) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += at(i, j);
        return s / static_cast<double>(n_);
    }

private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<std::uint8_t> entries_;
};

}  // namespace irtens
