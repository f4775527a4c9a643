#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace colorsail {

struct AdamSettings {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction over a flat parameter vector.
class Adam {
public:
    Adam(std::size_t size, AdamSettings settings) : settings_(settings), m_(size, 0.0), v_(size, 0.0) {}

    void step(std::span<double> params, std::span<const double> grad)
    {
        ++t_;
        const double c1 = 1.0 - std::pow(settings_.beta1, t_);
        const double c2 = 1.0 - std::pow(settings_.beta2, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = settings_.beta1 * m_[i] + (1.0 - settings_.beta1) * grad[i];
            v_[i] = settings_.beta2 * v_[i] + (1.0 - settings_.beta2) * grad[i] * grad[i];
            const double m_hat = m_[i] / c1;
            const double v_hat = v_[i] / c2;
            params[i] -= settings_.learning_rate * m_hat / (std::sqrt(v_hat) + settings_.epsilon);
        }
    }

    void reset()
    {
        std::fill(m_.begin(), m_.end(), 0.0);
        std::fill(v_.begin(), v_.end(), 0.0);
        t_ = 0;
    }

    AdamSettings& settings() { return settings_; }

private:
    AdamSettings settings_;
    std::vector<double> m_;
    std::vector<double> v_;
    int t_ = 0;
};

} // namespace colorsail
