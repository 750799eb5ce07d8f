#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "types.hpp"

namespace distinf {

enum class decay_kind { threshold, exponential, harmonic };

// A non-increasing map from distance to utility with alpha(inf) = 0.
//
// Exponential and harmonic decays can optionally be truncated: values at or
// below cut * alpha(0) are rounded down to zero, which gives the function a
// finite support and lets searches stop early.
class decay_function {
public:
    static decay_function threshold(double t) {
        require_positive(t, "threshold T");
        return {decay_kind::threshold, t, 0.0};
    }
    static decay_function exponential(double rate) {
        require_positive(rate, "exponential rate");
        return {decay_kind::exponential, rate, 0.0};
    }
    static decay_function harmonic(double scale) {
        require_positive(scale, "harmonic scale");
        return {decay_kind::harmonic, scale, 0.0};
    }

    // Returns a copy with truncation at cut * alpha(0); cut = 0 disables it.
    decay_function truncated(double cut) const {
        if (!(cut >= 0.0 && cut < 1.0)) {
            throw validation_error("truncation level must lie in [0, 1)");
        }
        decay_function f = *this;
        f.cut_ = kind_ == decay_kind::threshold ? 0.0 : cut;
        return f;
    }

    decay_kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return parameter_; }
    double cut() const noexcept { return cut_; }
    double alpha0() const noexcept { return 1.0; }

    double operator()(double d) const noexcept {
        double value = 0.0;
        switch (kind_) {
        case decay_kind::threshold:
            return d <= parameter_ ? 1.0 : 0.0;
        case decay_kind::exponential:
            value = std::exp(-parameter_ * d);
            break;
        case decay_kind::harmonic:
            value = 1.0 / (parameter_ * d + 1.0);
            break;
        }
        return value > cut_ ? value : 0.0;
    }

    // sup{x : alpha(x) > 0}.
    double support_bound() const noexcept {
        if (kind_ == decay_kind::threshold) {
            return parameter_;
        }
        if (cut_ == 0.0) {
            return infinite_distance;
        }
        if (kind_ == decay_kind::exponential) {
            return -std::log(cut_) / parameter_;
        }
        return (1.0 / cut_ - 1.0) / parameter_;
    }

    std::string to_string() const {
        std::string name;
        switch (kind_) {
        case decay_kind::threshold:
            name = "threshold:";
            break;
        case decay_kind::exponential:
            name = "exp:";
            break;
        case decay_kind::harmonic:
            name = "harmonic:";
            break;
        }
        return name + format_number(parameter_);
    }

private:
    decay_function(decay_kind kind, double parameter, double cut) : kind_(kind), parameter_(parameter), cut_(cut) {}

    static void require_positive(double value, const char* what) {
        if (!(value > 0.0) || std::isinf(value)) {
            throw validation_error(std::string(what) + " must be positive and finite");
        }
    }

    static std::string format_number(double x) {
        std::string s = std::to_string(x);
        s.erase(s.find_last_not_of('0') + 1);
        if (s.back() == '.') {
            s.pop_back();
        }
        return s;
    }

    decay_kind kind_;
    double parameter_;
    double cut_;
};

// Parses "threshold:T", "exp:RATE" or "harmonic:SCALE".
inline decay_function parse_decay(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw validation_error("decay spec must look like NAME:VALUE, got '" + std::string(spec) + "'");
    }
    const auto name = spec.substr(0, colon);
    const std::string text(spec.substr(colon + 1));
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size()) {
        throw validation_error("bad number in decay spec '" + std::string(spec) + "'");
    }
    if (name == "threshold") {
        return decay_function::threshold(value);
    }
    if (name == "exp") {
        return decay_function::exponential(value);
    }
    if (name == "harmonic") {
        return decay_function::harmonic(value);
    }
    throw validation_error("unknown decay '" + std::string(name) + "'");
}

} // namespace distinf
