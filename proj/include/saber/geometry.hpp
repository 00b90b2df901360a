#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace saber {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }

    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

enum class Label : int { Normal = 0, Ignored = 1, Abnormal = 2 };

inline char label_char(Label l) {
    switch (l) {
        case Label::Normal: return 'n';
        case Label::Ignored: return 'i';
        case Label::Abnormal: return 'a';
    }
    return '?';
}

inline Label label_from_char(char c) {
    switch (c) {
        case 'n': return Label::Normal;
        case 'i': return Label::Ignored;
        case 'a': return Label::Abnormal;
        default: throw std::invalid_argument(std::string("unknown label char '") + c + "'");
    }
}

}  // namespace saber
