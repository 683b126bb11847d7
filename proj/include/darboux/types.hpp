#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace darboux {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline const cplx kI{0.0, 1.0};

// Failure modes surfaced to callers (and mapped to CLI exit code 3).
enum class ErrorCode {
    NotSingular,
    ResonanceUnhandled,
    SeriesDiverged,
    SingularityTooClose,
    StepUnderflow,
    ResidualTooLarge,
    ConstraintViolated,
    DegeneratePosition,
    NotSingleValued,
    QuadratureNotConverged,
    BadConfig,
};

inline const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NotSingular: return "NotSingular";
        case ErrorCode::ResonanceUnhandled: return "ResonanceUnhandled";
        case ErrorCode::SeriesDiverged: return "SeriesDiverged";
        case ErrorCode::SingularityTooClose: return "SingularityTooClose";
        case ErrorCode::StepUnderflow: return "StepUnderflow";
        case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
        case ErrorCode::ConstraintViolated: return "ConstraintViolated";
        case ErrorCode::DegeneratePosition: return "DegeneratePosition";
        case ErrorCode::NotSingleValued: return "NotSingleValued";
        case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorCode::BadConfig: return "BadConfig";
    }
    return "Unknown";
}

class NumericalError : public std::runtime_error {
public:
    NumericalError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// 2x2 complex matrix, column-major semantics m(r,c).
struct Mat2 {
    std::array<cplx, 4> a{};  // a[0]=m00 a[1]=m01 a[2]=m10 a[3]=m11

    static Mat2 identity() { return {{cplx(1), cplx(0), cplx(0), cplx(1)}}; }
    static Mat2 zero() { return {}; }

    cplx& operator()(int r, int c) { return a[2 * r + c]; }
    const cplx& operator()(int r, int c) const { return a[2 * r + c]; }

    cplx det() const { return a[0] * a[3] - a[1] * a[2]; }
    cplx trace() const { return a[0] + a[3]; }

    Mat2 inverse() const {
        cplx d = det();
        return {{a[3] / d, -a[1] / d, -a[2] / d, a[0] / d}};
    }
    Mat2 transpose() const { return {{a[0], a[2], a[1], a[3]}}; }
    Mat2 conjugate() const { return {{std::conj(a[0]), std::conj(a[1]), std::conj(a[2]), std::conj(a[3])}}; }
    Mat2 adjointH() const { return conjugate().transpose(); }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {{x.a[0] * y.a[0] + x.a[1] * y.a[2], x.a[0] * y.a[1] + x.a[1] * y.a[3],
                 x.a[2] * y.a[0] + x.a[3] * y.a[2], x.a[2] * y.a[1] + x.a[3] * y.a[3]}};
    }
    friend Mat2 operator*(const cplx& s, const Mat2& m) {
        return {{s * m.a[0], s * m.a[1], s * m.a[2], s * m.a[3]}};
    }
    friend Mat2 operator+(const Mat2& x, const Mat2& y) {
        return {{x.a[0] + y.a[0], x.a[1] + y.a[1], x.a[2] + y.a[2], x.a[3] + y.a[3]}};
    }
    friend Mat2 operator-(const Mat2& x, const Mat2& y) {
        return {{x.a[0] - y.a[0], x.a[1] - y.a[1], x.a[2] - y.a[2], x.a[3] - y.a[3]}};
    }

    std::array<cplx, 2> apply(const std::array<cplx, 2>& v) const {
        return {a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]};
    }

    double frobenius() const {
        double s = 0;
        for (const auto& z : a) s += std::norm(z);
        return std::sqrt(s);
    }

    // Eigenvalues via the quadratic formula; stable enough at 2x2 scale.
    std::array<cplx, 2> eigenvalues() const {
        cplx t = trace(), d = det();
        cplx disc = std::sqrt(t * t - 4.0 * d);
        return {(t + disc) / 2.0, (t - disc) / 2.0};
    }
};

inline double frob_dist(const Mat2& x, const Mat2& y) { return (x - y).frobenius(); }

}  // namespace darboux
