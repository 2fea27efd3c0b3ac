#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ofdmisac {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 2.9979e8;   // m/s
inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kPi = 3.14159265358979323846;

/// Base class for every error raised by the library.
class IsacError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParams : public IsacError {
public:
    using IsacError::IsacError;
};

class NonIntegerCpTaps : public IsacError {
public:
    using IsacError::IsacError;
};

class DimensionMismatch : public IsacError {
public:
    using IsacError::IsacError;
};

class OutOfRange : public IsacError {
public:
    using IsacError::IsacError;
};

class NoRange : public IsacError {
public:
    using IsacError::IsacError;
};

class CancelDivergence : public IsacError {
public:
    using IsacError::IsacError;
};

class ConfigError : public IsacError {
public:
    using IsacError::IsacError;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace ofdmisac
