#pragma once

// CODATA 2018 values, SI units. Every module reads from this table;
// the quoted thermal reduction factors are sensitive to the exact digits.
namespace cpforce::constants {

inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double k_boltzmann = 1.380649e-23;      // J/K (exact)
inline constexpr double speed_of_light = 299792458.0;    // m/s (exact)
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double vacuum_permeability = 1.25663706212e-6;  // N/A^2

inline constexpr double pi = 3.14159265358979323846;

}  // namespace cpforce::constants
