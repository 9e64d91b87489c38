#pragma once

// Internal unit system: hbar = 1, energies in eV, times in hbar/eV,
// lengths in nm, dipole moments in e*nm. Conversions happen at the
// boundary (config parsing and CSV output).

#include <complex>
#include <numbers>

namespace qplas {

using cplx = std::complex<double>;

namespace units {

/// hbar*c in eV*nm.
inline constexpr double hbar_c_ev_nm = 197.3269804;
/// e^2 / (4 pi eps0) in eV*nm.
inline constexpr double coulomb_ev_nm = 1.43996454;
/// One Debye expressed in e*nm.
inline constexpr double debye_e_nm = 0.0208194;
/// hbar in eV*ns.
inline constexpr double hbar_ev_ns = 6.582119569e-7;

inline constexpr double ns_to_internal(double t_ns) { return t_ns / hbar_ev_ns; }
inline constexpr double internal_to_ns(double t) { return t * hbar_ev_ns; }
inline constexpr double debye_to_e_nm(double d) { return d * debye_e_nm; }
/// Vacuum wavenumber (1/nm) for a photon energy in eV.
inline constexpr double wavenumber(double omega_ev) { return omega_ev / hbar_c_ev_nm; }

}  // namespace units
}  // namespace qplas
