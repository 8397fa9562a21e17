//! CODATA 2018 physical constants, SI units.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Electron mass, kg.
pub const M_E: f64 = 9.109_383_701_5e-31;
/// Vacuum permittivity, F/m.
pub const EPS_0: f64 = 8.854_187_812_8e-12;
/// Avogadro constant, 1/mol.
pub const N_A: f64 = 6.022_140_76e23;

/// Riemann zeta(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// The constant set as a value, for code that wants to carry it around or
/// print it into output headers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
    pub e_charge: f64,
    pub m_e: f64,
    pub eps_0: f64,
    pub n_a: f64,
}

/// The compiled-in CODATA 2018 values.
pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: HBAR,
    k_b: K_B,
    c: C,
    e_charge: E_CHARGE,
    m_e: M_E,
    eps_0: EPS_0,
    n_a: N_A,
};
