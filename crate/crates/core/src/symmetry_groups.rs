//! Symmetry groups, their invariant spherical-harmonic channels, and
//! condition (G).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::special_functions::{first_profile_derivative_zero, radial_profile_zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryGroup {
    /// Dihedral group of order `2k` acting on the plane.
    Dihedral(u32),
    /// All isometries of the icosahedron, acting on R³.
    IcosahedralFull,
    /// Rotation group of the 600-cell, acting on R⁴.
    HyperIcosahedralRotations,
    /// A hypothetical group described only by its first invariant degree.
    /// Degrees above `i1` are probed with multiplicity 1.
    Custom {
        dimension: u32,
        i1: u32,
        multiplicity: u32,
    },
}

/// One spherical-harmonic channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub dimension: u32,
    pub degree: u32,
    pub gamma: f64,
    pub multiplicity: u32,
}

impl ModeSpec {
    pub fn new(dimension: u32, degree: u32, multiplicity: u32) -> Self {
        Self {
            dimension,
            degree,
            gamma: gamma(degree, dimension),
            multiplicity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionGReport {
    pub group: SymmetryGroup,
    pub i1: u32,
    pub gamma1: f64,
    pub multiplicity: u32,
    pub r2: f64,
    pub s1: f64,
    pub passes: bool,
}

impl SymmetryGroup {
    pub fn dimension(&self) -> u32 {
        match *self {
            SymmetryGroup::Dihedral(_) => 2,
            SymmetryGroup::IcosahedralFull => 3,
            SymmetryGroup::HyperIcosahedralRotations => 4,
            SymmetryGroup::Custom { dimension, .. } => dimension,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SymmetryGroup::Dihedral(0) => Err(Error::Precondition(
                "dihedral order must be at least 1".into(),
            )),
            SymmetryGroup::Custom {
                dimension,
                i1,
                multiplicity,
            } if dimension < 2 || i1 == 0 || multiplicity == 0 => Err(Error::Precondition(
                format!("custom group needs N >= 2, i1 >= 1, multiplicity >= 1 (got {dimension}:{i1}:{multiplicity})"),
            )),
            _ => Ok(()),
        }
    }

    /// Dimension of the space of invariant harmonics of degree `i`.
    pub fn invariant_multiplicity(&self, i: u32) -> Result<u32> {
        self.validate()?;
        Ok(match *self {
            SymmetryGroup::Dihedral(k) => u32::from(i.is_multiple_of(k)),
            SymmetryGroup::IcosahedralFull => icosahedral_multiplicity(i)?,
            SymmetryGroup::HyperIcosahedralRotations => hyper_icosahedron_multiplicity(i)?,
            SymmetryGroup::Custom {
                i1, multiplicity, ..
            } => match i {
                0 => 1,
                _ if i < i1 => 0,
                _ if i == i1 => multiplicity,
                _ => 1,
            },
        })
    }

    /// The first `count` nonradial channels with positive invariant
    /// multiplicity, by increasing degree.
    pub fn invariant_channels(&self, count: usize) -> Result<Vec<ModeSpec>> {
        let n = self.dimension();
        let mut out = Vec::with_capacity(count);
        let mut i = 1;
        while out.len() < count {
            let m = self.invariant_multiplicity(i)?;
            if m > 0 {
                out.push(ModeSpec::new(n, i, m));
            }
            i += 1;
        }
        Ok(out)
    }
}

impl fmt::Display for SymmetryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SymmetryGroup::Dihedral(k) => write!(f, "dihedral:{k}"),
            SymmetryGroup::IcosahedralFull => f.write_str("icosahedral"),
            SymmetryGroup::HyperIcosahedralRotations => f.write_str("hyper-icosahedral"),
            SymmetryGroup::Custom {
                dimension,
                i1,
                multiplicity,
            } => write!(f, "custom:{dimension}:{i1}:{multiplicity}"),
        }
    }
}

impl FromStr for SymmetryGroup {
    type Err = Error;

    /// Accepts `dihedral:k`, `icosahedral`, `hyper-icosahedral` and
    /// `custom:N:i1:m`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let parts: Vec<&str> = lower.split(':').collect();
        let num = |p: &str| {
            p.parse::<u32>()
                .map_err(|_| Error::Precondition(format!("bad integer '{p}' in group '{s}'")))
        };
        let group = match parts.as_slice() {
            ["dihedral", k] => SymmetryGroup::Dihedral(num(k)?),
            ["icosahedral"] => SymmetryGroup::IcosahedralFull,
            ["hyper-icosahedral"] => SymmetryGroup::HyperIcosahedralRotations,
            ["custom", n, i1, m] => SymmetryGroup::Custom {
                dimension: num(n)?,
                i1: num(i1)?,
                multiplicity: num(m)?,
            },
            _ => return Err(Error::Precondition(format!("unknown group '{s}'"))),
        };
        group.validate()?;
        Ok(group)
    }
}

/// Laplace–Beltrami eigenvalue `i(i+N-2)` on the sphere `S^{N-1}`.
pub fn gamma(i: u32, dimension: u32) -> f64 {
    let i = i as f64;
    i * (i + dimension as f64 - 2.0)
}

fn round_to_integer(degree: u32, value: f64) -> Result<u32> {
    let rounded = value.round();
    if (value - rounded).abs() > 1e-9 || rounded < 0.0 {
        return Err(Error::Integrality { degree, value });
    }
    Ok(rounded as u32)
}

/// `sin(nφ/2) / sin(φ/2)`.
fn char_ratio(n: u32, phi: f64) -> f64 {
    (n as f64 * phi / 2.0).sin() / (phi / 2.0).sin()
}

/// Multiplicity of the harmonics of degree `i` on `S³` invariant under the
/// rotation group of the 600-cell. Odd degrees vanish.
pub fn hyper_icosahedron_multiplicity(i: u32) -> Result<u32> {
    if i % 2 == 1 {
        return Ok(0);
    }
    let n = i + 1;
    let value = (20.0 * char_ratio(n, 2.0 * PI / 3.0)
        + 12.0 * char_ratio(n, 2.0 * PI / 5.0)
        + 12.0 * char_ratio(n, 4.0 * PI / 5.0)
        + 15.0 * char_ratio(n, PI)
        + n as f64)
        / 60.0;
    round_to_integer(i, value)
}

/// Multiplicity of the degree-`l` harmonics on `S²` invariant under the full
/// icosahedral group. The inversion kills odd degrees; even degrees follow
/// from the rotation character.
pub fn icosahedral_multiplicity(l: u32) -> Result<u32> {
    if l % 2 == 1 {
        return Ok(0);
    }
    let n = 2 * l + 1;
    let value = (n as f64
        + 15.0 * char_ratio(n, PI)
        + 20.0 * char_ratio(n, 2.0 * PI / 3.0)
        + 12.0 * char_ratio(n, 2.0 * PI / 5.0)
        + 12.0 * char_ratio(n, 4.0 * PI / 5.0))
        / 60.0;
    round_to_integer(l, value)
}

/// First nonradial invariant degree `i(1)` and its multiplicity.
pub fn first_invariant_degree(group: &SymmetryGroup) -> Result<(u32, u32)> {
    let first = group.invariant_channels(1)?[0];
    Ok((first.degree, first.multiplicity))
}

/// Evaluate condition (G): `s_1 > r_2` and odd multiplicity, where `s_1` is
/// the first zero of the derivative of the degree-`i(1)` profile.
pub fn check_condition_g(group: &SymmetryGroup) -> Result<ConditionGReport> {
    let n = group.dimension();
    let (i1, multiplicity) = first_invariant_degree(group)?;
    let r2 = radial_profile_zero(n, 2)?;
    let s1 = first_profile_derivative_zero(n, i1)?;
    Ok(ConditionGReport {
        group: *group,
        i1,
        gamma1: gamma(i1, n),
        multiplicity,
        r2,
        s1,
        passes: s1 > r2 && multiplicity % 2 == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(0, 3), 0.0);
        assert_eq!(gamma(6, 3), 42.0);
        assert_eq!(gamma(12, 4), 168.0);
        assert_eq!(gamma(5, 2), 25.0);
    }

    #[test]
    fn hyper_multiplicities() {
        assert_eq!(hyper_icosahedron_multiplicity(0).unwrap(), 1);
        for i in 1..12 {
            assert_eq!(hyper_icosahedron_multiplicity(i).unwrap(), 0, "i = {i}");
        }
        assert_eq!(hyper_icosahedron_multiplicity(12).unwrap(), 1);
        assert_eq!(hyper_icosahedron_multiplicity(20).unwrap(), 1);
        assert_eq!(hyper_icosahedron_multiplicity(24).unwrap(), 1);
        assert_eq!(hyper_icosahedron_multiplicity(28).unwrap(), 0);
    }

    #[test]
    fn icosahedral_multiplicities() {
        let expected = [
            (0, 1),
            (2, 0),
            (4, 0),
            (6, 1),
            (8, 0),
            (10, 1),
            (12, 1),
            (15, 0),
        ];
        for (l, m) in expected {
            assert_eq!(icosahedral_multiplicity(l).unwrap(), m, "l = {l}");
        }
        // At even degree l the 600-cell formula at 2l matches the rotation
        // character on S², which agrees with the full group.
        for l in (0..40).step_by(2) {
            assert_eq!(
                hyper_icosahedron_multiplicity(2 * l).unwrap(),
                icosahedral_multiplicity(l).unwrap()
            );
        }
    }

    #[test]
    fn first_degrees() {
        assert_eq!(
            first_invariant_degree(&SymmetryGroup::Dihedral(5)).unwrap(),
            (5, 1)
        );
        assert_eq!(
            first_invariant_degree(&SymmetryGroup::IcosahedralFull).unwrap(),
            (6, 1)
        );
        assert_eq!(
            first_invariant_degree(&SymmetryGroup::HyperIcosahedralRotations).unwrap(),
            (12, 1)
        );
        let custom = SymmetryGroup::Custom {
            dimension: 5,
            i1: 7,
            multiplicity: 3,
        };
        assert_eq!(first_invariant_degree(&custom).unwrap(), (7, 3));
    }

    #[test]
    fn channel_lists() {
        let degrees = |g: SymmetryGroup| -> Vec<u32> {
            g.invariant_channels(4)
                .unwrap()
                .iter()
                .map(|c| c.degree)
                .collect()
        };
        assert_eq!(degrees(SymmetryGroup::Dihedral(5)), vec![5, 10, 15, 20]);
        assert_eq!(degrees(SymmetryGroup::IcosahedralFull), vec![6, 10, 12, 16]);
        assert_eq!(
            degrees(SymmetryGroup::HyperIcosahedralRotations),
            vec![12, 20, 24, 30]
        );
    }

    #[test]
    fn condition_g_verdicts() {
        let d4 = check_condition_g(&SymmetryGroup::Dihedral(4)).unwrap();
        assert!(!d4.passes);
        assert!((d4.s1 - 5.31755).abs() < 1e-4 && (d4.r2 - 5.52008).abs() < 1e-4);
        let d5 = check_condition_g(&SymmetryGroup::Dihedral(5)).unwrap();
        assert!(d5.passes && (d5.s1 - 6.41562).abs() < 1e-4);
        let ico = check_condition_g(&SymmetryGroup::IcosahedralFull).unwrap();
        assert!(ico.passes && ico.gamma1 == 42.0 && ico.s1 > 6.75646);
        assert!(
            check_condition_g(&SymmetryGroup::HyperIcosahedralRotations)
                .unwrap()
                .passes
        );
        let even = SymmetryGroup::Custom {
            dimension: 3,
            i1: 9,
            multiplicity: 2,
        };
        assert!(!check_condition_g(&even).unwrap().passes);
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "dihedral:5",
            "icosahedral",
            "hyper-icosahedral",
            "custom:5:7:1",
        ] {
            let g: SymmetryGroup = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("dihedral:0".parse::<SymmetryGroup>().is_err());
        assert!("tetrahedral".parse::<SymmetryGroup>().is_err());
        assert!("custom:1:2:1".parse::<SymmetryGroup>().is_err());
    }
}
