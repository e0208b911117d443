use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;
use crate::SPEED_OF_LIGHT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathType {
    Los,
    Reflection,
    Diffraction,
    Scattering,
}

impl PathType {
    pub const ALL: [PathType; 4] = [
        PathType::Los,
        PathType::Reflection,
        PathType::Diffraction,
        PathType::Scattering,
    ];

    /// Numeric code stored in array exports.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PathType::Los => "los",
            PathType::Reflection => "reflection",
            PathType::Diffraction => "diffraction",
            PathType::Scattering => "scattering",
        }
    }
}

/// Azimuth in [-180, 180) degrees from +x toward +y; elevation in [0, 180]
/// degrees measured from +z (zenith angle).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSpec {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

/// Converts a direction (any nonzero length) to azimuth/zenith angles.
/// Vertical directions get azimuth 0; +180 is folded to -180.
pub fn direction_to_angles(d: Vec3) -> AngleSpec {
    let d = d.normalized();
    let mut az = if d.x == 0.0 && d.y == 0.0 {
        0.0
    } else {
        d.y.atan2(d.x).to_degrees()
    };
    if az >= 180.0 {
        az -= 360.0;
    }
    if az < -180.0 {
        az += 360.0;
    }
    // -0.0 prints differently from 0.0
    let az = az + 0.0;
    let el = d.z.clamp(-1.0, 1.0).acos().to_degrees();
    AngleSpec {
        azimuth_deg: az,
        elevation_deg: el,
    }
}

/// Wraps an angle in radians to (-pi, pi].
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Free-space phasor `(lambda / (4 pi L)) e^{-j 2 pi L / lambda}`, with the
/// phase reduced through the fractional wavelength count.
pub fn free_space_gain(length_m: f64, wavelength: f64) -> Complex64 {
    let cycles = length_m / wavelength;
    let phase = wrap_phase(-2.0 * PI * (cycles - cycles.floor()));
    Complex64::from_polar(wavelength / (4.0 * PI * length_m), phase)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationPath {
    pub path_type: PathType,
    /// Number of interactions; 0 for line of sight.
    pub order: usize,
    /// TX, interaction points, RX.
    pub vertices: Vec<Vec3>,
    pub length_m: f64,
    /// Complex amplitude; `|gain|^2` is the power ratio between unit-gain
    /// isotropic antennas.
    #[serde(with = "complex_pair")]
    pub gain: Complex64,
    pub toa_s: f64,
    pub aod: AngleSpec,
    pub aoa: AngleSpec,
}

impl PropagationPath {
    pub fn new(path_type: PathType, vertices: Vec<Vec3>, gain: Complex64) -> PropagationPath {
        let n = vertices.len();
        debug_assert!(n >= 2);
        let length_m: f64 = vertices.windows(2).map(|w| w[0].distance(w[1])).sum();
        PropagationPath {
            path_type,
            order: n - 2,
            length_m,
            gain,
            toa_s: length_m / SPEED_OF_LIGHT,
            aod: direction_to_angles(vertices[1] - vertices[0]),
            aoa: direction_to_angles(vertices[n - 2] - vertices[n - 1]),
            vertices,
        }
    }

    pub fn gain_db(&self) -> f64 {
        20.0 * self.gain.norm().log10()
    }

    pub fn phase_rad(&self) -> f64 {
        let p = self.gain.arg();
        if p == -PI {
            PI
        } else {
            p
        }
    }
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}
