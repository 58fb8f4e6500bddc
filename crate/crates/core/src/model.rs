//! Fruit domain types shared by the rest of the crate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Solid-cylinder approximation of an avocado.
///
/// `radius` is half the measured width, `height` runs along the calyx axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderFruit {
    radius: f64,
    height: f64,
    mass: f64,
    label: String,
}

fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            field,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

impl CylinderFruit {
    pub fn new(radius: f64, height: f64, mass: f64, label: impl Into<String>) -> Result<Self> {
        check_positive("radius", radius)?;
        check_positive("height", height)?;
        check_positive("mass", mass)?;
        Ok(Self {
            radius,
            height,
            mass,
            label: label.into(),
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn width(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Moment of inertia about a centroidal axis [kg·m²].
    pub fn moment_of_inertia(&self, axis: InertiaAxis) -> f64 {
        moment_of_inertia(self, axis)
    }
}

/// Builds the cylinder model from a measured fruit (width and height in metres, mass in kg).
pub fn cylinder_from_fruit(width: f64, height: f64, mass: f64) -> Result<CylinderFruit> {
    check_positive("width", width)?;
    check_positive("height", height)?;
    check_positive("mass", mass)?;
    CylinderFruit::new(width / 2.0, height, mass, "")
}

/// Centroidal axis for inertia queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InertiaAxis {
    /// The cylinder's own axis (calyx to tip).
    Longitudinal,
    /// Any diameter through the centroid, perpendicular to the cylinder axis.
    Transverse,
}

/// Solid cylinder: `m r²/2` about the axis, `m (3r² + h²)/12` about a centroidal diameter.
pub fn moment_of_inertia(fruit: &CylinderFruit, axis: InertiaAxis) -> f64 {
    let (m, r, h) = (fruit.mass, fruit.radius, fruit.height);
    match axis {
        InertiaAxis::Longitudinal => m * r * r / 2.0,
        InertiaAxis::Transverse => m * (3.0 * r * r + h * h) / 12.0,
    }
}

/// Closed interval `[min, max]` with both bounds positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    pub fn new(field: &'static str, min: f64, max: f64) -> Result<Self> {
        check_positive(field, min)?;
        check_positive(field, max)?;
        if min > max {
            return Err(Error::domain(field, format!("min {min} exceeds max {max}")));
        }
        Ok(Self { min, max })
    }

    pub fn point(field: &'static str, value: f64) -> Result<Self> {
        Self::new(field, value, value)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }

    fn ends(&self) -> [f64; 2] {
        [self.min, self.max]
    }
}

/// Range of fruit sizes a gripper design has to accommodate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeEnvelope {
    pub height_range: Bounds,
    pub width_range: Bounds,
    pub mass_range: Bounds,
}

impl SizeEnvelope {
    pub fn new(height_range: Bounds, width_range: Bounds, mass_range: Bounds) -> Self {
        Self {
            height_range,
            width_range,
            mass_range,
        }
    }

    /// The eight (width, height, mass) corners of the envelope as cylinder fruits.
    ///
    /// Order is fixed: mass varies slowest, then width, then height. Duplicates
    /// are kept when a range collapses to a point.
    pub fn corners(&self) -> Vec<CylinderFruit> {
        let mut out = Vec::with_capacity(8);
        for (i, m) in self.mass_range.ends().into_iter().enumerate() {
            for (j, w) in self.width_range.ends().into_iter().enumerate() {
                for (k, h) in self.height_range.ends().into_iter().enumerate() {
                    let fruit = cylinder_from_fruit(w, h, m)
                        .expect("envelope bounds are validated positive")
                        .with_label(format!("corner m{i}w{j}h{k}"));
                    out.push(fruit);
                }
            }
        }
        out
    }
}

/// Cultivar averages: height 64.5–129.9 mm, width 53.8–99.8 mm; mature Hass mass 0.2–0.3 kg.
pub fn default_size_envelope() -> SizeEnvelope {
    SizeEnvelope {
        height_range: Bounds {
            min: 0.0645,
            max: 0.1299,
        },
        width_range: Bounds {
            min: 0.0538,
            max: 0.0998,
        },
        mass_range: Bounds { min: 0.2, max: 0.3 },
    }
}

/// Direction from which the fruit is approached or pulled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Viewpoint {
    /// Front view, facing the peduncle.
    FV,
    /// Canonical view along the fruit's −y axis; moment about +y.
    CV,
    /// Bottom view; straight pull-off.
    BV,
}

impl Viewpoint {
    pub const ALL: [Viewpoint; 3] = [Viewpoint::FV, Viewpoint::CV, Viewpoint::BV];

    pub fn as_str(self) -> &'static str {
        match self {
            Viewpoint::FV => "FV",
            Viewpoint::CV => "CV",
            Viewpoint::BV => "BV",
        }
    }
}

impl fmt::Display for Viewpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Viewpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "FV" => Ok(Viewpoint::FV),
            "CV" => Ok(Viewpoint::CV),
            "BV" => Ok(Viewpoint::BV),
            other => Err(Error::domain(
                "viewpoint",
                format!("expected one of FV, CV, BV, got {other:?}"),
            )),
        }
    }
}
