//! Receive-array geometries: uniform linear (ULA), uniform circular (UCA) and
//! uniform cylindrical (UCyA) arrays.
//!
//! All coordinates are expressed in wavelengths, so the wavenumber times a
//! projected distance is simply `2π · distance`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Position of one array element, in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementPosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ElementPosition {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Distance from the z-axis.
    pub fn radial_distance(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance_to(&self, other: &ElementPosition) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeometryKind {
    Ula,
    Uca,
    Ucya,
}

impl GeometryKind {
    pub fn label(self) -> &'static str {
        match self {
            GeometryKind::Ula => "ULA",
            GeometryKind::Uca => "UCA",
            GeometryKind::Ucya => "UCyA",
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An immutable receive array.
///
/// UCyA elements are ordered layer-major: the whole ring of layer 0 first,
/// then layer 1, and so on. Inside a ring, element `n` sits at angle
/// `2πn / N_UCA` measured from the +y axis towards +x.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    kind: GeometryKind,
    elements: Vec<ElementPosition>,
    spacing_2d: f64,
    spacing_3d: Option<f64>,
    ring_size: Option<usize>,
    layer_count: Option<usize>,
}

impl ArrayGeometry {
    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn elements(&self) -> &[ElementPosition] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn spacing_2d(&self) -> f64 {
        self.spacing_2d
    }

    pub fn spacing_3d(&self) -> Option<f64> {
        self.spacing_3d
    }

    pub fn ring_size(&self) -> Option<usize> {
        self.ring_size
    }

    pub fn layer_count(&self) -> Option<usize> {
        self.layer_count
    }

    /// Ring radius for UCA/UCyA arrays.
    pub fn radius(&self) -> Option<f64> {
        self.ring_size
            .map(|n| uca_radius(n, self.spacing_2d).expect("validated at construction"))
    }

    /// Writes `element_index,x,y,z` rows with a header line.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "element_index,x,y,z")?;
        for (i, p) in self.elements.iter().enumerate() {
            writeln!(out, "{i},{:e},{:e},{:e}", p.x, p.y, p.z)?;
        }
        Ok(())
    }
}

fn check_spacing(name: &str, spacing: f64) -> Result<()> {
    if spacing.is_finite() && spacing > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGeometry(format!(
            "{name} must be finite and positive, got {spacing}"
        )))
    }
}

/// Radius of a uniform circular array whose adjacent elements are
/// `spacing_2d` apart: `R = (d/2) / sin(π/N)`.
pub fn uca_radius(ring_size: usize, spacing_2d: f64) -> Result<f64> {
    if ring_size < 2 {
        return Err(Error::InvalidGeometry(format!(
            "a ring needs at least 2 elements, got {ring_size}"
        )));
    }
    check_spacing("spacing_2d", spacing_2d)?;
    Ok(0.5 * spacing_2d / (PI / ring_size as f64).sin())
}

/// `n` elements along the x-axis at `x = p · spacing_2d`.
pub fn build_ula(n: usize, spacing_2d: f64) -> Result<ArrayGeometry> {
    if n == 0 {
        return Err(Error::InvalidGeometry("ULA needs at least one element".into()));
    }
    check_spacing("spacing_2d", spacing_2d)?;
    let elements = (0..n)
        .map(|p| ElementPosition::new(p as f64 * spacing_2d, 0.0, 0.0))
        .collect();
    Ok(ArrayGeometry {
        kind: GeometryKind::Ula,
        elements,
        spacing_2d,
        spacing_3d: None,
        ring_size: None,
        layer_count: None,
    })
}

/// `layer_count` stacked rings of `ring_size` elements, layers `spacing_3d`
/// apart along z.
pub fn build_ucya(
    ring_size: usize,
    layer_count: usize,
    spacing_2d: f64,
    spacing_3d: f64,
) -> Result<ArrayGeometry> {
    let radius = uca_radius(ring_size, spacing_2d)?;
    if layer_count == 0 {
        return Err(Error::InvalidGeometry("UCyA needs at least one layer".into()));
    }
    check_spacing("spacing_3d", spacing_3d)?;
    let step = 2.0 * PI / ring_size as f64;
    let elements = (0..layer_count)
        .flat_map(|layer| {
            let z = layer as f64 * spacing_3d;
            (0..ring_size).map(move |n| {
                let angle = n as f64 * step;
                ElementPosition::new(radius * angle.sin(), radius * angle.cos(), z)
            })
        })
        .collect();
    Ok(ArrayGeometry {
        kind: GeometryKind::Ucya,
        elements,
        spacing_2d,
        spacing_3d: Some(spacing_3d),
        ring_size: Some(ring_size),
        layer_count: Some(layer_count),
    })
}

/// A single-layer ring at z = 0.
pub fn build_uca(ring_size: usize, spacing_2d: f64) -> Result<ArrayGeometry> {
    let mut geometry = build_ucya(ring_size, 1, spacing_2d, spacing_2d)?;
    geometry.kind = GeometryKind::Uca;
    geometry.spacing_3d = None;
    Ok(geometry)
}
