//! Upper half-plane primitives: ideal points, orientation-preserving Möbius
//! maps, horoballs, and the distance/area formulas for decorated ideal
//! triangles.
//!
//! A horoball centered at a finite boundary point is a Euclidean disk tangent
//! to the real line and is described by its Euclidean diameter. The horoball
//! centered at infinity is the half-plane above a horizontal line and is
//! described by the height of that line.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Default absolute tolerance on a horoball distance for tangency.
pub const DEFAULT_TANGENCY_TOL: f64 = 1e-9;

/// Largest tolerated |det - 1| after normalization.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("Möbius coefficients have non-positive determinant {0}")]
    NonPositiveDeterminant(f64),
    #[error("horoball size must be positive, got {0}")]
    NonPositiveSize(f64),
    #[error("horoballs share the center {0}")]
    CoincidentCenters(IdealPoint),
    #[error("ideal triangle has repeated vertex {0}")]
    DegenerateTriangle(IdealPoint),
    #[error("horoball centered at {found} is not at triangle vertex {expected}")]
    HoroballNotAtVertex {
        expected: IdealPoint,
        found: IdealPoint,
    },
    #[error("vertex index {0} out of range")]
    VertexIndex(usize),
    #[error("point triples have opposite orientation")]
    OrientationReversing,
}

/// A point of the boundary of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdealPoint {
    Finite(f64),
    Infinity,
}

impl IdealPoint {
    pub fn finite(x: f64) -> Result<Self, GeometryError> {
        if x.is_finite() {
            Ok(IdealPoint::Finite(x))
        } else {
            Err(GeometryError::NonFinite(format!("ideal point {x}")))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, IdealPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match *self {
            IdealPoint::Finite(x) => Some(x),
            IdealPoint::Infinity => None,
        }
    }
}

impl fmt::Display for IdealPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealPoint::Finite(x) => write!(f, "{x}"),
            IdealPoint::Infinity => write!(f, "∞"),
        }
    }
}

/// An element of PSL(2,ℝ) acting by z ↦ (az + b)/(cz + d), stored with
/// ad − bc = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds the map from raw coefficients, rescaling to unit determinant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GeometryError> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::NonFinite(format!(
                "Möbius coefficients ({a}, {b}, {c}, {d})"
            )));
        }
        let det = a * d - b * c;
        if !(det > 0.0) {
            return Err(GeometryError::NonPositiveDeterminant(det));
        }
        let s = det.sqrt().recip();
        Ok(Mobius {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
        })
    }

    /// z ↦ z + t
    pub fn translation(t: f64) -> Self {
        Mobius {
            a: 1.0,
            b: t,
            c: 0.0,
            d: 1.0,
        }
    }

    /// z ↦ k z for k > 0
    pub fn dilation(k: f64) -> Result<Self, GeometryError> {
        Mobius::new(k, 0.0, 0.0, 1.0)
    }

    /// z ↦ −h/z, which swaps 0 and ∞ and takes ih to i.
    pub fn inversion(h: f64) -> Result<Self, GeometryError> {
        Mobius::new(0.0, -h, 1.0, 0.0)
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_normalized(&self) -> bool {
        (self.determinant() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn inverse(&self) -> Self {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Self {
        let m = Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        };
        // renormalize to keep rounding from accumulating along long chains
        let det = m.determinant();
        let s = det.sqrt().recip();
        Mobius {
            a: m.a * s,
            b: m.b * s,
            c: m.c * s,
            d: m.d * s,
        }
    }

    pub fn apply(&self, p: IdealPoint) -> IdealPoint {
        match p {
            IdealPoint::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite((self.a * x + self.b) / den)
                }
            }
            IdealPoint::Infinity => {
                if self.c == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite(self.a / self.c)
                }
            }
        }
    }

    pub fn apply_horoball(&self, h: &Horoball) -> Horoball {
        self.apply_horoball_onto(h, self.apply(h.center))
    }

    /// Image of `h` when the image of its center is already known.
    ///
    /// Callers that track ideal points combinatorially use this to keep
    /// an exact ∞ instead of a huge finite value produced by rounding at a
    /// pole.
    pub fn apply_horoball_onto(&self, h: &Horoball, image: IdealPoint) -> Horoball {
        let size = match (h.center, image) {
            (IdealPoint::Finite(z), IdealPoint::Finite(_)) => {
                let den = self.c * z + self.d;
                h.size / (den * den)
            }
            (IdealPoint::Finite(_), IdealPoint::Infinity) => 1.0 / (self.c * self.c * h.size),
            (IdealPoint::Infinity, IdealPoint::Finite(_)) => 1.0 / (self.c * self.c * h.size),
            (IdealPoint::Infinity, IdealPoint::Infinity) => h.size * self.a * self.a,
        };
        Horoball {
            center: image,
            size,
        }
    }

    /// The unique orientation-preserving map taking `from[i]` to `to[i]`.
    pub fn from_triples(from: [IdealPoint; 3], to: [IdealPoint; 3]) -> Result<Self, GeometryError> {
        let s = to_zero_one_infinity(from)?;
        let t = to_zero_one_infinity(to)?;
        if s.sign != t.sign {
            return Err(GeometryError::OrientationReversing);
        }
        Ok(t.map.inverse().compose(&s.map))
    }

    /// Multiplier of the derivative at ∞ for a map fixing ∞, i.e. `a²` in
    /// z ↦ a²z + ab. `None` if ∞ is not fixed.
    pub fn dilation_at_infinity(&self) -> Option<f64> {
        if self.c == 0.0 {
            Some(self.a * self.a)
        } else {
            None
        }
    }
}

struct Normalizer {
    map: Mobius,
    sign: bool,
}

/// Map sending (z1, z2, z3) to (0, 1, ∞), possibly composed with z ↦ −z
/// when the triple is negatively ordered; `sign` records which.
fn to_zero_one_infinity(z: [IdealPoint; 3]) -> Result<Normalizer, GeometryError> {
    use IdealPoint::*;
    for i in 0..3 {
        for j in (i + 1)..3 {
            if z[i] == z[j] {
                return Err(GeometryError::DegenerateTriangle(z[i]));
            }
        }
    }
    let (a, b, c, d) = match (z[0], z[1], z[2]) {
        (Infinity, Finite(z2), Finite(z3)) => (0.0, z2 - z3, 1.0, -z3),
        (Finite(z1), Infinity, Finite(z3)) => (1.0, -z1, 1.0, -z3),
        (Finite(z1), Finite(z2), Infinity) => (1.0, -z1, 0.0, z2 - z1),
        (Finite(z1), Finite(z2), Finite(z3)) => {
            (z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
        }
        _ => unreachable!("distinctness checked above"),
    };
    let det = a * d - b * c;
    if det > 0.0 {
        Ok(Normalizer {
            map: Mobius::new(a, b, c, d)?,
            sign: true,
        })
    } else {
        // (z1,z2,z3) is clockwise; flip through z ↦ −z to land in PSL(2,ℝ)
        Ok(Normalizer {
            map: Mobius::new(-a, -b, c, d)?,
            sign: false,
        })
    }
}

/// A horoball: `size` is the Euclidean diameter for a finite center and the
/// height of the bounding line for the center at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horoball {
    pub center: IdealPoint,
    pub size: f64,
}

impl Horoball {
    pub fn new(center: IdealPoint, size: f64) -> Result<Self, GeometryError> {
        if let IdealPoint::Finite(x) = center {
            if !x.is_finite() {
                return Err(GeometryError::NonFinite(format!("center {x}")));
            }
        }
        if !size.is_finite() {
            return Err(GeometryError::NonFinite(format!("horoball size {size}")));
        }
        if size <= 0.0 {
            return Err(GeometryError::NonPositiveSize(size));
        }
        Ok(Horoball { center, size })
    }

    pub fn at(x: f64, diameter: f64) -> Result<Self, GeometryError> {
        Horoball::new(IdealPoint::finite(x)?, diameter)
    }

    pub fn at_infinity(height: f64) -> Result<Self, GeometryError> {
        Horoball::new(IdealPoint::Infinity, height)
    }
}

/// Signed hyperbolic distance between the boundaries of two horoballs;
/// negative when they overlap.
pub fn horoball_distance(h1: &Horoball, h2: &Horoball) -> Result<f64, GeometryError> {
    match (h1.center, h2.center) {
        (IdealPoint::Finite(z1), IdealPoint::Finite(z2)) => {
            if z1 == z2 {
                return Err(GeometryError::CoincidentCenters(h1.center));
            }
            let dz = z1 - z2;
            // split the logs so tiny/huge diameters don't underflow the product
            Ok(2.0 * dz.abs().ln() - h1.size.ln() - h2.size.ln())
        }
        (IdealPoint::Infinity, IdealPoint::Finite(_)) => Ok(h1.size.ln() - h2.size.ln()),
        (IdealPoint::Finite(_), IdealPoint::Infinity) => Ok(h2.size.ln() - h1.size.ln()),
        (IdealPoint::Infinity, IdealPoint::Infinity) => {
            Err(GeometryError::CoincidentCenters(IdealPoint::Infinity))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contact {
    Disjoint,
    Tangent,
    Overlapping,
}

/// Classifies a pair of horoballs by the sign of their distance, with
/// `|distance| <= tol` counted as tangent.
pub fn horoballs_disjoint(
    h1: &Horoball,
    h2: &Horoball,
    tol: f64,
) -> Result<Contact, GeometryError> {
    let dist = horoball_distance(h1, h2)?;
    Ok(if dist.abs() <= tol {
        Contact::Tangent
    } else if dist > 0.0 {
        Contact::Disjoint
    } else {
        Contact::Overlapping
    })
}

/// Three distinct ideal points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealTriangle {
    pub points: [IdealPoint; 3],
}

impl IdealTriangle {
    pub fn new(points: [IdealPoint; 3]) -> Result<Self, GeometryError> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                if points[i] == points[j] {
                    return Err(GeometryError::DegenerateTriangle(points[i]));
                }
            }
        }
        Ok(IdealTriangle { points })
    }

    /// True when the vertices run counterclockwise around the triangle.
    pub fn is_positively_oriented(&self) -> bool {
        to_zero_one_infinity(self.points)
            .map(|n| n.sign)
            .unwrap_or(false)
    }

    pub fn image(&self, m: &Mobius) -> IdealTriangle {
        IdealTriangle {
            points: self.points.map(|p| m.apply(p)),
        }
    }
}

/// Area of `h ∩ tri` for a horoball centered at vertex `v` of `tri`.
pub fn corner_area(tri: &IdealTriangle, v: usize, h: &Horoball) -> Result<f64, GeometryError> {
    if v > 2 {
        return Err(GeometryError::VertexIndex(v));
    }
    let pv = tri.points[v];
    if h.center != pv {
        return Err(GeometryError::HoroballNotAtVertex {
            expected: pv,
            found: h.center,
        });
    }
    let pu = tri.points[(v + 1) % 3];
    let pw = tri.points[(v + 2) % 3];
    match (pv, pu, pw) {
        (IdealPoint::Infinity, IdealPoint::Finite(u), IdealPoint::Finite(w)) => {
            Ok((u - w).abs() / h.size)
        }
        (IdealPoint::Finite(z), IdealPoint::Finite(u), IdealPoint::Finite(w)) => {
            Ok(h.size * (u - w).abs() / ((u - z).abs() * (w - z).abs()))
        }
        (IdealPoint::Finite(z), IdealPoint::Infinity, IdealPoint::Finite(w))
        | (IdealPoint::Finite(z), IdealPoint::Finite(w), IdealPoint::Infinity) => {
            Ok(h.size / (w - z).abs())
        }
        _ => unreachable!("vertices are distinct"),
    }
}

/// Cross-ratio (z1, z2; z3, z4) = (z1 − z3)(z2 − z4) / ((z1 − z4)(z2 − z3)),
/// with ∞ handled by cancelling the factors that contain it.
pub fn cross_ratio(z: [IdealPoint; 4]) -> f64 {
    let diff = |i: usize, j: usize| -> Option<f64> {
        match (z[i], z[j]) {
            (IdealPoint::Finite(a), IdealPoint::Finite(b)) => Some(a - b),
            _ => None,
        }
    };
    let num = [diff(0, 2), diff(1, 3)];
    let den = [diff(0, 3), diff(1, 2)];
    let prod = |v: [Option<f64>; 2]| v.iter().flatten().product::<f64>();
    prod(num) / prod(den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(x: f64) -> IdealPoint {
        IdealPoint::Finite(x)
    }

    #[test]
    fn identity_fixes_points() {
        assert_eq!(Mobius::IDENTITY.apply(fin(3.5)), fin(3.5));
        assert_eq!(
            Mobius::IDENTITY.apply(IdealPoint::Infinity),
            IdealPoint::Infinity
        );
    }

    #[test]
    fn inversion_sends_zero_to_infinity() {
        let m = Mobius::inversion(0.25).unwrap();
        assert!(m.is_normalized());
        assert_eq!(m.apply(fin(0.0)), IdealPoint::Infinity);
        assert_eq!(m.apply(IdealPoint::Infinity), fin(0.0));
    }

    #[test]
    fn inversion_matches_rational_evaluation() {
        // z ↦ -h/z at h = 1/4, z = 1/2 gives -1/2 exactly
        let exact = -1.0 / 2.0;
        let m = Mobius::inversion(0.25).unwrap();
        assert_eq!(m.apply(fin(0.5)), fin(exact));
        assert_eq!(exact, -0.5);
    }

    #[test]
    fn inversion_takes_ball_at_zero_to_height_one() {
        let h = 0.37;
        let m = Mobius::inversion(h).unwrap();
        let img = m.apply_horoball(&Horoball::at(0.0, h).unwrap());
        assert_eq!(img.center, IdealPoint::Infinity);
        assert!((img.size - 1.0).abs() < 1e-15);
        let back = m.inverse().apply_horoball(&img);
        assert_eq!(back.center, fin(0.0));
        assert!((back.size - h).abs() < 1e-15);
    }

    #[test]
    fn identity_and_translation_on_horoballs() {
        let h = Horoball::at(0.0, 1.0).unwrap();
        assert_eq!(Mobius::IDENTITY.apply_horoball(&h), h);
        let t = Mobius::translation(5.0).apply_horoball(&Horoball::at(2.0, 0.3).unwrap());
        assert_eq!(t.center, fin(7.0));
        assert!((t.size - 0.3).abs() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let inf = Horoball::at_infinity(1.0).unwrap();
        let d = horoball_distance(&inf, &Horoball::at(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(d, 0.0);
        let d = horoball_distance(
            &Horoball::at(0.0, 1.0).unwrap(),
            &Horoball::at(1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(d, 0.0);
        let h1 = Horoball::at(0.0, 0.2).unwrap();
        let h2 = Horoball::at(3.0, 0.5).unwrap();
        let d = horoball_distance(&h1, &h2).unwrap();
        assert!((d - 90f64.ln()).abs() < 1e-12);
        // cross-check: send h1 to ∞ and measure vertically
        let m = Mobius::inversion(0.2).unwrap();
        let m1 = m.apply_horoball(&h1);
        let m2 = m.apply_horoball(&Mobius::translation(-0.0).apply_horoball(&h2));
        assert!((horoball_distance(&m1, &m2).unwrap() - d).abs() < 1e-12);
        assert!(((m1.size / m2.size).ln() - d).abs() < 1e-12);
    }

    #[test]
    fn coincident_centers_rejected() {
        let h = Horoball::at(1.0, 1.0).unwrap();
        assert!(matches!(
            horoball_distance(&h, &h),
            Err(GeometryError::CoincidentCenters(_))
        ));
        let i = Horoball::at_infinity(2.0).unwrap();
        assert!(horoballs_disjoint(&i, &i, DEFAULT_TANGENCY_TOL).is_err());
    }

    #[test]
    fn contact_examples() {
        let tol = DEFAULT_TANGENCY_TOL;
        let a = Horoball::at(0.0, 1.0).unwrap();
        assert_eq!(
            horoballs_disjoint(&a, &Horoball::at(1.0, 1.0).unwrap(), tol).unwrap(),
            Contact::Tangent
        );
        assert_eq!(
            horoballs_disjoint(&a, &Horoball::at(1.0, 2.0).unwrap(), tol).unwrap(),
            Contact::Overlapping
        );
        assert_eq!(
            horoballs_disjoint(
                &Horoball::at_infinity(1.0).unwrap(),
                &Horoball::at(0.0, 0.5).unwrap(),
                tol
            )
            .unwrap(),
            Contact::Disjoint
        );
    }

    #[test]
    fn corner_area_examples() {
        let a = 1.7;
        let b = 0.6;
        let tri = IdealTriangle::new([fin(0.0), fin(a), IdealPoint::Infinity]).unwrap();
        let at_inf = corner_area(&tri, 2, &Horoball::at_infinity(1.0).unwrap()).unwrap();
        assert!((at_inf - a).abs() < 1e-15);
        let at_zero = corner_area(&tri, 0, &Horoball::at(0.0, a * b).unwrap()).unwrap();
        assert!((at_zero - b).abs() < 1e-15);
        let unit = IdealTriangle::new([fin(0.0), fin(1.0), IdealPoint::Infinity]).unwrap();
        assert_eq!(
            corner_area(&unit, 0, &Horoball::at(0.0, 1.0).unwrap()).unwrap(),
            1.0
        );
        assert!(matches!(
            corner_area(&unit, 1, &Horoball::at(0.0, 1.0).unwrap()),
            Err(GeometryError::HoroballNotAtVertex { .. })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Mobius::new(1.0, 0.0, 0.0, -1.0).is_err());
        assert!(Mobius::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
        assert!(Horoball::at(0.0, 0.0).is_err());
        assert!(IdealPoint::finite(f64::INFINITY).is_err());
        assert!(IdealTriangle::new([fin(0.0), fin(0.0), IdealPoint::Infinity]).is_err());
    }

    #[test]
    fn triples_map_and_orientation() {
        let from = [fin(0.0), fin(1.0), IdealPoint::Infinity];
        let to = [fin(2.0), fin(5.0), fin(-1.0)];
        let m = Mobius::from_triples(from, to).unwrap();
        for (p, q) in from.iter().zip(to.iter()) {
            let img = m.apply(*p).as_finite().unwrap();
            assert!((img - q.as_finite().unwrap()).abs() < 1e-12);
        }
        let reversed = [fin(5.0), fin(2.0), fin(-1.0)];
        assert_eq!(
            Mobius::from_triples(from, reversed),
            Err(GeometryError::OrientationReversing)
        );
        let tri = IdealTriangle::new(from).unwrap();
        assert!(tri.is_positively_oriented());
    }
}
