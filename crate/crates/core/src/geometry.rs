//! Array geometry: uniform planar arrays, sub-array partitions and their
//! explicit element layouts.
//!
//! A planar array is described by two principal directions. With rotation
//! `alpha` and tilt `beta`, the unit vectors of the principal directions are
//!
//! ```text
//! e1 = ( cos(alpha),              sin(alpha),              0         )
//! e2 = (-sin(beta) * sin(alpha),  sin(beta) * cos(alpha),  cos(beta) )
//! ```
//!
//! and element `(i1, i2)` sits at `center + d1 * c1 * e1 + d2 * c2 * e2`, with
//! centered indices `c_a = i_a - (n_a - 1) / 2`. With `alpha = beta = 0` the
//! array lies in a plane parallel to xz. Elements are flattened row-major:
//! `index = i1 * n2 + i2`.

use nalgebra::Vector3;
use std::f64::consts::PI;
use std::ops::Range;

use crate::error::{Error, Result};

pub type Point3 = Vector3<f64>;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default ratio used to decide whether a deployment is paraxial.
pub const DEFAULT_PARAXIAL_THRESHOLD: f64 = 0.1;

/// Carrier frequency together with the derived wavelength and wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waveband {
    carrier_hz: f64,
    wavelength: f64,
    wavenumber: f64,
}

impl Waveband {
    pub fn from_frequency(carrier_hz: f64) -> Result<Self> {
        if !(carrier_hz.is_finite() && carrier_hz > 0.0) {
            return Err(Error::InvalidArgument(format!("carrier frequency must be positive, got {carrier_hz}")));
        }
        let wavelength = SPEED_OF_LIGHT / carrier_hz;
        Ok(Self { carrier_hz, wavelength, wavenumber: 2.0 * PI / wavelength })
    }

    pub fn from_ghz(ghz: f64) -> Result<Self> {
        Self::from_frequency(ghz * 1e9)
    }

    pub fn from_wavelength(wavelength: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidArgument(format!("wavelength must be positive, got {wavelength}")));
        }
        Ok(Self { carrier_hz: SPEED_OF_LIGHT / wavelength, wavelength, wavenumber: 2.0 * PI / wavelength })
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    /// Wavelength in meters.
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Wavenumber `2π/λ` in rad/m.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// Converts a length in wavelengths to meters.
    pub fn lam(&self, multiples: f64) -> f64 {
        multiples * self.wavelength
    }

    /// Converts meters to wavelengths.
    pub fn to_lam(&self, meters: f64) -> f64 {
        meters / self.wavelength
    }
}

fn check_counts_and_spacings(n1: usize, n2: usize, d1: f64, d2: f64) -> Result<()> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidGeometry(format!("element counts must be at least 1, got {n1}x{n2}")));
    }
    if !(d1.is_finite() && d1 > 0.0 && d2.is_finite() && d2 > 0.0) {
        return Err(Error::InvalidGeometry(format!("spacings must be positive, got d1={d1}, d2={d2}")));
    }
    Ok(())
}

fn check_point(p: &Point3) -> Result<()> {
    if p.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidGeometry(format!("non-finite center {p:?}")))
    }
}

/// Unit vectors of the two principal directions for rotation `alpha` and tilt `beta`.
pub fn principal_axes(alpha: f64, beta: f64) -> (Point3, Point3) {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    (Point3::new(ca, sa, 0.0), Point3::new(-sb * sa, sb * ca, cb))
}

/// Row-major flattening of an `n1 x n2` index grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flattening {
    pub n1: usize,
    pub n2: usize,
}

impl Flattening {
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        debug_assert!(i1 < self.n1 && i2 < self.n2);
        i1 * self.n2 + i2
    }

    pub fn principal(&self, index: usize) -> (usize, usize) {
        debug_assert!(index < self.len());
        (index / self.n2, index % self.n2)
    }

    /// Centered index `i - (n - 1) / 2` along direction 1.
    pub fn centered1(&self, i1: usize) -> f64 {
        i1 as f64 - (self.n1 as f64 - 1.0) / 2.0
    }

    pub fn centered2(&self, i2: usize) -> f64 {
        i2 as f64 - (self.n2 as f64 - 1.0) / 2.0
    }
}

/// A uniform planar array.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    n1: usize,
    n2: usize,
    d1: f64,
    d2: f64,
    center: Point3,
    rotation: f64,
    tilt: f64,
}

impl ArrayGeometry {
    /// Array centered at the origin in the xz-plane (the transmitter convention).
    pub fn new(n1: usize, n2: usize, d1: f64, d2: f64) -> Result<Self> {
        check_counts_and_spacings(n1, n2, d1, d2)?;
        Ok(Self { n1, n2, d1, d2, center: Point3::zeros(), rotation: 0.0, tilt: 0.0 })
    }

    /// Linear array along x: `n x 1` elements with spacing `d`.
    pub fn linear(n: usize, d: f64) -> Result<Self> {
        Self::new(n, 1, d, d)
    }

    pub fn with_center(mut self, center: Point3) -> Result<Self> {
        check_point(&center)?;
        self.center = center;
        Ok(self)
    }

    pub fn with_orientation(mut self, rotation: f64, tilt: f64) -> Result<Self> {
        if !(rotation.is_finite() && tilt.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite orientation".into()));
        }
        self.rotation = rotation;
        self.tilt = tilt;
        Ok(self)
    }

    pub fn with_spacings(mut self, d1: f64, d2: f64) -> Result<Self> {
        check_counts_and_spacings(self.n1, self.n2, d1, d2)?;
        self.d1 = d1;
        self.d2 = d2;
        Ok(self)
    }

    pub fn with_counts(mut self, n1: usize, n2: usize) -> Result<Self> {
        check_counts_and_spacings(n1, n2, self.d1, self.d2)?;
        self.n1 = n1;
        self.n2 = n2;
        Ok(self)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    pub fn d1(&self) -> f64 {
        self.d1
    }
    pub fn d2(&self) -> f64 {
        self.d2
    }
    pub fn center(&self) -> Point3 {
        self.center
    }
    pub fn rotation(&self) -> f64 {
        self.rotation
    }
    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn flattening(&self) -> Flattening {
        Flattening { n1: self.n1, n2: self.n2 }
    }

    /// Element offsets relative to the array center, in flattening order.
    pub fn local_positions(&self) -> Vec<Point3> {
        let (e1, e2) = principal_axes(self.rotation, self.tilt);
        let f = self.flattening();
        (0..f.len())
            .map(|idx| {
                let (i1, i2) = f.principal(idx);
                e1 * (self.d1 * f.centered1(i1)) + e2 * (self.d2 * f.centered2(i2))
            })
            .collect()
    }

    /// True when the array is a single row along its first direction.
    pub fn is_linear(&self) -> bool {
        self.n2 == 1
    }
}

/// One block of a partitioned receiver. Orientation is shared across the partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SubArraySpec {
    pub center: Point3,
    pub n1: usize,
    pub n2: usize,
    pub d1: f64,
    pub d2: f64,
}

impl SubArraySpec {
    pub fn new(center: Point3, n1: usize, n2: usize, d1: f64, d2: f64) -> Result<Self> {
        check_counts_and_spacings(n1, n2, d1, d2)?;
        check_point(&center)?;
        Ok(Self { center, n1, n2, d1, d2 })
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The equivalent uniform array with the partition's orientation.
    pub fn to_geometry(&self, rotation: f64, tilt: f64) -> ArrayGeometry {
        ArrayGeometry { n1: self.n1, n2: self.n2, d1: self.d1, d2: self.d2, center: self.center, rotation, tilt }
    }

    fn mirrored(&self) -> Self {
        let mut m = self.clone();
        m.center.x = -m.center.x;
        m
    }
}

/// An ordered set of sub-arrays forming one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct SubArrayPartition {
    subarrays: Vec<SubArraySpec>,
    rotation: f64,
    tilt: f64,
    symmetric: bool,
}

impl SubArrayPartition {
    pub fn new(subarrays: Vec<SubArraySpec>, rotation: f64, tilt: f64) -> Result<Self> {
        if subarrays.is_empty() {
            return Err(Error::InvalidGeometry("partition needs at least one sub-array".into()));
        }
        Ok(Self { subarrays, rotation, tilt, symmetric: false })
    }

    /// Builds a partition that is mirror-symmetric about the yz-plane.
    ///
    /// `half` lists sub-arrays `1..=N_r/2`; the result is `half` followed by
    /// its mirror images in reverse order, so sub-array `i` mirrors
    /// `N_r + 1 - i`.
    pub fn symmetric(half: Vec<SubArraySpec>, rotation: f64, tilt: f64) -> Result<Self> {
        if half.is_empty() {
            return Err(Error::InvalidGeometry("partition needs at least one sub-array".into()));
        }
        let mirrored: Vec<_> = half.iter().rev().map(SubArraySpec::mirrored).collect();
        let mut subarrays = half;
        subarrays.extend(mirrored);
        Ok(Self { subarrays, rotation, tilt, symmetric: true })
    }

    /// Declares an explicitly listed partition as symmetric, checking the mirror invariant.
    pub fn into_symmetric(mut self, tol: f64) -> Result<Self> {
        if !self.is_mirror_symmetric(tol) {
            return Err(Error::InvalidGeometry("partition is not mirror-symmetric about the yz-plane".into()));
        }
        self.symmetric = true;
        Ok(self)
    }

    /// Checks `x_i = -x_{N+1-i}` together with equal counts and spacings.
    pub fn is_mirror_symmetric(&self, tol: f64) -> bool {
        let n = self.subarrays.len();
        if !n.is_multiple_of(2) {
            return false;
        }
        (0..n / 2).all(|i| {
            let a = &self.subarrays[i];
            let b = &self.subarrays[n - 1 - i];
            (a.center.x + b.center.x).abs() <= tol
                && (a.center.y - b.center.y).abs() <= tol
                && (a.center.z - b.center.z).abs() <= tol
                && a.n1 == b.n1
                && a.n2 == b.n2
                && (a.d1 - b.d1).abs() <= tol
                && (a.d2 - b.d2).abs() <= tol
        })
    }

    pub fn subarrays(&self) -> &[SubArraySpec] {
        &self.subarrays
    }
    pub fn rotation(&self) -> f64 {
        self.rotation
    }
    pub fn tilt(&self) -> f64 {
        self.tilt
    }
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Number of sub-arrays `N_r`.
    pub fn count(&self) -> usize {
        self.subarrays.len()
    }

    /// Total number of receive elements.
    pub fn total_elements(&self) -> usize {
        self.subarrays.iter().map(SubArraySpec::len).sum()
    }

    /// Sub-array `i` as a standalone uniform array.
    pub fn geometry(&self, i: usize) -> ArrayGeometry {
        self.subarrays[i].to_geometry(self.rotation, self.tilt)
    }

    /// Replaces the first-direction spacing of sub-array `i` (and its mirror, when symmetric).
    pub fn set_spacing_pair(&mut self, i: usize, d1: f64) -> Result<()> {
        check_counts_and_spacings(1, 1, d1, 1.0)?;
        self.subarrays[i].d1 = d1;
        if self.symmetric {
            let n = self.subarrays.len();
            self.subarrays[n - 1 - i].d1 = d1;
        }
        Ok(())
    }

    /// Number of independent spacing pairs (`N_r/2` when symmetric, `N_r` otherwise).
    pub fn free_pairs(&self) -> usize {
        if self.symmetric {
            self.subarrays.len() / 2
        } else {
            self.subarrays.len()
        }
    }
}

/// A contiguous run of elements in a layout that belongs to one array or sub-array.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub range: Range<usize>,
    pub flattening: Flattening,
    pub center: Point3,
}

/// Explicit element positions with their flattening record.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementLayout {
    pub positions: Vec<Point3>,
    pub segments: Vec<Segment>,
    /// Declared center of the whole layout.
    pub center: Point3,
}

impl ElementLayout {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Builds a layout from arbitrary points; its center is the centroid.
    pub fn from_points(points: Vec<Point3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGeometry("empty layout".into()));
        }
        let n = points.len();
        let center = points.iter().fold(Point3::zeros(), |acc, p| acc + p) / n as f64;
        Ok(Self {
            segments: vec![Segment { range: 0..n, flattening: Flattening { n1: n, n2: 1 }, center }],
            positions: points,
            center,
        })
    }

    /// Mean of all positions.
    pub fn centroid(&self) -> Point3 {
        self.positions.iter().fold(Point3::zeros(), |acc, p| acc + p) / self.positions.len() as f64
    }

    /// Largest distance of an element from the center of its own segment.
    pub fn max_offset(&self) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| self.positions[s.range.clone()].iter().map(move |p| (p - s.center).norm()))
            .fold(0.0, f64::max)
    }

    /// Largest distance of an element from the layout center.
    pub fn max_offset_from_center(&self) -> f64 {
        self.positions.iter().map(|p| (p - self.center).norm()).fold(0.0, f64::max)
    }
}

pub fn expand_uniform(array: &ArrayGeometry) -> ElementLayout {
    let positions: Vec<Point3> = array.local_positions().into_iter().map(|p| p + array.center).collect();
    ElementLayout {
        segments: vec![Segment { range: 0..positions.len(), flattening: array.flattening(), center: array.center }],
        positions,
        center: array.center,
    }
}

/// Concatenates the per-sub-array layouts in partition order.
///
/// The layout center is the mean of the sub-array centers weighted by their
/// element counts, i.e. the centroid of all elements.
pub fn expand_partition(partition: &SubArrayPartition) -> ElementLayout {
    let mut positions = Vec::with_capacity(partition.total_elements());
    let mut segments = Vec::with_capacity(partition.count());
    for i in 0..partition.count() {
        let g = partition.geometry(i);
        let start = positions.len();
        positions.extend(g.local_positions().into_iter().map(|p| p + g.center));
        segments.push(Segment { range: start..positions.len(), flattening: g.flattening(), center: g.center });
    }
    let total = positions.len() as f64;
    let center = partition.subarrays.iter().fold(Point3::zeros(), |acc, s| acc + s.center * s.len() as f64) / total;
    ElementLayout { positions, segments, center }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deployment {
    Paraxial,
    NonParaxial,
}

/// Offset ratio of a pair of layouts: the largest element distance from its
/// own array center over the distance between the array centers.
pub fn paraxial_ratio(tx: &ElementLayout, rx: &ElementLayout) -> Result<f64> {
    if tx.is_empty() || rx.is_empty() {
        return Err(Error::InvalidGeometry("empty layout".into()));
    }
    let separation = (rx.center - tx.center).norm();
    if separation == 0.0 {
        return Err(Error::CoincidentCenters);
    }
    Ok(tx.max_offset_from_center().max(rx.max_offset_from_center()) / separation)
}

pub fn classify_paraxial(tx: &ElementLayout, rx: &ElementLayout, ratio_threshold: f64) -> Result<Deployment> {
    if !(ratio_threshold > 0.0 && ratio_threshold < 1.0) {
        return Err(Error::InvalidArgument(format!("paraxial threshold must be in (0,1), got {ratio_threshold}")));
    }
    let ratio = paraxial_ratio(tx, rx)?;
    Ok(if ratio <= ratio_threshold { Deployment::Paraxial } else { Deployment::NonParaxial })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const LAM: f64 = 1.0;

    #[test]
    fn waveband_relations() {
        let w = Waveband::from_ghz(28.0).unwrap();
        assert_abs_diff_eq!(w.wavelength(), 0.010706873, epsilon = 1e-9);
        assert_abs_diff_eq!(w.wavenumber() * w.wavelength(), 2.0 * PI, epsilon = 1e-12);
        assert!(Waveband::from_frequency(0.0).is_err());
        assert!(Waveband::from_wavelength(-1.0).is_err());
    }

    #[test]
    fn single_element_sits_at_center() {
        let c = Point3::new(1.0, 2.0, 3.0);
        let g = ArrayGeometry::new(1, 1, 0.3, 0.7).unwrap().with_center(c).unwrap();
        assert_eq!(expand_uniform(&g).positions, vec![c]);
    }

    #[test]
    fn two_elements_broadside() {
        let g = ArrayGeometry::new(2, 1, LAM / 2.0, LAM / 2.0).unwrap();
        let l = expand_uniform(&g);
        assert_abs_diff_eq!(l.positions[0], Point3::new(-LAM / 4.0, 0.0, 0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(l.positions[1], Point3::new(LAM / 4.0, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn two_elements_rotated_quarter_turn() {
        let g = ArrayGeometry::new(2, 1, LAM / 2.0, LAM / 2.0).unwrap().with_orientation(PI / 2.0, 0.0).unwrap();
        let l = expand_uniform(&g);
        assert_abs_diff_eq!(l.positions[0], Point3::new(0.0, -LAM / 4.0, 0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(l.positions[1], Point3::new(0.0, LAM / 4.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        assert!(ArrayGeometry::new(0, 1, 1.0, 1.0).is_err());
        assert!(ArrayGeometry::new(1, 1, 0.0, 1.0).is_err());
        assert!(SubArraySpec::new(Point3::zeros(), 2, 2, 1.0, -1.0).is_err());
        assert!(SubArrayPartition::new(vec![], 0.0, 0.0).is_err());
    }

    #[test]
    fn partition_of_points() {
        let half = vec![SubArraySpec::new(Point3::new(-3.0, 5.0, 0.0), 1, 1, 1.0, 1.0).unwrap()];
        let p = SubArrayPartition::symmetric(half, 0.0, 0.0).unwrap();
        let l = expand_partition(&p);
        assert_eq!(l.positions, vec![Point3::new(-3.0, 5.0, 0.0), Point3::new(3.0, 5.0, 0.0)]);
        assert_eq!(l.center, Point3::new(0.0, 5.0, 0.0));
    }

    #[test]
    fn single_subarray_matches_uniform_expansion() {
        let c = Point3::new(0.5, 40.0, -2.0);
        let g = ArrayGeometry::new(3, 4, 1.5, 0.75).unwrap().with_center(c).unwrap().with_orientation(0.3, -0.2).unwrap();
        let p = SubArrayPartition::new(vec![SubArraySpec::new(c, 3, 4, 1.5, 0.75).unwrap()], 0.3, -0.2).unwrap();
        let a = expand_uniform(&g);
        let b = expand_partition(&p);
        for (x, y) in a.positions.iter().zip(&b.positions) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-13);
        }
    }

    #[test]
    fn symmetric_partition_layout_is_mirror_symmetric() {
        let half = vec![
            SubArraySpec::new(Point3::new(-60.0, 256.0, 0.0), 12, 1, 6.3, 6.3).unwrap(),
            SubArraySpec::new(Point3::new(-20.0, 256.0, 0.0), 12, 1, 5.9, 5.9).unwrap(),
        ];
        let p = SubArrayPartition::symmetric(half, 0.0, 0.0).unwrap();
        assert!(p.is_mirror_symmetric(1e-12));
        let l = expand_partition(&p);
        for q in &l.positions {
            let m = Point3::new(-q.x, q.y, q.z);
            assert!(l.positions.iter().any(|r| (r - m).norm() < 1e-9));
        }
        assert!(SubArrayPartition::new(p.subarrays()[..3].to_vec(), 0.0, 0.0).unwrap().into_symmetric(1e-9).is_err());
    }

    #[test]
    fn classification_examples() {
        let rx_c = Point3::new(0.0, 256.0, 0.0);
        let tx = expand_uniform(&ArrayGeometry::new(4, 4, 2.0, 2.0).unwrap());
        let rx = expand_uniform(&ArrayGeometry::new(4, 4, 2.0, 2.0).unwrap().with_center(rx_c).unwrap());
        // max offset = 3*sqrt(2) = 4.24, ratio 0.0166
        assert_eq!(classify_paraxial(&tx, &rx, 0.1).unwrap(), Deployment::Paraxial);

        let big = expand_uniform(&ArrayGeometry::linear(2, 1300.0).unwrap().with_center(rx_c).unwrap());
        // offset 650 / 256 = 2.54
        assert_eq!(classify_paraxial(&tx, &big, 0.1).unwrap(), Deployment::NonParaxial);

        let p0 = expand_uniform(&ArrayGeometry::new(1, 1, 1.0, 1.0).unwrap());
        let p1 = expand_uniform(&ArrayGeometry::new(1, 1, 1.0, 1.0).unwrap().with_center(Point3::new(0.0, 1e-3, 0.0)).unwrap());
        assert_eq!(classify_paraxial(&p0, &p1, 0.1).unwrap(), Deployment::Paraxial);

        assert!(matches!(classify_paraxial(&p0, &p0, 0.1), Err(Error::CoincidentCenters)));
        assert!(classify_paraxial(&p0, &p1, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn layout_is_centered(n1 in 1usize..7, n2 in 1usize..7, d1 in 0.1f64..5.0, d2 in 0.1f64..5.0,
                              a in -3.2f64..3.2, b in -3.2f64..3.2,
                              cx in -100.0f64..100.0, cy in -100.0f64..100.0, cz in -100.0f64..100.0) {
            let c = Point3::new(cx, cy, cz);
            let g = ArrayGeometry::new(n1, n2, d1, d2).unwrap().with_center(c).unwrap().with_orientation(a, b).unwrap();
            let l = expand_uniform(&g);
            prop_assert_eq!(l.len(), n1 * n2);
            prop_assert!((l.centroid() - c).norm() <= 1e-12 * LAM * 100.0);
        }

        #[test]
        fn unrotated_layout_is_parallel_to_xz(n1 in 1usize..7, n2 in 1usize..7, d1 in 0.1f64..5.0, d2 in 0.1f64..5.0, cy in -50.0f64..50.0) {
            let c = Point3::new(1.0, cy, -2.0);
            let g = ArrayGeometry::new(n1, n2, d1, d2).unwrap().with_center(c).unwrap();
            for p in expand_uniform(&g).positions {
                prop_assert!((p.y - cy).abs() < 1e-12);
            }
        }

        #[test]
        fn flattening_round_trips(n1 in 1usize..20, n2 in 1usize..20) {
            let f = Flattening { n1, n2 };
            for idx in 0..f.len() {
                let (i1, i2) = f.principal(idx);
                prop_assert_eq!(f.index(i1, i2), idx);
            }
        }
    }
}
