//! Channel matrices: the exact spherical-wave model and its quartic
//! factorization, for whole arrays and for sub-array partitions.

use std::io::Write;

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{
    classify_paraxial, expand_partition, expand_uniform, ArrayGeometry, Deployment, ElementLayout, Point3,
    SubArrayPartition, Waveband, DEFAULT_PARAXIAL_THRESHOLD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelModel {
    Exact,
    Quartic,
    QuarticSubArray,
}

/// Complex `M x L` channel: rows are receive elements, columns transmit elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: DMatrix<Complex64>,
    pub waveband: Waveband,
    pub model: ChannelModel,
}

impl ChannelMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// Writes `m,l,re,im` rows with 0-based indices.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "l", "re", "im"])?;
        for m in 0..self.rows() {
            for l in 0..self.cols() {
                let h = self.entries[(m, l)];
                w.write_record([m.to_string(), l.to_string(), format!("{:.16e}", h.re), format!("{:.16e}", h.im)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Factors of the quartic model `H = scale * e^{j k0 |c|} * F_RX * P * F_TX^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticFactors {
    pub f_tx: DVector<Complex64>,
    pub f_rx: DVector<Complex64>,
    pub p: DMatrix<Complex64>,
    /// `1 / (4π|c_o|)`.
    pub scale: f64,
    /// `k0 |c_o|`, applied once as a common phase.
    pub carrier_phase: f64,
}

impl QuarticFactors {
    /// Rebuilds the channel from its factors.
    pub fn assemble(&self) -> DMatrix<Complex64> {
        let common = Complex64::from_polar(self.scale, self.carrier_phase);
        DMatrix::from_fn(self.f_rx.len(), self.f_tx.len(), |m, l| {
            common * self.f_rx[m] * self.p[(m, l)] * self.f_tx[l].conj()
        })
    }
}

fn green(k0: f64, d: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (4.0 * PI * d), k0 * d)
}

pub fn exact_channel(tx: &ElementLayout, rx: &ElementLayout, w: Waveband) -> Result<ChannelMatrix> {
    if tx.is_empty() || rx.is_empty() {
        return Err(Error::InvalidGeometry("empty layout".into()));
    }
    let k0 = w.wavenumber();
    let mut entries = DMatrix::zeros(rx.len(), tx.len());
    for (l, t) in tx.positions.iter().enumerate() {
        for (m, r) in rx.positions.iter().enumerate() {
            let d = (r - t).norm();
            if d == 0.0 {
                return Err(Error::CoincidentElements { tx: l, rx: m });
            }
            entries[(m, l)] = green(k0, d);
        }
    }
    Ok(ChannelMatrix { entries, waveband: w, model: ChannelModel::Exact })
}

/// Quartic factors for element offsets `t` (transmitter, relative to its
/// center) and `r` (receiver, relative to its center) with center offset `c`.
fn quartic_factors(t: &[Point3], r: &[Point3], c: Point3, k0: f64) -> Result<QuarticFactors> {
    let co = c.norm();
    if co == 0.0 {
        return Err(Error::CoincidentCenters);
    }
    let co2 = co * co;
    let half = k0 / (2.0 * co);
    let f_tx = DVector::from_iterator(
        t.len(),
        t.iter().map(|t| {
            let ct = c.dot(t);
            Complex64::from_polar(1.0, -half * (t.norm_squared() - 2.0 * ct - ct * ct / co2))
        }),
    );
    let f_rx = DVector::from_iterator(
        r.len(),
        r.iter().map(|r| {
            let cr = c.dot(r);
            Complex64::from_polar(1.0, half * (r.norm_squared() + 2.0 * cr - cr * cr / co2))
        }),
    );
    let p = DMatrix::from_fn(r.len(), t.len(), |m, l| {
        let phase = -k0 / co * (r[m].dot(&t[l]) - c.dot(&r[m]) * c.dot(&t[l]) / co2);
        Complex64::from_polar(1.0, phase)
    });
    Ok(QuarticFactors { f_tx, f_rx, p, scale: 1.0 / (4.0 * PI * co), carrier_phase: k0 * co })
}

fn warn_if_nonparaxial(tx: &ArrayGeometry, rx: &ArrayGeometry, what: &str) -> Result<()> {
    if classify_paraxial(&expand_uniform(tx), &expand_uniform(rx), DEFAULT_PARAXIAL_THRESHOLD)? == Deployment::NonParaxial {
        warn!("{what}: geometry is not paraxial, the quartic model may be inaccurate");
    }
    Ok(())
}

pub fn quartic_channel(tx: &ArrayGeometry, rx: &ArrayGeometry, w: Waveband) -> Result<(ChannelMatrix, QuarticFactors)> {
    warn_if_nonparaxial(tx, rx, "quartic channel")?;
    let f = quartic_factors(&tx.local_positions(), &rx.local_positions(), rx.center() - tx.center(), w.wavenumber())?;
    let entries = f.assemble();
    Ok((ChannelMatrix { entries, waveband: w, model: ChannelModel::Quartic }, f))
}

/// Stacked per-sub-array quartic channel without the paraxial diagnostics.
pub(crate) fn subarray_channel_quiet(tx: &ArrayGeometry, p: &SubArrayPartition, w: Waveband) -> Result<ChannelMatrix> {
    let t = tx.local_positions();
    let k0 = w.wavenumber();
    let mut entries = DMatrix::zeros(p.total_elements(), t.len());
    let mut row = 0;
    for i in 0..p.count() {
        let g = p.geometry(i);
        let block = quartic_factors(&t, &g.local_positions(), g.center() - tx.center(), k0)?.assemble();
        entries.view_mut((row, 0), (block.nrows(), block.ncols())).copy_from(&block);
        row += block.nrows();
    }
    Ok(ChannelMatrix { entries, waveband: w, model: ChannelModel::QuarticSubArray })
}

pub fn subarray_channel(tx: &ArrayGeometry, p: &SubArrayPartition, w: Waveband) -> Result<ChannelMatrix> {
    for i in 0..p.count() {
        warn_if_nonparaxial(tx, &p.geometry(i), &format!("sub-array {i}"))?;
    }
    subarray_channel_quiet(tx, p, w)
}

/// Exact channel from a uniform transmitter to a partitioned receiver.
pub fn exact_partition_channel(tx: &ArrayGeometry, p: &SubArrayPartition, w: Waveband) -> Result<ChannelMatrix> {
    exact_channel(&expand_uniform(tx), &expand_partition(p), w)
}

/// Largest entrywise phase difference between two channels, wrapped to `[0, π]`.
pub fn max_phase_error(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).arg().abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SubArraySpec;
    use approx::assert_relative_eq;

    fn w() -> Waveband {
        Waveband::from_wavelength(1.0).unwrap()
    }

    fn point(p: Point3) -> ElementLayout {
        ElementLayout::from_points(vec![p]).unwrap()
    }

    #[test]
    fn single_link_magnitude_and_phase() {
        let h = exact_channel(&point(Point3::zeros()), &point(Point3::new(0.0, 1.0, 0.0)), w()).unwrap();
        let e = h.entries[(0, 0)];
        assert_relative_eq!(e.norm(), 1.0 / (4.0 * PI), epsilon = 1e-15);
        assert!(e.arg().abs() < 1e-12);
        let h = exact_channel(&point(Point3::zeros()), &point(Point3::new(0.0, 0.5, 0.0)), w()).unwrap();
        assert!((h.entries[(0, 0)].arg().abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn coincident_elements_fail() {
        let r = exact_channel(&point(Point3::zeros()), &point(Point3::zeros()), w());
        assert!(matches!(r, Err(Error::CoincidentElements { tx: 0, rx: 0 })));
    }

    #[test]
    fn doubling_coordinates_matches_brute_force() {
        let tx = expand_uniform(&ArrayGeometry::new(3, 2, 0.7, 1.1).unwrap());
        let rx_g = ArrayGeometry::new(2, 2, 1.3, 0.4).unwrap().with_center(Point3::new(3.0, 40.0, -2.0)).unwrap();
        let rx = expand_uniform(&rx_g);
        let scale = |l: &ElementLayout| ElementLayout {
            positions: l.positions.iter().map(|p| p * 2.0).collect(),
            segments: l.segments.clone(),
            center: l.center * 2.0,
        };
        let h1 = exact_channel(&tx, &rx, w()).unwrap();
        let h2 = exact_channel(&scale(&tx), &scale(&rx), w()).unwrap();
        let k0 = w().wavenumber();
        for (m, r) in rx.positions.iter().enumerate() {
            for (l, t) in tx.positions.iter().enumerate() {
                let d = (r - t).norm();
                assert_relative_eq!(h2.entries[(m, l)].norm(), h1.entries[(m, l)].norm() / 2.0, max_relative = 1e-12);
                let expected = Complex64::from_polar(1.0, k0 * d);
                let ratio = h2.entries[(m, l)] / h1.entries[(m, l)] * 2.0 / expected;
                assert!(ratio.arg().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exact_channel_is_reciprocal() {
        let a = expand_uniform(&ArrayGeometry::new(3, 2, 0.5, 0.5).unwrap());
        let b = expand_uniform(&ArrayGeometry::new(2, 2, 2.0, 1.0).unwrap().with_center(Point3::new(1.0, 30.0, 4.0)).unwrap());
        let ab = exact_channel(&a, &b, w()).unwrap();
        let ba = exact_channel(&b, &a, w()).unwrap();
        assert_eq!(ab.entries, ba.entries.transpose());
    }

    #[test]
    fn broadside_points_reduce_to_scale() {
        let tx = ArrayGeometry::new(1, 1, 1.0, 1.0).unwrap();
        let rx = ArrayGeometry::new(1, 1, 1.0, 1.0).unwrap().with_center(Point3::new(0.0, 10.25, 0.0)).unwrap();
        let (h, f) = quartic_channel(&tx, &rx, w()).unwrap();
        assert_eq!(f.p[(0, 0)], Complex64::new(1.0, 0.0));
        assert_relative_eq!(h.entries[(0, 0)].norm(), f.scale, max_relative = 1e-15);
        let exact = exact_channel(&expand_uniform(&tx), &expand_uniform(&rx), w()).unwrap();
        assert!(max_phase_error(&h.entries, &exact.entries) < 1e-9);
    }

    #[test]
    fn quartic_tracks_exact_for_small_apertures() {
        let tx = ArrayGeometry::new(4, 4, 2.0, 2.0).unwrap();
        let rx = ArrayGeometry::new(4, 4, 2.0, 2.0).unwrap().with_center(Point3::new(0.0, 256.0, 0.0)).unwrap();
        let (q, f) = quartic_channel(&tx, &rx, w()).unwrap();
        let e = exact_channel(&expand_uniform(&tx), &expand_uniform(&rx), w()).unwrap();
        assert!(max_phase_error(&q.entries, &e.entries) < 0.05);
        for z in f.f_tx.iter().chain(f.f_rx.iter()).chain(f.p.iter()) {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_subarray_partition_equals_quartic() {
        let tx = ArrayGeometry::new(4, 1, 0.5, 0.5).unwrap();
        let c = Point3::new(3.0, 256.0, 1.0);
        let rx = ArrayGeometry::new(6, 2, 1.5, 2.0).unwrap().with_center(c).unwrap().with_orientation(0.1, 0.2).unwrap();
        let p = SubArrayPartition::new(vec![SubArraySpec::new(c, 6, 2, 1.5, 2.0).unwrap()], 0.1, 0.2).unwrap();
        let (q, _) = quartic_channel(&tx, &rx, w()).unwrap();
        let s = subarray_channel(&tx, &p, w()).unwrap();
        assert_eq!(q.entries, s.entries);
        assert_eq!(s.model, ChannelModel::QuarticSubArray);
    }

    #[test]
    fn mirrored_points_have_equal_block_magnitudes() {
        let tx = ArrayGeometry::new(1, 1, 1.0, 1.0).unwrap();
        let half = vec![SubArraySpec::new(Point3::new(-40.0, 100.0, 0.0), 1, 1, 1.0, 1.0).unwrap()];
        let p = SubArrayPartition::symmetric(half, 0.0, 0.0).unwrap();
        let h = subarray_channel(&tx, &p, w()).unwrap();
        assert_relative_eq!(h.entries[(0, 0)].norm(), h.entries[(1, 0)].norm(), max_relative = 1e-15);
    }

    #[test]
    fn csv_export_layout() {
        let tx = expand_uniform(&ArrayGeometry::new(2, 1, 0.5, 0.5).unwrap());
        let rx = point(Point3::new(0.0, 5.0, 0.0));
        let h = exact_channel(&tx, &rx, w()).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "m,l,re,im");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("0,1,"));
        let re: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(re, h.entries[(0, 0)].re);
    }
}
