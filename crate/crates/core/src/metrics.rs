//! Lempert function, Kobayashi distance and Kobayashi–Royden metric on the
//! disc, on the ball, and on simply connected planar domains by pullback
//! through a Riemann map. Every value carries `1 - l` computed without
//! cancellation, since the boundary ratios divide it by products of small
//! distances.

use crate::ambient::hermitian;
use crate::conformal::{ConformalMap, MapValue};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::C64;
use serde::Serialize;
use std::io::Write;

/// `l` together with `1 - l` computed directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lempert {
    pub value: f64,
    pub gap: f64,
}

impl Lempert {
    /// From `1 - l²`, which is the quantity the Möbius and ball formulas
    /// produce without cancellation.
    fn from_defect(one_minus_sq: f64) -> Lempert {
        let one_minus_sq = one_minus_sq.clamp(0.0, 1.0);
        let value = (1.0 - one_minus_sq).sqrt();
        Lempert {
            value,
            gap: one_minus_sq / (1.0 + value),
        }
    }

    /// `artanh l = ½ (log(1 + l) - log(1 - l))`.
    pub fn kobayashi(&self) -> f64 {
        0.5 * (self.value.ln_1p() - self.gap.ln())
    }
}

/// Möbius distance from map values that carry `1 - |ψ|²`.
pub fn mobius_distance(a: &MapValue, b: &MapValue) -> Lempert {
    let q = (C64::new(1.0, 0.0) - a.value.conj() * b.value).norm_sqr();
    if q == 0.0 {
        return Lempert { value: 1.0, gap: 0.0 };
    }
    if a.value == b.value {
        return Lempert { value: 0.0, gap: 1.0 };
    }
    let direct = ((a.value - b.value).norm_sqr() / q).sqrt();
    let mut l = Lempert::from_defect(a.defect * b.defect / q);
    // far from the circle the direct quotient is the more accurate one
    if direct < 0.5 {
        l = Lempert {
            value: direct,
            gap: 1.0 - direct,
        };
    }
    l
}

fn disc_value(z: C64) -> Result<MapValue> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideDomain { distance: 1.0 - z.norm() });
    }
    Ok(MapValue {
        value: z,
        derivative: C64::new(1.0, 0.0),
        defect: (1.0 - z.norm()) * (1.0 + z.norm()),
    })
}

/// `|(z - w) / (1 - z̄w)|`.
pub fn lempert_disc(z: C64, w: C64) -> Result<f64> {
    lempert_disc_full(z, w).map(|l| l.value)
}

pub fn lempert_disc_full(z: C64, w: C64) -> Result<Lempert> {
    Ok(mobius_distance(&disc_value(z)?, &disc_value(w)?))
}

/// `l_D(z, w) = l_𝔻(ψ(z), ψ(w))`.
pub fn lempert_planar(map: &ConformalMap, z: C64, w: C64) -> Result<f64> {
    lempert_planar_full(map, z, w).map(|l| l.value)
}

pub fn lempert_planar_full(map: &ConformalMap, z: C64, w: C64) -> Result<Lempert> {
    Ok(mobius_distance(&map.forward(z)?, &map.forward(w)?))
}

/// `κ_D(z; 1) = |ψ'(z)| / (1 - |ψ(z)|²)`.
pub fn kobayashi_royden(map: &ConformalMap, z: C64) -> Result<f64> {
    let v = map.forward(z)?;
    Ok(v.derivative.norm() / v.defect)
}

/// `artanh l_D(z, w)`.
pub fn kobayashi_distance(map: &ConformalMap, z: C64, w: C64) -> Result<f64> {
    lempert_planar_full(map, z, w).map(|l| l.kobayashi())
}

/// On simply connected planar domains the Carathéodory and Kobayashi
/// distances coincide, so no separate extremal problem is solved.
pub fn caratheodory_distance(map: &ConformalMap, z: C64, w: C64) -> Result<f64> {
    kobayashi_distance(map, z, w)
}

fn ball_check(z: &[C64]) -> Result<f64> {
    let n2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    if !(n2 < 1.0) {
        return Err(Error::OutsideDomain {
            distance: 1.0 - n2.sqrt(),
        });
    }
    Ok(n2)
}

/// Lempert function of the unit ball of `ℂⁿ`.
pub fn lempert_ball(z: &[C64], w: &[C64]) -> Result<f64> {
    lempert_ball_full(z, w).map(|l| l.value)
}

pub fn lempert_ball_full(z: &[C64], w: &[C64]) -> Result<Lempert> {
    if z.len() != w.len() || z.is_empty() {
        return Err(Error::OutOfRange(format!("dimensions {} and {}", z.len(), w.len())));
    }
    let nz = ball_check(z)?;
    let nw = ball_check(w)?;
    let q = (C64::new(1.0, 0.0) - hermitian(z, w)).norm_sqr();
    if z == w {
        return Ok(Lempert { value: 0.0, gap: 1.0 });
    }
    // numerator ‖z - w‖² - Σ_{i<j} |z_i w_j - z_j w_i|², free of the
    // cancellation in 1 - (1 - ‖z‖²)(1 - ‖w‖²)/|1 - ⟨z,w⟩|²
    let diff: f64 = z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum();
    let mut wedge = 0.0;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            wedge += (z[i] * w[j] - z[j] * w[i]).norm_sqr();
        }
    }
    let direct = ((diff - wedge).max(0.0) / q).sqrt();
    if direct < 0.5 {
        return Ok(Lempert {
            value: direct,
            gap: 1.0 - direct,
        });
    }
    let dz = (1.0 - nz.sqrt()) * (1.0 + nz.sqrt());
    let dw = (1.0 - nw.sqrt()) * (1.0 + nw.sqrt());
    Ok(Lempert::from_defect(dz * dw / q))
}

/// One pair with the boundary-distance ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSample {
    pub z: Vec<C64>,
    pub w: Vec<C64>,
    pub lempert: f64,
    /// `1 - l`.
    pub gap: f64,
    pub kobayashi: f64,
    pub d_z: f64,
    pub d_w: f64,
    /// `(1 - l) / (d_z d_w)`.
    pub theorem1: f64,
    /// `(1 - l) / d_z`.
    pub estimate2: f64,
    /// `2k - log(1 + ‖z-w‖/d_z) - log(1 + ‖z-w‖/d_w)`.
    pub star_gap: f64,
    /// `2k + log d_z + log d_w`.
    pub lower_gap: f64,
}

impl MetricSample {
    pub fn new(z: Vec<C64>, w: Vec<C64>, l: Lempert, d_z: f64, d_w: f64) -> Result<MetricSample> {
        if !(d_z > 0.0 && d_w > 0.0) {
            return Err(Error::OutsideDomain {
                distance: d_z.min(d_w),
            });
        }
        if !(l.value >= 0.0 && l.value < 1.0) {
            return Err(Error::OutOfRange(format!("Lempert value {} not in [0, 1)", l.value)));
        }
        let sep = z
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let k = l.kobayashi();
        Ok(MetricSample {
            lempert: l.value,
            gap: l.gap,
            kobayashi: k,
            d_z,
            d_w,
            theorem1: l.gap / (d_z * d_w),
            estimate2: l.gap / d_z,
            star_gap: 2.0 * k - (sep / d_z).ln_1p() - (sep / d_w).ln_1p(),
            lower_gap: 2.0 * k + d_z.ln() + d_w.ln(),
            z,
            w,
        })
    }

    pub fn dimension(&self) -> usize {
        self.z.len()
    }
}

/// All ratios for a planar pair.
pub fn boundary_ratios(domain: &Domain, map: &ConformalMap, z: C64, w: C64) -> Result<MetricSample> {
    if z == w {
        return Err(Error::OutOfRange("boundary ratios need z ≠ w".into()));
    }
    let l = lempert_planar_full(map, z, w)?;
    MetricSample::new(vec![z], vec![w], l, domain.signed_distance(z), domain.signed_distance(w))
}

/// All ratios for a pair in the unit ball.
pub fn ball_ratios(z: &[C64], w: &[C64]) -> Result<MetricSample> {
    if z == w {
        return Err(Error::OutOfRange("boundary ratios need z ≠ w".into()));
    }
    let l = lempert_ball_full(z, w)?;
    let d = |p: &[C64]| 1.0 - p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    MetricSample::new(z.to_vec(), w.to_vec(), l, d(z), d(w))
}

/// `κ_D(z; 1) d_D(z)`, which lies in `[1/4, 1]` by the Koebe quarter
/// theorem.
pub fn estimate1_ratio(domain: &Domain, map: &ConformalMap, z: C64) -> Result<f64> {
    Ok(kobayashi_royden(map, z)? * domain.signed_distance(z))
}

/// CSV with columns `re_z, im_z, re_w, im_w, l, d_z, d_w, theorem1,
/// estimate2, star_gap, lower_gap`; in dimension `n > 1` the coordinates
/// are numbered `re_z1, im_z1, …`.
pub fn write_samples_csv<W: Write>(samples: &[MetricSample], out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    let n = samples.first().map(|s| s.dimension()).unwrap_or(1);
    let mut header = Vec::new();
    for p in ["z", "w"] {
        for k in 1..=n {
            let suffix = if n == 1 { String::new() } else { k.to_string() };
            header.push(format!("re_{p}{suffix}"));
            header.push(format!("im_{p}{suffix}"));
        }
    }
    header.extend(
        ["l", "d_z", "d_w", "theorem1", "estimate2", "star_gap", "lower_gap"]
            .iter()
            .map(|s| s.to_string()),
    );
    wr.write_record(&header)?;
    for s in samples {
        if s.dimension() != n {
            return Err(Error::OutOfRange("mixed dimensions in one table".into()));
        }
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        for c in s.z.iter().chain(&s.w) {
            row.push(c.re.to_string());
            row.push(c.im.to_string());
        }
        for v in [s.lempert, s.d_z, s.d_w, s.theorem1, s.estimate2, s.star_gap, s.lower_gap] {
            row.push(v.to_string());
        }
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_examples() {
        assert!((lempert_disc(C64::new(0.0, 0.0), C64::new(0.5, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(lempert_disc(C64::new(0.2, 0.1), C64::new(0.2, 0.1)).unwrap(), 0.0);
        let l = lempert_disc(C64::new(0.3, 0.0), C64::new(0.5, 0.0)).unwrap();
        assert!((l - 0.2 / 0.85).abs() < 1e-15);
        assert!(lempert_disc(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn gap_is_accurate_near_the_circle() {
        let r = 1.0 - 1e-9;
        let s = 1.0 - r;
        let l = lempert_disc_full(C64::new(r, 0.0), C64::new(-r, 0.0)).unwrap();
        // 1 - l = (1 - r)² / (1 + r²) with r = 1 - s
        let exact = s * s / (1.0 + r * r);
        assert!((l.gap - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn ball_examples() {
        let z = [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let w = [C64::new(0.3, 0.1), C64::new(-0.2, 0.4)];
        let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!((lempert_ball(&z, &w).unwrap() - norm).abs() < 1e-15);
        assert_eq!(lempert_ball(&w, &w).unwrap(), 0.0);
        assert!(lempert_ball(&[C64::new(1.0, 0.0)], &[C64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn sample_ratios() {
        let l = lempert_disc_full(C64::new(0.9, 0.0), C64::new(-0.9, 0.0)).unwrap();
        assert!((l.value - 1.8 / 1.81).abs() < 1e-15);
        let s = MetricSample::new(vec![C64::new(0.9, 0.0)], vec![C64::new(-0.9, 0.0)], l, 0.1, 0.1).unwrap();
        assert!((s.theorem1 - 1.0 / 1.81).abs() < 1e-12);
        assert!((s.kobayashi - (1.8f64 / 1.81).atanh()).abs() < 1e-10);
    }
}
