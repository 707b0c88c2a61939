//! Comparison cones `G^i = {|z| < 2δ, x > |y|^{1+δ}}` and
//! `G^e = ℂ \ closure(-G^i)` used to squeeze a normalized domain near a
//! boundary point.

use super::piecewise::{Piece, PiecewiseCurve};
use super::{BoundaryCurve, Domain, RigidMotion, Shape};
use crate::error::{Error, Result};
use crate::numeric::brent_root;
use crate::C64;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct ConeDomainPair {
    pub delta: f64,
    /// Smoothed `G^i`.
    pub inner: Domain,
    /// `-G^i`; the outer cone is the complement of its closure.
    pub outer_complement: Domain,
}

impl ConeDomainPair {
    /// The unsmoothed inequality `|z| < 2δ` and `x > |y|^{1+δ}`.
    pub fn raw_inner_contains(&self, z: C64) -> bool {
        z.norm() < 2.0 * self.delta && z.re > z.im.abs().powf(1.0 + self.delta)
    }

    pub fn inner_contains(&self, z: C64) -> bool {
        self.inner.contains(z)
    }

    pub fn outer_contains(&self, z: C64) -> bool {
        self.outer_complement.signed_distance(z) < 0.0
    }
}

/// Build the cone pair; the two corners where the cusp curves meet the
/// circle `|z| = 2δ` are rounded by arcs that stay within `δ/10` of them.
pub fn cone_domains(delta: f64) -> Result<ConeDomainPair> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange(format!("cone parameter {delta} not in (0, 1)")));
    }
    let e = 1.0 + delta;
    let radius = 2.0 * delta;
    let yc = brent_root(|s| s.powf(2.0 * e) + s * s - radius * radius, 0.0, radius, 1e-15)
        .ok_or_else(|| Error::InvalidDomain("cone corner not found".into()))?;
    let corner_lo = C64::new(yc.powf(e), -yc);
    let lower = Piece::curve(move |s| (C64::new(s.powf(e), -s), C64::new(e * s.powf(delta), -1.0)), 0.0, yc);
    let upper = Piece::curve(move |s| (C64::new(s.powf(e), s), C64::new(e * s.powf(delta), 1.0)), yc, 0.0);
    let start = corner_lo.arg();
    let arc = Piece::Arc {
        center: C64::new(0.0, 0.0),
        radius,
        start,
        sweep: -2.0 * start,
    };
    let corners = [corner_lo, corner_lo.conj()];
    let mut fr = delta / 40.0;
    let curve = loop {
        let c = PiecewiseCurve::with_fillets(vec![lower.clone(), arc.clone(), upper.clone()], fr, 1e-3, 0.5)?;
        // only the two true corners get fillets; the cusp at 0 is C¹
        let within = c.pieces().iter().all(|p| match p {
            Piece::Arc { radius: r, .. } if (*r - fr).abs() < 1e-15 => corners
                .iter()
                .any(|k| (p.start() - k).norm() <= delta / 10.0 && (p.end() - k).norm() <= delta / 10.0),
            _ => true,
        });
        if within {
            break c;
        }
        fr *= 0.5;
        if fr < 1e-6 * delta {
            return Err(Error::InvalidDomain("cone fillet does not fit".into()));
        }
    };
    let bc = BoundaryCurve::new(Arc::new(curve), 1024, delta)?;
    let inner = Domain::new(bc, Shape::General, None)?;
    let outer_complement = inner.transformed(RigidMotion {
        origin: C64::new(0.0, 0.0),
        rotation: C64::new(-1.0, 0.0),
    });
    Ok(ConeDomainPair {
        delta,
        inner,
        outer_complement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        let c = cone_domains(0.5).unwrap();
        assert!(c.inner_contains(C64::new(0.5, 0.0)));
        assert!(!c.inner_contains(C64::new(-0.5, 0.0)));
        assert!(!c.outer_contains(C64::new(-0.5, 0.0)));
        assert!(c.outer_contains(C64::new(0.5, 0.0)));
        let z = C64::new(0.2, 0.3);
        assert!(c.raw_inner_contains(z));
        assert!(c.inner_contains(z));
    }

    #[test]
    fn smoothed_cone_lies_inside_raw_cone() {
        let c = cone_domains(0.3).unwrap();
        for z in c.inner.curve().samples().iter().step_by(7) {
            let probe = z + c.inner.inward_normal(c.inner.nearest(*z).t).unwrap() * 1e-6;
            assert!(c.raw_inner_contains(probe) || probe.norm() < 1e-5, "{probe}");
        }
    }
}
