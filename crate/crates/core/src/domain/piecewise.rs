//! Closed curves assembled from smooth pieces, with circular fillets at
//! corners and a graded parametrization that slows down near the joints.

use super::curves::Parametrization;
use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type PieceFn = Arc<dyn Fn(f64) -> (C64, C64) + Send + Sync>;

/// One smooth piece, parametrized over `u ∈ [0, 1]`.
#[derive(Clone)]
pub enum Piece {
    Line { from: C64, to: C64 },
    /// Circular arc; positive `sweep` runs counterclockwise.
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
    /// Arbitrary smooth piece `s ↦ (point, d/ds)` restricted to `[s0, s1]`.
    Curve { f: PieceFn, s0: f64, s1: f64 },
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Line { from, to } => write!(f, "Line({from} -> {to})"),
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => write!(f, "Arc({center}, r={radius}, {start}+{sweep})"),
            Piece::Curve { s0, s1, .. } => write!(f, "Curve([{s0}, {s1}])"),
        }
    }
}

impl Piece {
    pub fn curve(f: impl Fn(f64) -> (C64, C64) + Send + Sync + 'static, s0: f64, s1: f64) -> Piece {
        Piece::Curve {
            f: Arc::new(f),
            s0,
            s1,
        }
    }

    /// Point and derivative with respect to `u`.
    pub fn eval(&self, u: f64) -> (C64, C64) {
        match self {
            Piece::Line { from, to } => (from + (to - from) * u, to - from),
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let e = C64::from_polar(*radius, start + sweep * u);
                (center + e, e * C64::new(0.0, *sweep))
            }
            Piece::Curve { f, s0, s1 } => {
                let (p, d) = f(s0 + (s1 - s0) * u);
                (p, d * (s1 - s0))
            }
        }
    }

    pub fn start(&self) -> C64 {
        self.eval(0.0).0
    }

    pub fn end(&self) -> C64 {
        self.eval(1.0).0
    }

    /// Restriction to `[u0, u1]`, reparametrized over `[0, 1]`.
    pub fn trim(&self, u0: f64, u1: f64) -> Piece {
        match self {
            Piece::Line { from, to } => Piece::Line {
                from: from + (to - from) * u0,
                to: from + (to - from) * u1,
            },
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => Piece::Arc {
                center: *center,
                radius: *radius,
                start: start + sweep * u0,
                sweep: sweep * (u1 - u0),
            },
            Piece::Curve { f, s0, s1 } => Piece::Curve {
                f: f.clone(),
                s0: s0 + (s1 - s0) * u0,
                s1: s0 + (s1 - s0) * u1,
            },
        }
    }

    /// Polygonal length estimate.
    pub fn length(&self) -> f64 {
        match self {
            Piece::Line { from, to } => (to - from).norm(),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
            Piece::Curve { .. } => {
                let m = 256;
                (0..m)
                    .map(|k| (self.eval((k + 1) as f64 / m as f64).0 - self.eval(k as f64 / m as f64).0).norm())
                    .sum()
            }
        }
    }
}

/// Round the corner between the end of `first` and the start of `second`
/// with a circle of the given radius lying on the left of both pieces (the
/// interior side of a counterclockwise boundary). Returns the trimmed
/// pieces and the fillet arc.
pub fn fillet(first: &Piece, second: &Piece, radius: f64) -> Result<(Piece, Piece, Piece)> {
    let left = |p: &Piece, u: f64| {
        let (z, d) = p.eval(u);
        z + d / d.norm() * C64::new(0.0, radius)
    };
    let l1 = first.length().max(f64::MIN_POSITIVE);
    let l2 = second.length().max(f64::MIN_POSITIVE);
    let mut u1 = (1.0 - radius / l1).clamp(0.0, 1.0);
    let mut u2 = (radius / l2).clamp(0.0, 1.0);
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for _ in 0..60 {
        let f = left(first, u1) - left(second, u2);
        residual = f.norm();
        if residual <= 1e-13 * (1.0 + radius) {
            converged = true;
            break;
        }
        let h = 1e-7;
        let j1 = (left(first, u1 + h) - left(first, u1 - h)) / (2.0 * h);
        let j2 = -(left(second, u2 + h) - left(second, u2 - h)) / (2.0 * h);
        // 2x2 real system [j1 j2] [du1 du2]^T = -f
        let det = j1.re * j2.im - j1.im * j2.re;
        if det.abs() < 1e-300 {
            return Err(Error::SingularJacobian("fillet"));
        }
        let du1 = (-f.re * j2.im + f.im * j2.re) / det;
        let du2 = (-j1.re * f.im + j1.im * f.re) / det;
        let mut lambda = 1.0;
        while lambda > 1e-6 {
            let (n1, n2) = (u1 + lambda * du1, u2 + lambda * du2);
            if (0.0..=1.0).contains(&n1) && (0.0..=1.0).contains(&n2) {
                u1 = n1;
                u2 = n2;
                break;
            }
            lambda *= 0.5;
        }
        if lambda <= 1e-6 {
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            stage: "fillet",
            iterations: 60,
            residual,
        });
    }
    let center = left(first, u1);
    let p1 = first.eval(u1).0;
    let p2 = second.eval(u2).0;
    let start = (p1 - center).arg();
    let sweep = ((p2 - center).arg() - start).rem_euclid(2.0 * PI);
    let arc = Piece::Arc {
        center,
        radius,
        start,
        sweep,
    };
    Ok((first.trim(0.0, u1), arc, second.trim(u2, 1.0)))
}

/// Closed curve made of pieces joined end to end. Each piece gets a share
/// of the global parameter proportional to its length, and inside a piece
/// the parameter is graded by `s = u - (1 - c) sin(2πu) / 2π`, so the speed
/// is continuous across joints and drops to `c` times its mean there.
#[derive(Clone)]
pub struct PiecewiseCurve {
    pieces: Vec<Piece>,
    breaks: Vec<f64>,
    grading: f64,
}

impl fmt::Debug for PiecewiseCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseCurve")
            .field("pieces", &self.pieces)
            .field("grading", &self.grading)
            .finish()
    }
}

impl PiecewiseCurve {
    pub fn new(pieces: Vec<Piece>, grading: f64) -> Result<PiecewiseCurve> {
        if pieces.is_empty() {
            return Err(Error::InvalidDomain("no boundary pieces".into()));
        }
        if !(grading > 0.0 && grading <= 1.0) {
            return Err(Error::OutOfRange(format!("grading {grading} not in (0, 1]")));
        }
        let lengths: Vec<f64> = pieces.iter().map(Piece::length).collect();
        let total: f64 = lengths.iter().sum();
        for (k, p) in pieces.iter().enumerate() {
            let next = &pieces[(k + 1) % pieces.len()];
            let gap = (p.end() - next.start()).norm();
            if gap > 1e-9 * total {
                return Err(Error::InvalidDomain(format!("pieces {k} and {} do not join (gap {gap:e})", k + 1)));
            }
        }
        let mut breaks = vec![0.0];
        let mut acc = 0.0;
        for l in &lengths {
            acc += l / total;
            breaks.push(acc);
        }
        *breaks.last_mut().unwrap() = 1.0;
        Ok(PiecewiseCurve {
            pieces,
            breaks,
            grading,
        })
    }

    /// Move the joints to multiples of `1 / slots`, keeping each piece's
    /// share close to its share of the length. Any node count divisible by
    /// `slots` then places a node on every joint, which together with a
    /// small grading restores fast convergence of trapezoidal sums across
    /// curvature jumps.
    pub fn align_breaks(mut self, slots: usize) -> Result<PiecewiseCurve> {
        let n = self.pieces.len();
        if slots < 4 * n {
            return Err(Error::OutOfRange(format!("{slots} slots for {n} pieces")));
        }
        let total: f64 = self.pieces.iter().map(Piece::length).sum();
        let mut share: Vec<usize> = self
            .pieces
            .iter()
            .map(|p| ((p.length() / total) * slots as f64).round().max(4.0) as usize)
            .collect();
        let used: usize = share.iter().sum();
        let widest = (0..n).max_by_key(|&k| share[k]).unwrap_or(0);
        share[widest] = (share[widest] + slots)
            .checked_sub(used)
            .filter(|&s| s >= 4)
            .ok_or_else(|| Error::OutOfRange(format!("{slots} slots cannot hold {n} pieces")))?;
        let mut acc = 0;
        self.breaks = std::iter::once(0.0)
            .chain(share.iter().map(|s| {
                acc += s;
                acc as f64 / slots as f64
            }))
            .collect();
        Ok(self)
    }

    /// Replace every corner (tangent direction jump above `angle_tol`) by a
    /// fillet of the given radius.
    pub fn with_fillets(pieces: Vec<Piece>, radius: f64, angle_tol: f64, grading: f64) -> Result<PiecewiseCurve> {
        let n = pieces.len();
        let corner = |k: usize| {
            let d1 = pieces[k].eval(1.0).1;
            let d2 = pieces[(k + 1) % n].eval(0.0).1;
            (d2 / d1).arg().abs() > angle_tol
        };
        let corners: Vec<bool> = (0..n).map(corner).collect();
        let mut current = pieces.clone();
        let mut arcs: Vec<Option<Piece>> = vec![None; n];
        for k in (0..n).filter(|&k| corners[k]) {
            let next = (k + 1) % n;
            let (a, arc, b) = fillet(&current[k], &current[next], radius)?;
            current[k] = a;
            current[next] = b;
            arcs[k] = Some(arc);
        }
        let seq: Vec<Piece> = current
            .into_iter()
            .zip(arcs)
            .flat_map(|(p, a)| std::iter::once(p).chain(a))
            .collect();
        PiecewiseCurve::new(seq, grading)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let t = t.rem_euclid(1.0);
        let k = match self.breaks.binary_search_by(|b| b.total_cmp(&t)) {
            Ok(i) => i.min(self.pieces.len() - 1),
            Err(i) => i - 1,
        };
        let w = self.breaks[k + 1] - self.breaks[k];
        (k, (t - self.breaks[k]) / w)
    }

    fn grade(&self, u: f64) -> (f64, f64, f64) {
        let c = self.grading;
        let a = 2.0 * PI * u;
        (
            u - (1.0 - c) * a.sin() / (2.0 * PI),
            1.0 - (1.0 - c) * a.cos(),
            2.0 * PI * (1.0 - c) * a.sin(),
        )
    }
}

impl Parametrization for PiecewiseCurve {
    fn point(&self, t: f64) -> C64 {
        let (k, u) = self.locate(t);
        self.pieces[k].eval(self.grade(u).0).0
    }

    fn tangent(&self, t: f64) -> C64 {
        let (k, u) = self.locate(t);
        let w = self.breaks[k + 1] - self.breaks[k];
        let (s, ds, _) = self.grade(u);
        self.pieces[k].eval(s).1 * (ds / w)
    }

    fn second_derivative(&self, t: f64) -> C64 {
        let (k, u) = self.locate(t);
        let w = self.breaks[k + 1] - self.breaks[k];
        let (s, ds, dds) = self.grade(u);
        let h = 1e-5;
        let p = &self.pieces[k];
        let d1 = p.eval(s).1;
        let d2 = (p.eval(s + h).1 - p.eval(s - h).1) / (2.0 * h);
        (d2 * ds * ds + d1 * dds) / (w * w)
    }

    fn unit_tangent(&self, t: f64) -> Option<C64> {
        // grading never stops the curve, but a piece may be degenerate
        let d = self.tangent(t);
        let m = d.norm();
        (m > 0.0 && m.is_finite()).then(|| d / m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Piece> {
        let c = [
            C64::new(-1.0, -1.0),
            C64::new(1.0, -1.0),
            C64::new(1.0, 1.0),
            C64::new(-1.0, 1.0),
        ];
        (0..4)
            .map(|k| Piece::Line {
                from: c[k],
                to: c[(k + 1) % 4],
            })
            .collect()
    }

    #[test]
    fn fillet_touches_both_lines_tangentially() {
        let sq = square();
        let (a, arc, b) = fillet(&sq[0], &sq[1], 0.2).unwrap();
        assert!((a.end() - C64::new(0.8, -1.0)).norm() < 1e-10);
        assert!((b.start() - C64::new(1.0, -0.8)).norm() < 1e-10);
        assert!((arc.start() - a.end()).norm() < 1e-10);
        assert!((arc.end() - b.start()).norm() < 1e-10);
        if let Piece::Arc { sweep, .. } = arc {
            assert!((sweep - PI / 2.0).abs() < 1e-10);
        } else {
            panic!("expected arc");
        }
    }

    #[test]
    fn rounded_square_is_continuous_with_continuous_speed() {
        let c = PiecewiseCurve::with_fillets(square(), 0.25, 1e-6, 0.3).unwrap();
        assert_eq!(c.pieces().len(), 8);
        let n = 4000;
        for k in 0..n {
            let t = k as f64 / n as f64;
            let gap = (c.point(t + 1.0 / n as f64) - c.point(t)).norm();
            assert!(gap < 0.01, "jump at {t}");
            let dv = (c.tangent(t + 1e-9) - c.tangent(t - 1e-9)).norm();
            assert!(dv < 1e-3 * c.tangent(t).norm().max(1.0), "speed jump at {t}");
        }
    }
}
