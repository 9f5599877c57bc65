//! Panel grids aligned to the smooth pieces of a pulse.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use num_traits::Float;

use crate::model::{Piece, PulseSpec};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub piece: Piece,
}

impl Panel {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// `(g(a), g(b))` using this panel's piece for one-sided limits.
    pub fn g_ends(&self, pulse: &PulseSpec) -> (C64, C64) {
        (
            pulse.g_in(&self.piece, self.a),
            pulse.g_in(&self.piece, self.b),
        )
    }
}

/// Splits `[t0, t1]` into about `n` panels, never straddling a piece boundary.
pub(crate) fn panels_between(pulse: &PulseSpec, t0: f64, t1: f64, n: usize) -> Vec<Panel> {
    let span = t1 - t0;
    let mut out = Vec::with_capacity(n + 4);
    if !(span > 0.0) {
        return out;
    }
    for piece in pulse.pieces() {
        let a = piece.start.max(t0);
        let b = piece.end.min(t1);
        if !(b > a) {
            continue;
        }
        let m = (Float::round(n as f64 * (b - a) / span) as usize).max(1);
        let h = (b - a) / m as f64;
        for k in 0..m {
            let pa = a + k as f64 * h;
            let pb = if k + 1 == m {
                b
            } else {
                a + (k + 1) as f64 * h
            };
            out.push(Panel {
                a: pa,
                b: pb,
                piece,
            });
        }
    }
    out
}

pub(crate) fn panels(pulse: &PulseSpec, n: usize) -> Vec<Panel> {
    panels_between(pulse, 0.0, pulse.period(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Segment;

    #[test]
    fn panels_respect_segment_boundaries() {
        let p = PulseSpec::piecewise(alloc::vec![
            Segment {
                duration: 0.3,
                g: C64::new(1.0, 0.0)
            },
            Segment {
                duration: 0.7,
                g: C64::new(0.0, 1.0)
            },
        ])
        .unwrap();
        let ps = panels(&p, 10);
        assert_eq!(ps.len(), 10);
        assert!(ps.iter().any(|q| q.b == 0.3));
        assert!(ps.iter().all(|q| q.b <= 0.3 || q.a >= 0.3));
        assert_eq!(ps.last().unwrap().b, 1.0);
        // the panel ending at the jump still sees the left value
        let left = ps.iter().find(|q| q.b == 0.3).unwrap();
        assert_eq!(left.g_ends(&p).1, C64::new(1.0, 0.0));
    }

    #[test]
    fn clipped_grid_covers_subinterval() {
        let p = PulseSpec::circular(0.1, 0.2, 0.0, 1).unwrap();
        let ps = panels_between(&p, 1.0, 2.5, 15);
        assert_eq!(ps.len(), 15);
        assert_eq!(ps[0].a, 1.0);
        assert_eq!(ps.last().unwrap().b, 2.5);
    }
}
