//! Rigid round trip made of four contiguous hyperbolic segments.
//!
//! The centre accelerates towards +x for `t_a`, decelerates and accelerates
//! back for `2 t_a`, and decelerates to rest for the final `t_a`. Mirror
//! worldlines keep the proper length fixed, so the rear mirror carries the
//! larger proper acceleration `a/g₋` and switches branch at shifted times.
//!
//! Displacements are evaluated as `c² g/a · (√(1+(as/gc)²) − 1)` rewritten
//! without the subtraction, which keeps everything finite as `a → 0`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPlan {
    a: f64,
    t_a: f64,
    l: f64,
    c: f64,
}

/// Which way the Rindler wedge of a hyperbolic segment opens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// Proper acceleration along +x.
    Forward,
    /// Proper acceleration along −x: the mirror roles are swapped.
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub orientation: Orientation,
    /// Rindler-time length of the segment for the centre observer.
    pub rindler_duration: f64,
}

impl TrajectoryPlan {
    pub fn new(a: f64, t_a: f64, l: f64, c: f64) -> Result<Self> {
        for (name, v) in [("t_a", t_a), ("L", l), ("c", c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::param("a", format!("must be finite and >= 0, got {a}")));
        }
        let plan = Self { a, t_a, l, c };
        let h = plan.h();
        if h >= 2.0 {
            return Err(Error::InvalidRigidity { h });
        }
        Ok(plan)
    }

    /// Builds the plan from the dimensionless acceleration `h = aL/c²`.
    pub fn from_h(h: f64, t_a: f64, l: f64, c: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&h) {
            return Err(Error::InvalidRigidity { h });
        }
        Self::new(h * c * c / l, t_a, l, c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn t_a(&self) -> f64 {
        self.t_a
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn h(&self) -> f64 {
        self.a * self.l / (self.c * self.c)
    }

    pub fn g_plus(&self) -> f64 {
        1.0 + self.h() / 2.0
    }

    pub fn g_minus(&self) -> f64 {
        1.0 - self.h() / 2.0
    }

    pub fn total_time(&self) -> f64 {
        4.0 * self.t_a
    }

    /// Peak rapidity-like parameter `a t_a / c`.
    fn x(&self) -> f64 {
        self.a * self.t_a / self.c
    }

    /// Lowest Dirichlet frequency `πc/L` of the proper cavity.
    pub fn omega_dirichlet(&self) -> f64 {
        std::f64::consts::PI * self.c / self.l
    }

    /// Total displacement `2√(c²t_a² + c⁴/a²) − 2c²/a`.
    pub fn d_cav(&self) -> f64 {
        let x = self.x();
        2.0 * self.a * self.t_a * self.t_a / ((x * x + 1.0).sqrt() + 1.0)
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let end = self.total_time();
        let slack = 1e-12 * end;
        if !(t >= -slack && t <= end + slack) {
            return Err(Error::OutOfDomain { t, end });
        }
        Ok(t.clamp(0.0, end))
    }

    /// `√(c²s² + (c²g/a)²) − c²g/a` in cancellation-free form.
    fn hyp(&self, s: f64, g: f64) -> f64 {
        let q = self.a * s / (g * self.c);
        (self.a * s * s / g) / ((1.0 + q * q).sqrt() + 1.0)
    }

    fn branch_displacement(&self, t: f64, g_out: f64, g_back: f64) -> f64 {
        let ta = self.t_a;
        if t <= g_out * ta {
            self.hyp(t, g_out)
        } else if t <= (2.0 + g_back) * ta {
            self.d_cav() - self.hyp(t - 2.0 * ta, g_back)
        } else {
            self.hyp(t - 4.0 * ta, g_out)
        }
    }

    /// Centre displacement `x(t) − x(0)`.
    pub fn center_displacement(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        Ok(self.branch_displacement(t, 1.0, 1.0))
    }

    /// Centre worldline `x(t)` in the chart where the centre starts at `c²/a`.
    pub fn center_position(&self, t: f64) -> Result<f64> {
        self.require_motion()?;
        Ok(self.c * self.c / self.a + self.center_displacement(t)?)
    }

    /// Mirror displacements `(x_l(t) − x_l(0), x_r(t) − x_r(0))`.
    pub fn mirror_displacements(&self, t: f64) -> Result<(f64, f64)> {
        let t = self.check_time(t)?;
        let (gm, gp) = (self.g_minus(), self.g_plus());
        Ok((self.branch_displacement(t, gm, gp), self.branch_displacement(t, gp, gm)))
    }

    /// Mirror worldlines `(x_l(t), x_r(t))`, starting at `(c²g₋/a, c²g₊/a)`.
    pub fn mirror_positions(&self, t: f64) -> Result<(f64, f64)> {
        self.require_motion()?;
        let (dl, dr) = self.mirror_displacements(t)?;
        let r = self.c * self.c / self.a;
        Ok((r * self.g_minus() + dl, r * self.g_plus() + dr))
    }

    fn require_motion(&self) -> Result<()> {
        if self.a > 0.0 {
            Ok(())
        } else {
            Err(Error::param(
                "a",
                "absolute positions are measured from the Rindler horizon and need a > 0",
            ))
        }
    }

    /// Proper time of the centre over the whole trip, `4(c/a) asinh(a t_a/c)`.
    pub fn proper_time_round_trip(&self) -> f64 {
        4.0 * self.t_a * asinhc(self.x())
    }

    /// `4 t_a − τ`, evaluated without cancellation.
    pub fn time_dilation_deficit(&self) -> f64 {
        4.0 * self.t_a * one_minus_asinhc(self.x())
    }

    /// Rindler time `(c/a) asinh(a t/c)` elapsed on the centre worldline
    /// during a hyperbolic segment of lab duration `t`.
    pub fn rindler_segment_duration(&self, segment_lab_time: f64) -> f64 {
        segment_lab_time * asinhc(self.a * segment_lab_time / self.c)
    }

    /// Rindler length `L' = L atanh(h/2)/(h/2)`.
    pub fn rindler_length(&self) -> Result<f64> {
        rindler_length(self.l, self.h())
    }

    /// The four quarter segments of the trip.
    pub fn segments(&self) -> [Segment; 4] {
        let ta = self.t_a;
        let eta = self.rindler_segment_duration(ta);
        let seg = |k: f64, orientation| Segment {
            start: k * ta,
            end: (k + 1.0) * ta,
            orientation,
            rindler_duration: eta,
        };
        [
            seg(0.0, Orientation::Forward),
            seg(1.0, Orientation::Reversed),
            seg(2.0, Orientation::Reversed),
            seg(3.0, Orientation::Forward),
        ]
    }
}

/// `L' = L atanh(h/2)/(h/2)` with a series near `h = 0`.
pub fn rindler_length(l: f64, h: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&h) {
        return Err(Error::InvalidRigidity { h });
    }
    Ok(l * atanhc(h / 2.0))
}

/// `atanh(x)/x`.
pub fn atanhc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 + x * x / 3.0
    } else {
        x.atanh() / x
    }
}

/// `asinh(x)/x`.
pub fn asinhc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 - one_minus_asinhc(x)
    } else {
        x.asinh() / x
    }
}

/// `1 − asinh(x)/x`.
pub fn one_minus_asinhc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x2 * (1.0 / 6.0 - x2 * (3.0 / 40.0 - x2 * (5.0 / 112.0)))
    } else {
        1.0 - x.asinh() / x
    }
}
