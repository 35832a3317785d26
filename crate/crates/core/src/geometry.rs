//! Planar placement of the base station, the RIS and the users.
//!
//! The base station sits at the origin. Receiver angles are measured at the
//! RIS with the unit vector `(cos θ, −sin θ)` pointing from the RIS to the
//! user, so a user below the RIS (smaller `y`) has a positive angle. The
//! transmit angle `θ_tx` is the bearing of the RIS as seen from the base
//! station, measured counter-clockwise from the `x` axis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Location of a receiver relative to the RIS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarLocation {
    /// Distance from the RIS center.
    pub range_m: f64,
    /// Angle of arrival in `(−π, π]`.
    pub aoa_rad: f64,
}

impl PolarLocation {
    pub fn new(range_m: f64, aoa_rad: f64) -> Result<Self> {
        if !(range_m > 0.0) || !range_m.is_finite() {
            return Err(Error::NonPositiveRange(range_m));
        }
        if !aoa_rad.is_finite() {
            return Err(invalid("aoa_rad", "angle must be finite"));
        }
        Ok(Self {
            range_m,
            aoa_rad: wrap_angle(aoa_rad),
        })
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Range and bearing of the BS→RIS hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmitLink {
    /// `R_1`, BS to RIS distance.
    pub range_m: f64,
    /// `θ_tx`, bearing of the RIS from the BS.
    pub theta_tx_rad: f64,
}

/// Positions of the base station, the RIS and the legitimate user (Bob).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    bs: Point,
    ris: Point,
    bob: Point,
}

impl Placement {
    /// Builds a placement with the BS at the origin.
    pub fn new(ris: Point, bob: Point) -> Result<Self> {
        Self::with_bs(Point::ORIGIN, ris, bob)
    }

    /// Builds a placement with an arbitrary BS position.
    pub fn with_bs(bs: Point, ris: Point, bob: Point) -> Result<Self> {
        for (name, p) in [("bs", bs), ("ris", ris), ("bob", bob)] {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(invalid(name, "coordinates must be finite"));
            }
        }
        if ris == bs {
            return Err(invalid("ris", "RIS cannot coincide with the BS"));
        }
        if bob == ris {
            return Err(Error::CoincidentWithRis);
        }
        Ok(Self { bs, ris, bob })
    }

    pub fn bs(&self) -> Point {
        self.bs
    }

    pub fn ris(&self) -> Point {
        self.ris
    }

    pub fn bob(&self) -> Point {
        self.bob
    }

    /// Polar coordinates of an arbitrary user seen from the RIS.
    pub fn to_polar(&self, user: Point) -> Result<PolarLocation> {
        to_polar(self.ris, user)
    }

    /// Bob's polar location.
    pub fn bob_polar(&self) -> PolarLocation {
        to_polar(self.ris, self.bob).expect("placement invariant: bob differs from ris")
    }

    /// Cartesian point for a polar location.
    pub fn from_polar(&self, loc: PolarLocation) -> Point {
        from_polar(self.ris, loc)
    }

    /// `R_1` and `θ_tx`.
    pub fn transmit_link(&self) -> TransmitLink {
        let dx = self.ris.x - self.bs.x;
        let dy = self.ris.y - self.bs.y;
        TransmitLink {
            range_m: dx.hypot(dy),
            theta_tx_rad: dy.atan2(dx),
        }
    }
}

/// Range and angle of `user` relative to `ris`.
pub fn to_polar(ris: Point, user: Point) -> Result<PolarLocation> {
    let dx = user.x - ris.x;
    let dy = ris.y - user.y;
    let range = dx.hypot(dy);
    if range == 0.0 {
        return Err(Error::CoincidentWithRis);
    }
    Ok(PolarLocation {
        range_m: range,
        aoa_rad: wrap_angle(dy.atan2(dx)),
    })
}

/// Inverse of [`to_polar`].
pub fn from_polar(ris: Point, loc: PolarLocation) -> Point {
    Point {
        x: ris.x + loc.range_m * loc.aoa_rad.cos(),
        y: ris.y - loc.range_m * loc.aoa_rad.sin(),
    }
}

/// Log-distance path loss shared by the BS→RIS and RIS→user hops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    /// Loss at the 1 m reference distance.
    pub l0_db: f64,
    /// Path-loss exponent.
    pub alpha: f64,
}

impl PathLossModel {
    pub fn new(l0_db: f64, alpha: f64) -> Result<Self> {
        if !(l0_db >= 0.0) || !l0_db.is_finite() {
            return Err(invalid("l0_db", format!("must be finite and >= 0, got {l0_db}")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(invalid("alpha", format!("must be finite and > 0, got {alpha}")));
        }
        Ok(Self { l0_db, alpha })
    }

    /// Loss in dB at `range_m`.
    pub fn loss_db(&self, range_m: f64) -> Result<f64> {
        if !(range_m > 0.0) {
            return Err(Error::NonPositiveRange(range_m));
        }
        Ok(self.l0_db + 10.0 * self.alpha * range_m.log10())
    }

    /// Linear power gain (`< 1`) at `range_m`.
    pub fn gain(&self, range_m: f64) -> Result<f64> {
        Ok(10f64.powf(-self.loss_db(range_m)? / 10.0))
    }
}

/// Free function form of [`PathLossModel::gain`].
pub fn path_loss_linear(model: &PathLossModel, range_m: f64) -> Result<f64> {
    model.gain(range_m)
}

/// Point at angle `phi_rad` on a circle of `radius_m` around `center`.
pub fn circle_trajectory(center: Point, radius_m: f64, phi_rad: f64) -> Point {
    Point {
        x: center.x + radius_m * phi_rad.cos(),
        y: center.y + radius_m * phi_rad.sin(),
    }
}
