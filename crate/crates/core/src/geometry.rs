//! Characteristic-vector geometry over exact rationals.
//!
//! A counter value `n` is encoded by the vector `σⁿ(κ)`; `τ` decrements and
//! `σ` increments. The strip `W = I_q × [0,∞)` is closed under both maps.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{Rat, RatError};

/// Default truncation depth for [`GeometryConstants::area_contains`].
pub const DEFAULT_AREA_DEPTH: usize = 64;

/// Iteration cap for searches along the `σᵏ(κ)` ladder.
pub const LADDER_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("q out of (3/4,1)")]
    QOutOfRange,
    #[error("sqrt_disc^2 != 4q-3")]
    BadSqrtDisc,
    #[error("kappa.x1 not in I_q")]
    KappaOutsideIq,
    #[error("kappa.x1 + kappa.x2 >= q - 1/2")]
    KappaSumTooLarge,
    #[error("kappa.x2 <= 0")]
    KappaX2NotPositive,
    #[error("gamma <= (1-q)*kappa.x2")]
    GammaTooSmall,
    #[error("gamma >= 3/4 - 5/4 q + 1/2 q^2")]
    GammaTooLarge,
    #[error("point {0} is outside W")]
    OutsideW(Box<Vec2>),
    #[error("vertical segment has no slope")]
    Vertical,
    #[error("point {0} lies in Area(kappa)")]
    InArea(Box<Vec2>),
    #[error("point {0} has x1 above kappa.x1")]
    AboveKappa(Box<Vec2>),
    #[error("no sigma^k(kappa) below x1 within {0} iterations")]
    CapExceeded(usize),
    #[error(transparent)]
    Arith(#[from] RatError),
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vec2 {
    pub x1: Rat,
    pub x2: Rat,
}

impl Vec2 {
    pub fn new(x1: Rat, x2: Rat) -> Vec2 {
        Vec2 { x1, x2 }
    }

    pub fn of(a: (i64, i64), b: (i64, i64)) -> Vec2 {
        Vec2::new(Rat::new(a.0, a.1), Rat::new(b.0, b.1))
    }

    pub fn zero() -> Vec2 {
        Vec2::new(Rat::zero(), Rat::zero())
    }

    pub fn add(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x1 + &o.x1, &self.x2 + &o.x2)
    }

    pub fn sub(&self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x1 - &o.x1, &self.x2 - &o.x2)
    }

    pub fn scale(&self, k: &Rat) -> Vec2 {
        Vec2::new(&self.x1 * k, &self.x2 * k)
    }

    pub fn dot(&self, o: &Vec2) -> Rat {
        &self.x1 * &o.x1 + &self.x2 * &o.x2
    }

    /// z-component of the planar cross product.
    pub fn cross(&self, o: &Vec2) -> Rat {
        &self.x1 * &o.x2 - &self.x2 * &o.x1
    }

    /// `λ·self + (1−λ)·other`.
    pub fn lerp(&self, other: &Vec2, lambda: &Rat) -> Vec2 {
        let mu = Rat::one() - lambda;
        self.scale(lambda).add(&other.scale(&mu))
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Map {
    Tau,
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryConstants {
    pub q: Rat,
    pub sqrt_disc: Rat,
    pub kappa: Vec2,
    pub gamma: Rat,
}

pub fn default_constants() -> GeometryConstants {
    GeometryConstants::new(
        Rat::new(13, 16),
        Rat::new(1, 2),
        Vec2::of((17, 64), (1, 32)),
        Rat::new(3, 50),
    )
    .expect("built-in constants are valid")
}

impl GeometryConstants {
    /// Validates every constraint before returning.
    pub fn new(
        q: Rat,
        sqrt_disc: Rat,
        kappa: Vec2,
        gamma: Rat,
    ) -> Result<GeometryConstants, GeometryError> {
        let c = GeometryConstants {
            q,
            sqrt_disc,
            kappa,
            gamma,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let q = &self.q;
        if !(*q > Rat::new(3, 4) && *q < Rat::one()) {
            return Err(GeometryError::QOutOfRange);
        }
        if self.sqrt_disc.is_negative()
            || &self.sqrt_disc * &self.sqrt_disc != Rat::int(4) * q - Rat::int(3)
        {
            return Err(GeometryError::BadSqrtDisc);
        }
        let k = &self.kappa;
        if !(k.x1 > self.iq_lower() && k.x1 < self.iq_upper()) {
            return Err(GeometryError::KappaOutsideIq);
        }
        if &k.x1 + &k.x2 >= q - Rat::new(1, 2) {
            return Err(GeometryError::KappaSumTooLarge);
        }
        if !k.x2.is_positive() {
            return Err(GeometryError::KappaX2NotPositive);
        }
        if self.gamma <= self.one_minus_q() * &k.x2 {
            return Err(GeometryError::GammaTooSmall);
        }
        if self.gamma >= self.gamma_upper() {
            return Err(GeometryError::GammaTooLarge);
        }
        Ok(())
    }

    pub fn one_minus_q(&self) -> Rat {
        Rat::one() - &self.q
    }

    /// `3/4 − (5/4)q + (1/2)q²`.
    pub fn gamma_upper(&self) -> Rat {
        Rat::new(3, 4) - Rat::new(5, 4) * &self.q + Rat::new(1, 2) * &self.q * &self.q
    }

    pub fn iq_lower(&self) -> Rat {
        (Rat::one() - &self.sqrt_disc) * Rat::new(1, 2)
    }

    pub fn iq_upper(&self) -> Rat {
        (Rat::one() + &self.sqrt_disc) * Rat::new(1, 2)
    }

    pub fn in_w(&self, v: &Vec2) -> bool {
        v.x1 > self.iq_lower() && v.x1 < self.iq_upper() && !v.x2.is_negative()
    }

    fn require_w(&self, v: &Vec2) -> Result<(), GeometryError> {
        if self.in_w(v) {
            Ok(())
        } else {
            Err(GeometryError::OutsideW(Box::new(v.clone())))
        }
    }

    /// `τ(v) = ((q−1+v₁)/v₁, v₂/v₁)`.
    pub fn tau(&self, v: &Vec2) -> Result<Vec2, GeometryError> {
        self.require_w(v)?;
        let x1 = (&self.q - Rat::one() + &v.x1).checked_div(&v.x1)?;
        let x2 = v.x2.checked_div(&v.x1)?;
        Ok(Vec2::new(x1, x2))
    }

    /// `σ(v) = ((1−q)/(1−v₁), v₂(1−q)/(1−v₁))`.
    pub fn sigma(&self, v: &Vec2) -> Result<Vec2, GeometryError> {
        self.require_w(v)?;
        let one_minus_v1 = Rat::one() - &v.x1;
        let omq = self.one_minus_q();
        let x1 = omq.checked_div(&one_minus_v1)?;
        let x2 = (&v.x2 * &omq).checked_div(&one_minus_v1)?;
        Ok(Vec2::new(x1, x2))
    }

    pub fn apply(&self, f: Map, v: &Vec2) -> Result<Vec2, GeometryError> {
        match f {
            Map::Tau => self.tau(v),
            Map::Sigma => self.sigma(v),
        }
    }

    /// `fⁿ(v)`; every intermediate point is checked against `W`.
    pub fn iterate(&self, f: Map, v: &Vec2, n: usize) -> Result<Vec2, GeometryError> {
        self.require_w(v)?;
        let mut cur = v.clone();
        for _ in 0..n {
            cur = self.apply(f, &cur)?;
        }
        Ok(cur)
    }

    /// `σⁿ(κ)`, the encoding of counter value `n`.
    pub fn sigma_n(&self, n: usize) -> Vec2 {
        self.iterate(Map::Sigma, &self.kappa, n)
            .expect("kappa lies in W and W is closed under sigma")
    }

    /// `[σ⁰(κ), …, σⁿ(κ)]`.
    pub fn sigma_ladder(&self, n: usize) -> Vec<Vec2> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.kappa.clone());
        for i in 0..n {
            let next = self.sigma(&out[i]).expect("W closed under sigma");
            out.push(next);
        }
        out
    }

    /// `[τ⁰(κ), …, τⁿ(κ)]`.
    pub fn tau_ladder(&self, n: usize) -> Vec<Vec2> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.kappa.clone());
        for i in 0..n {
            let next = self.tau(&out[i]).expect("W closed under tau");
            out.push(next);
        }
        out
    }

    /// Membership in `L(u)`: `w = λu + (1−λ)τ(u)` for some `λ ∈ (0,1]`.
    pub fn segment_contains(&self, u: &Vec2, w: &Vec2) -> bool {
        let Ok(tu) = self.tau(u) else {
            return false;
        };
        let d = u.sub(&tu);
        let r = w.sub(&tu);
        if !d.cross(&r).is_zero() {
            return false;
        }
        let dd = d.dot(&d);
        if dd.is_zero() {
            return false;
        }
        let lambda = r.dot(&d).checked_div(&dd).expect("nonzero");
        lambda.is_positive() && lambda <= Rat::one()
    }

    /// Closed half-space above the line through `u` and `τ(u)`.
    pub fn halfspace_contains(&self, u: &Vec2, w: &Vec2) -> bool {
        let Ok(tu) = self.tau(u) else {
            return false;
        };
        let normal = Vec2::new(&tu.x2 - &u.x2, &u.x1 - &tu.x1);
        !normal.dot(&w.sub(u)).is_positive()
    }

    /// `Area(κ)` truncated to the half-spaces of `τᵏ(κ)` and `σᵏ(κ)`, `k ≤ depth`.
    pub fn area_contains(&self, v: &Vec2, depth: usize) -> bool {
        if !self.in_w(v) {
            return false;
        }
        let taus = self.tau_ladder(depth);
        let sigmas = self.sigma_ladder(depth);
        taus.iter()
            .chain(sigmas.iter().skip(1))
            .all(|u| self.halfspace_contains(u, v))
    }

    /// Locates `u` with `u₁ = σᵏ(κ)₁` (least such `k` with `σᵏ(κ)₁ ≤ v₁`)
    /// on the line through `v` parallel to `L(u)`, so that `v ∈ L(u)`.
    ///
    /// Solves `u₂(1−u₁)/D = (v₂−u₂)/(v₁−u₁)` with `D = q−1+u₁(1−u₁)`.
    pub fn find_segment_origin(&self, v: &Vec2, depth: usize) -> Result<Vec2, GeometryError> {
        let u1 = self.segment_origin_x1(v, depth)?;
        let d = &self.q - Rat::one() + &u1 * (Rat::one() - &u1);
        let denom = (Rat::one() - &u1) * (&v.x1 - &u1) + &d;
        let u2 = (&v.x2 * &d).checked_div(&denom)?;
        Ok(Vec2::new(u1, u2))
    }

    /// Same search, but with the denominator `v₁ − u₁ + D` (no `(1−u₁)` factor).
    /// Kept to demonstrate that this form misses the segment.
    pub fn find_segment_origin_unscaled(
        &self,
        v: &Vec2,
        depth: usize,
    ) -> Result<Vec2, GeometryError> {
        let u1 = self.segment_origin_x1(v, depth)?;
        let d = &self.q - Rat::one() + &u1 * (Rat::one() - &u1);
        let denom = &v.x1 - &u1 + &d;
        let u2 = (&v.x2 * &d).checked_div(&denom)?;
        Ok(Vec2::new(u1, u2))
    }

    fn segment_origin_x1(&self, v: &Vec2, depth: usize) -> Result<Rat, GeometryError> {
        self.require_w(v)?;
        if v.x1 > self.kappa.x1 {
            return Err(GeometryError::AboveKappa(Box::new(v.clone())));
        }
        if self.area_contains(v, depth) {
            return Err(GeometryError::InArea(Box::new(v.clone())));
        }
        let mut cur = self.kappa.clone();
        for _ in 0..LADDER_CAP {
            if cur.x1 <= v.x1 {
                return Ok(cur.x1);
            }
            cur = self.sigma(&cur)?;
        }
        Err(GeometryError::CapExceeded(LADDER_CAP))
    }

    /// `σᵏ(κ)₁ − inf I_q`, strictly positive and decreasing in `k`.
    pub fn sigma_limit_gap(&self, k: usize) -> Rat {
        &self.sigma_n(k).x1 - &self.iq_lower()
    }
}

pub fn slope(v: &Vec2, u: &Vec2) -> Result<Rat, GeometryError> {
    let dx = &u.x1 - &v.x1;
    if dx.is_zero() {
        return Err(GeometryError::Vertical);
    }
    Ok((&u.x2 - &v.x2).checked_div(&dx)?)
}

/// Weight `λ′` with `τ(λx + (1−λ)y) = λ′τ(x) + (1−λ′)τ(y)`.
pub fn tau_mixing_weight(x: &Vec2, y: &Vec2, lambda: &Rat) -> Result<Rat, RatError> {
    let num = lambda * &x.x1;
    let den = &num + (Rat::one() - lambda) * &y.x1;
    num.checked_div(&den)
}
