//! Catalog of observation laws used by the built-in models.

use crate::error::{Error, Result};
use crate::numeric::{integrate_with_breaks, normal_cdf, normal_pdf, DEFAULT_ABS_TOL};
use rand::{Rng, RngCore};
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Laws of a single observation `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    StdNormal,
    Uniform01,
    Rademacher,
    Exponential1,
}

impl Distribution {
    pub const CATALOG: [&'static str; 4] = ["std_normal", "uniform01", "rademacher", "exponential1"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "std_normal" => Some(Self::StdNormal),
            "uniform01" => Some(Self::Uniform01),
            "rademacher" => Some(Self::Rademacher),
            "exponential1" => Some(Self::Exponential1),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::StdNormal => "std_normal",
            Self::Uniform01 => "uniform01",
            Self::Rademacher => "rademacher",
            Self::Exponential1 => "exponential1",
        }
    }

    pub fn is_continuous(self) -> bool {
        !matches!(self, Self::Rademacher)
    }

    pub fn mean(self) -> f64 {
        match self {
            Self::StdNormal | Self::Rademacher => 0.0,
            Self::Uniform01 => 0.5,
            Self::Exponential1 => 1.0,
        }
    }

    pub fn variance(self) -> f64 {
        match self {
            Self::StdNormal | Self::Rademacher | Self::Exponential1 => 1.0,
            Self::Uniform01 => 1.0 / 12.0,
        }
    }

    /// Fourth central moment.
    pub fn central_moment4(self) -> f64 {
        match self {
            Self::StdNormal => 3.0,
            Self::Rademacher => 1.0,
            Self::Uniform01 => 1.0 / 80.0,
            Self::Exponential1 => 9.0,
        }
    }

    /// `E X²` (raw).
    pub fn second_moment(self) -> f64 {
        self.variance() + self.mean() * self.mean()
    }

    pub fn sample(self, rng: &mut dyn RngCore) -> f64 {
        match self {
            Self::StdNormal => rng.sample(StandardNormal),
            Self::Uniform01 => rng.random::<f64>(),
            Self::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::Exponential1 => rng.sample(Exp1),
        }
    }

    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Self::StdNormal => normal_cdf(x),
            Self::Uniform01 => x.clamp(0.0, 1.0),
            Self::Rademacher => {
                if x < -1.0 {
                    0.0
                } else if x < 1.0 {
                    0.5
                } else {
                    1.0
                }
            }
            Self::Exponential1 => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
        }
    }

    pub fn density(self, x: f64) -> f64 {
        match self {
            Self::StdNormal => normal_pdf(x),
            Self::Uniform01 => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Rademacher => 0.0,
            Self::Exponential1 => {
                if x >= 0.0 {
                    (-x).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Integration range outside of which the mass is below `1e-100`.
    pub fn support(self) -> (f64, f64) {
        match self {
            Self::StdNormal => (-40.0, 40.0),
            Self::Uniform01 => (0.0, 1.0),
            Self::Rademacher => (-1.0, 1.0),
            Self::Exponential1 => (0.0, 240.0),
        }
    }

    /// `E f(X)`. Continuous laws use adaptive quadrature; `breaks` lists
    /// interior points where `f` is not smooth.
    pub fn expect<F: Fn(f64) -> f64>(self, f: F, breaks: &[f64]) -> Result<f64> {
        if let Self::Rademacher = self {
            return Ok(0.5 * (f(-1.0) + f(1.0)));
        }
        let (lo, hi) = self.support();
        let mut points = vec![lo];
        let mut interior: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
        interior.sort_by(f64::total_cmp);
        interior.dedup();
        points.extend(interior);
        points.push(hi);
        // The normal tail carries little mass; split near the bulk so the
        // adaptive rule does not under-resolve it.
        if let Self::StdNormal = self {
            for c in [-8.0, 8.0] {
                if !points.contains(&c) {
                    points.push(c);
                }
            }
            points.sort_by(f64::total_cmp);
        }
        let density = |x: f64| self.density(x);
        integrate_with_breaks(|x| f(x) * density(x), &points, DEFAULT_ABS_TOL).map(|r| r.value)
    }

    /// `E f(g(X))` where `f` is non-smooth at the levels `±levels` of `g`.
    /// The crossing points `g(x) = ±level` are located on a grid and refined.
    pub fn expect_composed<G, F>(self, g: G, f: F, levels: &[f64]) -> Result<f64>
    where
        G: Fn(f64) -> f64,
        F: Fn(f64) -> f64,
    {
        if let Self::Rademacher = self {
            return Ok(0.5 * (f(g(-1.0)) + f(g(1.0))));
        }
        let breaks = level_crossings(&g, self.bulk(), levels)?;
        self.expect(|x| f(g(x)), &breaks)
    }

    /// Range where crossings of a transformed variable are searched.
    pub(crate) fn bulk(self) -> (f64, f64) {
        match self {
            Self::StdNormal => (-12.0, 12.0),
            Self::Uniform01 => (0.0, 1.0),
            Self::Rademacher => (-1.0, 1.0),
            Self::Exponential1 => (0.0, 60.0),
        }
    }

    pub fn quantile(self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("quantile level {u} outside [0, 1]")));
        }
        Ok(match self {
            Self::Uniform01 => u,
            Self::Exponential1 => -(-u).ln_1p(),
            Self::Rademacher => {
                if u <= 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            Self::StdNormal => {
                if u == 0.0 {
                    f64::NEG_INFINITY
                } else if u == 1.0 {
                    f64::INFINITY
                } else {
                    let (mut lo, mut hi) = (-40.0, 40.0);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if normal_cdf(mid) < u {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    0.5 * (lo + hi)
                }
            }
        })
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn level_crossings<G: Fn(f64) -> f64>(g: &G, (lo, hi): (f64, f64), levels: &[f64]) -> Result<Vec<f64>> {
    const GRID: usize = 4000;
    let mut out = Vec::new();
    if levels.is_empty() {
        return Ok(out);
    }
    let xs: Vec<f64> = (0..=GRID).map(|k| lo + (hi - lo) * k as f64 / GRID as f64).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    for &level in levels {
        for target in [level, -level] {
            for k in 0..GRID {
                let (a, b) = (gs[k] - target, gs[k + 1] - target);
                if a == 0.0 {
                    out.push(xs[k]);
                } else if a * b < 0.0 {
                    let (mut l, mut r) = (xs[k], xs[k + 1]);
                    let sl = a.signum();
                    for _ in 0..80 {
                        let m = 0.5 * (l + r);
                        if (g(m) - target).signum() == sl {
                            l = m;
                        } else {
                            r = m;
                        }
                    }
                    out.push(0.5 * (l + r));
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}
