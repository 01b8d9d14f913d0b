//! Problem configuration for `simulate` and interior subtraction in `fit`.

use rayon::prelude::*;
use serde::Deserialize;
use singular_heat::asymfit::{geometric_grid, HeatContentSamples, Sample};
use singular_heat::coeff::BoundaryConditionKind;
use singular_heat::geom::WarpedProfile;
use singular_heat::heat1d::{
    circle_heat_content, halfline_heat_content, interval_heat_content_grid, interval_spectrum, FourierSeries,
};
use singular_heat::profile::{Anchor, Profile, SingularProfile};
use singular_heat::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Halfline,
    Interval,
    Warped,
    CircleProduct,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Halfline => "halfline",
            Self::Interval => "interval",
            Self::Warped => "warped",
            Self::CircleProduct => "circle-product",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// r^{-α} times a quintic cutoff of radius `cutoff_radius`.
    #[default]
    Cutoff,
    /// r^{-α}(1 - r/L)^order.
    Tapered,
    /// r^{-α} on the whole domain.
    Power,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(default)]
    pub kind: ProfileKind,
    #[serde(default = "default_radius")]
    pub cutoff_radius: f64,
    #[serde(default = "default_order")]
    pub order: u32,
    /// Amplitude of the mirrored profile anchored at π (interval problems).
    #[serde(default)]
    pub right_amplitude: f64,
    /// Domain length for the half-line profile support.
    #[serde(default = "default_length")]
    pub length: f64,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            kind: ProfileKind::default(),
            cutoff_radius: default_radius(),
            order: default_order(),
            right_amplitude: 0.0,
            length: default_length(),
        }
    }
}

fn default_radius() -> f64 {
    0.5
}
fn default_order() -> u32 {
    6
}
fn default_length() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleData {
    pub phi: FourierSeries,
    pub rho: FourierSeries,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub problem: ProblemKind,
    pub bc: BoundaryConditionKind,
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default)]
    pub warp: Option<WarpedProfile>,
    #[serde(default)]
    pub circle: Option<CircleData>,
    #[serde(default)]
    pub tmin: Option<f64>,
    #[serde(default)]
    pub tmax: Option<f64>,
    #[serde(default)]
    pub num: Option<usize>,
    /// Explicit sample times; overrides the geometric grid.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(a.is_finite() && a < 1.0) {
                return Err(invalid(format!("{name} must be a real number below 1")));
            }
        }
        if let Some(c) = self.c {
            if !c.is_finite() {
                return Err(invalid("c must be finite"));
            }
        }
        if self.problem == ProblemKind::Halfline && self.c.unwrap_or(0.0) != 0.0 {
            return Err(invalid("the half-line problem has c = 0"));
        }
        match (self.problem, &self.warp) {
            (ProblemKind::Warped, None) => return Err(invalid("warped problem needs a warp section")),
            (ProblemKind::Warped, Some(w)) => {
                if w.fprime.is_empty() || w.fprime.len() != w.fsecond.len() {
                    return Err(invalid("warp.fprime and warp.fsecond need equal, non-zero length"));
                }
                if w.fsecond.iter().any(|v| *v != 0.0) || w.sr0 != 0.0 {
                    return Err(invalid(
                        "warped simulation supports linear warping (fsecond = 0) and sr0 = 0",
                    ));
                }
                if self.c.is_some() {
                    return Err(invalid("c is derived from the warp for the warped problem"));
                }
            }
            (_, Some(_)) => return Err(invalid("warp is only valid for the warped problem")),
            _ => {}
        }
        if self.circle.is_some() && self.problem != ProblemKind::CircleProduct {
            return Err(invalid("circle is only valid for the circle-product problem"));
        }
        self.times()?;
        Ok(())
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        if let Some(ts) = &self.times {
            if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0 && t.is_finite())) || ts.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("times must be positive and strictly increasing"));
            }
            if self.tmin.is_some() || self.tmax.is_some() || self.num.is_some() {
                return Err(invalid("give either times or tmin/tmax/num"));
            }
            return Ok(ts.clone());
        }
        match (self.tmin, self.tmax, self.num) {
            (Some(a), Some(b), Some(n)) => geometric_grid(a, b, n),
            _ => Err(invalid("sampling grid needs tmin, tmax and num (or times)")),
        }
    }

    /// Operator parameter c of −∂² + c² on the interval.
    pub fn c_value(&self) -> f64 {
        match (&self.warp, self.problem) {
            (Some(w), ProblemKind::Warped) => 0.5 * w.fprime.iter().sum::<f64>(),
            _ => self.c.unwrap_or(0.0),
        }
    }

    fn halfline_profile(&self, alpha: f64) -> Result<SingularProfile> {
        let p = &self.profile;
        match p.kind {
            ProfileKind::Cutoff => SingularProfile::with_cutoff(alpha, p.length, p.cutoff_radius),
            ProfileKind::Tapered => SingularProfile::tapered(alpha, p.length, p.order),
            ProfileKind::Power => SingularProfile::power(alpha, p.length),
        }
    }

    /// Interval profile with exponent `alpha` at 0 and, when requested, its
    /// mirror image at π.
    pub fn interval_profile(&self, alpha: f64) -> Result<Profile> {
        let p = &self.profile;
        let left = match p.kind {
            ProfileKind::Cutoff => SingularProfile::with_cutoff(alpha, PI, p.cutoff_radius)?,
            ProfileKind::Tapered => SingularProfile::tapered(alpha, PI, p.order)?,
            ProfileKind::Power => SingularProfile::power(alpha, PI)?,
        };
        let mut parts = vec![left.clone()];
        if p.right_amplitude != 0.0 {
            parts.push(left.anchored(Anchor::Right).scaled(p.right_amplitude));
        }
        Profile::new(parts)
    }

    /// Runs the simulation over the configured t-grid.
    pub fn simulate(&self) -> Result<HeatContentSamples> {
        let ts = self.times()?;
        let entries: Vec<Sample> = match self.problem {
            ProblemKind::Halfline => {
                let phi = self.halfline_profile(self.alpha1)?;
                let rho = self.halfline_profile(self.alpha2)?;
                ts.par_iter()
                    .map(|t| {
                        halfline_heat_content(&phi, &rho, self.bc, *t).map(|e| Sample {
                            t: *t,
                            beta: e.value,
                            err: e.error,
                        })
                    })
                    .collect::<Result<_>>()?
            }
            _ => {
                let phi = self.interval_profile(self.alpha1)?;
                let rho = self.interval_profile(self.alpha2)?;
                let spec = interval_spectrum(self.bc, self.c_value());
                let est = interval_heat_content_grid(&phi, &rho, spec, &ts)?;
                let factor = |t: f64| -> Result<f64> {
                    match self.problem {
                        ProblemKind::Warped => {
                            Ok((2.0 * PI).powi(self.warp.as_ref().map_or(0, |w| w.fprime.len()) as i32))
                        }
                        ProblemKind::CircleProduct => {
                            let one = FourierSeries::constant(1.0);
                            let (a, b) = self.circle.as_ref().map_or((&one, &one), |c| (&c.phi, &c.rho));
                            circle_heat_content(a, b, t)
                        }
                        _ => Ok(1.0),
                    }
                };
                ts.iter()
                    .zip(est)
                    .map(|(t, e)| {
                        let f = factor(*t)?;
                        Ok(Sample {
                            t: *t,
                            beta: f * e.value,
                            err: f.abs() * e.error,
                        })
                    })
                    .collect::<Result<_>>()?
            }
        };
        HeatContentSamples::new(self.problem.name(), entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ProblemConfig> {
        ProblemConfig::from_json(text)
    }

    #[test]
    fn defaults_and_grid() {
        let cfg =
            parse(r#"{"problem":"interval","bc":"robin","alpha1":0.3,"alpha2":0.4,"tmin":1e-4,"tmax":1e-2,"num":3}"#)
                .unwrap();
        assert_eq!(cfg.profile, ProfileSpec::default());
        assert_eq!(cfg.c_value(), 0.0);
        let ts = cfg.times().unwrap();
        assert_eq!(ts.len(), 3);
        assert!((ts[1] - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn warped_c_is_half_the_warping_slope() {
        let cfg = parse(
            r#"{"problem":"warped","bc":"dirichlet","alpha1":0.3,"alpha2":0.4,"times":[0.1],
                "warp":{"fprime":[0.2,0.6],"fsecond":[0,0]}}"#,
        )
        .unwrap();
        assert!((cfg.c_value() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rejects_inconsistent_sections() {
        let bad = [
            r#"{"problem":"warped","bc":"dirichlet","alpha1":0,"alpha2":0,"times":[0.1],"warp":{"fprime":[0.2],"fsecond":[0.1]}}"#,
            r#"{"problem":"warped","bc":"dirichlet","alpha1":0,"alpha2":0,"times":[0.1],"c":1,"warp":{"fprime":[0.2],"fsecond":[0]}}"#,
            r#"{"problem":"interval","bc":"dirichlet","alpha1":0,"alpha2":0,"times":[0.1],"warp":{"fprime":[0.2],"fsecond":[0]}}"#,
            r#"{"problem":"halfline","bc":"dirichlet","alpha1":0,"alpha2":0,"times":[0.1],"c":0.5}"#,
            r#"{"problem":"interval","bc":"dirichlet","alpha1":0,"alpha2":0,"times":[0.1],"tmin":0.01}"#,
            r#"{"problem":"interval","bc":"neumann","alpha1":0,"alpha2":0,"times":[0.1]}"#,
        ];
        for text in bad {
            assert!(matches!(parse(text), Err(Error::Validation(_))), "{text}");
        }
    }

    #[test]
    fn mirrored_interval_profile() {
        let cfg = parse(
            r#"{"problem":"interval","bc":"robin","alpha1":0.3,"alpha2":0.4,"times":[0.1],
                "profile":{"kind":"tapered","order":6,"right_amplitude":0.5}}"#,
        )
        .unwrap();
        let p = cfg.interval_profile(0.3).unwrap();
        assert_eq!(p, Profile::tapered_pair(0.3, 6, 0.5).unwrap());
    }
}
