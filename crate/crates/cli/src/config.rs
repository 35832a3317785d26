//! Scenario files.
//!
//! A scenario is a TOML document with one table per concern. Every leaf is
//! kept together with its byte span so that a value rejected by the core
//! library can be reported with the line it came from. The layout is
//! documented in `scenarios/schema.md`.

use risfda::sweep::EveSpec;
use risfda::{
    Combine, Error as CoreError, FdaPlan, LinkBudget, PathLossModel, Placement, Point, RisGeometry, Scenario,
    SelectionSizes, Technique,
};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::CliError;

/// The scenario bundled with the binary and used when `--config` is absent.
pub const BASELINE_TOML: &str = include_str!("../../../scenarios/baseline.toml");
pub const BASELINE_ORIGIN: &str = "scenarios/baseline.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub combine: Combine,
    #[serde(default = "default_technique")]
    pub technique: Spanned<Technique>,
    pub placement: PlacementConfig,
    pub plan: PlanConfig,
    pub ris: RisConfig,
    pub budget: BudgetConfig,
    pub path_loss: PathLossConfig,
    pub sizes: SizesConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eve: Option<Spanned<EveSpec>>,
}

fn default_technique() -> Spanned<Technique> {
    Spanned::new(0..0, Technique::FdaRibes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementConfig {
    #[serde(default = "origin")]
    pub bs: Spanned<[f64; 2]>,
    pub ris: Spanned<[f64; 2]>,
    pub bob: Spanned<[f64; 2]>,
}

fn origin() -> Spanned<[f64; 2]> {
    Spanned::new(0..0, [0.0, 0.0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub f0_hz: Spanned<f64>,
    pub delta_f_hz: Spanned<f64>,
    pub antennas: Spanned<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisConfig {
    pub n_h: Spanned<usize>,
    pub n_v: Spanned<usize>,
    /// Element spacings; half a wavelength of `f0` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_h_m: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_v_m: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_bs_m: Option<Spanned<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub power_dbm: Spanned<f64>,
    pub noise_bob_dbm: Spanned<f64>,
    /// Omit for a noiseless eavesdropper.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_eve_dbm: Option<Spanned<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossConfig {
    pub l0_db: Spanned<f64>,
    pub alpha: Spanned<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizesConfig {
    pub m_s: Spanned<SizeValue>,
    pub n_s: Spanned<SizeValue>,
}

/// A subset size, or `"auto"` for the optimizer's choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, expecting = "a positive integer or \"auto\"")]
pub enum SizeValue {
    Fixed(usize),
    Auto(AutoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoKeyword {
    #[serde(rename = "auto")]
    Auto,
}

/// A validated scenario together with the run settings from the file.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub scenario: Scenario,
    pub technique: Technique,
    pub seed: u64,
    pub eve: Option<EveSpec>,
}

/// Source text of a config plus where it came from, for error messages.
pub struct Source<'a> {
    pub origin: &'a str,
    pub text: &'a str,
}

impl Source<'_> {
    fn line_of<T>(&self, field: &Spanned<T>) -> Option<usize> {
        let span = field.span();
        (span.end > 0).then(|| self.text[..span.start.min(self.text.len())].matches('\n').count() + 1)
    }

    fn field_error<T>(&self, field: &Spanned<T>, path: &str, message: impl ToString) -> CliError {
        CliError::Field {
            origin: self.origin.to_string(),
            line: self.line_of(field),
            field: path.to_string(),
            message: message.to_string(),
        }
    }
}

impl ScenarioConfig {
    pub fn parse(src: &Source<'_>) -> Result<Self, CliError> {
        toml::from_str(src.text).map_err(|e| CliError::Parse {
            origin: src.origin.to_string(),
            message: e.to_string(),
        })
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }

    /// Runs every library constructor, attributing failures to fields.
    pub fn resolve(&self, src: &Source<'_>) -> Result<Resolved, CliError> {
        let p = &self.placement;
        let point = |f: &Spanned<[f64; 2]>| Point::new(f.get_ref()[0], f.get_ref()[1]);
        let placement = Placement::with_bs(point(&p.bs), point(&p.ris), point(&p.bob)).map_err(|e| {
            let (field, path) = match &e {
                CoreError::InvalidParameter { name, .. } if *name == "bs" => (&p.bs, "placement.bs"),
                CoreError::InvalidParameter { name, .. } if *name == "ris" => (&p.ris, "placement.ris"),
                _ => (&p.bob, "placement.bob"),
            };
            src.field_error(field, path, e)
        })?;

        let pl = &self.plan;
        let plan = FdaPlan::new(
            *pl.f0_hz.get_ref(),
            *pl.delta_f_hz.get_ref(),
            *pl.antennas.get_ref(),
        )
        .map_err(|e| match &e {
            CoreError::InvalidParameter { name, .. } if *name == "f0_hz" => {
                src.field_error(&pl.f0_hz, "plan.f0_hz", e)
            }
            CoreError::InvalidParameter { name, .. } if *name == "m_antennas" => {
                src.field_error(&pl.antennas, "plan.antennas", e)
            }
            _ => src.field_error(&pl.delta_f_hz, "plan.delta_f_hz", e),
        })?;

        let r = &self.ris;
        let half = plan.wavelength_m() / 2.0;
        let spacing = |f: &Option<Spanned<f64>>| f.as_ref().map_or(half, |s| *s.get_ref());
        let geom = RisGeometry::new(
            *r.n_h.get_ref(),
            *r.n_v.get_ref(),
            spacing(&r.d_h_m),
            spacing(&r.d_v_m),
            spacing(&r.d_bs_m),
        )
        .map_err(|e| {
            let named = |name: &str| match &e {
                CoreError::InvalidParameter { name: n, .. } => *n == name,
                _ => false,
            };
            let pick = |opt: &Option<Spanned<f64>>| opt.clone().unwrap_or_else(|| Spanned::new(0..0, 0.0));
            if named("d_h_m") {
                src.field_error(&pick(&r.d_h_m), "ris.d_h_m", &e)
            } else if named("d_v_m") {
                src.field_error(&pick(&r.d_v_m), "ris.d_v_m", &e)
            } else if named("d_bs_m") {
                src.field_error(&pick(&r.d_bs_m), "ris.d_bs_m", &e)
            } else if *r.n_h.get_ref() == 0 {
                src.field_error(&r.n_h, "ris.n_h", &e)
            } else {
                src.field_error(&r.n_v, "ris.n_v", &e)
            }
        })?;

        let b = &self.budget;
        let noise_eve = b
            .noise_eve_dbm
            .as_ref()
            .map_or(0.0, |n| risfda::units::dbm_to_watts(*n.get_ref()));
        let budget = LinkBudget::new(
            risfda::units::dbm_to_watts(*b.power_dbm.get_ref()),
            risfda::units::dbm_to_watts(*b.noise_bob_dbm.get_ref()),
            noise_eve,
        )
        .map_err(|e| match &e {
            CoreError::InvalidParameter { name, .. } if *name == "power" => {
                src.field_error(&b.power_dbm, "budget.power_dbm", e)
            }
            CoreError::InvalidParameter { name, .. } if *name == "noise_bob" => {
                src.field_error(&b.noise_bob_dbm, "budget.noise_bob_dbm", e)
            }
            _ => match &b.noise_eve_dbm {
                Some(f) => src.field_error(f, "budget.noise_eve_dbm", e),
                None => src.field_error(&b.power_dbm, "budget", e),
            },
        })?;

        let pth = &self.path_loss;
        let path_loss =
            PathLossModel::new(*pth.l0_db.get_ref(), *pth.alpha.get_ref()).map_err(|e| match &e {
                CoreError::InvalidParameter { name, .. } if *name == "l0_db" => {
                    src.field_error(&pth.l0_db, "path_loss.l0_db", e)
                }
                _ => src.field_error(&pth.alpha, "path_loss.alpha", e),
            })?;

        let (m, n) = (plan.m_antennas, geom.n());
        let mut scenario = Scenario {
            placement,
            plan,
            geom,
            budget,
            path_loss,
            sizes: SelectionSizes::full(m, n),
            combine: self.combine,
        };
        let s = &self.sizes;
        let m_s = match *s.m_s.get_ref() {
            SizeValue::Fixed(v) => {
                SelectionSizes::new(v, n, m, n).map_err(|e| src.field_error(&s.m_s, "sizes.m_s", e))?;
                Some(v)
            }
            SizeValue::Auto(_) => None,
        };
        let n_s = match *s.n_s.get_ref() {
            SizeValue::Fixed(v) => {
                SelectionSizes::new(m, v, m, n).map_err(|e| src.field_error(&s.n_s, "sizes.n_s", e))?;
                Some(v)
            }
            SizeValue::Auto(_) => None,
        };
        if m_s.is_none() || n_s.is_none() {
            let best =
                risfda::optimize::optimize(&scenario).map_err(|e| src.field_error(&s.m_s, "sizes", e))?;
            scenario.sizes = SelectionSizes {
                m_s: m_s.unwrap_or(best.m_s_star),
                n_s: n_s.unwrap_or(best.n_s_star),
            };
        } else {
            scenario.sizes = SelectionSizes {
                m_s: m_s.unwrap_or(m),
                n_s: n_s.unwrap_or(n),
            };
        }

        let eve = match &self.eve {
            Some(spec) => {
                spec.get_ref()
                    .locations(&scenario)
                    .map_err(|e| src.field_error(spec, "eve", e))?;
                Some(*spec.get_ref())
            }
            None => None,
        };

        Ok(Resolved {
            scenario,
            technique: *self.technique.get_ref(),
            seed: self.seed,
            eve,
        })
    }
}

/// Reads, parses and resolves a config; the bundled scenario when `path` is `None`.
pub fn load(path: Option<&std::path::Path>) -> Result<(ScenarioConfig, Resolved), CliError> {
    let (origin, text) = match path {
        Some(p) => (
            p.display().to_string(),
            std::fs::read_to_string(p).map_err(|e| CliError::Io {
                path: p.display().to_string(),
                source: e,
            })?,
        ),
        None => (BASELINE_ORIGIN.to_string(), BASELINE_TOML.to_string()),
    };
    let src = Source {
        origin: &origin,
        text: &text,
    };
    let cfg = ScenarioConfig::parse(&src)?;
    let resolved = cfg.resolve(&src)?;
    Ok((cfg, resolved))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> (ScenarioConfig, Resolved) {
        load(None).unwrap()
    }

    #[test]
    fn bundled_scenario_is_the_library_baseline() {
        let (_, r) = baseline();
        assert_eq!(r.scenario, Scenario::baseline());
        assert_eq!(r.technique, Technique::FdaRibes);
        assert_eq!(
            r.eve,
            Some(EveSpec::Polar {
                range_m: 50.0,
                aoa_rad: None
            })
        );
    }

    #[test]
    fn round_trip_is_identity() {
        let (cfg, r) = baseline();
        let text = cfg.to_toml();
        let src = Source {
            origin: "round-trip",
            text: &text,
        };
        let again = ScenarioConfig::parse(&src).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.resolve(&src).unwrap(), r);
    }

    #[test]
    fn field_errors_carry_lines() {
        let text = BASELINE_TOML.replace("m_s = 14", "m_s = 7");
        let src = Source {
            origin: "bad.toml",
            text: &text,
        };
        let err = ScenarioConfig::parse(&src)
            .unwrap()
            .resolve(&src)
            .unwrap_err()
            .to_string();
        let line = text.lines().position(|l| l.starts_with("m_s")).unwrap() + 1;
        assert!(err.contains("sizes.m_s"), "{err}");
        assert!(err.contains(&format!("line {line}")), "{err}");
    }

    #[test]
    fn delta_f_beyond_shift_limit_is_attributed() {
        let text = BASELINE_TOML.replace("delta_f_hz = 1e6", "delta_f_hz = 9e6");
        let src = Source {
            origin: "bad.toml",
            text: &text,
        };
        let err = ScenarioConfig::parse(&src)
            .unwrap()
            .resolve(&src)
            .unwrap_err()
            .to_string();
        let line = text.lines().position(|l| l.starts_with("delta_f_hz")).unwrap() + 1;
        assert!(
            err.contains("plan.delta_f_hz") && err.contains(&format!("line {line}:")),
            "{err}"
        );
    }

    #[test]
    fn auto_sizes_use_the_optimizer() {
        let text = BASELINE_TOML
            .replace("m_s = 14", "m_s = \"auto\"")
            .replace("n_s = 294", "n_s = \"auto\"");
        let src = Source {
            origin: "auto.toml",
            text: &text,
        };
        let r = ScenarioConfig::parse(&src).unwrap().resolve(&src).unwrap();
        assert_eq!(r.scenario.sizes.m_s, 18);
    }

    #[test]
    fn unknown_keys_are_rejected_with_line() {
        let text = BASELINE_TOML.replace("alpha = 2.0", "alpha = 2.0\nbeta = 1.0");
        let src = Source {
            origin: "bad.toml",
            text: &text,
        };
        let err = ScenarioConfig::parse(&src).unwrap_err().to_string();
        assert!(err.contains("beta") && err.contains("line"), "{err}");
    }

    #[test]
    fn bad_eve_spec_is_attributed() {
        let text = BASELINE_TOML.replace(
            "kind = \"polar\"\nrange_m = 50.0",
            "kind = \"range_sweep\"\nr_min = 10.0\nr_max = 5.0\npoints = 4",
        );
        let src = Source {
            origin: "bad.toml",
            text: &text,
        };
        let err = ScenarioConfig::parse(&src)
            .unwrap()
            .resolve(&src)
            .unwrap_err()
            .to_string();
        assert!(err.contains("`eve`"), "{err}");
    }
}
