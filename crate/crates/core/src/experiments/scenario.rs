use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::channel::RelayLinkModel;
use crate::error::{Error, Result};
use crate::numerics::MAX_ORDER;
use crate::secrecy::MIN_TRIALS;

/// Smallest trial count accepted for the figure presets.
pub const MIN_PRESET_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Custom,
}

impl FigureId {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "fig2" => FigureId::Fig2,
            "fig3" => FigureId::Fig3,
            "fig4" => FigureId::Fig4,
            "fig5" => FigureId::Fig5,
            "fig6" => FigureId::Fig6,
            "fig7" => FigureId::Fig7,
            "custom" => FigureId::Custom,
            _ => return None,
        })
    }
}

/// What is compared along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Relay with the largest instantaneous residual, uniform power split.
    InstantaneousSelection,
    /// Relay with the largest mean link to Eve, uniform power split.
    StatisticalSelection,
    /// Per-trial closed-form optimal split.
    Optimal,
    /// Split found by traversing the closed-form SOP.
    Statistical,
    Uniform,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::InstantaneousSelection => "instantaneous_selection",
            Scheme::StatisticalSelection => "statistical_selection",
            Scheme::Optimal => "optimal",
            Scheme::Statistical => "statistical",
            Scheme::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Mean link powers `E[||h||^2]`; `re` holds one entry per relay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanPowers {
    pub sd: f64,
    pub rd: f64,
    pub re: Vec<f64>,
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

/// A complete experiment description. Fields that may be swept accept a
/// single value or a list in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub figure_id: FigureId,
    /// Satellite antennas; `null` means the same as each `n_r`.
    #[serde(default)]
    pub n_s: Option<u32>,
    #[serde(deserialize_with = "one_or_many")]
    pub n_r: Vec<u32>,
    #[serde(deserialize_with = "one_or_many")]
    pub rate_thresholds: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub power_grid_db: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub k_sd: Vec<f64>,
    pub k_re: f64,
    #[serde(deserialize_with = "one_or_many")]
    pub relay_link_model: Vec<RelayLinkModel>,
    pub relay_count: u32,
    pub mean_powers: MeanPowers,
    pub trials: u64,
    pub seed: u64,
    #[serde(deserialize_with = "one_or_many")]
    pub delta_alpha: Vec<f64>,
    /// Defaults to the comparison of the chosen figure.
    #[serde(default)]
    pub schemes: Option<Vec<Scheme>>,
}

/// Quantity on the horizontal axis of every curve of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAxis {
    PowerDb,
    KSd,
}

impl XAxis {
    pub fn name(self) -> &'static str {
        match self {
            XAxis::PowerDb => "P_dB",
            XAxis::KSd => "K_sd",
        }
    }
}

fn db_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(f64::from).collect()
}

impl Scenario {
    /// Parameter set of one of the paper's figures (`fig2` ... `fig7`).
    pub fn preset(name: &str) -> Result<Self> {
        let figure = FigureId::from_name(name)
            .filter(|f| *f != FigureId::Custom)
            .ok_or_else(|| Error::Validation(format!("unknown preset {name:?}")))?;
        let both = vec![RelayLinkModel::Rayleigh, RelayLinkModel::Rician];
        let selection = Scenario {
            figure_id: figure,
            n_s: None,
            n_r: vec![2, 4, 8],
            rate_thresholds: vec![2.0],
            power_grid_db: db_grid(5, 15),
            k_sd: vec![10.0],
            k_re: 0.0,
            relay_link_model: vec![RelayLinkModel::Rayleigh],
            relay_count: 4,
            mean_powers: MeanPowers {
                sd: 1.0,
                rd: 1.0,
                re: vec![0.7, 0.9, 1.1, 1.3],
            },
            trials: 100_000,
            seed: 42,
            delta_alpha: vec![0.01],
            schemes: None,
        };
        let allocation = Scenario {
            n_r: vec![4],
            rate_thresholds: vec![1.0],
            k_re: 1.0,
            relay_link_model: both,
            relay_count: 1,
            mean_powers: MeanPowers {
                sd: 1.0,
                rd: 1.0,
                re: vec![1.0],
            },
            ..selection.clone()
        };
        let s = match figure {
            FigureId::Fig2 => selection,
            FigureId::Fig3 => Scenario {
                n_r: vec![4],
                rate_thresholds: vec![1.0, 1.5, 2.0],
                ..selection
            },
            FigureId::Fig4 => Scenario {
                power_grid_db: vec![10.0],
                k_sd: (1..=10).map(|i| 2.0 * i as f64).collect(),
                ..allocation
            },
            FigureId::Fig5 => Scenario {
                delta_alpha: vec![0.001, 0.005, 0.01, 0.05, 0.1],
                ..allocation
            },
            FigureId::Fig6 => Scenario {
                n_r: vec![2, 4, 8],
                power_grid_db: db_grid(5, 20),
                k_sd: vec![5.0],
                ..allocation
            },
            FigureId::Fig7 => Scenario {
                rate_thresholds: vec![1.0, 1.5, 2.0],
                power_grid_db: db_grid(5, 20),
                k_sd: vec![5.0],
                ..allocation
            },
            FigureId::Custom => unreachable!(),
        };
        Ok(Scenario {
            figure_id: figure,
            ..s
        })
    }

    pub fn schemes(&self) -> Vec<Scheme> {
        if let Some(s) = &self.schemes {
            return s.clone();
        }
        let selection = vec![Scheme::InstantaneousSelection, Scheme::StatisticalSelection];
        let allocation = vec![Scheme::Optimal, Scheme::Statistical, Scheme::Uniform];
        match self.figure_id {
            FigureId::Fig2 | FigureId::Fig3 => selection,
            FigureId::Fig5 => vec![Scheme::Statistical],
            FigureId::Fig4 | FigureId::Fig6 | FigureId::Fig7 => allocation,
            FigureId::Custom if self.relay_count > 1 => selection,
            FigureId::Custom => allocation,
        }
    }

    /// `P_dB` unless the power grid is a single point and `k_sd` is swept.
    pub fn x_axis(&self) -> XAxis {
        if self.power_grid_db.len() == 1 && self.k_sd.len() > 1 {
            XAxis::KSd
        } else {
            XAxis::PowerDb
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        for (name, len) in [
            ("n_r", self.n_r.len()),
            ("rate_thresholds", self.rate_thresholds.len()),
            ("power_grid_db", self.power_grid_db.len()),
            ("k_sd", self.k_sd.len()),
            ("relay_link_model", self.relay_link_model.len()),
            ("delta_alpha", self.delta_alpha.len()),
        ] {
            if len == 0 {
                return fail(format!("{name} must not be empty"));
            }
        }
        if let Some(n_s) = self.n_s {
            if n_s == 0 || n_s > MAX_ORDER {
                return fail(format!("n_s {n_s} must lie in 1..={MAX_ORDER}"));
            }
        }
        if let Some(n) = self.n_r.iter().find(|&&n| !(2..=MAX_ORDER).contains(&n)) {
            return fail(format!("n_r {n} must lie in 2..={MAX_ORDER}"));
        }
        if let Some(r) = self
            .rate_thresholds
            .iter()
            .find(|r| !(**r >= 0.0) || !r.is_finite())
        {
            return fail(format!("rate threshold {r} must be finite and >= 0"));
        }
        if let Some(p) = self.power_grid_db.iter().find(|p| !p.is_finite()) {
            return fail(format!("power {p} dB must be finite"));
        }
        for (name, k) in self
            .k_sd
            .iter()
            .map(|k| ("k_sd", *k))
            .chain([("k_re", self.k_re)])
        {
            if !(k >= 0.0) || !k.is_finite() {
                return fail(format!("{name} {k} must be finite and >= 0"));
            }
        }
        if let Some(d) = self.delta_alpha.iter().find(|d| !(**d > 0.0 && **d < 0.5)) {
            return fail(format!("delta_alpha {d} must lie in (0, 0.5)"));
        }
        if self.relay_count == 0 {
            return fail("relay_count must be >= 1".into());
        }
        let mp = &self.mean_powers;
        if mp.re.len() != self.relay_count as usize {
            return fail(format!(
                "mean_powers.re has {} entries but relay_count is {}",
                mp.re.len(),
                self.relay_count
            ));
        }
        if let Some(p) = [mp.sd, mp.rd]
            .iter()
            .chain(&mp.re)
            .find(|p| !(**p > 0.0) || !p.is_finite())
        {
            return fail(format!("mean power {p} must be positive and finite"));
        }
        let min_trials = match self.figure_id {
            FigureId::Custom => MIN_TRIALS,
            _ => MIN_PRESET_TRIALS,
        };
        if self.trials < min_trials {
            return fail(format!(
                "trials {} below the minimum {min_trials}",
                self.trials
            ));
        }
        if matches!(&self.schemes, Some(s) if s.is_empty()) {
            return fail("schemes must not be empty".into());
        }
        let axis = match self.x_axis() {
            XAxis::PowerDb => ("power_grid_db", &self.power_grid_db),
            XAxis::KSd => ("k_sd", &self.k_sd),
        };
        if axis.1.windows(2).any(|w| !(w[0] < w[1])) {
            return fail(format!("{} must be strictly increasing", axis.0));
        }
        Ok(())
    }
}

/// Reads and validates a JSON scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let scenario: Scenario = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_json(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn presets_are_valid() {
        for name in ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"] {
            Scenario::preset(name).unwrap().validate().unwrap();
        }
        assert!(Scenario::preset("fig8").is_err());
        assert!(Scenario::preset("custom").is_err());
    }

    #[test]
    fn fig2_preset() {
        let s = Scenario::preset("fig2").unwrap();
        assert_eq!(s.rate_thresholds, vec![2.0]);
        assert_eq!(s.n_r, vec![2, 4, 8]);
        assert_eq!(s.power_grid_db.first(), Some(&5.0));
        assert_eq!(s.power_grid_db.last(), Some(&15.0));
        assert_eq!(s.k_sd, vec![10.0]);
        assert_eq!(s.relay_link_model, vec![RelayLinkModel::Rayleigh]);
        assert_eq!(s.x_axis(), XAxis::PowerDb);
    }

    #[test]
    fn fig4_preset() {
        let s = Scenario::preset("fig4").unwrap();
        assert_eq!(s.rate_thresholds, vec![1.0]);
        assert_eq!(s.n_r, vec![4]);
        assert_eq!(s.power_grid_db, vec![10.0]);
        assert_eq!(s.k_re, 1.0);
        assert!(s.k_sd.len() > 1);
        assert_eq!(s.x_axis(), XAxis::KSd);
    }

    #[test]
    fn json_round_trip_and_scalar_sweeps() {
        let s = Scenario::preset("fig6").unwrap();
        let f = write_json(&serde_json::to_string_pretty(&s).unwrap());
        assert_eq!(load_scenario(f.path()).unwrap(), s);

        let f = write_json(
            r#"{"figure_id": "custom", "n_s": null, "n_r": 4, "rate_thresholds": 1,
                "power_grid_db": [5, 10], "k_sd": 10, "k_re": 1, "relay_link_model": "rician",
                "relay_count": 1, "mean_powers": {"sd": 1, "rd": 1, "re": [1]},
                "trials": 2000, "seed": 7, "delta_alpha": 0.05}"#,
        );
        let s = load_scenario(f.path()).unwrap();
        assert_eq!(s.n_r, vec![4]);
        assert_eq!(s.relay_link_model, vec![RelayLinkModel::Rician]);
        assert_eq!(
            s.schemes(),
            vec![Scheme::Optimal, Scheme::Statistical, Scheme::Uniform]
        );
    }

    #[test]
    fn rejects_invalid_files() {
        let mut s = Scenario::preset("fig2").unwrap();
        s.trials = 0;
        let f = write_json(&serde_json::to_string(&s).unwrap());
        let err = load_scenario(f.path()).unwrap_err();
        assert!(
            matches!(err, Error::Validation(ref m) if m.contains("trials")),
            "{err}"
        );

        let mut v = serde_json::to_value(Scenario::preset("fig2").unwrap()).unwrap();
        v["colour"] = serde_json::json!("blue");
        let f = write_json(&v.to_string());
        let err = load_scenario(f.path()).unwrap_err();
        assert!(
            matches!(err, Error::Parse { ref message, .. } if message.contains("colour")),
            "{err}"
        );

        let f = write_json("{\n  \"figure_id\": \"fig2\",\n  \"n_r\": [2, \n}");
        let err = load_scenario(f.path()).unwrap_err();
        assert!(
            matches!(err, Error::Parse { ref message, .. } if message.contains("line 4")),
            "{err}"
        );

        let err = load_scenario(Path::new("/nonexistent/scenario.json")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn validation_names_the_violated_field() {
        let base = Scenario::preset("fig6").unwrap();
        type Mutation = Box<dyn Fn(&mut Scenario)>;
        let cases: Vec<(Mutation, &str)> = vec![
            (Box::new(|s| s.n_r.clear()), "n_r"),
            (Box::new(|s| s.n_r = vec![1]), "n_r"),
            (Box::new(|s| s.delta_alpha = vec![0.5]), "delta_alpha"),
            (
                Box::new(|s| s.mean_powers.re = vec![1.0, 2.0]),
                "mean_powers.re",
            ),
            (
                Box::new(|s| s.power_grid_db = vec![10.0, 5.0]),
                "power_grid_db",
            ),
            (Box::new(|s| s.trials = 5000), "trials"),
            (Box::new(|s| s.k_re = -1.0), "k_re"),
            (Box::new(|s| s.schemes = Some(vec![])), "schemes"),
        ];
        for (mutate, field) in cases {
            let mut s = base.clone();
            mutate(&mut s);
            let err = s.validate().unwrap_err().to_string();
            assert!(err.contains(field), "{field}: {err}");
        }
    }
}
