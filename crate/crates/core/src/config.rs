//! Model specification as read from a TOML file or key=value pairs.

use serde::{Deserialize, Serialize};

use crate::dist::{Family, IntegratedTailModel};
use crate::error::{Error, Result};

/// `family` plus the parameters that apply to it. Pareto uses `alpha` and
/// `scale` (`beta` is accepted as an alias for the scale); Weibull and
/// lognormal use `alpha` and `beta`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: Option<Family>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub scale: Option<f64>,
}

impl ModelSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    /// Parses whitespace- or comma-separated `key=value` pairs.
    pub fn from_pairs<'a, I: IntoIterator<Item = &'a str>>(items: I) -> Result<Self> {
        let mut spec = ModelSpec::default();
        for item in items {
            for pair in item.split([',', ' ']).filter(|s| !s.is_empty()) {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("expected key=value, got `{pair}`")))?;
                spec.set(k.trim(), v.trim())?;
            }
        }
        Ok(spec)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{key}` must be a number, got `{value}`")))
        };
        match key {
            "family" => {
                self.family = Some(match value.to_ascii_lowercase().as_str() {
                    "pareto" => Family::Pareto,
                    "weibull" => Family::Weibull,
                    "lognormal" => Family::Lognormal,
                    other => return Err(Error::Config(format!("unknown family `{other}`"))),
                })
            }
            "alpha" | "α" => self.alpha = Some(num()?),
            "beta" | "β" => self.beta = Some(num()?),
            "scale" | "b" => self.scale = Some(num()?),
            other => return Err(Error::Config(format!("unknown model key `{other}`"))),
        }
        Ok(())
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: &ModelSpec) -> Self {
        self.family = other.family.or(self.family);
        self.alpha = other.alpha.or(self.alpha);
        self.beta = other.beta.or(self.beta);
        self.scale = other.scale.or(self.scale);
        self
    }

    pub fn build(&self) -> Result<IntegratedTailModel> {
        let family = self
            .family
            .ok_or_else(|| Error::Config("model family is missing".into()))?;
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::Config(format!("{family} model needs `{key}`")))
        };
        let alpha = need(self.alpha, "alpha")?;
        match family {
            Family::Pareto => {
                let scale = need(self.scale.or(self.beta), "scale")?;
                IntegratedTailModel::pareto(alpha, scale)
            }
            Family::Weibull => IntegratedTailModel::weibull(alpha, need(self.beta, "beta")?),
            Family::Lognormal => IntegratedTailModel::lognormal(alpha, need(self.beta, "beta")?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_pairs_agree() {
        let a = ModelSpec::from_toml("family = \"weibull\"\nalpha = 0.5\nbeta = 1.0\n").unwrap();
        let b = ModelSpec::from_pairs(["family=weibull", "alpha=0.5,beta=1"]).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.build().unwrap(),
            IntegratedTailModel::weibull(0.5, 1.0).unwrap()
        );
    }

    #[test]
    fn overlay_and_errors() {
        let file = ModelSpec::from_pairs(["family=pareto alpha=3 scale=1"]).unwrap();
        let flags = ModelSpec::from_pairs(["alpha=4"]).unwrap();
        let m = file.overlay(&flags).build().unwrap();
        assert_eq!(m, IntegratedTailModel::pareto(4.0, 1.0).unwrap());
        assert!(ModelSpec::from_toml("family = \"gamma\"").is_err());
        assert!(ModelSpec::from_pairs(["alpha"]).is_err());
        assert!(ModelSpec::default().build().is_err());
        assert!(ModelSpec::from_pairs(["family=lognormal alpha=0"])
            .unwrap()
            .build()
            .is_err());
    }
}
