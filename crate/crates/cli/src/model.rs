//! Resolves `--model` arguments into a queue model.
//!
//! Each value is a TOML file path, a bare family name or `key=value`
//! pairs. Files are read first; everything else overrides them.

use mg1tail_core::{ModelSpec, QueueModel};

use crate::error::CliError;

pub fn resolve_spec(values: &[String]) -> Result<ModelSpec, CliError> {
    let mut file = ModelSpec::default();
    let mut inline = ModelSpec::default();
    for v in values {
        if v.contains('=') {
            inline = inline.overlay(&ModelSpec::from_pairs([v.as_str()])?);
        } else if is_family(v) {
            inline.set("family", v)?;
        } else {
            let text = std::fs::read_to_string(v)
                .map_err(|e| CliError::Config(format!("cannot read model file `{v}`: {e}")))?;
            file = file.overlay(&ModelSpec::from_toml(&text)?);
        }
    }
    Ok(file.overlay(&inline))
}

pub fn load(values: Option<&[String]>) -> Result<QueueModel, CliError> {
    let values = values
        .filter(|v| !v.is_empty())
        .ok_or_else(|| CliError::Config("--model is required".into()))?;
    Ok(QueueModel::new(resolve_spec(values)?.build()?)?)
}

fn is_family(s: &str) -> bool {
    matches!(
        s.to_ascii_lowercase().as_str(),
        "pareto" | "weibull" | "lognormal"
    )
}
