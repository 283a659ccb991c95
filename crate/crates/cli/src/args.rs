use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use dcoal::{BoundedMeasure, MParams};
use serde::Serialize;
use serde_json::{json, Value};

fn measure(s: &str) -> Result<BoundedMeasure, dcoal::Error> {
    s.parse()
}

/// The pair `(Λ₀, Λ₁)`, given directly or through `ν₀ = x⁻¹Λ₀`,
/// `ν₁ = x⁻²Λ₁`. Omitted measures are zero.
#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    /// Λ₀, the rate measure of mergers into the distinguished block.
    #[arg(long, value_parser = measure, conflicts_with_all = ["nu0", "nu1"])]
    pub lambda0: Option<BoundedMeasure>,
    /// Λ₁, the rate measure of mergers among ordinary blocks.
    #[arg(long, value_parser = measure, conflicts_with_all = ["nu0", "nu1"])]
    pub lambda1: Option<BoundedMeasure>,
    /// ν₀, the immigration jump intensity (finite, not charging 0).
    #[arg(long, value_parser = measure)]
    pub nu0: Option<BoundedMeasure>,
    /// ν₁, the reproduction jump intensity (finite, not charging 0).
    #[arg(long, value_parser = measure)]
    pub nu1: Option<BoundedMeasure>,
}

impl MeasureArgs {
    fn uses_nu(&self) -> bool {
        self.nu0.is_some() || self.nu1.is_some()
    }

    pub fn params(&self) -> Result<MParams> {
        let or_zero = |m: &Option<BoundedMeasure>| m.clone().unwrap_or_default();
        Ok(if self.uses_nu() {
            MParams::from_nu(&or_zero(&self.nu0), &or_zero(&self.nu1))?
        } else {
            MParams::new(or_zero(&self.lambda0), or_zero(&self.lambda1))
        })
    }

    /// Finite `(ν₀, ν₁)`.
    pub fn intensities(&self) -> Result<(BoundedMeasure, BoundedMeasure)> {
        if self.uses_nu() {
            let or_zero = |m: &Option<BoundedMeasure>| m.clone().unwrap_or_default();
            return Ok((or_zero(&self.nu0), or_zero(&self.nu1)));
        }
        let p = self.params()?;
        Ok((p.nu0()?.finite("nu0 = Lambda0(dx)/x")?, p.nu1()?.finite("nu1 = Lambda1(dx)/x^2")?))
    }

    /// The measures as given plus the resolved `(Λ₀, Λ₁)`.
    pub fn describe(&self) -> Value {
        let text = |m: &Option<BoundedMeasure>| m.as_ref().map(ToString::to_string);
        let resolved = self.params().ok();
        json!({
            "lambda0": text(&self.lambda0),
            "lambda1": text(&self.lambda1),
            "nu0": text(&self.nu0),
            "nu1": text(&self.nu1),
            "resolved_lambda0": resolved.as_ref().map(|p| p.lambda0.to_string()),
            "resolved_lambda1": resolved.as_ref().map(|p| p.lambda1.to_string()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}
