//! Resolving `--preset` / `--model` into something the commands can run.

use std::fs;
use std::path::Path;

use nk_flow_core::evolution::{EvolutionState, FlowModel, SpatialGradients};
use nk_flow_core::heisenberg::{self, HeisenbergParams};
use nk_flow_core::reduction::ReducedData;

use crate::error::{AppError, AppResult};
use crate::formats::ModelFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Heisenberg,
}

/// A resolved model.
#[derive(Clone, Debug)]
pub enum Source {
    /// The left-invariant family on the Heisenberg group.
    Heisenberg(HeisenbergParams),
    /// A user-supplied initial value problem; `injected` records whether the
    /// file carried non-zero spatial gradients.
    Flow { model: FlowModel<SpatialGradients>, initial: EvolutionState, injected: bool },
    /// A single level of reduced data.
    Reduced(ReducedData),
}

impl Source {
    pub fn resolve(preset: Option<Preset>, model: Option<&Path>, c: f64, s0: f64) -> AppResult<Source> {
        match (preset, model) {
            (Some(_), Some(_)) => Err(AppError::Usage("--preset and --model are mutually exclusive".into())),
            (None, None) => Err(AppError::Usage("one of --preset or --model is required".into())),
            (Some(Preset::Heisenberg), None) => Ok(Source::Heisenberg(HeisenbergParams::new(c, s0)?)),
            (None, Some(path)) => Source::from_file(path),
        }
    }

    pub fn from_file(path: &Path) -> AppResult<Source> {
        let text = fs::read_to_string(path)?;
        Source::from_json(&text)
    }

    pub fn from_json(text: &str) -> AppResult<Source> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| AppError::Model(format!("not a model or reduced-data file: {e}")))?;
        match file {
            ModelFile::Flow(m) => {
                let frame3 = m.frame3.to_coframe()?;
                let initial = m.initial_state(&frame3)?;
                let gradients: SpatialGradients = m.gradients.unwrap_or_default().into();
                let injected = gradients != SpatialGradients::default();
                let model = FlowModel::with_oracle(frame3, &initial, m.periods_integral, gradients)?;
                Ok(Source::Flow { model, initial, injected })
            }
            ModelFile::Reduced(r) => Ok(Source::Reduced(r.to_reduced()?)),
        }
    }

    /// Initial level `s₀`.
    pub fn s0(&self) -> f64 {
        match self {
            Source::Heisenberg(p) => p.s0,
            Source::Flow { initial, .. } => initial.s,
            Source::Reduced(d) => d.s,
        }
    }

    /// The Heisenberg preset as a flow: fixed frame, invariant data.
    pub fn as_flow(&self) -> AppResult<(FlowModel<SpatialGradients>, EvolutionState)> {
        match self {
            Source::Heisenberg(p) => {
                let (m, st) = heisenberg::initial_flow(p)?;
                let model = FlowModel::with_oracle(m.frame3, &st, m.periods_integral, SpatialGradients::default())?;
                Ok((model, st))
            }
            Source::Flow { model, initial, .. } => Ok((model.clone(), initial.clone())),
            Source::Reduced(_) => Err(AppError::Usage("reduced-data files describe a single level and cannot be evolved".into())),
        }
    }
}
